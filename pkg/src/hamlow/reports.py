"""Report envelopes and output sinks shared by the commands."""

import json
import threading
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, TextIO

from . import __version__

TOOL = "hamlow"


def envelope(command: str, config: Mapping[str, Any], results: Any) -> Dict[str, Any]:
    """Wrap command results with the tool version and the resolved run config."""
    return {
        "tool": TOOL,
        "version": __version__,
        "command": command,
        "config": dict(config),
        "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "results": results,
    }


def dumps(document: Any) -> str:
    return json.dumps(document, sort_keys=True, indent=2) + "\n"


def write_text(text: str, out_path: Optional[str]) -> Optional[Path]:
    """Write ``text`` to ``out_path``, creating parent directories. Returns the path."""
    if not out_path:
        return None
    path = Path(out_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


class JsonLinesSink:
    """Serialized JSON-lines writer; safe to call from several threads."""

    def __init__(self, stream: TextIO):
        self._stream = stream
        self._lock = threading.Lock()
        self.count = 0

    def write(self, record: Mapping[str, Any]) -> None:
        line = json.dumps(record, sort_keys=True)
        with self._lock:
            self._stream.write(line + "\n")
            self._stream.flush()
            self.count += 1
