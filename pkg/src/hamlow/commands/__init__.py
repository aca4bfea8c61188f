"""hamlow CLI commands."""
