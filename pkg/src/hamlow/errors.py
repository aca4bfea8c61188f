"""Exception hierarchy for hamlow.

Every error carries the process exit code the CLI reports for it.
"""


class HamlowError(Exception):
    """Base class for all hamlow errors."""

    exit_code = 1


class InvalidInstanceError(HamlowError):
    """A Hamiltonian or circuit document is malformed or violates its invariants."""


class InvalidParameterError(HamlowError):
    """A numeric parameter lies outside its admissible range."""


class DegenerateInstanceError(HamlowError):
    """The instance has no interaction weight (L = 0)."""


class EmptyOverlapError(HamlowError):
    """A filter was asked to post-select onto a subspace the state does not overlap."""


class ScaleExceededError(HamlowError):
    """The requested dense computation is above the configured oracle cap."""

    exit_code = 3

    def __init__(self, n: int, cap: int, what: str = "oracle"):
        self.n = n
        self.cap = cap
        super().__init__(f"{what} scale exceeded: {n} qubits > cap {cap}")


class ValidationFailure(HamlowError):
    """A proven bound or identity was contradicted by the exact oracle."""

    exit_code = 2
