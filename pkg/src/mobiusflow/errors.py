"""Error taxonomy shared by the library and the CLI.

Exit-code mapping used by the CLI: usage 2, domain 3, capacity/precision 4,
anything else 5.
"""


class MobiusflowError(Exception):
    """Base class for library errors."""


class DomainError(MobiusflowError):
    """Input outside the mathematical domain of an operation."""


class CapacityError(MobiusflowError):
    """Requested computation exceeds a representable-size or memory budget."""


class PrecisionError(MobiusflowError):
    """Requested accuracy cannot be certified from the given inputs."""
