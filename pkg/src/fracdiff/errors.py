"""Exception types shared across the package.

Each maps to a stable process exit code in the CLI; library code raises
them directly and never calls sys.exit.
"""


class FracdiffError(Exception):
    """Base class for all package errors."""


class DomainError(FracdiffError):
    """A parameter or argument lies outside its admissible set."""


class ConvergenceError(FracdiffError):
    """An iterative procedure failed to converge."""


class BoundaryStallError(FracdiffError):
    """An optimizer stalled pinned against the constraint box."""


class InputFormatError(FracdiffError):
    """A data file or spec could not be read or parsed."""
