"""Exception hierarchy shared by every module.

Each error class carries a ``category`` used by the CLI to pick an exit
code: usage -> 1, data -> 2, numeric -> 3.
"""


class HypeIndexError(Exception):
    """Base class for all package-specific errors."""

    category = "data"


class UsageError(HypeIndexError):
    """Invalid parameters or misconfiguration."""

    category = "usage"


class DataValidationError(HypeIndexError):
    """Input data violates a contract (bad value, duplicate, gap)."""

    category = "data"


class SchemaError(DataValidationError):
    """Input source is missing required columns or fields."""


class AlignmentError(DataValidationError):
    """Series or panels do not share the required dates or entities."""


class NumericalError(HypeIndexError):
    """A computation is degenerate or numerically undefined."""

    category = "numeric"
