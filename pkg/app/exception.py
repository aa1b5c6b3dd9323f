"""Exceptions for the biomarker discovery toolkit.

Every error raised by the toolkit derives from `BiomarkerError`, which carries a
machine-parsable `code` and the process `exit_code` used by the CLI.
"""


class BiomarkerError(Exception):
    """Base exception for the toolkit."""

    code: str = "E_ALGORITHM"
    """The machine-parsable error code."""

    exit_code: int = 3
    """The exit status the CLI uses for this error."""


class InvalidParameterError(BiomarkerError):
    """Exception raised when a threshold or hyperparameter is out of range."""

    code = "E_USAGE"
    exit_code = 1


class DataFormatError(BiomarkerError):
    """Exception raised when an input table cannot be parsed.

    The optional coordinates are 1-based line and field numbers of the offending cell.
    """

    code = "E_DATA"
    exit_code = 2

    def __init__(self, message: str, row: int | None = None, column: int | None = None):
        """Initialize the error.

        Args:
            message (str): The human readable detail.
            row (int | None): The 1-based line number of the offending cell.
            column (int | None): The 1-based field number of the offending cell.
        """
        self.row = row
        self.column = column
        if row is not None and column is not None:
            message = f"{message} (line {row}, column {column})"
        elif row is not None:
            message = f"{message} (line {row})"
        super().__init__(message)


class DataValidationError(BiomarkerError):
    """Exception raised when data violates a structural invariant."""

    code = "E_DATA"
    exit_code = 2


class AlgorithmError(BiomarkerError):
    """Exception raised when an algorithm cannot produce a result."""


class DegenerateStatisticError(AlgorithmError):
    """Exception raised when a test statistic is undefined for the given samples."""


class ConvergenceError(AlgorithmError):
    """Exception raised when an iterative solver exhausts its iteration budget."""


class SelectionError(AlgorithmError):
    """Exception raised when a feature selector cannot find a subset."""


class FoldFailureError(AlgorithmError):
    """Exception raised when a cross-validation fold fails."""

    def __init__(self, fold: int, reason: str):
        """Initialize the error.

        Args:
            fold (int): The index of the failed fold.
            reason (str): Why the fold failed.
        """
        self.fold = fold
        self.reason = reason
        super().__init__(f"fold {fold} failed: {reason}")
