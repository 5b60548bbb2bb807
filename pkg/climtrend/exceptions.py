from typing import List, Optional, Sequence


class ClimtrendError(Exception):
    """
    Base class for every error raised by the toolkit
    """
    exit_code: int = 2


class InputValidationError(ClimtrendError, ValueError):
    """Invalid values, parameters or combinations of inputs"""


class SampleSizeError(InputValidationError):
    """Too few (or too many) observations for the requested operation"""


class ConfigurationError(InputValidationError):
    """Bad config file entries or command-line flags"""


class FormatError(InputValidationError):
    """
    Malformed CSV input, located by line and optionally column
    """

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[str] = None):
        self.line = line
        self.column = column
        location = []
        if line is not None:
            location.append(f"line {line}")
        if column is not None:
            location.append(f"column {column!r}")
        super().__init__(f"{message} ({', '.join(location)})" if location else message)


class CoverageError(InputValidationError):
    """Required years are missing from an annual series"""

    def __init__(self, message: str, missing: Sequence[int]):
        self.missing: List[int] = sorted(missing)
        super().__init__(f"{message}: missing years {self.missing}")


class DegenerateError(ClimtrendError, ArithmeticError):
    """
    The statistic is undefined for this input (zero variance, all values tied)
    """
    exit_code = 3


class AllTiedError(DegenerateError):
    """Every value is tied; tau-b is undefined while tau-a is zero"""

    def __init__(self, message: str, tau_a: float = 0.0):
        self.tau_a = tau_a
        super().__init__(message)
