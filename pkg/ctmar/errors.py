class CtmarError(Exception):
    """Base class for ctmar errors."""

    exit_code: int = 3

    def __init__(self, message: str) -> None:
        super().__init__(message)


class ConfigError(CtmarError):
    """Raised when a run configuration is invalid or cannot be read."""
    exit_code = 1


class DataError(CtmarError):
    """Base class for problems with input data."""
    exit_code = 2


class DimensionMismatchError(DataError):
    """Raised when grids do not match each other or the geometry."""

    def __init__(self, what: str, expected: tuple[int, ...], actual: tuple[int, ...]) -> None:
        super().__init__(f"{what}: expected shape {expected}, got {actual}")
        self.expected = expected
        self.actual = actual


class UnitMismatchError(DataError):
    """Raised when a grid carries the wrong unit tag for an operation."""

    def __init__(self, what: str, expected: str, actual: str) -> None:
        super().__init__(f"{what}: expected unit '{expected}', got '{actual}'")
        self.expected = expected
        self.actual = actual


class InvalidInputError(DataError):
    """Raised when values violate an operation's preconditions."""
    pass


class SpectrumError(DataError):
    """Raised for unnormalized spectra or mismatched energy grids."""
    pass


class PeriodicityError(DataError):
    """Raised when periodic padding is requested on a geometry that is not a full turn."""
    pass


class NoMetalError(DataError):
    """Raised when a metal mask has no pixels and a metal-dependent result is requested."""
    pass


class UnpairedInputsError(DataError):
    """Raised when input directories do not pair up by basename."""

    def __init__(self, message: str, unpaired: list[str]) -> None:
        super().__init__(message)
        self.unpaired = unpaired


class GridFormatError(DataError):
    """Raised when a raw+JSON grid file pair cannot be read."""
    pass
