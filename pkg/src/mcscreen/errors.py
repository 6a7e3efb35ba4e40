"""Exception types raised across the package."""


class McScreenError(Exception):
    """Base class for all package errors."""


class DegenerateInput(McScreenError):
    """Input column has no usable spread (constant or near-constant)."""


class TooFewSamples(McScreenError):
    """Sample size too small for the requested basis or fold layout."""


class SingularGram(McScreenError):
    """A Gram matrix is numerically singular even after regularization."""


class InvalidSize(McScreenError):
    """Requested selection size is outside [1, p]."""


class InvalidDims(McScreenError):
    """Array dimensions inconsistent with the requested operation."""


class EmptyDataset(McScreenError):
    """Dataset has no rows or no predictor columns."""


class AllColumnsDegenerate(McScreenError):
    """Every predictor column failed scoring."""


class ParseError(McScreenError):
    """CSV structure problem, carries 1-based row/column location."""

    def __init__(self, message, row=None, col=None):
        super().__init__(message)
        self.row = row
        self.col = col


class MissingValue(ParseError):
    """Missing cell in the CSV body; no imputation is attempted."""


class NonNumericColumn(ParseError):
    """A body cell could not be parsed as a number."""
