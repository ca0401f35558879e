"""Exception types raised by the toolkit.

Every module raises subclasses of CreditBoostError so callers (and the CLI)
can catch one base class and still branch on the condition.
"""


class CreditBoostError(Exception):
    """Base class for all toolkit errors."""


# dataset
class MissingColumn(CreditBoostError):
    pass


class UnparseableNumeric(CreditBoostError):
    def __init__(self, row: int, column: str, cell: str):
        super().__init__(f"cannot parse {cell!r} as numeric at row {row}, column {column!r}")
        self.row = row
        self.column = column
        self.cell = cell


class UnknownLabelValue(CreditBoostError):
    pass


class DegenerateClass(CreditBoostError):
    pass


class MissingTimeValue(CreditBoostError):
    pass


# encoding
class NotCategorical(CreditBoostError):
    pass


class SingleClassDataset(CreditBoostError):
    pass


# sampling
class NonNumericFeature(CreditBoostError):
    pass


class MissingInMinority(CreditBoostError):
    pass


class TooFewMinority(CreditBoostError):
    pass


# booster
class UnknownFeature(CreditBoostError):
    pass


class CorruptModelFile(CreditBoostError):
    pass


class VersionMismatch(CreditBoostError):
    pass


# validation
class FoldTooSmall(CreditBoostError):
    pass


class InvalidDelta(CreditBoostError):
    pass


# metrics
class LengthMismatch(CreditBoostError):
    pass


class UndefinedPrecision(CreditBoostError):
    pass


class UndefinedRecall(CreditBoostError):
    pass


class InvalidBinCount(CreditBoostError):
    pass


# explain
class EmptyBackground(CreditBoostError):
    pass


class TooManyFeatures(CreditBoostError):
    pass
