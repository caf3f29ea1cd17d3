"""Exception hierarchy.

Every error carries an ``exit_code`` so the CLI can map failures onto the
documented code families: 2 I/O, 3 data validation, 4 numeric failure.
"""


class PixnormError(Exception):
    exit_code = 3


class IoError(PixnormError, OSError):
    exit_code = 2


class DataError(PixnormError, ValueError):
    exit_code = 3


class NumericError(PixnormError, ArithmeticError):
    exit_code = 4


# dataset
class MissingLabelColumn(DataError):
    pass


class UnknownColumn(DataError):
    pass


class NonNumericCell(DataError):
    def __init__(self, row: int, column: str, value: str):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(f"non-numeric cell {value!r} at row {row}, column {column!r}")


class MissingCell(DataError):
    def __init__(self, row: int, column: str):
        self.row = row
        self.column = column
        super().__init__(f"missing cell at row {row}, column {column!r} (use impute_mean to fill)")


class InvalidLabel(DataError):
    def __init__(self, row: int, value: str):
        self.row = row
        self.value = value
        super().__init__(f"cannot parse label {value!r} at row {row} as 0/1")


class EmptyAfterFilter(DataError):
    pass


class EmptyDataset(DataError):
    pass


# normcodec / imageio
class IntervalMismatch(DataError):
    pass


class BadMagic(DataError):
    pass


class UnsupportedMaxval(DataError):
    pass


class TruncatedPixelData(DataError):
    pass


# mlp / evaluation
class DimensionMismatch(DataError):
    pass


class EmptyTrainingSet(DataError):
    pass


class NonFiniteLoss(NumericError):
    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace


class LengthMismatch(DataError):
    pass


class ShapeMismatch(DataError):
    pass


class SingleClassInput(DataError):
    pass


class TooFewRows(DataError):
    pass


# bench
class InsufficientRepetitions(DataError):
    pass
