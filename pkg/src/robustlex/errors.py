"""Exception hierarchy.

Each family maps onto one CLI exit code: configuration problems exit with 2,
bad input data with 3 and numerical failures with 4.
"""


class RobustLexError(Exception):
    exit_code = 1


class ConfigError(RobustLexError, ValueError):
    exit_code = 2


class DataError(RobustLexError, ValueError):
    exit_code = 3


class NumericError(RobustLexError, ArithmeticError):
    exit_code = 4


class MalformedInput(DataError):
    pass


class EmptyInput(DataError):
    pass


class NegativeCount(DataError):
    pass


class DuplicateLabel(DataError):
    pass


class RaggedRow(DataError):
    pass


class ZeroMarginal(DataError):
    def __init__(self, axis, index, label=None):
        self.axis = axis
        self.index = index
        self.label = label
        name = f" ({label!r})" if label is not None else ""
        super().__init__(f"{axis} {index}{name} has a zero marginal sum")


class ItemSetMismatch(DataError):
    pass


class UnknownLabel(DataError):
    pass


class AxisOutOfRange(ConfigError):
    pass


class UnitCountTooSmall(ConfigError):
    pass


class ConvergenceFailure(NumericError):
    pass
