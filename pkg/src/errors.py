"""
Exception hierarchy shared by every module.

Each class carries the process exit code the CLI uses when the error
escapes a command:
    1 - a mathematical negative (the object does not have the property asked about)
    2 - usage, parse or precondition errors
    3 - internal invariant violations
"""

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


class PDOError(ValueError):
    exit_code = EXIT_INTERNAL


# --- mathematical negatives ---

class MathematicalNegative(PDOError):
    exit_code = EXIT_NEGATIVE


class NotDifferential(MathematicalNegative):
    """The conjugate is not a differential operator of the requested order"""


class NotInRing(MathematicalNegative):
    pass


class DegenerateLambda(MathematicalNegative):
    pass


class SingularMinor(MathematicalNegative):
    pass


class MembershipFailed(MathematicalNegative):
    pass


class AnnihilationFailed(MathematicalNegative):
    pass


# --- usage and precondition errors ---

class UsageError(PDOError):
    exit_code = EXIT_USAGE


class ParseError(UsageError):
    def __init__(self, message: str, source: str = "", position: int = -1):
        self.source = source
        self.position = position
        if position >= 0:
            message = f"{message} at position {position}"
        super().__init__(message)

    def pointer(self) -> str:
        """Two-line rendering of the source with a caret under the failure"""
        if self.position < 0:
            return self.source
        return f"{self.source}\n{' ' * self.position}^"


class DimensionExceeded(UsageError):
    pass


class UnboundName(UsageError):
    pass


class DimensionMismatch(UsageError):
    pass


class IndexOutOfRange(UsageError):
    pass


class ZeroDivisor(UsageError):
    pass


class ZeroOperator(UsageError):
    pass


class NonCommutingOperators(UsageError):
    pass


class MalformedIdeal(UsageError):
    pass


class NonConstantQ(UsageError):
    pass


class NonConstantInput(UsageError):
    pass


class OrderTooHigh(UsageError):
    pass


class NegativeN(UsageError):
    pass


class TooWide(UsageError):
    pass


class ConfigError(UsageError):
    pass


# --- internal ---

class InvariantViolation(PDOError):
    exit_code = EXIT_INTERNAL
