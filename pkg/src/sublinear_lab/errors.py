"""Exception hierarchy shared by every module of the package."""


class LabError(Exception):
    """Base class for all errors raised by sublinear_lab."""


class ModelError(LabError, ValueError):
    """Invalid model data (spaces, measures, random variables)."""


class NegativeWeight(ModelError):
    pass


class NotNormalized(ModelError):
    pass


class LengthMismatch(ModelError):
    pass


class SpaceMismatch(ModelError):
    pass


class ArityMismatch(LabError, ValueError):
    pass


class BudgetExceeded(LabError):
    """A dense tensor or an enumeration would exceed its configured cap."""


class SpaceTooLarge(BudgetExceeded):
    pass


class PreconditionViolated(LabError, ValueError):
    def __init__(self, hypothesis, message=""):
        self.hypothesis = hypothesis
        super().__init__(f"{hypothesis}: {message}" if message else hypothesis)


class HypothesisViolated(PreconditionViolated):
    pass


class PrNotNonnegative(PreconditionViolated):
    pass


class BadExponent(LabError, ValueError):
    pass


class BadEpsilon(LabError, ValueError):
    pass


class FormatError(LabError, ValueError):
    """Malformed model JSON, report JSONL or trajectory files."""


class ExprError(LabError, ValueError):
    pass


class ExprSyntaxError(ExprError):
    def __init__(self, offset, expected, text=""):
        self.offset = offset
        self.expected = expected
        msg = f"syntax error at offset {offset}: expected {expected}"
        if text:
            msg += f"\n  {text}\n  {' ' * offset}^"
        super().__init__(msg)


class UnknownIdentifier(ExprError):
    def __init__(self, name, offset):
        self.name = name
        self.offset = offset
        super().__init__(f"unknown identifier {name!r} at offset {offset}")


class ArityError(ExprError):
    def __init__(self, message, offset=None):
        self.offset = offset
        super().__init__(message if offset is None else f"{message} (offset {offset})")


class EvalError(ExprError):
    def __init__(self, node, reason):
        self.node = node
        self.reason = reason
        super().__init__(f"cannot evaluate {node}: {reason}")
