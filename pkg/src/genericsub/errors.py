"""Exception types raised across the engine."""

from __future__ import annotations


class EngineError(Exception):
    """Base class for every error raised by the package."""


class DivisionByZero(EngineError, ZeroDivisionError):
    pass


class FieldSpecError(EngineError, ValueError):
    pass


class RingSpecError(EngineError, ValueError):
    pass


class NotIndependentBasis(EngineError, ValueError):
    pass


class IndependenceError(EngineError, ValueError):
    """A scalar tuple used by G_lambda or f_lambda,i is dependent over Frac(R)."""


class FormulaSyntaxError(EngineError, ValueError):
    def __init__(self, message: str, position: int, expected: tuple[str, ...] = (), text: str = ""):
        super().__init__(message)
        self.message = message
        self.position = position
        self.expected = tuple(expected)
        self.text = text

    def diagnostic(self) -> str:
        """Message plus the offending line with a caret under the error column."""
        if not self.text:
            return f"{self.message} at position {self.position}"
        caret = " " * self.position + "^"
        exp = ""
        if self.expected:
            exp = "; expected one of: " + ", ".join(self.expected)
        return f"syntax error at position {self.position}: {self.message}{exp}\n  {self.text}\n  {caret}"


class OrderNotAvailable(FormulaSyntaxError):
    """An order atom was used under an unordered configuration."""


class QuantifierPresent(EngineError, ValueError):
    pass


class ResourceLimit(EngineError, RuntimeError):
    pass


class DimensionMismatch(EngineError, ValueError):
    pass


class RankMismatch(EngineError, ValueError):
    pass


class NotGClassified(EngineError, ValueError):
    pass


class ArityMismatch(EngineError, ValueError):
    pass


class MultiVariable(EngineError, ValueError):
    pass


class NotClosed(EngineError, ValueError):
    pass


class UnboundConstant(EngineError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else "unbound constant"


class UnboundVariable(EngineError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unbound variable"


class UnsupportedBaseAtom(EngineError, ValueError):
    pass


class NoWitness(EngineError, LookupError):
    pass


class CNotIndependent(EngineError, ValueError):
    pass


class ConfigError(EngineError, ValueError):
    pass
