"""Exception hierarchy shared by every stage of the pipeline."""
from __future__ import annotations


class MinisynthError(Exception):
    """Base class for all errors raised by minisynth."""


class SortError(MinisynthError):
    """A term was built from operands of the wrong sort or arity."""


class LexError(MinisynthError):
    def __init__(self, message: str, span):
        super().__init__(f"{span}: {message}")
        self.message = message
        self.span = span


class ParseError(MinisynthError):
    def __init__(self, message: str, span, expected: str | None = None, found: str | None = None):
        super().__init__(f"{span}: {message}")
        self.message = message
        self.span = span
        self.expected = expected
        self.found = found


class TypeCheckError(MinisynthError):
    """Raised with the complete list of type errors found in a model."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("\n".join(str(e) for e in self.errors))


class ScriptError(MinisynthError):
    """A SYNTH-LIB or SyGuS script violates its well-formedness rules."""


class SignatureMismatch(MinisynthError):
    pass


class EmitError(MinisynthError):
    pass


class UnboundSymbol(MinisynthError):
    pass


class UnsupportedSort(MinisynthError):
    pass


class SexprError(MinisynthError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"offset {offset}: {message}")
        self.message = message
        self.offset = offset


class SolverError(MinisynthError):
    pass


class SolverNotFound(SolverError):
    pass


class ParseFailure(SolverError):
    """Solver output could not be understood."""
