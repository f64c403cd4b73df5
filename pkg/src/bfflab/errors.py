"""Exception hierarchy shared by all bfflab modules."""

from __future__ import annotations


class BffError(Exception):
    """Base class for domain errors raised by this package."""


class InvalidTerm(BffError):
    """A term failed rank validation; carries the issue list."""

    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("; ".join(str(i) for i in self.issues))


class FuelExhausted(BffError):
    """Evaluation ran out of fuel before producing a value."""


class NormCapExceeded(BffError):
    def __init__(self, x: int, cap: int):
        self.x = x
        self.cap = cap
        super().__init__(f"norm argument {x} exceeds cap {cap}")


class NotRegular(BffError):
    """Witness-term generation requires a regular polynomial."""


class WitnessUnsupported(BffError):
    """Witness terms are defined for polynomials over one function variable."""


class SearchSpaceTooLarge(BffError):
    def __init__(self, estimate: int, cap: int):
        self.estimate = estimate
        self.cap = cap
        super().__init__(f"search space ~{estimate} exceeds cap {cap}")


class BoundViolation(BffError):
    def __init__(self, step, value: int, bound: int):
        self.step = step
        self.value = value
        self.bound = bound
        super().__init__(f"bound violated at step {step}: value {value}, bound {bound}")


class NonTermination(BffError):
    """The recursion clock failed to fire within the configured hard cap."""


class SequenceError(BffError):
    """Base for sequence-code errors."""


class IndexOutOfRange(SequenceError):
    pass


class ElementTooWide(SequenceError):
    pass


class SexprError(BffError):
    """Malformed s-expression input."""


class MachineParseError(BffError):
    """Machine description failed to parse; carries per-line messages."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("\n".join(self.problems))


class MalformedOracleInput(BffError):
    """Strict-mode error for non-numeral content on an oracle input tape."""
