"""Exception types shared across modules."""

from __future__ import annotations


class CoarsekitError(Exception):
    """Base class for all toolkit errors."""


class InputError(CoarsekitError):
    """Malformed user input (bad schema, unknown fixture, bad flag value)."""


class MetricViolation(InputError):
    def __init__(self, p, q, s=None, reason="triangle"):
        self.p, self.q, self.s, self.reason = p, q, s, reason
        if reason == "triangle":
            msg = f"triangle inequality fails: d({p},{q}) > d({p},{s}) + d({s},{q})"
        else:
            msg = f"metric violation ({reason}) at ({p},{q})"
        super().__init__(msg)


class DisconnectedGraph(InputError):
    pass


class SourceMismatch(CoarsekitError):
    """Certificate chaining failed: inner source is not the outer target."""


class ScaleTooSmall(CoarsekitError):
    def __init__(self, cert_r, required):
        self.cert_r, self.required = cert_r, required
        super().__init__(f"certificate scale {cert_r} below required {required}")


class UnmappedPoint(CoarsekitError):
    pass


class NotAnExpansion(CoarsekitError):
    def __init__(self, pair, expected, actual):
        self.pair, self.expected, self.actual = pair, expected, actual
        super().__init__(
            f"map does not scale distances uniformly at pair {pair}: "
            f"expected {expected}, got {actual}"
        )


class ImageEscapesSpace(CoarsekitError):
    pass


class PreconditionFailed(CoarsekitError):
    def __init__(self, which, measured, required):
        self.which, self.measured, self.required = which, measured, required
        super().__init__(f"precondition {which} failed: measured {measured}, required {required}")


class StrategyFailed(CoarsekitError):
    def __init__(self, reason):
        self.reason = reason
        super().__init__(reason)


class TooLarge(CoarsekitError):
    pass


class SessionFinished(CoarsekitError):
    pass


class LipschitzTooLarge(CoarsekitError):
    def __init__(self, measured, bound):
        self.measured, self.bound = measured, bound
        super().__init__(f"measured Lipschitz constant {measured} exceeds {bound}")


class MultiplicityBoundViolated(CoarsekitError):
    def __init__(self, measured, bound):
        self.measured, self.bound = measured, bound
        super().__init__(
            f"cover multiplicity {measured} exceeds doubling bound {bound}; "
            "the doubling certificate's scale grid was insufficient"
        )


class InvalidInput(CoarsekitError):
    pass


class WeightAxiomViolated(CoarsekitError):
    def __init__(self, axiom, detail=""):
        self.axiom = axiom
        super().__init__(f"weight axiom ({axiom}) violated{': ' + detail if detail else ''}")


class PartConditionViolated(CoarsekitError):
    def __init__(self, part, condition, detail=""):
        self.part, self.condition = part, condition
        super().__init__(
            f"feature map for part {part} violates ({condition})"
            f"{': ' + detail if detail else ''}"
        )


class ConsistencyError(CoarsekitError):
    """Internal invariant broke; indicates a bug, not bad input."""
