"""Exception types."""


class VybeError(Exception):
    """Base class for errors raised by this package."""


class OutOfWindow(VybeError):
    """A result would live above the truncation degree of its carrier."""

    def __init__(self, level: int, max_degree: int, carrier: str = ""):
        self.level = level
        self.max_degree = max_degree
        self.carrier = carrier
        where = f" of {carrier}" if carrier else ""
        super().__init__(f"level {level} exceeds the window 0..{max_degree}{where}")


class CarrierMismatch(VybeError):
    def __init__(self, expected: str, got: str):
        self.expected = expected
        self.got = got
        super().__init__(f"carrier mismatch: expected {expected}, got {got}")


class LieAlgebraError(VybeError):
    """Structure constants or invariant form violate a Lie algebra axiom."""


class ConstructionError(VybeError):
    """Inputs do not satisfy the preconditions of a construction."""


class NotSkewsymmetric(VybeError):
    pass


class NotHomogeneous(VybeError):
    pass


class HypothesisViolated(VybeError):
    """A structural precondition (e.g. quasi-primary level one) fails."""
