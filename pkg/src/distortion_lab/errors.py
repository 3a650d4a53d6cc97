"""Exception types shared across the package."""


class DistortionLabError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParams(DistortionLabError):
    """Generator or CLI parameters are out of range or inconsistent."""


class UnknownPoint(DistortionLabError):
    """A placement refers to a point id the metric does not define."""


class UnknownCandidate(DistortionLabError):
    """An ordering operation was asked about a candidate not in the order."""


class MetricViolation(DistortionLabError):
    """Base class for metric-axiom violations; carries the offending points."""

    def __init__(self, *points: int):
        self.points = points
        super().__init__(f"{type(self).__name__}{points}")


class NegativeDistance(MetricViolation):
    pass


class AsymmetryViolation(MetricViolation):
    pass


class IdentityViolation(MetricViolation):
    pass


class TriangleViolation(MetricViolation):
    pass


class DisconnectedGraph(DistortionLabError):
    """Shortest-path closure was requested for a disconnected graph."""


class NoMatchingCandidate(DistortionLabError):
    """No candidate admits a perfect matching; indicates an implementation bug."""


class CycleDetected(DistortionLabError):
    """A chain of unanimous improvements revisited a candidate (impossible
    under strict orders; indicates an implementation bug)."""


class IndecisiveRule(DistortionLabError):
    """A two-candidate promoted election returned a third candidate."""

    def __init__(self, u: int, w: int, winner: int):
        self.pair = (u, w)
        self.winner = winner
        super().__init__(f"rule returned c{winner + 1} for pair (c{u + 1}, c{w + 1})")


class UnsupportedComposition(DistortionLabError):
    """A randomized first stage was combined with a second-stage rule that
    depends on representative identities; computing the exact outcome would
    require enumerating the product of per-group supports."""


class MismatchedRuleClass(DistortionLabError):
    """A generated instance was evaluated against a mechanism whose in-group
    rule differs from the rule its construction was tailored to."""


class GeneratorClaimError(DistortionLabError):
    """A generated instance failed its own construction-time claim checks."""
