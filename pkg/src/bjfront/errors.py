class BJFrontError(Exception):
    """Base class for all package errors."""


class NearDegenerate(BJFrontError):
    pass


class NoConvergence(BJFrontError):
    pass


class ZeroJump(BJFrontError):
    pass


class RHViolation(BJFrontError):
    pass


class StateOutOfRange(BJFrontError):
    pass


class WrongSide(BJFrontError):
    pass


class UnsupportedPair(BJFrontError):
    pass


class HypothesisViolated(BJFrontError):
    def __init__(self, failed):
        super().__init__(", ".join(failed))
        self.failed = list(failed)


class InconsistentChain(BJFrontError):
    pass


class EventStorm(BJFrontError):
    pass


class InfeasibleEpsilon(BJFrontError):
    def __init__(self, msg, violations=()):
        super().__init__(msg)
        self.violations = list(violations)


class RootBracketFailure(BJFrontError):
    pass


class MeshInfeasible(BJFrontError):
    pass


class UntaggedFront(BJFrontError):
    pass


class RuleGap(BJFrontError):
    pass


class LedgerViolation(BJFrontError):
    def __init__(self, msg, diff=None):
        super().__init__(msg)
        self.diff = diff or {}


class ThresholdTooSmall(BJFrontError):
    pass
