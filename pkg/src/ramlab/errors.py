"""Exception hierarchy shared by all ramlab modules."""


class RamlabError(Exception):
    """Base class; ``reason`` is a short machine-readable tag used in reports."""

    reason = "error"

    def __init__(self, message="", **details):
        super().__init__(message)
        self.details = details


class RankMismatch(RamlabError):
    reason = "rank-mismatch"


class InfiniteValue(RamlabError):
    reason = "infinite-input"


class GroupConstraintError(RamlabError):
    reason = "group-constraint"


class ModelMismatch(RamlabError):
    reason = "model-mismatch"


class InsufficientPrecision(RamlabError):
    reason = "insufficient-precision"


class PreconditionError(RamlabError):
    reason = "precondition"


class NotAPthPower(RamlabError):
    reason = "not-a-pth-power"


class SquareRootUnavailable(NotAPthPower):
    reason = "square-root-unavailable"


class MultipleRoot(RamlabError):
    reason = "multiple-root"


class ApproximantsExhausted(RamlabError):
    reason = "approximants-exhausted"


class AmbientExhausted(ApproximantsExhausted):
    reason = "ambient-precision-exhausted"


class ContradictoryConstraints(RamlabError):
    reason = "contradictory-constraints"


class UnsupportedSpec(RamlabError):
    reason = "unsupported-spec"


class InconsistentData(RamlabError):
    reason = "inconsistent-declared-data"


class ShapeViolation(RamlabError):
    reason = "shape-violation"


class GuardViolation(RamlabError):
    reason = "guard-violation"


class ParseError(RamlabError):
    reason = "parse-error"
