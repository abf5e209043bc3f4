"""Exception hierarchy. Every error carries a stable machine-readable code."""


class SamplerError(Exception):
    code = "E_INTERNAL"

    def to_json(self):
        return {"error": {"code": self.code, "message": str(self)}}


class ParseError(SamplerError):
    code = "E_PARSE"


class UsageError(SamplerError):
    code = "E_USAGE"


class BackendMismatchError(SamplerError):
    code = "E_BACKEND"


class OverflowGuardError(SamplerError):
    code = "E_OVERFLOW"


class NodeBoundError(SamplerError):
    """Node deviation ``sup |t_n - n|`` is not strictly below 1/4."""

    code = "E_NODES"


class AnchorNodeError(SamplerError):
    """``t_0 = 0`` where a recovery formula divides by the nodes."""

    code = "E_ANCHOR"


class MissingSamplesError(SamplerError):
    code = "E_SAMPLES"


class ZeroVectorError(SamplerError):
    code = "E_ZERO"


class DegenerateRatioError(SamplerError):
    code = "E_DEGENERATE"


class PreconditionError(SamplerError):
    code = "E_PRECONDITION"
