"""Exception hierarchy shared by every module."""


class AsymnetError(Exception):
    """Base class for all library errors."""


class ContractError(AsymnetError, ValueError):
    """A caller violated an operation's precondition."""


class StructureError(AsymnetError):
    """A graph is malformed (cycle, missing node, disconnected cover)."""


class AcyclicityError(StructureError):
    """An operation would create, or found, a directed cycle."""


class ModelError(AsymnetError):
    """A model is outside the class an operation supports."""


class ResourceError(AsymnetError):
    """A brute-force table would exceed the configured size cap."""


class InconsistentEvidenceError(AsymnetError):
    """Observed evidence has probability zero under the model."""


class UndefinedLikelihoodError(AsymnetError):
    """P(evidence | hypothesis) requested for a zero-probability hypothesis."""


class UndefinedConditionalError(AsymnetError):
    """A conditional probability was requested for a zero-probability context."""


class ZeroPriorError(AsymnetError):
    """A within-edge hypothesis prior is zero, so priors cannot be recovered."""


class InconsistentSimnetError(AsymnetError):
    """Local networks of a similarity network contradict each other."""


class ParseError(AsymnetError):
    """A model document is not well-formed."""


class SchemaError(AsymnetError):
    """A model document is well-formed but does not match the format."""


class ModelValidationError(AsymnetError):
    """A parsed model violates semantic invariants.

    The offending report is available as ``report``.
    """

    def __init__(self, report):
        self.report = report
        super().__init__(str(report))


class ZeroContextWarning(RuntimeWarning):
    """A table row was filled uniformly because its context has probability zero."""
