"""Exception hierarchy.

Every error carries a short machine-readable ``code`` so that reports and the
command line front end can surface it without string matching.
"""


class CRExtError(Exception):
    code = "ERROR"

    def __init__(self, message="", **details):
        super().__init__(message)
        self.details = details


class ParseError(CRExtError):
    code = "PARSE_ERROR"


class SchemaError(CRExtError):
    code = "SCHEMA_ERROR"

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}", path=path)
        self.path = path


class HypothesisError(CRExtError):
    """A theorem hypothesis (nondegeneracy, eigenvalue count) does not hold."""

    code = "HYPOTHESIS_FAIL"


class ADegenerateError(HypothesisError):
    code = "A_DEGENERATE"


class InsufficientPositiveError(HypothesisError):
    code = "INSUFFICIENT_POSITIVE"


class NumericalError(CRExtError):
    code = "NUMERICAL_FAILURE"


class SamplingInconclusive(NumericalError):
    code = "SAMPLING_INCONCLUSIVE"


class ResolutionTooCoarse(NumericalError):
    code = "RESOLUTION_TOO_COARSE"


class GridBudgetExceeded(NumericalError):
    code = "GRID_BUDGET_EXCEEDED"


class NotCRError(CRExtError):
    code = "NOT_CR"

    def __init__(self, message="", witness=None, layer=None, residual=None):
        super().__init__(message, layer=layer, residual=residual)
        self.witness = witness
        self.layer = layer
        self.residual = residual


class OrderOverflow(CRExtError):
    code = "ORDER_OVERFLOW"


class EmptyDisc(NumericalError):
    code = "EMPTY_DISC"


class CurveNotClosed(NumericalError):
    code = "CURVE_NOT_CLOSED"


class SingularityHit(NumericalError):
    code = "SINGULARITY_HIT"


class TransversalityFail(NumericalError):
    code = "TRANSVERSALITY_FAIL"


class EmptyLeaf(NumericalError):
    """The annular piece of a rational leaf inside the side is empty."""

    code = "EMPTY_Y_T"


class BranchError(NumericalError):
    code = "BRANCH_ERROR"


class NodeInsufficient(NumericalError):
    code = "NODE_INSUFFICIENT"


class VerdictForbids(HypothesisError):
    code = "VERDICT_FORBIDS"


class ContinuationStuck(NumericalError):
    code = "CONTINUATION_STUCK"

    def __init__(self, message="", last_good=None):
        super().__init__(message, last_good=last_good)
        self.last_good = last_good


class DataDomainError(NumericalError):
    code = "DATA_DOMAIN"
