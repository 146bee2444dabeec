"""
Domain errors
"""


class Curv4Error(Exception):
    """Base class for every error raised by the curvature workbench"""

    code = "curv4_error"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code


class NonSymmetricInput(Curv4Error):
    code = "non_symmetric_input"


class DegenerateMetric(Curv4Error):
    code = "degenerate_metric"


class BasisNotOrthogonal(Curv4Error):
    code = "basis_not_orthogonal"


class DualityMismatch(Curv4Error):
    code = "duality_mismatch"


class TraceNotZero(Curv4Error):
    code = "trace_not_zero"


class NotTraceFree(Curv4Error):
    code = "not_trace_free"


class UnknownModel(Curv4Error):
    code = "unknown_model"


class PointOutOfDomain(Curv4Error):
    code = "point_out_of_domain"


class CompactModel(Curv4Error):
    code = "compact_model"


class GridTooCoarse(Curv4Error):
    code = "grid_too_coarse"


class MetricNotPositiveDefinite(Curv4Error):
    code = "metric_not_positive_definite"


class MissingPotential(Curv4Error):
    code = "missing_potential"


class ChartFormatError(Curv4Error):
    code = "chart_format_error"


class InvalidRunConfig(Curv4Error):
    code = "invalid_run_config"
