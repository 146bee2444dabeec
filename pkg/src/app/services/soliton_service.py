"""
Soliton catalog service - identity checks on the closed-form model solitons
"""
import logging
from typing import Callable, List, Optional, Sequence

import numpy as np

from app.core.config import settings
from app.core.exceptions import CompactModel
from app.core.numeric import Precision, Scalar, as_scalar, fmt, identity, is_exact, max_abs
from app.models.chart import Axis, MetricChart
from app.models.soliton import PointData, SolitonModel
from app.models.tensors import CurvDecomp, Duality, det
from app.repositories import ModelRepository
from app.schemas.reports import AsymptoticsReport, IdentityId, IdentityReport
from app.services.curv_algebra import block_inner, kn_square_block, weyl_decompose

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES = 100
DEFAULT_SPACING = 0.05

_LEM1_6_NOTE = "Rm*Rm taken as 2(Rm^2 + Rm#) on so(4); Delta_f Rm = 0 on every catalog model"


# ---------------------------------------------------------------- pointwise residuals (frame components)


def _half(precision: Precision) -> Scalar:
    return as_scalar("1/2", precision)


def _trace(matrix: np.ndarray) -> Scalar:
    return matrix.diagonal().sum()


def soliton_equation(data: PointData) -> Scalar:
    """Ric + Hess f - g/2"""
    precision = data.ricci.precision
    return max_abs(data.ricci.entries + data.hessian.entries - identity(4, precision) * _half(precision))


def _grad_sq(data: PointData) -> Scalar:
    return (data.gradient * data.gradient).sum()


def scalar_trace_identity(data: PointData) -> Scalar:
    """R + Delta f = 2"""
    return abs(data.scalar + _trace(data.hessian.entries) - 2)


def scalar_gradient_identity(data: PointData) -> Scalar:
    """1/2 grad R = Ric(grad f); R is constant on every catalog model"""
    return max_abs(np.dot(data.ricci.entries, data.gradient))


def scalar_drift_identity(data: PointData) -> Scalar:
    """Delta_f R = R - 2|Ric|^2 with Delta_f R = 0"""
    return abs(data.scalar - 2 * data.ricci.norm_sq())


def potential_identity(data: PointData) -> Scalar:
    """R + |grad f|^2 = f"""
    return abs(data.scalar + _grad_sq(data) - data.potential)


def ricci_drift_identity(data: PointData) -> Scalar:
    """Delta_f R_ij = R_ij - 2 R_ikjl R_kl with Delta_f Ric = 0"""
    contraction = np.tensordot(data.curvature.components, data.ricci.entries, axes=([1, 3], [0, 1]))
    return max_abs(data.ricci.entries - contraction * 2)


_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def _so4_structure_constants() -> np.ndarray:
    """c_abg with [E_a, E_b] = c_abg E_g for the unit bivectors E_ij, i < j"""
    basis = np.zeros((6, 4, 4), dtype=np.int64)
    for a, (i, j) in enumerate(_PAIRS):
        basis[a, i, j], basis[a, j, i] = 1, -1
    bracket = np.einsum("apq,bqr->abpr", basis, basis) - np.einsum("bpq,aqr->abpr", basis, basis)
    return -np.einsum("abpq,gqp->abg", bracket, basis) // 2


_STRUCTURE = _so4_structure_constants()


def curvature_operator_so4(components: np.ndarray) -> np.ndarray:
    """6x6 matrix R_(ij)(kl) of the curvature operator on unit bivectors"""
    return np.array([[components[i, j, k, l] for k, l in _PAIRS] for i, j in _PAIRS])


def sharp(operator: np.ndarray) -> np.ndarray:
    """Lie algebra square A#_ab = 1/2 c_agd c_bez A_ge A_dz on so(4)"""
    step = np.tensordot(_STRUCTURE, operator, axes=([1], [0]))
    step = np.tensordot(step, operator, axes=([1], [0]))
    return np.tensordot(step, _STRUCTURE, axes=([1, 2], [1, 2])) / 2


def curvature_drift_identity(data: PointData) -> Scalar:
    """Delta_f Rm = Rm - 2(Rm^2 + Rm#) with Delta_f Rm = 0, as operators on bivectors"""
    operator = curvature_operator_so4(data.curvature.components)
    return max_abs(operator - (np.dot(operator, operator) + sharp(operator)) * 2)


def curvature_gradient_identity(data: PointData) -> Scalar:
    """With grad Ric = 0 the commutator identities reduce to R_ijkl f_l = 0"""
    return max_abs(np.tensordot(data.curvature.components, data.gradient, axes=([3], [0])))


def drift_potential_identity(data: PointData) -> Scalar:
    """Delta_f f = 2 - f"""
    drift = _trace(data.hessian.entries) - _grad_sq(data)
    return abs(drift - (2 - data.potential))


_POINTWISE: tuple[tuple[IdentityId, Callable[[PointData], Scalar], str], ...] = (
    (IdentityId.SOLITON_EQ, soliton_equation, ""),
    (IdentityId.LEM1_1, scalar_trace_identity, ""),
    (IdentityId.LEM1_2, scalar_gradient_identity, ""),
    (IdentityId.LEM1_3, scalar_drift_identity, ""),
    (IdentityId.LEM1_4, potential_identity, ""),
    (IdentityId.LEM1_5, ricci_drift_identity, ""),
    (IdentityId.LEM1_6, curvature_drift_identity, _LEM1_6_NOTE),
    (IdentityId.LEM1_7, curvature_gradient_identity, ""),
    (IdentityId.DRIFT_POTENTIAL, drift_potential_identity, ""),
)


def _tolerance(precision: Precision) -> float:
    return 0.0 if precision is Precision.RATIONAL else settings.TOL_ABS * 1e-2


def _identity_report(identity_id, model, residuals: Sequence[Scalar], precision: Precision, note="") -> IdentityReport:
    worst = max(residuals)
    tolerance = _tolerance(precision)
    return IdentityReport(
        identity_id=identity_id,
        model=model,
        residual=float(residuals[0]),
        max_residual=float(worst),
        points_checked=len(residuals),
        tolerance=tolerance,
        passed=bool(worst <= tolerance),
        exact=all(is_exact(r) for r in residuals),
        residual_text=fmt(worst),
        note=note,
    )


class SolitonCatalogService:
    """Pointwise data and identity checks for the model solitons"""

    def __init__(self, repository: ModelRepository):
        self.repository = repository

    def list_models(self) -> List[SolitonModel]:
        return self.repository.list_models()

    def get_model(self, name: str) -> SolitonModel:
        return self.repository.get_model(name)

    def model_data(self, name: str, point, precision: Precision = Precision.FLOATING) -> PointData:
        """Exact frame data of `name` at chart coordinates `point`"""
        return self.get_model(name).data(point, precision)

    @staticmethod
    def base_point(model: SolitonModel) -> tuple[float, ...]:
        return tuple(0.5 * (low + high) for low, high in model.sample_box)

    def sample_points(self, name: str, count: int = DEFAULT_SAMPLES, seed: int = 0) -> list[tuple[float, ...]]:
        """Base point followed by `count - 1` uniform draws from the model's sample box"""
        model = self.get_model(name)
        rng = np.random.default_rng(seed)
        low = np.array([box[0] for box in model.sample_box])
        high = np.array([box[1] for box in model.sample_box])
        draws = rng.uniform(low, high, (max(count - 1, 0), 4))
        return [self.base_point(model)] + [tuple(float(v) for v in row) for row in draws]

    def decompose(self, name: str, point=None, precision: Precision = Precision.FLOATING) -> CurvDecomp:
        model = self.get_model(name)
        data = model.data(point if point is not None else self.base_point(model), precision)
        return weyl_decompose(data.curvature, data.metric)

    def verify_hamilton_identities(
        self,
        name: str,
        points: Optional[Sequence] = None,
        precision: Precision = Precision.FLOATING,
    ) -> List[IdentityReport]:
        """Soliton equation, the drift identities (1)-(7) and Delta_f f = 2 - f at every point"""
        model = self.get_model(name)
        points = list(points) if points is not None else self.sample_points(name)
        bundles = [model.data(point, precision) for point in points]
        reports = [
            _identity_report(identity_id, model.name.value, [check(data) for data in bundles], precision, note)
            for identity_id, check, note in _POINTWISE
        ]
        failed = [report.identity_id.value for report in reports if not report.passed]
        if failed:
            logger.warning("%s: identities above tolerance: %s", model.name.value, ", ".join(failed))
        logger.debug("%s: %d identities over %d points", model.name.value, len(reports), len(points))
        return reports

    def weitzenbock_residual(
        self, name: str, duality: Duality | str, precision: Precision = Precision.FLOATING
    ) -> IdentityReport:
        """0 = 2|W|^2 - 36 det W - <(Ric0 . Ric0)^+/-, W^+/-> for parallel Weyl curvature"""
        duality = Duality.parse(duality)
        d = self.decompose(name, precision=precision)
        weyl = d.weyl(duality)
        kn = kn_square_block(d.traceless_ricci, duality, d.orientation)
        value = 2 * block_inner(weyl, weyl) - 36 * det(weyl.matrix) - block_inner(kn, weyl)
        identity_id = IdentityId.WEITZENBOCK_PLUS if duality is Duality.SELF_DUAL else IdentityId.WEITZENBOCK_MINUS
        return _identity_report(identity_id, self.get_model(name).name.value, [abs(value)], precision)

    def einstein_weitzenbock_residual(
        self, name: str, duality: Duality | str, precision: Precision = Precision.FLOATING
    ) -> Optional[IdentityReport]:
        """0 = R|W|^2 - 36 det W on Einstein models; None when Ric0 does not vanish"""
        duality = Duality.parse(duality)
        d = self.decompose(name, precision=precision)
        if max_abs(d.traceless_ricci.entries) > _tolerance(precision):
            return None
        weyl = d.weyl(duality)
        value = d.scalar * block_inner(weyl, weyl) - 36 * det(weyl.matrix)
        identity_id = (
            IdentityId.EINSTEIN_WEITZENBOCK_PLUS
            if duality is Duality.SELF_DUAL
            else IdentityId.EINSTEIN_WEITZENBOCK_MINUS
        )
        return _identity_report(identity_id, self.get_model(name).name.value, [abs(value)], precision)

    def verify_model(
        self,
        name: str,
        precision: Precision = Precision.FLOATING,
        count: int = DEFAULT_SAMPLES,
        seed: int = 0,
    ) -> List[IdentityReport]:
        """Full identity suite used by `verify`"""
        reports = self.verify_hamilton_identities(name, self.sample_points(name, count, seed), precision)
        for duality in Duality:
            reports.append(self.weitzenbock_residual(name, duality, precision))
        for duality in Duality:
            einstein = self.einstein_weitzenbock_residual(name, duality, precision)
            if einstein is not None:
                reports.append(einstein)
        return reports

    def potential_asymptotics(
        self,
        name: str,
        radii: Optional[Sequence[float]] = None,
        c_grid: Optional[Sequence[float]] = None,
        r0: Optional[float] = None,
        offsets: int = 33,
    ) -> AsymptoticsReport:
        """Smallest grid value c with (r - c)^2/4 <= f <= (r + c)^2/4 for all sampled r >= r0.

        r0 defaults to max(1, diameter of the compact factor).

        Distance from the minimum set of f splits into a part s along the compact
        factor (0 <= s <= its diameter) and a flat part sqrt(r^2 - s^2), on which
        f = |y|^2/4 + min f.
        """
        model = self.get_model(name)
        if model.compact:
            raise CompactModel(f"{model.name.value} is compact; f has no asymptotics")
        if r0 is None:
            r0 = max(1.0, model.compact_factor_diameter)
        radii = np.asarray(radii if radii is not None else np.linspace(r0, 50.0, 200), dtype=np.float64)
        radii = radii[radii >= r0]
        c_grid = np.asarray(c_grid if c_grid is not None else np.linspace(0.0, 10.0, 2001), dtype=np.float64)

        fraction = np.linspace(0.0, 1.0, offsets)
        reach = np.minimum(radii, model.compact_factor_diameter)
        s = reach[:, None] * fraction[None, :]
        r = np.broadcast_to(radii[:, None], s.shape)
        flat_sq = np.maximum(r * r - s * s, 0.0)
        f = flat_sq / 4.0 + model.potential_minimum

        c = c_grid[:, None, None]
        slack = 1e-12 * (1.0 + f)
        lower = (r - c) ** 2 / 4.0 <= f + slack
        upper = f <= (r + c) ** 2 / 4.0 + slack
        holds = np.all(lower & upper, axis=(1, 2))
        admissible = np.flatnonzero(holds)
        c_found = float(c_grid[admissible[0]]) if admissible.size else None
        if c_found is None:
            logger.warning("%s: no c on the grid bounds f by (r +/- c)^2/4", model.name.value)
        return AsymptoticsReport(
            model=model.name.value,
            c_found=c_found,
            holds=c_found is not None,
            r0=float(r0),
            radii_checked=int(radii.size),
            c_grid_max=float(c_grid.max()),
        )

    def export_chart(
        self,
        name: str,
        axes: Optional[Sequence[tuple[float, float, int]]] = None,
        center: Optional[Sequence[float]] = None,
        spacing: float = DEFAULT_SPACING,
        count: int = 5,
    ) -> MetricChart:
        """Sample the model's coordinate metric and potential on a uniform grid.

        Without explicit `axes` the grid has `count` nodes per axis, spacing
        `spacing`, centred on `center` (default: the model's base point).
        """
        model = self.get_model(name)
        if axes is None:
            center = self.base_point(model) if center is None else tuple(center)
            half = 0.5 * spacing * (count - 1)
            axes = [(c - half, c + half, count) for c in center]
        axes = tuple(Axis(float(low), float(high), int(n)) for low, high, n in axes)
        coords = np.stack(np.meshgrid(*(axis.nodes for axis in axes), indexing="ij"), axis=-1)
        if not all(model.contains(point) for point in (coords.reshape(-1, 4)[0], coords.reshape(-1, 4)[-1])):
            logger.warning("%s: chart corners leave the coordinate domain", model.name.value)
        return MetricChart(axes, model.coordinate_metric(coords), model.coordinate_potential(coords))
