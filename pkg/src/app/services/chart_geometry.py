"""
Finite-difference curvature of coordinate metric grids.

All derivatives use second-order central stencils (np.roll shifts); nothing
one-sided is used, so values within a node or two of the boundary are garbage and
every report is restricted to the chart interior:

    curvature, Ricci, R             valid at margin 1
    Cotton, grad Ric, Delta_f R     valid at margin 2
"""
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from app.core.config import settings
from app.core.exceptions import GridTooCoarse, MissingPotential
from app.models.chart import MetricChart
from app.models.tensors import AlgCurvTensor, CurvDecomp, Duality, Spectrum3
from app.schemas.reports import GrowthFit, Prop41Report
from app.services.curv_algebra import (
    COTTON_COEFF,
    hodge_projectors,
    spectrum3,
    to_orthonormal_frame,
    weyl_decompose,
)

logger = logging.getLogger(__name__)

GRADIENT_FLOOR = 1e-8
SLOPE_CHUNK = 1 << 22


# ---------------------------------------------------------------- stencils


def _shift(u: np.ndarray, axis: int, step: int) -> np.ndarray:
    """u evaluated at node + step along `axis` (wraps at the boundary)"""
    return np.roll(u, -step, axis=axis)


def first_derivatives(u: np.ndarray, chart: MetricChart) -> np.ndarray:
    """d_a u with the derivative index inserted after the four grid axes"""
    parts = [
        (_shift(u, axis, 1) - _shift(u, axis, -1)) / (2.0 * h)
        for axis, h in enumerate(chart.spacings)
    ]
    return np.stack(parts, axis=4)


def second_derivatives(u: np.ndarray, chart: MetricChart) -> np.ndarray:
    """d_a d_b u (compact three-point and four-point cross stencils)"""
    h = chart.spacings
    out = np.empty(u.shape[:4] + (4, 4) + u.shape[4:], dtype=np.float64)
    for a in range(4):
        out[:, :, :, :, a, a] = (_shift(u, a, 1) - 2.0 * u + _shift(u, a, -1)) / (h[a] * h[a])
        for b in range(a + 1, 4):
            plus, minus = _shift(u, a, 1), _shift(u, a, -1)
            cross = (
                _shift(plus, b, 1) - _shift(plus, b, -1) - _shift(minus, b, 1) + _shift(minus, b, -1)
            ) / (4.0 * h[a] * h[b])
            out[:, :, :, :, a, b] = cross
            out[:, :, :, :, b, a] = cross
    return out


def project_curvature(components: np.ndarray) -> np.ndarray:
    """Nearest algebraic curvature tensor (batched): impose both antisymmetries and
    the pair symmetry, then remove the totally antisymmetric part
    """
    r = 0.5 * (components - np.einsum("...jikl->...ijkl", components))
    r = 0.5 * (r - np.einsum("...ijlk->...ijkl", r))
    r = 0.5 * (r + np.einsum("...klij->...ijkl", r))
    cyclic = r + np.einsum("...jkil->...ijkl", r) + np.einsum("...kijl->...ijkl", r)
    return r - cyclic / 3.0


def symmetry_defect(components: np.ndarray) -> np.ndarray:
    """Per-node max violation of the curvature symmetries"""
    checks = (
        components + np.einsum("...jikl->...ijkl", components),
        components + np.einsum("...ijlk->...ijkl", components),
        components - np.einsum("...klij->...ijkl", components),
        components + np.einsum("...jkil->...ijkl", components) + np.einsum("...kijl->...ijkl", components),
    )
    return np.max([np.max(np.abs(c), axis=(-4, -3, -2, -1)) for c in checks], axis=0)


# ---------------------------------------------------------------- chart curvature


@dataclass(frozen=True, eq=False)
class ChartCurvature:
    """Derived fields of one chart, computed lazily and cached"""
    chart: MetricChart

    @cached_property
    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.chart.metric)

    @cached_property
    def christoffel_first(self) -> np.ndarray:
        """Gamma_a,bc = 1/2 (d_b g_ac + d_c g_ab - d_a g_bc)"""
        dg = first_derivatives(self.chart.metric, self.chart)
        return 0.5 * (np.einsum("...bac->...abc", dg) + np.einsum("...cab->...abc", dg) - dg)

    @cached_property
    def christoffel(self) -> np.ndarray:
        """Gamma^i_bc"""
        return np.einsum("...ia,...abc->...ibc", self.inverse, self.christoffel_first)

    @cached_property
    def riemann(self) -> np.ndarray:
        """Coordinate R_ijkl from second derivatives of g and first-kind Christoffels"""
        dd = second_derivatives(self.chart.metric, self.chart)
        linear = 0.5 * (
            np.einsum("...kjil->...ijkl", dd)
            + np.einsum("...likj->...ijkl", dd)
            - np.einsum("...kilj->...ijkl", dd)
            - np.einsum("...ljik->...ijkl", dd)
        )
        gl, ginv = self.christoffel_first, self.inverse
        quadratic = np.einsum("...ab,...ail,...bkj->...ijkl", ginv, gl, gl, optimize=True) - np.einsum(
            "...ab,...aik,...blj->...ijkl", ginv, gl, gl, optimize=True
        )
        return linear + quadratic

    @cached_property
    def ricci(self) -> np.ndarray:
        """Coordinate Ric_jl = g^ik R_ijkl"""
        return np.einsum("...ik,...ijkl->...jl", self.inverse, self.riemann)

    @cached_property
    def scalar(self) -> np.ndarray:
        return np.einsum("...jl,...jl->...", self.inverse, self.ricci)

    @cached_property
    def frame_raw(self) -> np.ndarray:
        return to_orthonormal_frame(self.riemann, self.chart.metric)

    @cached_property
    def frame(self) -> np.ndarray:
        """Orthonormal-frame curvature projected onto algebraic curvature tensors"""
        return project_curvature(self.frame_raw)

    @cached_property
    def symmetry_residual(self) -> float:
        """Largest symmetry defect of the frame curvature before projection (interior)"""
        defect = symmetry_defect(self.frame_raw)
        return float(np.max(defect[self.chart.interior_mask(1)]))

    @cached_property
    def ricci_frame(self) -> np.ndarray:
        return np.einsum("...ijil->...jl", self.frame)

    @cached_property
    def operator(self) -> np.ndarray:
        """Lambda2 operator matrices (..., 6, 6)"""
        forms = hodge_projectors().forms
        return np.einsum("bij,...ijkl,akl->...ab", forms, self.frame, forms, optimize=True) / 8.0

    @cached_property
    def operator_norm(self) -> np.ndarray:
        """|Rm| in the operator Frobenius convention"""
        return np.sqrt(np.sum(self.operator * self.operator, axis=(-2, -1)))

    @cached_property
    def ricci_norm(self) -> np.ndarray:
        return np.sqrt(np.sum(self.ricci_frame * self.ricci_frame, axis=(-2, -1)))

    @cached_property
    def ricci_covariant(self) -> np.ndarray:
        """nabla_i R_jk = d_i R_jk - Gamma^m_ij R_mk - Gamma^m_ik R_jm"""
        gamma, ric = self.christoffel, self.ricci
        return (
            first_derivatives(ric, self.chart)
            - np.einsum("...mij,...mk->...ijk", gamma, ric)
            - np.einsum("...mik,...jm->...ijk", gamma, ric)
        )

    def interior(self) -> np.ndarray:
        return self.chart.interior_mask()

    def tensor_at(self, index: tuple[int, int, int, int]) -> AlgCurvTensor:
        return AlgCurvTensor(self.frame[tuple(index)])

    def decomposition_at(self, index: tuple[int, int, int, int]) -> CurvDecomp:
        return weyl_decompose(self.tensor_at(index))

    def weyl_spectra(self, duality: Duality | str = Duality.SELF_DUAL) -> np.ndarray:
        """Ascending W+/- spectra at interior nodes, shape (nodes, 3)"""
        duality = Duality.parse(duality)
        spectra = []
        for index in np.argwhere(self.interior()):
            spectrum: Spectrum3 = spectrum3(self.decomposition_at(tuple(index)).weyl(duality))
            spectra.append([float(w) for w in spectrum.as_tuple()])
        return np.array(spectra)


def curvature_from_chart(chart: MetricChart) -> ChartCurvature:
    """Per-node frame curvature, Ricci and R of a coordinate metric grid"""
    curvature = ChartCurvature(chart)
    residual = curvature.symmetry_residual
    logger.debug("chart %s: frame symmetry defect %.3e before projection", chart.shape, residual)
    return curvature


def _require_margin(chart: MetricChart, needed: int) -> None:
    if chart.margin < needed:
        raise GridTooCoarse(f"this quantity needs a chart margin of at least {needed}, got {chart.margin}")


def _require_potential(chart: MetricChart) -> np.ndarray:
    if chart.potential is None:
        raise MissingPotential("chart carries no potential samples")
    return chart.potential


def cotton_tensor(chart: MetricChart, curvature: Optional[ChartCurvature] = None) -> np.ndarray:
    """C_ijk = nabla_i R_jk - nabla_j R_ik - 1/6 (d_i R g_jk - d_j R g_ik), coordinate components"""
    _require_margin(chart, 2)
    curvature = curvature or ChartCurvature(chart)
    cov = curvature.ricci_covariant
    d_scalar = first_derivatives(curvature.scalar, chart)
    g = chart.metric
    coeff = float(COTTON_COEFF)
    return (
        cov
        - np.einsum("...jik->...ijk", cov)
        - coeff * (d_scalar[..., :, None, None] * g[..., None, :, :] - d_scalar[..., None, :, None] * g[..., :, None, :])
    )


def cotton_norm(chart: MetricChart, curvature: Optional[ChartCurvature] = None) -> np.ndarray:
    curvature = curvature or ChartCurvature(chart)
    c = cotton_tensor(chart, curvature)
    ginv = curvature.inverse
    norm_sq = np.einsum("...ia,...jb,...kc,...ijk,...abc->...", ginv, ginv, ginv, c, c, optimize=True)
    return np.sqrt(np.maximum(norm_sq, 0.0))


def _gradient_norm_sq(curvature: ChartCurvature, field: np.ndarray) -> np.ndarray:
    d = first_derivatives(field, curvature.chart)
    return np.einsum("...ij,...i,...j->...", curvature.inverse, d, d)


def drift_laplacian(
    chart: MetricChart, field: np.ndarray, curvature: Optional[ChartCurvature] = None
) -> np.ndarray:
    """Delta phi - <grad f, grad phi> with Delta phi = g^ij (d_i d_j phi - Gamma^k_ij d_k phi)"""
    f = _require_potential(chart)
    curvature = curvature or ChartCurvature(chart)
    field = np.asarray(field, dtype=np.float64)
    ginv = curvature.inverse
    d_phi = first_derivatives(field, chart)
    laplacian = np.einsum("...ij,...ij->...", ginv, second_derivatives(field, chart)) - np.einsum(
        "...ij,...kij,...k->...", ginv, curvature.christoffel, d_phi
    )
    drift = np.einsum("...ij,...i,...j->...", ginv, first_derivatives(f, chart), d_phi)
    return laplacian - drift


def check_prop41(chart: MetricChart, curvature: Optional[ChartCurvature] = None) -> Prop41Report:
    """Empirical sup of |Rm| / (|Ric| + |grad Ric| / |grad f|) over interior nodes with grad f != 0"""
    _require_potential(chart)
    _require_margin(chart, 2)
    curvature = curvature or ChartCurvature(chart)
    interior = chart.interior_mask()
    ginv = curvature.inverse
    cov = curvature.ricci_covariant
    grad_ric = np.sqrt(
        np.maximum(np.einsum("...ia,...jb,...kc,...ijk,...abc->...", ginv, ginv, ginv, cov, cov, optimize=True), 0.0)
    )
    grad_f = np.sqrt(np.maximum(_gradient_norm_sq(curvature, chart.potential), 0.0))

    included = interior & (grad_f > GRADIENT_FLOOR)
    excluded = int(np.count_nonzero(interior)) - int(np.count_nonzero(included))
    if excluded:
        logger.warning("prop41: %d interior nodes excluded where |grad f| vanishes", excluded)
    lhs = curvature.operator_norm[included]
    rhs_core = curvature.ricci_norm[included] + grad_ric[included] / grad_f[included]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(rhs_core > 0.0, lhs / np.where(rhs_core > 0.0, rhs_core, 1.0), np.where(lhs > 0.0, np.inf, 0.0))
    if ratio.size == 0:
        return Prop41Report(
            nodes_included=0, nodes_excluded=excluded, sup_ratio=0.0, min_ratio=0.0, lhs_max=0.0, rhs_core_min=0.0
        )
    return Prop41Report(
        nodes_included=int(ratio.size),
        nodes_excluded=excluded,
        sup_ratio=float(ratio.max()),
        min_ratio=float(ratio.min()),
        lhs_max=float(lhs.max()),
        rhs_core_min=float(rhs_core.min()),
    )


def _max_slope(scalar: np.ndarray, f: np.ndarray, separation: float, noise: float) -> float:
    """max of (R_j - R_i - noise) / (f_j - f_i) over node pairs with f_j - f_i >= separation, floored at 0"""
    best = 0.0
    rows = max(1, SLOPE_CHUNK // max(f.size, 1))
    for start in range(0, f.size, rows):
        gap = f[start:start + rows, None] - f[None, :]
        rise = scalar[start:start + rows, None] - scalar[None, :] - noise
        slopes = np.full(gap.shape, -np.inf)
        np.divide(rise, gap, out=slopes, where=gap >= separation)
        best = max(best, float(slopes.max()))
    return best


def fit_growth(chart: MetricChart, curvature: Optional[ChartCurvature] = None) -> GrowthFit:
    """Smallest eps in [0, 1) with R <= A + eps f, A = max(R - eps f), plus curvature envelopes.

    eps is the steepest rise of R against f between two interior nodes whose
    potentials differ by at least GROWTH_SEPARATION, less GROWTH_NOISE. It is a
    supremum over node pairs, so adding nodes never lowers it.
    """
    f_all = _require_potential(chart)
    curvature = curvature or ChartCurvature(chart)
    interior = chart.interior_mask()
    scalar = curvature.scalar[interior]
    f = f_all[interior]
    ric = curvature.ricci_norm[interior]
    rm = curvature.operator_norm[interior]
    grad_sq = _gradient_norm_sq(curvature, f_all)[interior]

    epsilon = _max_slope(scalar, f, settings.GROWTH_SEPARATION, settings.GROWTH_NOISE)
    feasible = epsilon < 1.0
    if not feasible:
        logger.warning("fit_growth: R rises with slope %.6g >= 1 in f on this chart", epsilon)
        epsilon = 1.0 - 1e-12
    a_hat = max(float(np.max(scalar - epsilon * f)), settings.GROWTH_A_FLOOR)

    envelope = np.maximum(ric, rm)
    if epsilon <= settings.TOL_EQ:
        c0, c1, c2 = float(envelope.max()), 0.0, 0.0
    else:
        f_min, f_max = float(f.min()), float(f.max())
        anchored = (f <= f_min + settings.GROWTH_BAND * (f_max - f_min)) | (f <= 0.0)
        c0 = float(envelope[anchored].max())
        positive = f > 0.0
        c1 = max(0.0, float(np.max((ric[positive] - c0) / (epsilon * f[positive]), initial=0.0)))
        c2 = max(0.0, float(np.max((rm[positive] - c0) / (epsilon * f[positive] ** 2), initial=0.0)))

    support = float(np.mean(np.sqrt(np.maximum(grad_sq, 0.0)) > GRADIENT_FLOOR))
    gradient_margin = float(np.min(grad_sq - ((1.0 - epsilon) * f - a_hat)))
    logger.debug("fit_growth: eps=%.6g A=%.6g feasible=%s", epsilon, a_hat, feasible)
    return GrowthFit(
        epsilon_hat=epsilon,
        a_hat=a_hat,
        c0_hat=max(c0, 0.0),
        c1_hat=c1,
        c2_hat=c2,
        feasible=feasible,
        support_fraction=support,
        gradient_margin=gradient_margin,
        nodes=int(scalar.size),
    )
