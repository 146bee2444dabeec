import logging

import numpy as np
import pytest

from app.core.config import settings
from app.core.exceptions import GridTooCoarse, MetricNotPositiveDefinite, MissingPotential, NonSymmetricInput
from app.models.chart import Axis, MetricChart
from app.models.tensors import Duality
from app.services.chart_geometry import (
    check_prop41,
    cotton_norm,
    cotton_tensor,
    curvature_from_chart,
    drift_laplacian,
    fit_growth,
)
from app.services.curv_algebra import spectrum3

S2XR2_CENTER = (1.0, 0.5, 0.3, 0.2)
S4_CENTER = (0.3, 0.2, 0.1, 0.4)
S3XR_CENTER = (1.0, 1.2, 0.5, 0.4)


def _center_error(catalog_service, name, center, spacing, count) -> float:
    """Max frame-curvature error at the central node of a chart around `center`"""
    chart = catalog_service.export_chart(name, center=center, spacing=spacing, count=count)
    curvature = curvature_from_chart(chart)
    middle = (count - 1) // 2
    exact = catalog_service.model_data(name, center).curvature.components
    return float(np.max(np.abs(curvature.frame[(middle,) * 4] - exact)))


def _flat_chart(count=5, spacing=0.1) -> MetricChart:
    axes = [(-spacing * (count - 1) / 2, spacing * (count - 1) / 2, count)] * 4
    return MetricChart(axes, np.broadcast_to(np.eye(4), (count,) * 4 + (4, 4)))


def _conformal_chart(half_width: float, count: int) -> MetricChart:
    """g = e^{x0} delta, whose scalar curvature is -3/2 e^{-x0}"""
    axes = [(-half_width, half_width, count)] * 4
    x0 = np.linspace(-half_width, half_width, count)[:, None, None, None]
    conformal = np.broadcast_to(np.exp(x0), (count,) * 4)
    return MetricChart(axes, conformal[..., None, None] * np.eye(4))


def test_axis_needs_five_nodes():
    with pytest.raises(GridTooCoarse):
        Axis(0.0, 1.0, 4)


def test_chart_rejects_indefinite_metric():
    metric = np.broadcast_to(np.diag([1.0, 1.0, 1.0, -1.0]), (5, 5, 5, 5, 4, 4))
    with pytest.raises(MetricNotPositiveDefinite):
        MetricChart([(0.0, 1.0, 5)] * 4, metric)


def test_chart_rejects_asymmetric_metric():
    metric = np.array(np.broadcast_to(np.eye(4), (5, 5, 5, 5, 4, 4)))
    metric[..., 0, 1] = 0.5
    with pytest.raises(NonSymmetricInput):
        MetricChart([(0.0, 1.0, 5)] * 4, metric)


def test_chart_margin_must_leave_interior():
    with pytest.raises(GridTooCoarse):
        MetricChart([(0.0, 1.0, 5)] * 4, np.broadcast_to(np.eye(4), (5, 5, 5, 5, 4, 4)), margin=3)


def test_chart_does_not_freeze_caller_array():
    metric = np.array(np.broadcast_to(np.eye(4), (5, 5, 5, 5, 4, 4)))
    MetricChart([(0.0, 1.0, 5)] * 4, metric)

    metric[0, 0, 0, 0, 0, 0] = 2.0


def test_flat_chart_has_zero_curvature():
    curvature = curvature_from_chart(_flat_chart())

    assert np.all(curvature.frame == 0.0)
    assert curvature.symmetry_residual == 0.0
    assert np.all(curvature.scalar == 0.0)


@pytest.mark.parametrize(
    "name, center",
    [("cylinder_s2xr2", S2XR2_CENTER), ("round_s4", S4_CENTER)],
)
def test_curvature_converges_at_second_order(catalog_service, name, center):
    """Halving the spacing divides the curvature error by about four."""
    coarse = _center_error(catalog_service, name, center, 0.1, 5)
    fine = _center_error(catalog_service, name, center, 0.05, 9)

    assert 3.4 <= coarse / fine <= 4.6


def test_s2xr2_weyl_spectrum_from_chart(catalog_service):
    chart = catalog_service.export_chart("cylinder_s2xr2", center=S2XR2_CENTER, spacing=0.01, count=5)
    curvature = curvature_from_chart(chart)
    d = curvature.decomposition_at((2, 2, 2, 2))

    for duality in Duality:
        spectrum = [float(w) for w in spectrum3(d.weyl(duality)).as_tuple()]
        assert spectrum == pytest.approx([-1 / 12, -1 / 12, 1 / 6], abs=1e-4)
    assert curvature.weyl_spectra("plus").shape == (1, 3)


def test_cp2_chart_matches_closed_form(catalog_service):
    """The affine Fubini-Study chart reproduces the Kahler curvature data."""
    chart = catalog_service.export_chart("cp2_fubini_study", center=(0.2, 0.1, -0.1, 0.3), spacing=0.02, count=5)
    curvature = curvature_from_chart(chart)
    d = curvature.decomposition_at((2, 2, 2, 2))

    assert float(d.scalar) == pytest.approx(2.0, abs=1e-3)
    assert np.max(np.abs(np.asarray(d.traceless_ricci.entries, dtype=float))) < 1e-3
    plus = [float(w) for w in spectrum3(d.weyl_plus).as_tuple()]
    minus = [float(w) for w in spectrum3(d.weyl_minus).as_tuple()]
    assert plus == pytest.approx([-1 / 6, -1 / 6, 1 / 3], abs=1e-3)
    assert minus == pytest.approx([0.0, 0.0, 0.0], abs=1e-3)
    assert curvature.symmetry_residual < 1e-3


def test_s3xr_chart_matches_closed_form(catalog_service):
    chart = catalog_service.export_chart("cylinder_s3xr", center=S3XR_CENTER, spacing=0.02, count=5)
    curvature = curvature_from_chart(chart)
    exact = catalog_service.model_data("cylinder_s3xr", S3XR_CENTER).curvature.components

    assert float(np.max(np.abs(curvature.frame[(2, 2, 2, 2)] - exact))) < 1e-3
    assert float(curvature.scalar[(2, 2, 2, 2)]) == pytest.approx(1.5, abs=1e-3)


def test_cotton_vanishes_on_product(catalog_service):
    chart = catalog_service.export_chart("cylinder_s2xr2", center=S2XR2_CENTER, spacing=0.05, count=9)
    norm = cotton_norm(chart)

    assert cotton_tensor(chart).shape == chart.shape + (4, 4, 4)
    assert float(np.max(norm[chart.interior_mask()])) < 1e-2


@pytest.mark.parametrize(
    "name, center",
    [("round_s4", S4_CENTER), ("cylinder_s3xr", S3XR_CENTER)],
)
def test_cotton_vanishes_on_parallel_ricci_models(catalog_service, name, center):
    chart = catalog_service.export_chart(name, center=center, spacing=0.02, count=9)
    norm = cotton_norm(chart)

    assert float(np.max(norm[chart.interior_mask()])) < 1e-2


def test_cotton_needs_margin_two():
    chart = MetricChart([(0.0, 1.0, 5)] * 4, np.broadcast_to(np.eye(4), (5, 5, 5, 5, 4, 4)), margin=1)
    with pytest.raises(GridTooCoarse):
        cotton_tensor(chart)


def test_drift_laplacian_of_potential(catalog_service):
    """Delta_f f = 2 - f on the Gaussian shrinker."""
    chart = catalog_service.export_chart("gaussian_r4", center=(0.5, 0.2, -0.3, 0.1), spacing=0.1, count=7)
    residual = drift_laplacian(chart, chart.potential) - (2.0 - chart.potential)

    assert float(np.max(np.abs(residual[chart.interior_mask()]))) < 1e-10


def test_drift_laplacian_of_scalar_curvature_on_s2xr2(catalog_service):
    """Delta_f R = 0 where R is constant."""
    chart = catalog_service.export_chart("cylinder_s2xr2", center=S2XR2_CENTER, spacing=0.02, count=9)
    curvature = curvature_from_chart(chart)
    drift = drift_laplacian(chart, curvature.scalar, curvature)

    assert float(np.max(np.abs(drift[chart.interior_mask()]))) < 1e-2


def test_drift_laplacian_needs_potential():
    chart = _flat_chart()
    with pytest.raises(MissingPotential):
        drift_laplacian(chart, np.zeros(chart.shape))


def test_prop41_ratio_on_s2xr2(catalog_service):
    """|Rm| / |Ric| = (1/2) / (sqrt(2)/2) where Ric is parallel."""
    chart = catalog_service.export_chart("cylinder_s2xr2", center=(1.0, 0.5, 1.0, 1.0), spacing=0.05, count=5)
    report = check_prop41(chart)

    assert report.nodes_excluded == 0
    assert report.nodes_included == 1
    assert report.sup_ratio == pytest.approx(1 / np.sqrt(2), abs=1e-2)


def test_prop41_excludes_critical_points(catalog_service, caplog):
    chart = catalog_service.export_chart("gaussian_r4", spacing=0.1, count=5)
    with caplog.at_level(logging.WARNING, logger="app.services.chart_geometry"):
        report = check_prop41(chart)

    assert report.nodes_excluded == 1
    assert report.nodes_included == 0
    assert "excluded" in caplog.text


def test_growth_fit_on_gaussian(catalog_service):
    chart = catalog_service.export_chart("gaussian_r4", center=(0.5, 0.5, 0.5, 0.5), spacing=0.2, count=7)
    fit = fit_growth(chart)

    assert fit.feasible is True
    assert fit.epsilon_hat == pytest.approx(0.0, abs=1e-9)
    assert fit.a_hat == pytest.approx(1e-9)
    assert fit.nodes == 81


def test_growth_fit_on_s2xr2(catalog_service):
    chart = catalog_service.export_chart("cylinder_s2xr2", center=(1.0, 0.5, 0.5, 0.5), spacing=0.1, count=7)
    fit = fit_growth(chart)

    assert fit.feasible is True
    assert fit.epsilon_hat == pytest.approx(0.0, abs=1e-9)
    assert fit.a_hat == pytest.approx(1.0, abs=1e-2)
    assert fit.support_fraction == 1.0


def test_growth_fit_recovers_linear_growth():
    """On a conformally flat chart with R = f/2 the fitted eps is 1/2."""
    chart = _conformal_chart(0.3, 7)
    scalar = curvature_from_chart(chart).scalar
    fit = fit_growth(chart.with_potential(2.0 * scalar))

    assert fit.feasible is True
    assert fit.epsilon_hat == pytest.approx(0.5, abs=0.02)


def test_growth_fit_never_drops_when_nodes_are_added():
    small = _conformal_chart(0.3, 7)
    large = _conformal_chart(0.5, 11)
    potential = np.array(2.0 * curvature_from_chart(large).scalar)
    far_node = (8, 5, 5, 5)
    potential[far_node] = 1000.0 * np.max(np.abs(potential))

    eps_small = fit_growth(small.with_potential(2.0 * curvature_from_chart(small).scalar)).epsilon_hat
    eps_large = fit_growth(large.with_potential(potential)).epsilon_hat

    assert eps_small == pytest.approx(0.5, abs=0.02)
    assert eps_large >= eps_small - 1e-12


def test_growth_fit_ignores_potential_gaps_below_separation(catalog_service):
    """Pairs closer than GROWTH_SEPARATION in f do not contribute a slope."""
    chart = catalog_service.export_chart("cylinder_s2xr2", center=(1.0, 0.5, 0.5, 0.5), spacing=0.1, count=7)
    f = chart.potential[chart.interior_mask()]

    assert float(f.max() - f.min()) < settings.GROWTH_SEPARATION
    assert fit_growth(chart).epsilon_hat == 0.0


def test_growth_fit_needs_potential():
    with pytest.raises(MissingPotential):
        fit_growth(_flat_chart())
