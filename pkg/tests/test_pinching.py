import dataclasses
import logging
import math
from fractions import Fraction

import numpy as np
import pytest

from app.core.exceptions import InvalidRunConfig, NotTraceFree, TraceNotZero
from app.core.numeric import Precision
from app.models.tensors import AlgCurvTensor, Block3, BlockKind, Duality, Role, Spectrum3, SymBilinear4
from app.repositories.model_repository import space_form_curvature
from app.schemas.reports import ConditionId
from app.services.curv_algebra import kulkarni_nomizu, weyl_decompose
from app.services.pinching import (
    batched_kn_square,
    check_catino,
    check_catino_integral,
    check_prop21,
    check_prop22,
    check_remark14,
    check_theorem1,
    classify,
    fuzz_inequalities,
)

F = Fraction


def test_prop21_equality_on_repeated_lowest_eigenvalue():
    """w1 == w2 saturates both eigenvalue bounds exactly."""
    first, second = check_prop21(Spectrum3(F(-1, 12), F(-1, 12), F(1, 6)))

    for report in (first, second):
        assert report.exact is True
        assert report.margin == 0
        assert report.equality_flag is True
        assert report.satisfied is True
        assert report.equality_diagnosis == "w1==w2"
    assert second.extra["chain_rhs"] == pytest.approx(1 / 864)


def test_prop21_detector_quiet_after_perturbation():
    first, second = check_prop21(Spectrum3(-1 / 12 - 1e-3, -1 / 12 + 1e-3, 1 / 6))

    assert first.satisfied and second.satisfied
    assert first.equality_flag is False
    assert second.equality_flag is False
    assert first.equality_diagnosis == ""


def test_prop21_rejects_trace():
    with pytest.raises(TraceNotZero):
        check_prop21(Spectrum3(F(0), F(0), F(1)))


def test_prop22_equality_on_balanced_diagonal():
    """diag(a, a, -a, -a) saturates the componentwise bound."""
    ric0 = SymBilinear4.diagonal([F(1, 4), F(1, 4), F(-1, 4), F(-1, 4)], Precision.RATIONAL, Role.TRACELESS_RICCI)
    first, second = check_prop22(ric0)

    assert first.lhs_text == "3/8"
    assert first.rhs_text == "3/8"
    assert first.equality_flag is True
    assert first.equality_diagnosis == "4|Ric0^2|^2==|Ric0|^4"
    assert second.satisfied is True
    assert second.equality_flag is False


def test_prop22_detector_quiet_after_perturbation():
    ric0 = SymBilinear4.diagonal([0.25 + 1e-3, 0.25 - 1e-3, -0.25, -0.25])
    first, _ = check_prop22(ric0)

    assert first.satisfied is True
    assert first.equality_flag is False
    assert first.equality_diagnosis == ""


def test_prop22_rejects_trace():
    with pytest.raises(NotTraceFree):
        check_prop22(SymBilinear4.diagonal([1, 0, 0, 0], Precision.RATIONAL))


def test_theorem1_equality_on_s2xr2(s2xr2_tensor):
    d = weyl_decompose(s2xr2_tensor)

    for duality in Duality:
        report = check_theorem1(d, duality)
        assert report.margin_text == "0"
        assert report.lhs_text == "1/48"
        assert report.rhs_text == "1/48"
        assert report.equality_flag is True
        assert report.equality_diagnosis == "w1==w2"

def test_theorem1_scaling_covariance(s2xr2_tensor):
    """Rm -> t Rm sends lhs to t^2|W|^2 - t^3 sqrt(6)|W|^3 and rhs to t^3 rhs."""
    scaled = check_theorem1(weyl_decompose(s2xr2_tensor.scaled(3)), "plus")

    # |W+|^2 = 1/24 and sqrt(6)|W+|^3 = 1/48 at t = 1
    assert scaled.lhs_text == "-3/16"
    assert scaled.rhs_text == "9/16"
    assert scaled.exact is True


def test_theorem1_keeps_close_eigenvalues_apart():
    """A split of 2e-8 between w1 and w2 is not reported as an equality case."""
    rotation, _ = np.linalg.qr(np.random.default_rng(4).normal(size=(3, 3)))
    block = Block3(rotation @ np.diag([-1.0 - 1e-8, -1.0 + 1e-8, 2.0]) @ rotation.T, Duality.SELF_DUAL, BlockKind.WEYL)
    d = weyl_decompose(AlgCurvTensor(space_form_curvature(0.5, range(2), Precision.FLOATING)))
    report = check_theorem1(dataclasses.replace(d, weyl_plus=block), "plus")

    assert report.equality_diagnosis == ""



def test_theorem1_on_conformally_flat_cylinder(s3xr_tensor):
    report = check_theorem1(weyl_decompose(s3xr_tensor), "plus")

    assert report.condition_id is ConditionId.THM1_PLUS
    assert report.margin_text == "0"
    assert report.equality_diagnosis == "weyl_vanishes"


def test_theorem1_on_flat_space():
    d = weyl_decompose(AlgCurvTensor.zero(Precision.RATIONAL))

    for report in classify(d):
        assert report.satisfied is True
        assert report.margin == 0


def test_catino_fails_on_s2xr2(s2xr2_tensor):
    d = weyl_decompose(AlgCurvTensor(np.array(s2xr2_tensor.components, dtype=np.float64)))
    catino_12, catino_13 = check_catino(d)

    assert catino_13 is None
    assert catino_12.satisfied is False
    assert catino_12.lhs == pytest.approx(1 / math.sqrt(12), abs=1e-3)
    assert catino_12.rhs == pytest.approx(0.0774, abs=1e-3)


def test_catino_holds_with_equality_on_s3xr(s3xr_tensor):
    catino_12, catino_13 = check_catino(weyl_decompose(s3xr_tensor), gamma=1.5)

    assert catino_12.exact is True
    assert catino_12.margin_text == "0"
    assert catino_12.satisfied is True
    assert catino_13.condition_id is ConditionId.CATINO_13
    assert catino_13.margin == 0
    assert catino_13.extra["gamma"] == 1.5


def test_catino_warns_on_large_gamma(s3xr_tensor, caplog):
    with caplog.at_level(logging.WARNING, logger="app.services.pinching"):
        check_catino(weyl_decompose(s3xr_tensor), gamma=3.0)

    assert "1 + sqrt(3)" in caplog.text


def test_catino_integral_density_on_round_sphere():
    """|W|^2 + 5/4 |Ric0|^2 = 0 <= R^2/48 on the round sphere."""
    d = weyl_decompose(AlgCurvTensor(space_form_curvature(F(1, 6), range(4), Precision.RATIONAL)))
    report = check_catino_integral(d)

    assert report.lhs_text == "0"
    assert report.rhs_text == "1/12"
    assert report.satisfied is True


def test_remark14_ratio_on_s2xr2(s2xr2_tensor):
    d = weyl_decompose(AlgCurvTensor(np.array(s2xr2_tensor.components, dtype=np.float64)))
    report = check_remark14(d, Duality.SELF_DUAL)

    assert report.satisfied is True
    assert report.extra["ratio"] == pytest.approx(math.sqrt(6) / 3, abs=1e-12)


def test_classify_selects_conditions(s2xr2_tensor):
    d = weyl_decompose(s2xr2_tensor)

    ids = [report.condition_id for report in classify(d, gamma=1.0, duality="plus", compact=True)]
    assert ids == [
        ConditionId.THM1_PLUS,
        ConditionId.CATINO_12,
        ConditionId.CATINO_13,
        ConditionId.CATINO_INTEGRAL,
        ConditionId.REMARK_14,
    ]
    ids = [report.condition_id for report in classify(d)]
    assert ids == [ConditionId.THM1_PLUS, ConditionId.THM1_MINUS, ConditionId.CATINO_12, ConditionId.REMARK_14]

def test_classify_reports_remark14_on_self_dual_half():
    rng = np.random.default_rng(8)
    a = rng.normal(size=(4, 4))
    rm = kulkarni_nomizu(SymBilinear4(a + a.T), SymBilinear4(np.diag([1.0, 2.0, -1.0, 0.5])))
    d = weyl_decompose(rm)
    remark = next(report for report in classify(d, duality="minus") if report.condition_id is ConditionId.REMARK_14)

    assert remark.equality_diagnosis == Duality.SELF_DUAL.value
    assert remark.lhs == check_remark14(d, Duality.SELF_DUAL).lhs



def test_batched_kn_square_matches_pointwise():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(4, 4))
    a = a + a.T
    expected = kulkarni_nomizu(SymBilinear4(a), SymBilinear4(a)).components
    assert np.allclose(batched_kn_square(a[None])[0], expected)


def test_fuzz_finds_no_violations():
    summary = fuzz_inequalities(trials=3000, seed=42)

    assert summary.violations == 0
    assert summary.trials == 3000
    assert summary.seed == 42
    assert summary.worst_margin >= -summary.tolerance
    assert set(summary.violations_by_condition) == {
        "prop21a",
        "prop21b",
        "prop22a",
        "prop22b",
        "remark_14",
    }


def test_fuzz_is_reproducible():
    assert fuzz_inequalities(trials=2500, seed=7) == fuzz_inequalities(trials=2500, seed=7)
    assert fuzz_inequalities(trials=2500, seed=7).worst_margin != fuzz_inequalities(trials=2500, seed=8).worst_margin


def test_fuzz_rejects_empty_run():
    with pytest.raises(InvalidRunConfig):
        fuzz_inequalities(trials=0, seed=1)
