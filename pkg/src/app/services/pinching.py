"""
Pointwise pinching conditions with margins and equality diagnostics, and a
randomized sweep over the sharp algebraic inequalities.

Norm conventions: |W+/-|^2 is the sum of squared eigenvalues of the Weyl block,
|W|^2 = |W+|^2 + |W-|^2, and <A, B> on blocks is tr(A^T B).
"""
import logging
import math
import multiprocessing as mp
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from app.core.config import settings
from app.core.exceptions import InvalidRunConfig, NotTraceFree, TraceNotZero
from app.core.numeric import Precision, Scalar, fmt, is_exact, sqrt, tol_abs, tol_eq
from app.models.tensors import CurvDecomp, Duality, Spectrum3, SymBilinear4
from app.schemas.reports import ConditionId, FuzzSummary, PinchReport
from app.services.curv_algebra import (
    as_lambda2_operator,
    block_inner,
    block_norms,
    hodge_projectors,
    kn_square_block,
    kulkarni_nomizu,
    spectrum3,
    tensor_norm_sq,
)

logger = logging.getLogger(__name__)

SQRT3 = math.sqrt(3.0)
SQRT6 = math.sqrt(6.0)
GAMMA_LIMIT = 1.0 + SQRT3
NEAR_EQUALITY = 1e-6

_THM1_IDS = {Duality.SELF_DUAL: ConditionId.THM1_PLUS, Duality.ANTI_SELF_DUAL: ConditionId.THM1_MINUS}


def _precision(values: Iterable) -> Precision:
    return Precision.RATIONAL if all(is_exact(v) for v in values) else Precision.FLOATING


def _report(
    condition: ConditionId,
    lhs: Scalar,
    rhs: Scalar,
    margin: Scalar,
    diagnosis: str = "",
    extra: Optional[dict] = None,
) -> PinchReport:
    exact = all(is_exact(v) for v in (lhs, rhs, margin))
    tolerance = 0.0 if exact else settings.TOL_EQ
    satisfied = margin >= -tolerance
    return PinchReport(
        condition_id=condition,
        lhs=float(lhs),
        rhs=float(rhs),
        margin=float(margin),
        satisfied=bool(satisfied),
        equality_flag=bool(abs(margin) <= tolerance),
        equality_diagnosis=diagnosis,
        tolerance=tolerance,
        exact=exact,
        lhs_text=fmt(lhs),
        rhs_text=fmt(rhs),
        margin_text=fmt(margin),
        extra=extra or {},
    )


def _over_sqrt3(value: Scalar) -> Scalar:
    return value if value == 0 else float(value) / SQRT3


def _half(value: Scalar) -> Scalar:
    return value * Fraction(1, 2) if is_exact(value) else 0.5 * value


# ---------------------------------------------------------------- algebraic propositions


def check_prop21(spectrum: Spectrum3) -> tuple[PinchReport, PinchReport]:
    """Eigenvalue bounds for a trace-free spectrum w1 <= w2 <= w3:
    (a) 3/2 w3^2 <= |W|^2, (b) w1 w2 w3 <= w3 |W|^2 / 6 <= sqrt(6)/18 |W|^3.
    Both are equalities exactly when w1 == w2.
    """
    w1, w2, w3 = spectrum.as_tuple()
    precision = _precision((w1, w2, w3))
    total = spectrum.total()
    if abs(total) > tol_abs(precision):
        raise TraceNotZero(f"eigenvalues sum to {float(total):.3e}")

    norm_sq = spectrum.norm_sq()
    diagnosis = "w1==w2" if abs(w1 - w2) <= tol_eq(precision) else ""

    lhs_a = Fraction(3, 2) * w3 * w3 if precision is Precision.RATIONAL else 1.5 * w3 * w3
    first = _report(ConditionId.PROP21A, lhs_a, norm_sq, norm_sq - lhs_a, diagnosis)

    det = spectrum.det()
    bound = w3 * norm_sq / 6
    chain = sqrt(6 * norm_sq ** 3)
    chain = chain / 18 if is_exact(chain) else float(chain) / 18.0
    margin = min(bound - det, chain - bound)
    second = _report(ConditionId.PROP21B, det, bound, margin, diagnosis, {"chain_rhs": float(chain)})
    return first, second


def check_prop22(ric0: SymBilinear4, decomp: Optional[CurvDecomp] = None) -> tuple[PinchReport, PinchReport]:
    """(a) |Ric0 . Ric0|^2 <= 6 |Ric0|^4 componentwise, equality iff 4|Ric0^2|^2 = |Ric0|^4;
    (b) 4 |(Ric0 . Ric0)^+|^2 <= 6 |Ric0|^4 in the operator convention.
    """
    precision = ric0.precision
    trace = ric0.trace()
    if abs(trace) > tol_abs(precision):
        raise NotTraceFree(f"traceless Ricci has trace {float(trace):.3e}")
    orientation = decomp.orientation if decomp is not None else 1

    product = kulkarni_nomizu(ric0, ric0, orientation)
    norm_sq = ric0.norm_sq()
    bound = 6 * norm_sq * norm_sq
    square = ric0.square()
    characteristic = 4 * (square * square).sum() - norm_sq * norm_sq
    diagnosis = "4|Ric0^2|^2==|Ric0|^4" if abs(characteristic) <= tol_eq(precision) else ""

    components = tensor_norm_sq(product)
    first = _report(ConditionId.PROP22A, components, bound, bound - components, diagnosis)

    plus = as_lambda2_operator(product).block(Duality.SELF_DUAL)
    projected = 4 * block_inner(plus, plus)
    margin = bound - projected
    second = _report(
        ConditionId.PROP22B,
        projected,
        bound,
        margin,
        "plus_block_saturates" if abs(margin) <= tol_eq(precision) else "",
    )
    return first, second


# ---------------------------------------------------------------- pinching conditions on a decomposition


def check_theorem1(d: CurvDecomp, duality: Duality | str = Duality.SELF_DUAL) -> PinchReport:
    """|W|^2 - sqrt(6)|W|^3 >= 1/2 <(Ric0 . Ric0)^+/-, W^+/->"""
    duality = Duality.parse(duality)
    weyl = d.weyl(duality)
    norm_sq = block_inner(weyl, weyl)
    lhs = norm_sq - sqrt(6 * norm_sq ** 3)
    kn = kn_square_block(d.traceless_ricci, duality, d.orientation)
    rhs = _half(block_inner(kn, weyl))
    margin = lhs - rhs

    diagnosis = ""
    if norm_sq == 0:
        diagnosis = "weyl_vanishes"
    else:
        spectrum = spectrum3(weyl)
        if abs(spectrum.w1 - spectrum.w2) <= tol_eq(d.precision):
            diagnosis = "w1==w2"
    return _report(_THM1_IDS[duality], lhs, rhs, margin, diagnosis)


def _weyl_norm(d: CurvDecomp) -> Scalar:
    norms = block_norms(d)
    return sqrt(norms.weyl_plus_norm_sq + norms.weyl_minus_norm_sq)


def check_catino(d: CurvDecomp, gamma: Optional[float] = None) -> tuple[PinchReport, Optional[PinchReport]]:
    """|W| R <= sqrt(3) (|Ric0| - R/(2 sqrt 3))^2 and |W| <= gamma | |Ric0| - R/(2 sqrt 3) |"""
    norms = block_norms(d)
    weyl = _weyl_norm(d)
    scalar = d.scalar
    # sqrt(3)|Ric0| - R/2 = sqrt(3) (|Ric0| - R/(2 sqrt 3))
    core = sqrt(3 * norms.traceless_ricci_norm_sq) - _half(scalar)

    lhs = weyl * scalar
    rhs = _over_sqrt3(core * core)
    first = _report(
        ConditionId.CATINO_12,
        lhs,
        rhs,
        rhs - lhs,
        "weyl_vanishes_and_ricci_balanced" if weyl == 0 and core == 0 else "",
    )

    if gamma is None:
        return first, None
    if gamma >= GAMMA_LIMIT:
        logger.warning("gamma=%s is not below 1 + sqrt(3); the condition is outside its intended range", gamma)
    bound = _over_sqrt3(abs(core))
    rhs = bound if bound == 0 else float(gamma) * float(bound)
    second = _report(ConditionId.CATINO_13, weyl, rhs, rhs - weyl, "", {"gamma": float(gamma)})
    return first, second


def check_catino_integral(d: CurvDecomp) -> PinchReport:
    """Pointwise density |W|^2 + 5/4 |Ric0|^2 <= R^2 / 48 of the integral pinching"""
    norms = block_norms(d)
    exact = d.precision is Precision.RATIONAL
    lhs = norms.weyl_plus_norm_sq + norms.weyl_minus_norm_sq
    lhs = lhs + (Fraction(5, 4) if exact else 1.25) * norms.traceless_ricci_norm_sq
    rhs = d.scalar * d.scalar / 48
    return _report(ConditionId.CATINO_INTEGRAL, lhs, rhs, rhs - lhs)


def check_remark14(d: CurvDecomp, duality: Duality | str = Duality.SELF_DUAL) -> PinchReport:
    """<(Ric0 . Ric0)^+, W^+> <= sqrt(6) |Ric0|^2 |W^+|, with the attained ratio"""
    duality = Duality.parse(duality)
    weyl = d.weyl(duality)
    weyl_sq = block_inner(weyl, weyl)
    ric_sq = d.traceless_ricci.norm_sq()
    kn = kn_square_block(d.traceless_ricci, duality, d.orientation)
    lhs = block_inner(kn, weyl)
    rhs = ric_sq * sqrt(6 * weyl_sq)
    extra = {}
    if ric_sq != 0 and weyl_sq != 0:
        extra["ratio"] = float(lhs) / (float(ric_sq) * float(sqrt(weyl_sq)))
    return _report(ConditionId.REMARK_14, lhs, rhs, rhs - lhs, duality.value, extra)


def classify(
    d: CurvDecomp,
    gamma: Optional[float] = None,
    duality: str = "both",
    compact: bool = False,
) -> list[PinchReport]:
    """Every pinching condition that applies to one decomposition"""
    if duality == "both":
        dualities = [Duality.SELF_DUAL, Duality.ANTI_SELF_DUAL]
    else:
        dualities = [Duality.parse(duality)]
    reports = [check_theorem1(d, side) for side in dualities]
    catino_12, catino_13 = check_catino(d, gamma)
    reports.append(catino_12)
    if catino_13 is not None:
        reports.append(catino_13)
    if compact:
        reports.append(check_catino_integral(d))
    reports.append(check_remark14(d, Duality.SELF_DUAL))
    logger.debug("classified decomposition: %d conditions", len(reports))
    return reports


# ---------------------------------------------------------------- randomized sweep


@dataclass
class _SweepStats:
    checks: int = 0
    near_equality_hits: int = 0
    worst_margin: float = math.inf
    violations: dict = field(default_factory=dict)

    def add(self, condition: str, margins: np.ndarray, tolerance: float) -> None:
        self.checks += int(margins.size)
        self.violations[condition] = self.violations.get(condition, 0) + int(np.count_nonzero(margins < -tolerance))
        self.near_equality_hits += int(np.count_nonzero(margins < NEAR_EQUALITY))
        self.worst_margin = min(self.worst_margin, float(margins.min()))

    def merge(self, other: "_SweepStats") -> None:
        self.checks += other.checks
        self.near_equality_hits += other.near_equality_hits
        self.worst_margin = min(self.worst_margin, other.worst_margin)
        for condition, count in other.violations.items():
            self.violations[condition] = self.violations.get(condition, 0) + count


def random_trace_free_spectra(rng: np.random.Generator, size: int) -> np.ndarray:
    """Uniform draws in [-1, 1]^3 projected to trace zero, sorted ascending"""
    w = rng.uniform(-1.0, 1.0, (size, 3))
    w -= w.mean(axis=1, keepdims=True)
    w.sort(axis=1)
    return w


def random_trace_free_matrices(rng: np.random.Generator, size: int, dim: int) -> np.ndarray:
    """Uniform entries in [-1, 1], symmetrized and projected to trace zero"""
    a = rng.uniform(-1.0, 1.0, (size, dim, dim))
    a = 0.5 * (a + np.swapaxes(a, 1, 2))
    trace = np.trace(a, axis1=1, axis2=2)
    return a - (trace / dim)[:, None, None] * np.eye(dim)


def batched_kn_square(a: np.ndarray) -> np.ndarray:
    """(a . a)_ijkl = 2 (a_ik a_jl - a_il a_jk) for a stack of symmetric matrices"""
    return 2.0 * (np.einsum("nik,njl->nijkl", a, a) - np.einsum("nil,njk->nijkl", a, a))


def _sweep_chunk(size: int, seed: np.random.SeedSequence, tolerance: float) -> _SweepStats:
    rng = np.random.default_rng(seed)
    stats = _SweepStats()

    w = random_trace_free_spectra(rng, size)
    norm_sq = np.sum(w * w, axis=1)
    w3 = w[:, 2]
    bound = w3 * norm_sq / 6.0
    stats.add(ConditionId.PROP21A.value, norm_sq - 1.5 * w3 * w3, tolerance)
    stats.add(
        ConditionId.PROP21B.value,
        np.minimum(bound - np.prod(w, axis=1), np.sqrt(6.0 * norm_sq ** 3) / 18.0 - bound),
        tolerance,
    )

    ric0 = random_trace_free_matrices(rng, size, 4)
    kn = batched_kn_square(ric0)
    ric_sq = np.sum(ric0 * ric0, axis=(1, 2))
    bound = 6.0 * ric_sq * ric_sq
    stats.add(ConditionId.PROP22A.value, bound - np.sum(kn * kn, axis=(1, 2, 3, 4)), tolerance)

    forms = hodge_projectors().plus
    plus = np.einsum("bij,nijkl,akl->nab", forms, kn, forms, optimize=True) / 8.0
    stats.add(ConditionId.PROP22B.value, bound - 4.0 * np.sum(plus * plus, axis=(1, 2)), tolerance)

    weyl = random_trace_free_matrices(rng, size, 3)
    inner = np.sum(plus * weyl, axis=(1, 2))
    weyl_norm = np.sqrt(np.sum(weyl * weyl, axis=(1, 2)))
    stats.add(ConditionId.REMARK_14.value, SQRT6 * ric_sq * weyl_norm - inner, tolerance)
    return stats


def _worker_count(workers: Optional[int]) -> int:
    cap = settings.THREADS if workers is None else workers
    return mp.cpu_count() if cap <= 0 else min(mp.cpu_count(), cap)


def fuzz_inequalities(trials: int, seed: int, workers: Optional[int] = None) -> FuzzSummary:
    """Check the algebraic inequalities on `trials` random spectra and `trials` random
    trace-free matrices (plus random Weyl blocks for the projection bound).

    Work is split into chunks of FUZZ_CHUNK with sub-seeds spawned from `seed`, so
    the summary does not depend on the number of workers.
    """
    if trials < 1:
        raise InvalidRunConfig(f"trials must be at least 1, got {trials}")
    tolerance = settings.FUZZ_TOL
    chunk = max(1, settings.FUZZ_CHUNK)
    sizes = [min(chunk, trials - start) for start in range(0, trials, chunk)]
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    tasks = [(size, sub_seed, tolerance) for size, sub_seed in zip(sizes, seeds)]

    processes = min(_worker_count(workers), len(tasks))
    if processes > 1:
        with mp.Pool(processes) as pool:
            results = pool.starmap(_sweep_chunk, tasks)
    else:
        results = [_sweep_chunk(*task) for task in tasks]

    total = _SweepStats()
    for result in results:
        total.merge(result)
    violations = sum(total.violations.values())
    if violations:
        logger.warning("fuzz sweep found %d violations (seed=%d)", violations, seed)
    logger.debug("fuzz sweep: %d checks over %d chunks with %d processes", total.checks, len(tasks), processes)
    return FuzzSummary(
        trials=trials,
        violations=violations,
        near_equality_hits=total.near_equality_hits,
        seed=seed,
        worst_margin=total.worst_margin,
        checks=total.checks,
        tolerance=tolerance,
        violations_by_condition=dict(sorted(total.violations.items())),
    )
