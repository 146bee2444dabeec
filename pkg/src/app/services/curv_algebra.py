"""
Pointwise curvature algebra in dimension four: Kulkarni-Nomizu products, the
Lambda+/Lambda- splitting, Ricci/Weyl decomposition, block spectra and norms.

All functions are pure; inputs and outputs are immutable value types, so they can
be called from any number of workers.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from app.core.config import settings
from app.core.exceptions import (
    BasisNotOrthogonal,
    DualityMismatch,
    NonSymmetricInput,
    NotTraceFree,
)
from app.core.numeric import (
    Precision,
    Scalar,
    as_array,
    as_scalar,
    identity,
    max_abs,
    sqrt,
    tol_abs,
    zeros,
)
from app.models.tensors import (
    AlgCurvTensor,
    Block3,
    BlockKind,
    CurvDecomp,
    Duality,
    Lambda2Basis,
    Lambda2Operator,
    Role,
    Spectrum3,
    SymBilinear4,
    det,
)

logger = logging.getLogger(__name__)

DIM = 4
# General-n coefficients of the Weyl decomposition, evaluated at n = 4
RICCI_COEFF = Fraction(1, DIM - 2)
SCALAR_COEFF = Fraction(1, (DIM - 1) * (DIM - 2))
SCHOUTEN_COEFF = Fraction(1, 2 * (DIM - 1))
COTTON_COEFF = Fraction(1, 2 * (DIM - 1))

# (p, q, r, s) for w = e^p ^ e^q + e^r ^ e^s; the minus partner flips the second term
_BIVECTOR_PAIRS = ((0, 1, 2, 3), (0, 2, 3, 1), (0, 3, 1, 2))


@dataclass(frozen=True)
class BlockNorms:
    """Norms and determinants of the Ricci and Weyl pieces of one decomposition"""
    scalar: Scalar
    traceless_ricci_norm_sq: Scalar
    traceless_ricci_norm: Scalar
    weyl_plus_norm_sq: Scalar
    weyl_plus_norm: Scalar
    weyl_minus_norm_sq: Scalar
    weyl_minus_norm: Scalar
    det_weyl_plus: Scalar
    det_weyl_minus: Scalar

    def weyl_norm_sq(self, duality: Duality) -> Scalar:
        return self.weyl_plus_norm_sq if duality is Duality.SELF_DUAL else self.weyl_minus_norm_sq

    def weyl_norm(self, duality: Duality) -> Scalar:
        return self.weyl_plus_norm if duality is Duality.SELF_DUAL else self.weyl_minus_norm

    def det_weyl(self, duality: Duality) -> Scalar:
        return self.det_weyl_plus if duality is Duality.SELF_DUAL else self.det_weyl_minus


def _scalar(value, like: np.ndarray) -> Scalar:
    """`value` in the precision of `like`"""
    return as_scalar(value, Precision.RATIONAL if like.dtype == object else Precision.FLOATING)


def _metric_entries(metric: SymBilinear4 | None, precision: Precision) -> np.ndarray:
    """Entries of `metric`, or the identity when there is none"""
    return identity(DIM, precision) if metric is None else metric.entries


def levi_civita(precision: Precision = Precision.FLOATING) -> np.ndarray:
    """Permutation symbol eps_ijkl with eps_0123 = 1"""
    eps = zeros((DIM,) * 4, precision)
    for perm in itertools.permutations(range(DIM)):
        inversions = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
        eps[perm] = as_scalar(-1 if inversions % 2 else 1, precision)
    return eps


def wedge(p: int, q: int, precision: Precision = Precision.FLOATING) -> np.ndarray:
    """Components of e^p ^ e^q (generalized Kronecker delta)"""
    form = zeros((DIM, DIM), precision)
    form[p, q] = as_scalar(1, precision)
    form[q, p] = as_scalar(-1, precision)
    return form


def hodge_star(form: np.ndarray, orientation: int = 1) -> np.ndarray:
    """(*w)_ij = 1/2 eps_ijkl w_kl, sign-flipped for the reversed orientation"""
    eps = levi_civita(Precision.RATIONAL if form.dtype == object else Precision.FLOATING)
    return np.tensordot(eps, form, axes=([2, 3], [0, 1])) * _scalar("1/2", form) * orientation


def hodge_projectors(metric: SymBilinear4 | None = None, orientation: int = 1) -> Lambda2Basis:
    """Basis of Lambda+ (+) Lambda- for the given frame orientation.

    Components are orthonormal-frame components, so `metric` only fixes the scalar
    type. Reversing the orientation (negating e4) exchanges the two triples.
    """
    precision = metric.precision if metric is not None else Precision.FLOATING
    plus, minus = [], []
    for p, q, r, s in _BIVECTOR_PAIRS:
        plus.append(wedge(p, q, precision) + wedge(r, s, precision))
        minus.append(wedge(p, q, precision) - wedge(r, s, precision))
    forms = plus + minus if orientation == 1 else minus + plus
    return Lambda2Basis(np.stack(forms), orientation)


def kulkarni_nomizu(a: SymBilinear4, b: SymBilinear4, orientation: int = 1) -> AlgCurvTensor:
    """(a.b)_ijkl = a_ik b_jl + a_jl b_ik - a_il b_jk - a_jk b_il"""
    x, y = a.entries, b.entries
    components = (
        x[:, None, :, None] * y[None, :, None, :]
        + y[:, None, :, None] * x[None, :, None, :]
        - x[:, None, None, :] * y[None, :, :, None]
        - y[:, None, None, :] * x[None, :, :, None]
    )
    return AlgCurvTensor(components, orientation)


def as_lambda2_operator(rm: AlgCurvTensor, basis: Lambda2Basis | None = None) -> Lambda2Operator:
    """M_ab = <rm(w_a), w_b> / <w_b, w_b> with (rm w)_ij = 1/2 R_ijkl w_kl"""
    if basis is None:
        basis = hodge_projectors(SymBilinear4.identity(rm.precision), rm.orientation)
    forms = basis.forms
    if rm.precision is Precision.RATIONAL and forms.dtype != object:
        forms = as_array(forms, Precision.RATIONAL)
    gram = np.tensordot(forms, forms, axes=([1, 2], [1, 2])) * _scalar("1/2", forms)
    deviation = max_abs(gram - identity(6, Precision.RATIONAL if gram.dtype == object else Precision.FLOATING) * 2)
    if deviation > tol_abs(rm.precision):
        raise BasisNotOrthogonal(f"Gram matrix deviates from 2*Id by {float(deviation):.3e}")
    # <rm(w_a), w_b> = 1/4 w_b,ij R_ijkl w_a,kl and <w_b, w_b> = 2
    applied = np.tensordot(forms, rm.components, axes=([1, 2], [0, 1]))
    matrix = np.tensordot(applied, forms, axes=([1, 2], [1, 2])).T * _scalar("1/8", applied)
    return Lambda2Operator(matrix, basis.orientation)


def apply_operator(rm: AlgCurvTensor, form: np.ndarray) -> np.ndarray:
    """(rm w)_ij = 1/2 R_ijkl w_kl"""
    return np.tensordot(rm.components, form, axes=([2, 3], [0, 1])) * _scalar("1/2", rm.components)


def frame_transform(metric: np.ndarray) -> np.ndarray:
    """Symmetric inverse square root E of g (batched over leading axes), so E^T g E = Id"""
    values, vectors = np.linalg.eigh(metric)
    if np.any(values <= 0.0):
        raise ValueError("metric is not positive definite")
    return np.einsum("...ia,...a,...ja->...ij", vectors, 1.0 / np.sqrt(values), vectors)


def to_orthonormal_frame(components: np.ndarray, metric: np.ndarray) -> np.ndarray:
    """Rewrite coordinate R_ijkl in the frame e_a = E_ia d_i (batched)"""
    e = frame_transform(metric)
    return np.einsum("...ia,...jb,...kc,...ld,...ijkl->...abcd", e, e, e, e, components, optimize=True)


def _is_identity(metric: SymBilinear4) -> bool:
    return max_abs(metric.entries - identity(DIM, metric.precision)) <= tol_abs(metric.precision)


def weyl_decompose(rm: AlgCurvTensor, metric: SymBilinear4 | None = None) -> CurvDecomp:
    """Ricci, scalar, traceless Ricci, Weyl tensor and the Lambda2 block form of `rm`.

    Non-identity metrics are first moved to the orthonormal frame given by the
    symmetric inverse square root of g; all outputs are frame components.
    """
    if metric is None:
        metric = SymBilinear4.identity(rm.precision)
    elif metric.role is not Role.METRIC:
        metric = metric.with_role(Role.METRIC)
    residual = rm.symmetry_residual()
    if residual > tol_abs(rm.precision):
        raise NonSymmetricInput(f"curvature symmetry residual {float(residual):.3e} exceeds tolerance")
    if not _is_identity(metric):
        if rm.precision is Precision.RATIONAL or metric.precision is Precision.RATIONAL:
            logger.warning("non-orthonormal metric in rational mode; decomposing in floating point")
        frame = to_orthonormal_frame(
            np.asarray(rm.components, dtype=np.float64), np.asarray(metric.entries, dtype=np.float64)
        )
        rm = AlgCurvTensor(frame, rm.orientation)
        metric = SymBilinear4.identity(Precision.FLOATING)

    precision = rm.precision
    g = metric.entries if metric.precision is precision else _metric_entries(None, precision)
    r = rm.components
    ricci_entries = r.diagonal(axis1=0, axis2=2).sum(axis=-1)
    scalar = ricci_entries.diagonal().sum()
    ricci = SymBilinear4(ricci_entries, Role.RICCI)
    traceless = SymBilinear4(ricci_entries - g * (scalar * _scalar("1/4", r)), Role.TRACELESS_RICCI)

    gmetric = SymBilinear4(g, Role.METRIC)
    ric_g = kulkarni_nomizu(ricci, gmetric).components
    g_g = kulkarni_nomizu(gmetric, gmetric).components
    weyl_components = (
        r
        - ric_g * as_scalar(RICCI_COEFF, precision)
        + g_g * (scalar * as_scalar(SCALAR_COEFF, precision) * _scalar("1/2", r))
    )
    full_weyl = AlgCurvTensor(weyl_components, rm.orientation)

    basis = hodge_projectors(gmetric, rm.orientation)
    operator = as_lambda2_operator(full_weyl, basis)
    full_operator = as_lambda2_operator(rm, basis)
    decomp = CurvDecomp(
        scalar=scalar,
        ricci=ricci,
        traceless_ricci=traceless,
        weyl_plus=operator.block(Duality.SELF_DUAL, BlockKind.WEYL),
        weyl_minus=operator.block(Duality.ANTI_SELF_DUAL, BlockKind.WEYL),
        ric_block=full_operator.off_diagonal(),
        full_weyl=full_weyl,
        source=rm,
        metric=gmetric,
    )
    logger.debug("decomposed curvature: R=%s", scalar)
    return decomp


def recompose(decomp: CurvDecomp) -> AlgCurvTensor:
    """W + 1/(n-2) Ric.g - R/((n-1)(n-2)) * 1/2 g.g"""
    precision = decomp.precision
    g = decomp.metric or SymBilinear4.identity(precision)
    ric_g = kulkarni_nomizu(decomp.ricci, g).components
    g_g = kulkarni_nomizu(g, g).components
    components = (
        decomp.full_weyl.components
        + ric_g * as_scalar(RICCI_COEFF, precision)
        - g_g * (decomp.scalar * as_scalar(SCALAR_COEFF, precision) * as_scalar("1/2", precision))
    )
    return AlgCurvTensor(components, decomp.orientation)


def schouten(decomp: CurvDecomp) -> SymBilinear4:
    """A = Ric - R/(2(n-1)) g"""
    precision = decomp.precision
    g = _metric_entries(decomp.metric, precision)
    entries = decomp.ricci.entries - g * (decomp.scalar * as_scalar(SCHOUTEN_COEFF, precision))
    return SymBilinear4(entries, Role.SCHOUTEN)


def schouten_recompose(decomp: CurvDecomp) -> AlgCurvTensor:
    """Rm = 1/(n-2) (A.g) + W"""
    precision = decomp.precision
    g = decomp.metric or SymBilinear4.identity(precision)
    a_g = kulkarni_nomizu(schouten(decomp), g).components
    return AlgCurvTensor(a_g * as_scalar(RICCI_COEFF, precision) + decomp.full_weyl.components, decomp.orientation)


def weyl_trace(decomp: CurvDecomp) -> np.ndarray:
    """sum_i W_ijil, which vanishes for a Weyl tensor"""
    return decomp.full_weyl.components.diagonal(axis1=0, axis2=2).sum(axis=-1)


def kn_square_block(traceless_ricci: SymBilinear4, duality: Duality, orientation: int = 1) -> Block3:
    """(Ric0 . Ric0)^+/- as a Lambda+/- block"""
    product = kulkarni_nomizu(traceless_ricci, traceless_ricci, orientation)
    return as_lambda2_operator(product).block(duality, BlockKind.KN_PRODUCT)


# ---------------------------------------------------------------- spectra


def _char_poly(m: np.ndarray) -> tuple:
    """(c2, c1, c0) with det(lambda - M) = lambda^3 - c2 lambda^2 + c1 lambda - c0"""
    c2 = m[0, 0] + m[1, 1] + m[2, 2]
    c1 = (
        m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        + m[0, 0] * m[2, 2] - m[0, 2] * m[2, 0]
        + m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1]
    )
    return c2, c1, det(m)


def _repeated_roots(c2, c1, c0):
    """Roots of a cubic with vanishing discriminant: (double, simple)"""
    b, c, d = -c2, c1, -c0
    denom = b * b - 3 * c
    if denom == 0:
        return c2 / 3, c2 / 3
    double = (9 * d - b * c) / (2 * denom)
    simple = (4 * b * c - 9 * d - b * b * b) / denom
    return double, simple


def _ascending(values) -> Spectrum3:
    w = sorted(values)
    return Spectrum3(w[0], w[1], w[2])


def _spectrum_exact(m: np.ndarray) -> Spectrum3 | None:
    if all(m[i, j] == 0 for i in range(3) for j in range(3) if i != j):
        return _ascending([m[0, 0], m[1, 1], m[2, 2]])
    c2, c1, c0 = _char_poly(m)
    b, c, d = -c2, c1, -c0
    disc = 18 * b * c * d - 4 * b ** 3 * d + b * b * c * c - 4 * c ** 3 - 27 * d * d
    if disc == 0:
        double, simple = _repeated_roots(c2, c1, c0)
        return _ascending([double, double, simple])
    return None


def _spectrum_trig(m: np.ndarray) -> Spectrum3:
    m = np.asarray(m, dtype=np.float64)
    off = m[0, 1] ** 2 + m[0, 2] ** 2 + m[1, 2] ** 2
    if off == 0.0:
        return _ascending([m[0, 0], m[1, 1], m[2, 2]])
    q = np.trace(m) / 3.0
    p2 = (m[0, 0] - q) ** 2 + (m[1, 1] - q) ** 2 + (m[2, 2] - q) ** 2 + 2.0 * off
    p = math.sqrt(p2 / 6.0)
    b = (m - q * np.eye(3)) / p
    r = float(np.linalg.det(b)) / 2.0
    r = min(1.0, max(-1.0, r))
    # normalized discriminant of lambda^3 - 3 lambda - 2r; eigvalsh near a double root
    if 108.0 * (1.0 - r * r) < settings.EIGEN_GUARD:
        return _ascending(np.linalg.eigvalsh(m).tolist())
    phi = math.acos(r) / 3.0
    largest = q + 2.0 * p * math.cos(phi)
    smallest = q + 2.0 * p * math.cos(phi + 2.0 * math.pi / 3.0)
    middle = 3.0 * q - largest - smallest
    return _ascending([smallest, middle, largest])


def spectrum3(block: Block3) -> Spectrum3:
    """Ascending eigenvalues of a symmetric 3x3 block.

    Rational blocks keep exact eigenvalues whenever the block is diagonal or has a
    repeated eigenvalue; everything else uses the trigonometric closed form.
    """
    m = block.matrix
    if m.dtype == object:
        exact = _spectrum_exact(m)
        if exact is not None:
            spectrum = exact
        else:
            spectrum = _spectrum_trig(m)
    else:
        spectrum = _spectrum_trig(m)
    if block.kind is BlockKind.WEYL and abs(spectrum.total()) > tol_abs(block.precision):
        raise NotTraceFree(f"Weyl spectrum sums to {float(spectrum.total()):.3e}")
    return spectrum


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _null_vector(m: np.ndarray) -> np.ndarray:
    rows = (m[0], m[1], m[2])
    candidates = [np.cross(rows[i], rows[j]) for i, j in ((0, 1), (0, 2), (1, 2))]
    return _unit(max(candidates, key=np.linalg.norm))


def _complement(v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    axis = np.eye(3)[int(np.argmin(np.abs(v)))]
    u = _unit(np.cross(v, axis))
    return u, np.cross(v, u)


def eigh3(block: Block3) -> tuple[Spectrum3, np.ndarray]:
    """Spectrum plus orthonormal eigenvectors (columns) by the cross-product method"""
    spectrum = spectrum3(block)
    m = np.asarray(block.matrix, dtype=np.float64)
    w = [float(x) for x in spectrum.as_tuple()]
    scale = 1.0 + max(abs(x) for x in w)
    same_low = abs(w[1] - w[0]) <= 1e-8 * scale
    same_high = abs(w[2] - w[1]) <= 1e-8 * scale
    eye = np.eye(3)
    if same_low and same_high:
        vectors = eye
    elif same_low:
        v3 = _null_vector(m - w[2] * eye)
        v1, v2 = _complement(v3)
        vectors = np.column_stack([v1, v2, v3])
    elif same_high:
        v1 = _null_vector(m - w[0] * eye)
        v2, v3 = _complement(v1)
        vectors = np.column_stack([v1, v2, v3])
    else:
        v1 = _null_vector(m - w[0] * eye)
        v3 = _null_vector(m - w[2] * eye)
        vectors = np.column_stack([v1, np.cross(v3, v1), v3])
    return spectrum, vectors


# ---------------------------------------------------------------- inner products and norms


def block_inner(a: Block3, b: Block3) -> Scalar:
    """<a, b> = tr(a^T b), the trace-of-product convention on Lambda+/- operators"""
    if a.duality is not b.duality:
        raise DualityMismatch(f"cannot pair {a.duality.value} with {b.duality.value}")
    return (a.matrix * b.matrix).sum()


def block_norms(decomp: CurvDecomp) -> BlockNorms:
    """|W+/-|^2 = sum w_i^2, det W+/- = w1 w2 w3, |Ric0|^2 = sum Ric0_ij^2"""
    ric_sq = decomp.traceless_ricci.norm_sq()
    plus_sq = block_inner(decomp.weyl_plus, decomp.weyl_plus)
    minus_sq = block_inner(decomp.weyl_minus, decomp.weyl_minus)
    return BlockNorms(
        scalar=decomp.scalar,
        traceless_ricci_norm_sq=ric_sq,
        traceless_ricci_norm=sqrt(ric_sq),
        weyl_plus_norm_sq=plus_sq,
        weyl_plus_norm=sqrt(plus_sq),
        weyl_minus_norm_sq=minus_sq,
        weyl_minus_norm=sqrt(minus_sq),
        det_weyl_plus=det(decomp.weyl_plus.matrix),
        det_weyl_minus=det(decomp.weyl_minus.matrix),
    )


def tensor_norm_sq(rm: AlgCurvTensor) -> Scalar:
    """Componentwise sum R_ijkl^2 (four times the operator convention)"""
    return rm.norm_sq()


def operator_norm_sq(operator: Lambda2Operator) -> Scalar:
    """Squared Frobenius norm of the 6x6 operator matrix"""
    return operator.frobenius_sq()
