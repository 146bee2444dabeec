"""
Pointwise curvature value types (database-agnostic, immutable after construction)
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from app.core.exceptions import (
    DegenerateMetric,
    NonSymmetricInput,
    NotTraceFree,
)
from app.core.numeric import (
    Precision,
    Scalar,
    as_scalar,
    max_abs,
    precision_of,
    tol_abs,
)


class Role(str, Enum):
    METRIC = "metric"
    RICCI = "ricci"
    TRACELESS_RICCI = "traceless_ricci"
    SCHOUTEN = "schouten"
    HESSIAN = "hessian"
    GENERIC = "generic"


class Duality(str, Enum):
    SELF_DUAL = "self_dual"
    ANTI_SELF_DUAL = "anti_self_dual"

    @classmethod
    def parse(cls, value: "str | Duality") -> "Duality":
        """Accept the enum, its value, or the short forms plus/minus and +/-"""
        if isinstance(value, Duality):
            return value
        aliases = {"plus": cls.SELF_DUAL, "+": cls.SELF_DUAL, "minus": cls.ANTI_SELF_DUAL, "-": cls.ANTI_SELF_DUAL}
        return aliases.get(value, None) or cls(value)

    @property
    def short(self) -> str:
        return "plus" if self is Duality.SELF_DUAL else "minus"


class BlockKind(str, Enum):
    WEYL = "weyl"
    KN_PRODUCT = "kn_product"
    GENERIC = "generic"


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=array.dtype, copy=True)
    array.setflags(write=False)
    return array


def reindex(array: np.ndarray, source: str) -> np.ndarray:
    """Return B with B[i,j,k,l] = array[<indices named by `source`>], e.g. "jkil" """
    target = "ijkl"[: array.ndim]
    return np.transpose(array, [source.index(letter) for letter in target])


def det(matrix: np.ndarray) -> Scalar:
    """Determinant that stays exact on rational object arrays (Laplace expansion)"""
    if not matrix.dtype == object:
        return float(np.linalg.det(matrix))
    n = matrix.shape[0]
    if n == 1:
        return matrix[0, 0]
    if n == 2:
        return matrix[0, 0] * matrix[1, 1] - matrix[0, 1] * matrix[1, 0]
    total = matrix[0, 0] * 0
    for col in range(n):
        if matrix[0, col] == 0:
            continue
        minor = np.delete(np.delete(matrix, 0, axis=0), col, axis=1)
        sign = 1 if col % 2 == 0 else -1
        total += sign * matrix[0, col] * det(minor)
    return total


def is_positive_definite(matrix: np.ndarray) -> bool:
    if matrix.dtype == object:
        # Sylvester's criterion keeps the test exact
        return all(det(matrix[:k, :k]) > 0 for k in range(1, matrix.shape[0] + 1))
    return bool(np.min(np.linalg.eigvalsh(matrix)) > 0.0)


@dataclass(frozen=True, eq=False)
class SymBilinear4:
    """Symmetric (0,2)-tensor in orthonormal-frame components"""
    entries: np.ndarray
    role: Role = Role.GENERIC

    def __post_init__(self):
        entries = np.asarray(self.entries)
        if entries.shape != (4, 4):
            raise NonSymmetricInput(f"expected a 4x4 matrix, got shape {entries.shape}")
        precision = precision_of(entries)
        residual = max_abs(entries - entries.T)
        if residual > tol_abs(precision):
            raise NonSymmetricInput(f"symmetry residual {float(residual):.3e} exceeds tolerance")
        if precision is Precision.FLOATING:
            entries = 0.5 * (entries + entries.T)
        object.__setattr__(self, "entries", _frozen(entries))
        if self.role is Role.METRIC and not is_positive_definite(self.entries):
            raise DegenerateMetric("metric has a non-positive eigenvalue")
        if self.role is Role.TRACELESS_RICCI and abs(self.trace()) > tol_abs(precision):
            raise NotTraceFree(f"trace {float(self.trace()):.3e} is not zero")

    @property
    def precision(self) -> Precision:
        return precision_of(self.entries)

    @classmethod
    def identity(cls, precision: Precision = Precision.FLOATING, role: Role = Role.METRIC) -> "SymBilinear4":
        entries = np.empty((4, 4), dtype=object if precision is Precision.RATIONAL else np.float64)
        for i in range(4):
            for j in range(4):
                entries[i, j] = as_scalar(1 if i == j else 0, precision)
        return cls(entries, role)

    @classmethod
    def diagonal(cls, values, precision: Precision = Precision.FLOATING, role: Role = Role.GENERIC) -> "SymBilinear4":
        entries = np.empty((4, 4), dtype=object if precision is Precision.RATIONAL else np.float64)
        for i in range(4):
            for j in range(4):
                entries[i, j] = as_scalar(values[i] if i == j else 0, precision)
        return cls(entries, role)

    def trace(self) -> Scalar:
        return self.entries.diagonal().sum()

    def square(self) -> np.ndarray:
        """Matrix square (A²)_ik = A_ip A_kp"""
        return np.dot(self.entries, self.entries.T)

    def norm_sq(self) -> Scalar:
        return (self.entries * self.entries).sum()

    def with_role(self, role: Role) -> "SymBilinear4":
        return SymBilinear4(self.entries, role)


@dataclass(frozen=True, eq=False)
class AlgCurvTensor:
    """Algebraic curvature tensor R_ijkl in an oriented orthonormal frame.

    Convention: the round sphere has R_ijij > 0 and Ric_jl = sum_i R_ijil.
    """
    components: np.ndarray
    orientation: int = 1
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        components = np.asarray(self.components)
        if components.shape != (4, 4, 4, 4):
            raise NonSymmetricInput(f"expected shape (4,4,4,4), got {components.shape}")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        object.__setattr__(self, "components", _frozen(components))
        if self.validate:
            residual = self.symmetry_residual()
            if residual > tol_abs(self.precision):
                raise NonSymmetricInput(f"curvature symmetry residual {float(residual):.3e} exceeds tolerance")

    @property
    def precision(self) -> Precision:
        return precision_of(self.components)

    @classmethod
    def zero(cls, precision: Precision = Precision.FLOATING, orientation: int = 1) -> "AlgCurvTensor":
        components = np.empty((4, 4, 4, 4), dtype=object if precision is Precision.RATIONAL else np.float64)
        components.fill(as_scalar(0, precision))
        return cls(components, orientation)

    def symmetry_residuals(self) -> dict[str, Scalar]:
        r = self.components
        return {
            "antisymmetry_first": max_abs(r + reindex(r, "jikl")),
            "antisymmetry_second": max_abs(r + reindex(r, "ijlk")),
            "pair": max_abs(r - reindex(r, "klij")),
            "bianchi": max_abs(r + reindex(r, "jkil") + reindex(r, "kijl")),
        }

    def symmetry_residual(self) -> Scalar:
        return max(self.symmetry_residuals().values())

    def scaled(self, factor) -> "AlgCurvTensor":
        return AlgCurvTensor(self.components * factor, self.orientation)

    def with_orientation(self, orientation: int) -> "AlgCurvTensor":
        return AlgCurvTensor(self.components, orientation, validate=False)

    def norm_sq(self) -> Scalar:
        """Componentwise squared norm sum R_ijkl^2"""
        return (self.components * self.components).sum()


@dataclass(frozen=True, eq=False)
class Lambda2Basis:
    """Bivectors (w1+, w2+, w3+, w1-, w2-, w3-) as antisymmetric 4x4 component matrices"""
    forms: np.ndarray
    orientation: int = 1

    def __post_init__(self):
        if np.asarray(self.forms).shape != (6, 4, 4):
            raise ValueError("a Lambda2 basis has six 4x4 forms")
        object.__setattr__(self, "forms", _frozen(np.asarray(self.forms)))

    @property
    def plus(self) -> np.ndarray:
        return self.forms[:3]

    @property
    def minus(self) -> np.ndarray:
        return self.forms[3:]

    def gram(self) -> np.ndarray:
        """Gram matrix under <a,b> = 1/2 a_ij b_ij"""
        half = as_scalar("1/2", precision_of(self.forms))
        return np.tensordot(self.forms, self.forms, axes=([1, 2], [1, 2])) * half


@dataclass(frozen=True, eq=False)
class Block3:
    """3x3 block of a Lambda2 operator restricted to one of Lambda+/Lambda-"""
    matrix: np.ndarray
    duality: Duality = Duality.SELF_DUAL
    kind: BlockKind = BlockKind.GENERIC

    def __post_init__(self):
        matrix = np.asarray(self.matrix)
        if matrix.shape != (3, 3):
            raise NonSymmetricInput(f"expected a 3x3 block, got shape {matrix.shape}")
        precision = precision_of(matrix)
        if max_abs(matrix - matrix.T) > tol_abs(precision):
            raise NonSymmetricInput("block is not symmetric")
        if precision is Precision.FLOATING:
            matrix = 0.5 * (matrix + matrix.T)
        object.__setattr__(self, "matrix", _frozen(matrix))
        if self.kind is BlockKind.WEYL and abs(self.trace()) > tol_abs(precision):
            raise NotTraceFree(f"Weyl block trace {float(self.trace()):.3e} is not zero")

    @property
    def precision(self) -> Precision:
        return precision_of(self.matrix)

    def trace(self) -> Scalar:
        """Sum of the diagonal entries"""
        return self.matrix.diagonal().sum()


@dataclass(frozen=True)
class Spectrum3:
    """Ascending eigenvalues of a symmetric 3x3 block"""
    w1: Scalar
    w2: Scalar
    w3: Scalar

    def __post_init__(self):
        if not (self.w1 <= self.w2 <= self.w3):
            raise ValueError(f"spectrum must be ascending, got ({self.w1}, {self.w2}, {self.w3})")

    def as_tuple(self) -> tuple:
        return (self.w1, self.w2, self.w3)

    def total(self) -> Scalar:
        return self.w1 + self.w2 + self.w3

    def norm_sq(self) -> Scalar:
        return self.w1 * self.w1 + self.w2 * self.w2 + self.w3 * self.w3

    def det(self) -> Scalar:
        return self.w1 * self.w2 * self.w3


@dataclass(frozen=True, eq=False)
class Lambda2Operator:
    """Symmetric 6x6 matrix of a curvature-type operator in Lambda2Basis order"""
    matrix: np.ndarray
    orientation: int = 1

    def __post_init__(self):
        matrix = np.asarray(self.matrix)
        if matrix.shape != (6, 6):
            raise NonSymmetricInput(f"expected a 6x6 operator, got shape {matrix.shape}")
        precision = precision_of(matrix)
        if max_abs(matrix - matrix.T) > tol_abs(precision):
            raise NonSymmetricInput("operator matrix is not symmetric")
        if precision is Precision.FLOATING:
            matrix = 0.5 * (matrix + matrix.T)
        object.__setattr__(self, "matrix", _frozen(matrix))

    @property
    def precision(self) -> Precision:
        return precision_of(self.matrix)

    def block(self, duality: Duality, kind: BlockKind = BlockKind.GENERIC) -> Block3:
        sl = slice(0, 3) if duality is Duality.SELF_DUAL else slice(3, 6)
        return Block3(self.matrix[sl, sl], duality, kind)

    def off_diagonal(self) -> np.ndarray:
        """Lambda- -> Lambda+ block (rows +, columns -)"""
        return self.matrix[:3, 3:]

    def trace(self) -> Scalar:
        return self.matrix.diagonal().sum()

    def frobenius_sq(self) -> Scalar:
        return (self.matrix * self.matrix).sum()


@dataclass(frozen=True, eq=False)
class CurvDecomp:
    """Ricci/Weyl splitting of an AlgCurvTensor together with its block form"""
    scalar: Scalar
    ricci: SymBilinear4
    traceless_ricci: SymBilinear4
    weyl_plus: Block3
    weyl_minus: Block3
    ric_block: np.ndarray
    full_weyl: AlgCurvTensor
    source: Optional[AlgCurvTensor] = None
    metric: Optional[SymBilinear4] = None

    @property
    def precision(self) -> Precision:
        return self.ricci.precision

    @property
    def orientation(self) -> int:
        return self.full_weyl.orientation

    def weyl(self, duality: Duality) -> Block3:
        return self.weyl_plus if duality is Duality.SELF_DUAL else self.weyl_minus
