"""
Scalar field helpers for the two precision modes.

Rational mode stores every component as `fractions.Fraction` inside numpy object
arrays; floating mode uses float64 arrays. All tensor code is written against
numpy operations that work for both dtypes (broadcast arithmetic, tensordot,
diagonal, sum).
"""
import math
from enum import Enum
from fractions import Fraction
from typing import Iterable, Union

import numpy as np

from app.core.config import settings

Scalar = Union[Fraction, float]


class Precision(str, Enum):
    RATIONAL = "rational"
    FLOATING = "floating"


def is_exact(value) -> bool:
    """True for Fraction/int values (bool excluded)"""
    return isinstance(value, (Fraction, int)) and not isinstance(value, bool)


def is_rational_array(array: np.ndarray) -> bool:
    return array.dtype == object


def precision_of(array: np.ndarray) -> Precision:
    return Precision.RATIONAL if is_rational_array(array) else Precision.FLOATING


def as_scalar(value, precision: Precision) -> Scalar:
    """Coerce ints, floats, Fractions or "p/q" strings to the mode's scalar type"""
    if isinstance(value, str):
        value = Fraction(value)
    elif isinstance(value, np.integer):
        value = int(value)
    elif isinstance(value, np.floating):
        value = float(value)
    if precision is Precision.RATIONAL:
        return value if isinstance(value, Fraction) else Fraction(value)
    return float(value)


def as_array(values, precision: Precision) -> np.ndarray:
    """Convert nested sequences (or arrays) to the storage dtype of `precision`"""
    if precision is Precision.RATIONAL:
        raw = np.asarray(values, dtype=object)
        out = np.empty(raw.shape, dtype=object)
        for idx, v in np.ndenumerate(raw):
            out[idx] = as_scalar(v, precision)
        return out
    return np.array(values, dtype=np.float64)


def zeros(shape, precision: Precision) -> np.ndarray:
    if precision is Precision.RATIONAL:
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out
    return np.zeros(shape, dtype=np.float64)


def identity(n: int, precision: Precision) -> np.ndarray:
    out = zeros((n, n), precision)
    for i in range(n):
        out[i, i] = as_scalar(1, precision)
    return out


def tol_abs(precision: Precision) -> float:
    return 0.0 if precision is Precision.RATIONAL else settings.TOL_ABS


def tol_eq(precision: Precision) -> float:
    return 0.0 if precision is Precision.RATIONAL else settings.TOL_EQ


def exact_sqrt(value: Fraction) -> Fraction | None:
    """Square root of a non-negative rational if it is a perfect square"""
    if value < 0:
        return None
    p, q = value.numerator, value.denominator
    rp, rq = math.isqrt(p), math.isqrt(q)
    if rp * rp == p and rq * rq == q:
        return Fraction(rp, rq)
    return None


def sqrt(value: Scalar) -> Scalar:
    """Exact root when possible, float otherwise; tiny negative floats clamp to 0"""
    if is_exact(value):
        root = exact_sqrt(Fraction(value))
        if root is not None:
            return root
    v = float(value)
    if v < 0.0:
        if v > -settings.TOL_ABS:
            return 0.0
        raise ValueError(f"square root of negative value {v}")
    return math.sqrt(v)


def max_abs(values: Iterable) -> Scalar:
    """Largest absolute entry, keeping exactness for rational arrays"""
    arr = np.asarray(values)
    if arr.size == 0:
        return 0.0
    if is_rational_array(arr):
        return max(abs(v) for v in arr.flat)
    return float(np.max(np.abs(arr)))


def fmt(value) -> str:
    """Stable text form: `p/q` for rationals, repr for floats"""
    if isinstance(value, bool):
        return str(value).lower()
    if is_exact(value):
        frac = Fraction(value)
        return str(frac.numerator) if frac.denominator == 1 else f"{frac.numerator}/{frac.denominator}"
    return repr(float(value))
