"""
Model soliton data models (database-agnostic)
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np

from app.core.exceptions import PointOutOfDomain
from app.core.numeric import Precision, Scalar
from app.models.tensors import AlgCurvTensor, SymBilinear4


class ModelName(str, Enum):
    GAUSSIAN_R4 = "gaussian_r4"
    ROUND_S4 = "round_s4"
    CYLINDER_S3XR = "cylinder_s3xr"
    CYLINDER_S2XR2 = "cylinder_s2xr2"
    CP2_FUBINI_STUDY = "cp2_fubini_study"


@dataclass(frozen=True, eq=False)
class PointData:
    """Exact pointwise data of a model, all in the model's orthonormal frame"""
    point: tuple
    curvature: AlgCurvTensor
    ricci: SymBilinear4
    scalar: Scalar
    potential: Scalar
    gradient: np.ndarray
    hessian: SymBilinear4
    metric: SymBilinear4


@dataclass(frozen=True, eq=False)
class SolitonModel:
    """A closed-form gradient shrinking soliton normalized to Ric + Hess f = g/2"""
    name: ModelName
    title: str
    normalization: str
    potential_formula: str
    scalar_curvature: Scalar
    compact: bool
    coordinates: tuple[str, ...]
    # open interval per coordinate; None means unbounded
    domain: tuple[tuple[Optional[float], Optional[float]], ...]
    # box used for random sampling and default chart export
    sample_box: tuple[tuple[float, float], ...]
    sampler: Callable[[tuple, Precision], PointData] = field(repr=False)
    coordinate_metric: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    coordinate_potential: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    # diameter of the compact factor (0 for the Gaussian), used for distance shortcuts
    compact_factor_diameter: float = 0.0
    # minimum of f, attained on the compact factor
    potential_minimum: float = 0.0

    def contains(self, point) -> bool:
        if len(point) != 4:
            return False
        for value, (low, high) in zip(point, self.domain):
            if low is not None and not float(value) > low:
                return False
            if high is not None and not float(value) < high:
                return False
        return True

    def data(self, point, precision: Precision = Precision.FLOATING) -> PointData:
        point = tuple(point)
        if not self.contains(point):
            raise PointOutOfDomain(f"{tuple(float(v) for v in point)} is outside the {self.name.value} chart domain")
        return self.sampler(point, precision)
