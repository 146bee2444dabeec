"""
Closed-form catalog of model gradient shrinking solitons
"""
from __future__ import annotations

import math
from typing import Dict, List, Protocol, runtime_checkable

import numpy as np

from app.core.exceptions import UnknownModel
from app.core.numeric import Precision, Scalar, as_array, as_scalar, zeros
from app.models.soliton import ModelName, PointData, SolitonModel
from app.models.tensors import AlgCurvTensor, Role, SymBilinear4


@runtime_checkable
class ModelRepository(Protocol):
    """Model catalog contract"""

    def get_model(self, name: str) -> SolitonModel:
        ...

    def list_models(self) -> List[SolitonModel]:
        ...


# ---------------------------------------------------------------- frame curvature builders


def space_form_curvature(sectional: Scalar, axes, precision: Precision) -> np.ndarray:
    """R_ijkl = K (d_ik d_jl - d_il d_jk) restricted to the frame vectors in `axes`"""
    k = as_scalar(sectional, precision)
    components = zeros((4, 4, 4, 4), precision)
    for i in axes:
        for j in axes:
            if i == j:
                continue
            components[i, j, i, j] = k
            components[i, j, j, i] = -k
    return components


def kahler_form(precision: Precision) -> np.ndarray:
    """omega = e1^e2 + e3^e4, self-dual for the frame orientation"""
    omega = zeros((4, 4), precision)
    one = as_scalar(1, precision)
    omega[0, 1], omega[1, 0] = one, -one
    omega[2, 3], omega[3, 2] = one, -one
    return omega


def kahler_curvature(holomorphic: Scalar, precision: Precision) -> np.ndarray:
    """Constant holomorphic sectional curvature H:
    R_ijkl = H/4 (d_ik d_jl - d_il d_jk + w_ik w_jl - w_il w_jk + 2 w_ij w_kl)
    """
    d = as_array(np.eye(4, dtype=int), precision)
    w = kahler_form(precision)
    components = (
        d[:, None, :, None] * d[None, :, None, :]
        - d[:, None, None, :] * d[None, :, :, None]
        + w[:, None, :, None] * w[None, :, None, :]
        - w[:, None, None, :] * w[None, :, :, None]
        + 2 * w[:, :, None, None] * w[None, None, :, :]
    )
    return components * (as_scalar(holomorphic, precision) * as_scalar("1/4", precision))


def _point(point, precision: Precision) -> tuple:
    return tuple(as_scalar(v, precision) for v in point)


def _bundle(point, curvature, ricci_diag, potential, gradient, hessian_diag, precision) -> PointData:
    ricci = SymBilinear4.diagonal(ricci_diag, precision, Role.RICCI)
    return PointData(
        point=point,
        curvature=AlgCurvTensor(curvature),
        ricci=ricci,
        scalar=ricci.trace(),
        potential=potential,
        gradient=as_array(gradient, precision),
        hessian=SymBilinear4.diagonal(hessian_diag, precision, Role.HESSIAN),
        metric=SymBilinear4.identity(precision),
    )


# ---------------------------------------------------------------- samplers (frame data)


def _gaussian(point, precision: Precision) -> PointData:
    x = _point(point, precision)
    quarter, half = as_scalar("1/4", precision), as_scalar("1/2", precision)
    return _bundle(
        x,
        zeros((4, 4, 4, 4), precision),
        [0, 0, 0, 0],
        sum(v * v for v in x) * quarter,
        [v * half for v in x],
        [half] * 4,
        precision,
    )


def _round_s4(point, precision: Precision) -> PointData:
    x = _point(point, precision)
    half = as_scalar("1/2", precision)
    return _bundle(
        x,
        space_form_curvature(as_scalar("1/6", precision), range(4), precision),
        [half] * 4,
        as_scalar(2, precision),
        [0, 0, 0, 0],
        [0, 0, 0, 0],
        precision,
    )


def _cylinder_s3xr(point, precision: Precision) -> PointData:
    x = _point(point, precision)
    quarter, half = as_scalar("1/4", precision), as_scalar("1/2", precision)
    t = x[3]
    return _bundle(
        x,
        space_form_curvature(quarter, range(3), precision),
        [half, half, half, 0],
        t * t * quarter + as_scalar("3/2", precision),
        [0, 0, 0, t * half],
        [0, 0, 0, half],
        precision,
    )


def _cylinder_s2xr2(point, precision: Precision) -> PointData:
    x = _point(point, precision)
    quarter, half = as_scalar("1/4", precision), as_scalar("1/2", precision)
    y1, y2 = x[2], x[3]
    return _bundle(
        x,
        space_form_curvature(half, range(2), precision),
        [half, half, 0, 0],
        (y1 * y1 + y2 * y2) * quarter + as_scalar(1, precision),
        [0, 0, y1 * half, y2 * half],
        [0, 0, half, half],
        precision,
    )


def _cp2(point, precision: Precision) -> PointData:
    x = _point(point, precision)
    half = as_scalar("1/2", precision)
    return _bundle(
        x,
        kahler_curvature(as_scalar("1/3", precision), precision),
        [half] * 4,
        as_scalar(2, precision),
        [0, 0, 0, 0],
        [0, 0, 0, 0],
        precision,
    )


# ---------------------------------------------------------------- coordinate charts (floating, batched)


def _diagonal_metric(*diagonals: np.ndarray) -> np.ndarray:
    diag = np.stack(np.broadcast_arrays(*diagonals), axis=-1)
    return diag[..., :, None] * np.eye(4)


def _gaussian_metric(x: np.ndarray) -> np.ndarray:
    return np.broadcast_to(np.eye(4), x.shape[:-1] + (4, 4)).copy()


def _gaussian_potential(x: np.ndarray) -> np.ndarray:
    return np.sum(x * x, axis=-1) / 4.0


def _s4_metric(x: np.ndarray) -> np.ndarray:
    conformal = 24.0 / (1.0 + np.sum(x * x, axis=-1)) ** 2
    return conformal[..., None, None] * np.eye(4)


def _constant_potential(value: float):
    def potential(x: np.ndarray) -> np.ndarray:
        return np.full(x.shape[:-1], value)
    return potential


def _s3xr_metric(x: np.ndarray) -> np.ndarray:
    psi, theta = x[..., 0], x[..., 1]
    s_psi = np.sin(psi) ** 2
    one = np.ones_like(psi)
    return _diagonal_metric(4.0 * one, 4.0 * s_psi, 4.0 * s_psi * np.sin(theta) ** 2, one)


def _s3xr_potential(x: np.ndarray) -> np.ndarray:
    return x[..., 3] ** 2 / 4.0 + 1.5


def _s2xr2_metric(x: np.ndarray) -> np.ndarray:
    theta = x[..., 0]
    one = np.ones_like(theta)
    return _diagonal_metric(2.0 * one, 2.0 * np.sin(theta) ** 2, one, one)


def _s2xr2_potential(x: np.ndarray) -> np.ndarray:
    return (x[..., 2] ** 2 + x[..., 3] ** 2) / 4.0 + 1.0


def _cp2_metric(x: np.ndarray) -> np.ndarray:
    """Affine Fubini-Study chart, z = (x0 + i x1, x2 + i x3), scaled to Ric = g/2"""
    rho = np.sum(x * x, axis=-1)
    u = x
    v = np.stack([-x[..., 1], x[..., 0], -x[..., 3], x[..., 2]], axis=-1)
    numerator = (
        (1.0 + rho)[..., None, None] * np.eye(4)
        - u[..., :, None] * u[..., None, :]
        - v[..., :, None] * v[..., None, :]
    )
    return 12.0 * numerator / ((1.0 + rho) ** 2)[..., None, None]


_CATALOG: tuple[SolitonModel, ...] = (
    SolitonModel(
        name=ModelName.GAUSSIAN_R4,
        title="Gaussian shrinker on R^4",
        normalization="flat metric",
        potential_formula="f = |x|^2/4",
        scalar_curvature=0,
        compact=False,
        coordinates=("x1", "x2", "x3", "x4"),
        domain=((None, None),) * 4,
        sample_box=((-3.0, 3.0),) * 4,
        sampler=_gaussian,
        coordinate_metric=_gaussian_metric,
        coordinate_potential=_gaussian_potential,
        compact_factor_diameter=0.0,
        potential_minimum=0.0,
    ),
    SolitonModel(
        name=ModelName.ROUND_S4,
        title="round sphere S^4",
        normalization="radius sqrt(6), sectional curvature 1/6",
        potential_formula="f = 2",
        scalar_curvature=2,
        compact=True,
        coordinates=("x1", "x2", "x3", "x4"),
        domain=((None, None),) * 4,
        sample_box=((-2.0, 2.0),) * 4,
        sampler=_round_s4,
        coordinate_metric=_s4_metric,
        coordinate_potential=_constant_potential(2.0),
        compact_factor_diameter=math.pi * math.sqrt(6.0),
        potential_minimum=2.0,
    ),
    SolitonModel(
        name=ModelName.CYLINDER_S3XR,
        title="round cylinder S^3 x R",
        normalization="S^3 radius 2",
        potential_formula="f = t^2/4 + 3/2",
        scalar_curvature=as_scalar("3/2", Precision.RATIONAL),
        compact=False,
        coordinates=("psi", "theta", "phi", "t"),
        domain=((0.0, math.pi), (0.0, math.pi), (None, None), (None, None)),
        sample_box=((0.3, math.pi - 0.3), (0.3, math.pi - 0.3), (0.0, 2.0 * math.pi), (-3.0, 3.0)),
        sampler=_cylinder_s3xr,
        coordinate_metric=_s3xr_metric,
        coordinate_potential=_s3xr_potential,
        compact_factor_diameter=2.0 * math.pi,
        potential_minimum=1.5,
    ),
    SolitonModel(
        name=ModelName.CYLINDER_S2XR2,
        title="round cylinder S^2 x R^2",
        normalization="S^2 radius sqrt(2)",
        potential_formula="f = |y|^2/4 + 1",
        scalar_curvature=1,
        compact=False,
        coordinates=("theta", "phi", "y1", "y2"),
        domain=((0.0, math.pi), (None, None), (None, None), (None, None)),
        sample_box=((0.3, math.pi - 0.3), (0.0, 2.0 * math.pi), (-3.0, 3.0), (-3.0, 3.0)),
        sampler=_cylinder_s2xr2,
        coordinate_metric=_s2xr2_metric,
        coordinate_potential=_s2xr2_potential,
        compact_factor_diameter=math.pi * math.sqrt(2.0),
        potential_minimum=1.0,
    ),
    SolitonModel(
        name=ModelName.CP2_FUBINI_STUDY,
        title="complex projective plane with the Fubini-Study metric",
        normalization="holomorphic sectional curvature 1/3",
        potential_formula="f = 2",
        scalar_curvature=2,
        compact=True,
        coordinates=("x1", "y1", "x2", "y2"),
        domain=((None, None),) * 4,
        sample_box=((-2.0, 2.0),) * 4,
        sampler=_cp2,
        coordinate_metric=_cp2_metric,
        coordinate_potential=_constant_potential(2.0),
        compact_factor_diameter=math.pi * math.sqrt(3.0),
        potential_minimum=2.0,
    ),
)


class InMemoryModelRepository(ModelRepository):
    """Catalog held in process memory; models are immutable"""

    def __init__(self, models: tuple[SolitonModel, ...] = _CATALOG):
        self._models: Dict[str, SolitonModel] = {model.name.value: model for model in models}

    def get_model(self, name: str) -> SolitonModel:
        key = name.value if isinstance(name, ModelName) else str(name)
        model = self._models.get(key)
        if model is None:
            raise UnknownModel(f"unknown model '{key}', expected one of {sorted(self._models)}")
        return model

    def list_models(self) -> List[SolitonModel]:
        return list(self._models.values())
