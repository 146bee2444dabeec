"""
Coordinate metric grids (database-agnostic)
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from app.core.exceptions import GridTooCoarse, MetricNotPositiveDefinite, NonSymmetricInput

MIN_NODES = 5


@dataclass(frozen=True)
class Axis:
    """Uniform axis with `count` nodes from `minimum` to `maximum` inclusive"""
    minimum: float
    maximum: float
    count: int

    def __post_init__(self):
        if self.count < MIN_NODES:
            raise GridTooCoarse(f"axis needs at least {MIN_NODES} nodes, got {self.count}")
        if not self.maximum > self.minimum:
            raise GridTooCoarse(f"axis range [{self.minimum}, {self.maximum}] is empty")

    @property
    def spacing(self) -> float:
        return (self.maximum - self.minimum) / (self.count - 1)

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.minimum, self.maximum, self.count)


@dataclass(frozen=True, eq=False)
class MetricChart:
    """Coordinate metric samples g_ij (and optionally f) on a uniform 4D grid"""
    axes: tuple[Axis, Axis, Axis, Axis]
    metric: np.ndarray
    potential: Optional[np.ndarray] = None
    margin: int = 2

    def __post_init__(self):
        axes = tuple(a if isinstance(a, Axis) else Axis(float(a[0]), float(a[1]), int(a[2])) for a in self.axes)
        if len(axes) != 4:
            raise GridTooCoarse(f"a chart has four axes, got {len(axes)}")
        object.__setattr__(self, "axes", axes)
        shape = self.shape
        metric = np.array(self.metric, dtype=np.float64)
        if metric.shape != shape + (4, 4):
            raise NonSymmetricInput(f"metric samples have shape {metric.shape}, expected {shape + (4, 4)}")
        if np.max(np.abs(metric - np.swapaxes(metric, -1, -2))) > 1e-12 * (1.0 + np.max(np.abs(metric))):
            raise NonSymmetricInput("metric samples are not symmetric")
        eigenvalues = np.linalg.eigvalsh(metric)
        bad = np.argwhere(eigenvalues[..., 0] <= 0.0)
        if bad.size:
            raise MetricNotPositiveDefinite(f"metric is not positive definite at node {tuple(int(i) for i in bad[0])}")
        metric.setflags(write=False)
        object.__setattr__(self, "metric", metric)
        if self.potential is not None:
            potential = np.array(self.potential, dtype=np.float64)
            if potential.shape != shape:
                raise NonSymmetricInput(f"potential samples have shape {potential.shape}, expected {shape}")
            potential.setflags(write=False)
            object.__setattr__(self, "potential", potential)
        if any(2 * self.margin >= axis.count for axis in axes):
            raise GridTooCoarse(f"margin {self.margin} leaves no interior nodes")

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return tuple(axis.count for axis in self.axes)

    @property
    def spacings(self) -> tuple[float, ...]:
        return tuple(axis.spacing for axis in self.axes)

    @property
    def has_potential(self) -> bool:
        return self.potential is not None

    def interior_mask(self, margin: Optional[int] = None) -> np.ndarray:
        """Nodes at least `margin` steps from every face"""
        margin = self.margin if margin is None else margin
        mask = np.zeros(self.shape, dtype=bool)
        mask[tuple(slice(margin, n - margin) for n in self.shape)] = True
        return mask

    def with_potential(self, potential: np.ndarray) -> "MetricChart":
        return MetricChart(self.axes, self.metric, potential, self.margin)
