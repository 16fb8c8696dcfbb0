"""Periodic grid geometry and cell regions."""
import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ConfigurationError, DomainError, ShapeMismatchError

Interval = Tuple[float, float]
Box = Tuple[Interval, ...]


class Space(Enum):
    """Representation a region is drawn in."""
    POSITION = "position"
    MOMENTUM = "momentum"


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Uniform periodic tensor grid in one or two dimensions.

    Points sit at x_i = -L/2 + i*dx (vertex centred, numpy FFT layout).
    """
    points: Tuple[int, ...]
    lengths: Tuple[float, ...]

    def __post_init__(self):
        points = tuple(int(n) for n in self.points)
        lengths = tuple(float(length) for length in self.lengths)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "lengths", lengths)

        if len(points) not in (1, 2):
            raise ConfigurationError(f"Grid dimension must be 1 or 2, got {len(points)}")
        if len(points) != len(lengths):
            raise ConfigurationError("points and lengths must have one entry per axis")
        for n in points:
            if n < 8 or not _is_power_of_two(n):
                raise ConfigurationError(f"points per axis must be a power of two >= 8, got {n}")
        for length in lengths:
            if not math.isfinite(length) or length <= 0:
                raise ConfigurationError(f"box length must be positive and finite, got {length}")

    @classmethod
    def line(cls, points: int, length: float) -> "Grid":
        return cls((points,), (length,))

    @classmethod
    def plane(
        cls,
        points: Union[int, Sequence[int]],
        length: Union[float, Sequence[float]],
    ) -> "Grid":
        if isinstance(points, int):
            points = (points, points)
        if isinstance(length, (int, float)):
            length = (length, length)
        return cls(tuple(points), tuple(length))

    @classmethod
    def tensor(cls, first: "Grid", second: "Grid") -> "Grid":
        """Two-particle configuration grid from two 1D grids."""
        if first.dim != 1 or second.dim != 1:
            raise ConfigurationError("tensor grids are built from two 1D grids")
        return cls(first.points + second.points, first.lengths + second.lengths)

    @classmethod
    def for_velocity_cone(cls, points: int, t: float, mass: float = 1.0) -> "Grid":
        """
        1D grid whose position cells at time t map one-to-one onto momentum cells.

        With L**2 = 2*pi*N*t/m the cone image (t/m)*k_j of every wavenumber
        lands exactly on the grid point x_j, so cell membership agrees in both
        representations.

        Args:
            points: Number of grid points (power of two)
            t: Detection time of the velocity cone
            mass: Particle mass

        Returns:
            Grid with the matching box length
        """
        if t <= 0 or mass <= 0:
            raise DomainError("velocity-cone grid needs t > 0 and mass > 0")
        return cls.line(points, math.sqrt(2.0 * math.pi * points * t / mass))

    @property
    def dim(self) -> int:
        return len(self.points)

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.points

    @property
    def size(self) -> int:
        return int(np.prod(self.points))

    @property
    def spacing(self) -> Tuple[float, ...]:
        return tuple(length / n for length, n in zip(self.lengths, self.points))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def momentum_spacing(self) -> Tuple[float, ...]:
        return tuple(2.0 * math.pi / length for length in self.lengths)

    @property
    def momentum_cell_volume(self) -> float:
        return float(np.prod(self.momentum_spacing))

    @cached_property
    def axes(self) -> Tuple[np.ndarray, ...]:
        return tuple(
            -length / 2.0 + np.arange(n) * (length / n)
            for n, length in zip(self.points, self.lengths)
        )

    @cached_property
    def wavenumbers(self) -> Tuple[np.ndarray, ...]:
        """Wavenumbers per axis in FFT order."""
        return tuple(
            2.0 * math.pi * np.fft.fftfreq(n, d=dx)
            for n, dx in zip(self.points, self.spacing)
        )

    @cached_property
    def k_squared(self) -> np.ndarray:
        meshes = np.meshgrid(*self.wavenumbers, indexing="ij")
        return sum(k ** 2 for k in meshes)

    @property
    def k_max_squared(self) -> float:
        """Largest |k|^2 on the grid (Nyquist corner)."""
        return float(sum((math.pi / dx) ** 2 for dx in self.spacing))

    def coordinates(self) -> Tuple[np.ndarray, ...]:
        """Position meshes with 'ij' indexing."""
        return tuple(np.meshgrid(*self.axes, indexing="ij"))

    def cell_centers(self, space: Space) -> Tuple[np.ndarray, ...]:
        if space is Space.POSITION:
            return self.axes
        return self.wavenumbers

    def axis_grid(self, axis: int) -> "Grid":
        return Grid.line(self.points[axis], self.lengths[axis])

    def describe(self) -> str:
        dims = " x ".join(f"{n}@{length:g}" for n, length in zip(self.points, self.lengths))
        return f"Grid({dims})"


@dataclass(frozen=True)
class Region:
    """
    Union of disjoint axis-aligned boxes, measured in whole grid cells.

    A cell belongs to the region iff its centre lies in one of the half-open
    boxes [lo, hi) x ... . Bounds may be infinite.
    """
    boxes: Tuple[Box, ...]
    space: Space = Space.POSITION

    def __post_init__(self):
        boxes = tuple(
            tuple((float(lo), float(hi)) for lo, hi in box) for box in self.boxes
        )
        object.__setattr__(self, "boxes", boxes)

        dims = {len(box) for box in boxes}
        if len(dims) > 1:
            raise ShapeMismatchError("region boxes must share one dimension")
        for box in boxes:
            for lo, hi in box:
                if math.isnan(lo) or math.isnan(hi) or not lo < hi:
                    raise DomainError(f"invalid interval [{lo}, {hi})")
        for i, first in enumerate(boxes):
            for second in boxes[i + 1:]:
                if _boxes_overlap(first, second):
                    raise DomainError(f"region members overlap: {first} and {second}")

    @classmethod
    def interval(cls, lo: float, hi: float, space: Space = Space.POSITION) -> "Region":
        return cls((((lo, hi),),), space)

    @classmethod
    def box(cls, *intervals: Interval, space: Space = Space.POSITION) -> "Region":
        return cls((tuple(intervals),), space)

    @classmethod
    def whole(cls, dim: int = 1, space: Space = Space.POSITION) -> "Region":
        return cls((tuple((-math.inf, math.inf) for _ in range(dim)),), space)

    @classmethod
    def empty(cls, space: Space = Space.POSITION) -> "Region":
        return cls((), space)

    @classmethod
    def union(cls, *regions: "Region") -> "Region":
        if not regions:
            raise DomainError("union of no regions")
        spaces = {region.space for region in regions}
        if len(spaces) > 1:
            raise DomainError("cannot join position and momentum regions")
        boxes = tuple(box for region in regions for box in region.boxes)
        return cls(boxes, regions[0].space)

    @classmethod
    def partition(
        cls,
        grid: Grid,
        count: int,
        axis: int = 0,
        space: Space = Space.POSITION,
        span: Optional[Interval] = None,
    ) -> Tuple["Region", ...]:
        """
        Split a span of one axis into `count` equal cells.

        Without a span the full axis is used ([-L/2, L/2) in position,
        [-k_nyquist, k_nyquist) in momentum), so the cells cover every grid
        cell exactly once.
        """
        if count < 1:
            raise DomainError("partition needs at least one cell")
        if span is None:
            if space is Space.POSITION:
                half = grid.lengths[axis] / 2.0
            else:
                # padded by half a cell so the Nyquist mode survives rounding
                half = math.pi / grid.spacing[axis] + 0.5 * grid.momentum_spacing[axis]
            span = (-half, half)
        edges = np.linspace(span[0], span[1], count + 1)
        regions = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            intervals = [(-math.inf, math.inf)] * grid.dim
            intervals[axis] = (float(lo), float(hi))
            regions.append(cls((tuple(intervals),), space))
        return tuple(regions)

    @property
    def dim(self) -> Optional[int]:
        return len(self.boxes[0]) if self.boxes else None

    @property
    def is_empty(self) -> bool:
        return not self.boxes

    def mask(self, grid: Grid) -> np.ndarray:
        """Boolean cell-membership array on the grid (FFT order in momentum space)."""
        selected = np.zeros(grid.shape, dtype=bool)
        if self.is_empty:
            return selected
        if self.dim != grid.dim:
            raise ShapeMismatchError(f"{self.dim}D region on {grid.dim}D grid")

        centers = np.meshgrid(*grid.cell_centers(self.space), indexing="ij")
        for box in self.boxes:
            member = np.ones(grid.shape, dtype=bool)
            for (lo, hi), c in zip(box, centers):
                member &= (c >= lo) & (c < hi)
            selected |= member
        return selected

    def scaled(self, factor: float, space: Optional[Space] = None) -> "Region":
        if not factor > 0:
            raise DomainError("region scale factor must be positive")
        boxes = tuple(
            tuple((lo * factor, hi * factor) for lo, hi in box) for box in self.boxes
        )
        return Region(boxes, space or self.space)

    def clipped(self, grid: Grid) -> Tuple["Region", bool]:
        """
        Intersect with the grid's extent in this region's space.

        Returns:
            (clipped region, whether any finite part was cut away)
        """
        if self.is_empty:
            return self, False
        limits = []
        for axis in range(grid.dim):
            if self.space is Space.POSITION:
                half = grid.lengths[axis] / 2.0
            else:
                half = math.pi / grid.spacing[axis]
            limits.append((-half, half))

        cut = False
        boxes = []
        for box in self.boxes:
            new_box = []
            for (lo, hi), (low_limit, high_limit) in zip(box, limits):
                new_lo, new_hi = max(lo, low_limit), min(hi, high_limit)
                if (math.isfinite(lo) and lo < low_limit) or (math.isfinite(hi) and hi > high_limit):
                    cut = True
                new_box.append((new_lo, new_hi))
            if all(lo < hi for lo, hi in new_box):
                boxes.append(tuple(new_box))
            else:
                cut = True
        return Region(tuple(boxes), self.space), cut

    def describe(self) -> str:
        if self.is_empty:
            return f"{self.space.value}:empty"
        parts = []
        for box in self.boxes:
            parts.append(" x ".join(f"[{lo:g},{hi:g})" for lo, hi in box))
        return f"{self.space.value}:" + " U ".join(parts)


def _boxes_overlap(first: Box, second: Box) -> bool:
    return all(max(a[0], b[0]) < min(a[1], b[1]) for a, b in zip(first, second))
