"""Time-dependent gauge parameter."""
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from ..core.errors import ConfigurationError


@dataclass(frozen=True)
class GaugeSchedule:
    """
    Piecewise-linear gamma(t) through (time, gamma) breakpoints.

    gamma is held constant outside the breakpoint range; gamma_dot is the
    slope of the segment containing t (zero outside). A single breakpoint
    is a constant schedule.
    """
    breakpoints: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        points = tuple((float(t), float(g)) for t, g in self.breakpoints)
        if not points:
            raise ConfigurationError("gauge schedule needs at least one breakpoint")
        for t, g in points:
            if not (math.isfinite(t) and math.isfinite(g)):
                raise ConfigurationError("gauge schedule breakpoints must be finite")
        times = [t for t, _ in points]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ConfigurationError("gauge schedule times must be strictly increasing")
        object.__setattr__(self, "breakpoints", points)

    @classmethod
    def constant(cls, gamma: float) -> "GaugeSchedule":
        return cls(((0.0, gamma),))

    @classmethod
    def piecewise_linear(cls, points: Sequence[Tuple[float, float]]) -> "GaugeSchedule":
        return cls(tuple(points))

    @property
    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.breakpoints])

    @property
    def values(self) -> np.ndarray:
        return np.array([g for _, g in self.breakpoints])

    @property
    def is_constant(self) -> bool:
        return len(set(g for _, g in self.breakpoints)) == 1

    def gamma(self, t: float) -> float:
        return float(np.interp(t, self.times, self.values))

    def gamma_dot(self, t: float) -> float:
        times = self.times
        if len(times) < 2 or t < times[0] or t >= times[-1]:
            return 0.0
        segment = int(np.searchsorted(times, t, side="right")) - 1
        g0, g1 = self.values[segment], self.values[segment + 1]
        return float((g1 - g0) / (times[segment + 1] - times[segment]))
