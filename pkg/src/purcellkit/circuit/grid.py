from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InputError


@dataclass(frozen=True)
class FrequencyGrid:
    """Strictly increasing, positive angular frequencies in rad/s."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).ravel()
        if pts.size == 0:
            raise InputError("frequency grid is empty")
        if np.any(~np.isfinite(pts)) or np.any(pts <= 0):
            raise InputError("frequency grid points must be positive and finite")
        if np.any(np.diff(pts) <= 0):
            raise InputError("frequency grid must be strictly increasing")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def linear_hz(cls, fmin_hz: float, fmax_hz: float, n: int) -> FrequencyGrid:
        if not (0 < fmin_hz < fmax_hz) or n < 2:
            raise InputError(f"bad sweep: fmin={fmin_hz}, fmax={fmax_hz}, n={n}")
        return cls(2 * math.pi * np.linspace(fmin_hz, fmax_hz, int(n)))

    @property
    def hz(self) -> np.ndarray:
        return self.points / (2 * math.pi)

    def __len__(self):
        return self.points.size

    def merged(self, extra) -> FrequencyGrid:
        """Union with additional points (duplicates dropped)."""
        return FrequencyGrid(np.unique(np.concatenate([self.points, np.ravel(extra)])))
