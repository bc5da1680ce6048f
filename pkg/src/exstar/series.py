"""Absorption-probability time series shared by every evolution engine."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .networks import NetworkSpec

__all__ = ["Provenance", "ObservableSeries"]


class Provenance(str, Enum):
    """Which engine produced a series."""

    FULL_FLS = "full"
    REDUCED = "reduced"
    CLASSICAL = "classical"


@dataclass(frozen=True)
class ObservableSeries:
    """Absorbed population ``p_absorbed(t)`` on an ascending time grid."""

    times: np.ndarray
    p_absorbed: np.ndarray
    spec: NetworkSpec
    dephasing: float
    provenance: Provenance

    def __post_init__(self) -> None:
        t = np.asarray(self.times, dtype=float)
        p = np.asarray(self.p_absorbed, dtype=float)
        if t.shape != p.shape or t.ndim != 1:
            raise ValueError("times and p_absorbed must be 1-d arrays of equal length")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "p_absorbed", p)

    def check(self, tol: float = 1e-8) -> None:
        """Raise unless the series is within [0, 1], starts at 0, and is monotone."""
        p = self.p_absorbed
        if p.min() < -tol or p.max() > 1.0 + tol:
            raise ValueError("p_absorbed outside [0, 1]")
        if self.times.size and self.times[0] == 0.0 and abs(p[0]) > tol:
            raise ValueError(f"p_absorbed(0) = {p[0]:.3e}, expected 0")
        if np.any(np.diff(p) < -tol):
            raise ValueError("p_absorbed must be non-decreasing in time")
