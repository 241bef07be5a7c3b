"""Least-squares helpers: log-linear decay fits and linear growth fits."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import FitUndefinedError


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r2: float
    npoints: int


@dataclass(frozen=True)
class DecayFit:
    """Fit of log(value) vs distance; xi = -1/slope when decaying."""

    slope: float
    intercept: float
    r2: float
    npoints: int
    degenerate: bool = False

    @property
    def xi(self) -> float:
        if self.degenerate:
            return 0.0
        return float("inf") if self.slope >= 0 else -1.0 / self.slope


def linear_fit(x, y) -> LinearFit:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise FitUndefinedError(f"need at least 2 points, got {x.size}")
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return LinearFit(float(slope), float(intercept), r2, x.size)


def envelope_by_distance(values: np.ndarray, dist: np.ndarray, bin_width: float = 1.0):
    """Max |value| per distance bin. Returns (bin centers, envelope)."""
    v = np.abs(np.asarray(values)).ravel()
    d = np.asarray(dist, dtype=float).ravel()
    bins = np.floor(d / bin_width).astype(int)
    centers, env = [], []
    for b in np.unique(bins):
        centers.append(b * bin_width)
        env.append(v[bins == b].max())
    return np.array(centers), np.array(env)


def fit_log_decay(distances, values, floor: float = 1e-12) -> DecayFit:
    """Log-linear fit of a decaying envelope; points at or below floor are dropped."""
    d = np.asarray(distances, dtype=float)
    v = np.asarray(values, dtype=float)
    keep = v > floor
    d, v = d[keep], v[keep]
    if d.size == 0:
        raise FitUndefinedError("no support points above the floor")
    if d.size == 1 or np.ptp(d) == 0:
        return DecayFit(slope=0.0, intercept=float(np.log(v.max())), r2=1.0,
                        npoints=int(d.size), degenerate=True)
    fit = linear_fit(d, np.log(v))
    return DecayFit(fit.slope, fit.intercept, fit.r2, fit.npoints,
                    degenerate=d.size < 3)


def matrix_decay_fit(matrix: np.ndarray, dist: np.ndarray, floor: float = 1e-12) -> tuple:
    """Envelope and decay fit of |matrix| entries against a distance matrix."""
    centers, env = envelope_by_distance(matrix, dist)
    return (centers, env, fit_log_decay(centers, env, floor=floor))
