"""Lattices, graph metrics, and the two-copy (doubled) metric.

Site ordering is row-major in the coordinates, so matrix layouts downstream
are literal. A doubled system orders all up-copy sites first, then all
down-copy sites.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidInputError, InvalidSizeError

UP = "up"
DOWN = "down"


@dataclass(frozen=True)
class Lattice:
    """Finite lattice with integer graph metric.

    positions: (V, d) coordinate array in lattice units.
    extent: per-axis length; periodic: per-axis wrap flag.
    """

    positions: np.ndarray
    extent: tuple[int, ...]
    periodic: tuple[bool, ...]
    _dist: np.ndarray = field(repr=False)

    @property
    def nsites(self) -> int:
        return self.positions.shape[0]

    @property
    def dimension(self) -> int:
        return self.positions.shape[1]

    def distance(self, i: int, j: int) -> float:
        return float(self._dist[i, j])

    def distance_matrix(self) -> np.ndarray:
        return self._dist.copy()


def _axis_distance(a: np.ndarray, b: np.ndarray, length: int, wrap: bool) -> np.ndarray:
    d = np.abs(a - b)
    if wrap:
        d = np.minimum(d, length - d)
    return d


def _graph_metric(coords: np.ndarray, extent, periodic) -> np.ndarray:
    d = np.zeros((coords.shape[0], coords.shape[0]))
    for ax, (n, wrap) in enumerate(zip(extent, periodic)):
        d += _axis_distance(coords[:, ax][:, None], coords[:, ax][None, :], n, wrap)
    return d


def build_chain(nsites: int, periodic: bool = True) -> Lattice:
    """1D chain with graph distance (wraparound if periodic)."""
    if nsites < 2:
        raise InvalidSizeError(f"chain needs at least 2 sites, got {nsites}")
    pos = np.arange(nsites, dtype=float)[:, None]
    dist = _graph_metric(pos, (nsites,), (periodic,))
    return Lattice(pos, (nsites,), (periodic,), dist)


def build_square(lx: int, ly: int, periodic: bool = True) -> Lattice:
    """2D rectangular lattice with Manhattan graph distance, row-major sites."""
    if lx < 2 or ly < 2:
        raise InvalidSizeError(f"square lattice needs both extents >= 2, got {lx}x{ly}")
    xs, ys = np.meshgrid(np.arange(lx), np.arange(ly), indexing="ij")
    pos = np.stack([xs.ravel(), ys.ravel()], axis=1).astype(float)
    dist = _graph_metric(pos, (lx, ly), (periodic, periodic))
    return Lattice(pos, (lx, ly), (periodic, periodic), dist)


@dataclass(frozen=True)
class DoubledSite:
    """Site of the two-copy system: a base site plus a copy label."""

    base: int
    copy: str

    def __post_init__(self):
        if self.copy not in (UP, DOWN):
            raise InvalidInputError(f"copy label must be '{UP}' or '{DOWN}', got {self.copy!r}")


def doubled_index(lattice: Lattice, site: DoubledSite) -> int:
    """Flat index of a doubled site: up copy first, then down copy."""
    if not 0 <= site.base < lattice.nsites:
        raise InvalidInputError(f"base site {site.base} outside lattice of {lattice.nsites}")
    return site.base + (0 if site.copy == UP else lattice.nsites)


def doubled_metric(lattice: Lattice, p: DoubledSite, q: DoubledSite) -> float:
    """Two-copy metric: base distance plus 1 when the copies differ."""
    for s in (p, q):
        if not 0 <= s.base < lattice.nsites:
            raise InvalidInputError(f"base site {s.base} outside lattice of {lattice.nsites}")
    return lattice.distance(p.base, q.base) + (0.0 if p.copy == q.copy else 1.0)


class DoubledLattice:
    """Metric view of the two-copy system (2V flat sites, up block then down block)."""

    def __init__(self, base: Lattice):
        self.base = base

    @property
    def nsites(self) -> int:
        return 2 * self.base.nsites

    @property
    def dimension(self) -> int:
        return self.base.dimension

    def distance(self, i: int, j: int) -> float:
        v = self.base.nsites
        return self.base.distance(i % v, j % v) + (0.0 if (i // v) == (j // v) else 1.0)

    def distance_matrix(self) -> np.ndarray:
        d = self.base.distance_matrix()
        cross = d + 1.0
        return np.block([[d, cross], [cross, d]])
