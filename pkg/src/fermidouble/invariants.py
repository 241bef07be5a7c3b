"""Pfaffian, Majorana number, reference pairing states, and the sector Chern sum.

The Pfaffian uses skew-symmetric tridiagonalization with partial pivoting
(Parlett-Reid), tracking row/column swaps exactly, so the sign is reliable;
that sign is the whole content of the Majorana number.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ImpureStateError, InvalidInputError, InvalidSizeError
from .lattice import Lattice
from .spectral import MajoranaCovariance, OccupiedProjector


def pfaffian(skew) -> float | complex:
    """Pfaffian of an even-dimensional antisymmetric matrix, Pf(S)^2 = det(S).

    O(n^3) with partial pivoting; exact for the canonical 2x2 and
    block-diagonal cases.
    """
    s = skew.data if isinstance(skew, MajoranaCovariance) else np.asarray(skew)
    n = s.shape[0] if s.ndim == 2 else 0
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {s.shape}")
    if n % 2:
        raise InvalidInputError(f"Pfaffian needs even dimension, got {n}")
    if n == 0:
        return 1.0
    scale = max(1.0, np.abs(s).max())
    if np.abs(s + s.T).max() > 1e-10 * scale:
        raise InvalidInputError("matrix not antisymmetric")

    a = s.astype(complex if np.iscomplexobj(s) else float).copy()
    pf = 1.0 + 0.0j if np.iscomplexobj(s) else 1.0
    for k in range(0, n - 1, 2):
        # pivot the largest entry of column k into row k+1
        piv = k + 1 + int(np.argmax(np.abs(a[k + 1:, k])))
        if piv != k + 1:
            a[[k + 1, piv], :] = a[[piv, k + 1], :]
            a[:, [k + 1, piv]] = a[:, [piv, k + 1]]
            pf = -pf
        if a[k + 1, k] == 0:
            return 0.0 * pf
        pf *= a[k, k + 1]
        if k + 2 < n:
            tau = a[k + 2:, k] / a[k + 1, k]
            col = a[k + 2:, k + 1]
            a[k + 2:, k + 2:] += np.outer(tau, col) - np.outer(col, tau)
    if not np.iscomplexobj(s):
        return float(pf)
    return complex(pf)


def state_odd(v: int) -> MajoranaCovariance:
    """Covariance of the fully occupied product state: blocks [[0,1],[-1,0]] per site."""
    if v < 2:
        raise InvalidSizeError(f"need at least 2 sites, got {v}")
    b = np.zeros((2 * v, 2 * v))
    for j in range(v):
        b[2 * j, 2 * j + 1] = 1.0
        b[2 * j + 1, 2 * j] = -1.0
    return MajoranaCovariance(b)


def state_even(v: int) -> MajoranaCovariance:
    """Index-shifted partner of state_odd: B_even[i, j] = B_odd[i+1, j+1] mod 2V."""
    if v < 2:
        raise InvalidSizeError(f"need at least 2 sites, got {v}")
    bo = state_odd(v).data
    n = 2 * v
    idx = (np.arange(n) + 1) % n
    return MajoranaCovariance(bo[np.ix_(idx, idx)])


def majorana_number(b: MajoranaCovariance, purity_tol: float = 1e-6) -> int:
    """Sign of Pf(B) under the global site ordering; a Z2 pairing invariant.

    Only sign differences between states (and the parity under doubling) are
    convention-free; the absolute sign depends on the frozen ordering, under
    which the fully occupied state has majorana_number +1.
    """
    defect = b.purity_defect()
    if defect > purity_tol:
        raise ImpureStateError(f"covariance purity defect {defect:.3e} exceeds {purity_tol:.1e}")
    pf = pfaffian(b.data)
    if pf == 0:
        raise ImpureStateError("Pfaffian vanished; state not a pure pairing state")
    return 1 if pf > 0 else -1


@dataclass(frozen=True)
class SectorPartition:
    """Three disjoint counterclockwise sectors of a disc, specified by site index sets."""

    indices_a: np.ndarray
    indices_b: np.ndarray
    indices_c: np.ndarray
    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        sets = [set(np.asarray(s).tolist()) for s in (self.indices_a, self.indices_b, self.indices_c)]
        if any(len(s) == 0 for s in sets):
            raise InvalidInputError("every sector must be nonempty")
        if sets[0] & sets[1] or sets[0] & sets[2] or sets[1] & sets[2]:
            raise InvalidInputError("sectors must be pairwise disjoint")


def sector_partition(
    lattice: Lattice,
    center: tuple[float, float] | None = None,
    radius: float | None = None,
) -> SectorPartition:
    """Disc of radius min(extent)/3 at the lattice center, cut into 120-degree sectors.

    Sectors are ordered counterclockwise starting at angle 0.
    """
    if lattice.dimension != 2:
        raise InvalidInputError("sector partition needs a 2D lattice")
    pos = lattice.positions
    if center is None:
        center = tuple(pos.mean(axis=0))
    if radius is None:
        radius = min(lattice.extent) / 3.0
    rel = pos - np.asarray(center)
    r = np.hypot(rel[:, 0], rel[:, 1])
    theta = np.mod(np.arctan2(rel[:, 1], rel[:, 0]), 2 * np.pi)
    inside = r <= radius
    third = 2 * np.pi / 3
    ia = np.where(inside & (theta < third))[0]
    ib = np.where(inside & (theta >= third) & (theta < 2 * third))[0]
    ic = np.where(inside & (theta >= 2 * third))[0]
    return SectorPartition(ia, ib, ic, center, float(radius))


def sector_triple_sum(p: np.ndarray, part: SectorPartition) -> complex:
    """The raw complex sector sum; its antisymmetrized imaginary part carries the invariant."""
    pab = p[np.ix_(part.indices_a, part.indices_b)]
    pbc = p[np.ix_(part.indices_b, part.indices_c)]
    pca = p[np.ix_(part.indices_c, part.indices_a)]
    return complex(np.trace(pab @ pbc @ pca))


def real_space_chern(
    p,
    part: SectorPartition,
    imag_tol: float = 1e-8,
    purity_tol: float = 1e-6,
) -> float:
    """Sector invariant 12*pi*i * sum_{A,B,C} (P_jk P_kl P_lj - P_jl P_lk P_kj).

    Near-integer for a projector with exponentially decaying entries on a
    lattice large compared to the decay length; zero for factorized states.
    """
    m = p.data if isinstance(p, OccupiedProjector) else np.asarray(p)
    res = np.abs(m @ m - m).max()
    if res > purity_tol:
        raise InvalidInputError(f"input not a projector: |P^2-P| = {res:.3e}")
    t1 = sector_triple_sum(m, part)
    t2 = sector_triple_sum(m.conj().T, part)
    nu = 12 * np.pi * 1j * (t1 - t2)
    if abs(nu.imag) > imag_tol * max(1.0, abs(nu.real)):
        raise InvalidInputError(f"sector sum has imaginary residual {nu.imag:.3e}")
    return float(nu.real)


def real_space_chern_residual(p, part: SectorPartition) -> float:
    """Imaginary residual of the sector sum (hermiticity diagnostics for reports)."""
    m = p.data if isinstance(p, OccupiedProjector) else np.asarray(p)
    t1 = sector_triple_sum(m, part)
    t2 = sector_triple_sum(m.conj().T, part)
    return float((12 * np.pi * 1j * (t1 - t2)).imag)


def expand_partition(part: SectorPartition, site_of_index: np.ndarray) -> SectorPartition:
    """Lift a site partition to matrix indices via an index -> site map.

    Used for particle-hole doubled projectors where several matrix rows
    belong to one lattice site.
    """
    site_of_index = np.asarray(site_of_index)

    def lift(sites):
        mask = np.isin(site_of_index, sites)
        return np.where(mask)[0]

    return SectorPartition(
        lift(part.indices_a), lift(part.indices_b), lift(part.indices_c), part.center, part.radius
    )
