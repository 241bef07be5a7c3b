"""Exponentially localized bases for the occupied space of gapped models.

In one dimension with open boundaries, diagonalizing the position operator
compressed to the occupied space, G X G, yields an orthonormal localized
basis spanning range(G). In two dimensions G X G and G Y G only almost
commute; the report measures their commutator against the linear growth of
the operators themselves.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import FitUndefinedError, InvalidInputError, UnsupportedModelError
from .fits import envelope_by_distance, linear_fit
from .lattice import Lattice
from .spectral import OccupiedProjector


@dataclass(frozen=True)
class PositionOperator:
    """Diagonal operator of one coordinate axis, in lattice units."""

    axis: str
    diagonal: np.ndarray

    def matrix(self) -> np.ndarray:
        return np.diag(self.diagonal)


def position_operator(lattice: Lattice, axis: str = "x") -> PositionOperator:
    ax = {"x": 0, "y": 1}.get(axis)
    if ax is None or ax >= lattice.dimension:
        raise InvalidInputError(f"axis {axis!r} not available on a {lattice.dimension}D lattice")
    if lattice.periodic[ax]:
        raise UnsupportedModelError("position operator is ill-defined on a periodic axis")
    return PositionOperator(axis, lattice.positions[:, ax].copy())


@dataclass(frozen=True)
class LocalizationFit:
    length: float
    r2: float
    degenerate: bool


def localization_length(psi: np.ndarray, center: float, lattice: Lattice) -> LocalizationFit:
    """Exponential decay length of |psi| around `center` from its binned envelope.

    Returns length 0 with the degenerate flag for vectors supported within a
    single distance bin (nothing to fit).
    """
    psi = np.asarray(psi)
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise FitUndefinedError("zero vector has no localization length")
    amp = np.abs(psi) / norm
    x = lattice.positions[:, 0]
    d = np.abs(x - center)
    keep = amp > 1e-12
    if not np.any(keep):
        raise FitUndefinedError("no support points above the amplitude floor")
    centers, env = envelope_by_distance(amp[keep], d[keep])
    if centers.size < 2:
        return LocalizationFit(0.0, 1.0, True)
    fit = linear_fit(centers, np.log(env))
    if fit.slope >= 0:
        return LocalizationFit(float("inf"), fit.r2, True)
    return LocalizationFit(-1.0 / fit.slope, fit.r2, centers.size < 3)


@dataclass(frozen=True)
class WannierBasis:
    """Orthonormal localized vectors spanning an occupied-space projector."""

    functions: np.ndarray  # columns
    centers: np.ndarray
    lengths: np.ndarray
    fit_r2: np.ndarray

    @property
    def count(self) -> int:
        return self.functions.shape[1]

    def reconstruction(self) -> np.ndarray:
        return self.functions @ self.functions.conj().T

    def reconstruction_error(self, g) -> float:
        m = g.data if isinstance(g, OccupiedProjector) else np.asarray(g)
        return float(np.linalg.norm(self.reconstruction() - m, 2))


def gxg_wannier_1d(g, lattice: Lattice, x: PositionOperator | None = None) -> WannierBasis:
    """Localized occupied-space basis from the compressed position operator.

    The operator is diagonalized on an orthonormal basis of range(G) (rank =
    trace G), then lifted back; eigenvalues are the centers. Any orthonormal
    choice inside a degenerate center cluster is acceptable: the
    reconstruction of G is the contract.
    """
    if lattice.dimension != 1:
        raise UnsupportedModelError("GXG diagonalization is for 1D lattices")
    if x is None:
        x = position_operator(lattice, "x")
    m = g.data if isinstance(g, OccupiedProjector) else np.asarray(g)
    w, u = np.linalg.eigh(m)
    occ = u[:, w > 0.5]
    compressed = occ.conj().T @ np.diag(x.diagonal) @ occ
    centers, rot = np.linalg.eigh(compressed)
    funcs = occ @ rot
    fits = [localization_length(funcs[:, k], centers[k], lattice) for k in range(funcs.shape[1])]
    return WannierBasis(
        funcs,
        centers,
        np.array([f.length for f in fits]),
        np.array([f.r2 for f in fits]),
    )


@dataclass(frozen=True)
class CommutingReport:
    comm_norm: float
    gxg_norm: float
    gyg_norm: float

    @property
    def ratio(self) -> float:
        return self.comm_norm / self.gxg_norm


def almost_commuting_report(g, x: PositionOperator, y: PositionOperator) -> CommutingReport:
    """Spectral norms of [GXG, GYG], GXG, and GYG for a 2D occupied projector."""
    m = g.data if isinstance(g, OccupiedProjector) else np.asarray(g)
    gxg = m @ np.diag(x.diagonal) @ m
    gyg = m @ np.diag(y.diagonal) @ m
    comm = gxg @ gyg - gyg @ gxg
    return CommutingReport(
        float(np.linalg.norm(comm, 2)),
        float(np.linalg.norm(gxg, 2)),
        float(np.linalg.norm(gyg, 2)),
    )
