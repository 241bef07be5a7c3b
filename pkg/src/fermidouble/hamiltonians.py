"""Quadratic fermion Hamiltonians, locality norms, and concrete model families.

A model is the pair of a Hermitian hopping matrix H and an antisymmetric
pairing matrix D on a lattice; the corresponding many-body operator is
(1/2) v^dag A v in the Nambu convention of the spectral module, i.e.

    sum_ij H_ij Psi_i^dag Psi_j + (1/2) sum_ij (D_ij Psi_i^dag Psi_j^dag + h.c.)
    - tr(H)/2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidInputError, InvalidParameterError
from .lattice import Lattice, build_chain, build_square
from .spectral import BdGMatrix

INPUT_TOL = 1e-10


@dataclass(frozen=True)
class QuadraticHamiltonian:
    """Hopping matrix (Hermitian) and pairing matrix (antisymmetric) on a lattice."""

    lattice: object
    hop: np.ndarray
    pair: np.ndarray

    def __post_init__(self):
        hop = np.asarray(self.hop, dtype=complex)
        pair = np.asarray(self.pair, dtype=complex)
        v = self.lattice.nsites
        if hop.shape != (v, v) or pair.shape != (v, v):
            raise InvalidInputError(f"matrices must be {v}x{v} for this lattice")
        scale = max(1.0, np.abs(hop).max(), np.abs(pair).max())
        if np.abs(hop - hop.conj().T).max() > INPUT_TOL * scale:
            raise InvalidInputError("hopping matrix not Hermitian")
        if np.abs(pair + pair.T).max() > INPUT_TOL * scale:
            raise InvalidInputError("pairing matrix not antisymmetric")
        object.__setattr__(self, "hop", hop)
        object.__setattr__(self, "pair", pair)

    @property
    def nsites(self) -> int:
        return self.lattice.nsites


@dataclass(frozen=True)
class LocalityProfile:
    """Decay-weighted coupling norm and the derived velocity scale.

    c is an order-unity bound prefactor, unknown in general; it is reported
    but never enters pass/fail logic.
    """

    mu: float
    s1: float
    v: float
    c: float = 1.0

    def correlation_scale(self, gap: float) -> float:
        """xi = 2 v / gap + mu, the decay scale used in locality bounds."""
        return 2.0 * self.v / gap + self.mu


def assemble_bdg(h: QuadraticHamiltonian) -> BdGMatrix:
    """Single-particle matrix [[H, D], [D^dag, -H*]] in the Dirac Nambu basis.

    Its spectrum is symmetric about zero (eigenvalues come in +/- pairs).
    """
    a = np.block([[h.hop, h.pair], [h.pair.conj().T, -h.hop.conj()]])
    return BdGMatrix(a, basis="dirac")


def locality_norm(h: QuadraticHamiltonian, mu: float) -> float:
    """max_i 2 sum_j exp(mu * dist(i,j)) sqrt(|H_ij|^2 + |D_ij|^2)."""
    if mu <= 0:
        raise InvalidParameterError(f"decay rate mu must be positive, got {mu}")
    d = h.lattice.distance_matrix()
    weights = np.exp(mu * d) * np.sqrt(np.abs(h.hop) ** 2 + np.abs(h.pair) ** 2)
    return float(2.0 * weights.sum(axis=1).max())


def locality_profile(h: QuadraticHamiltonian, mu: float) -> LocalityProfile:
    """Locality norm plus the dimensional velocity estimate v = 2 s1 / mu."""
    s1 = locality_norm(h, mu)
    return LocalityProfile(mu=mu, s1=s1, v=2.0 * s1 / mu)


def conjugate_hamiltonian(h: QuadraticHamiltonian) -> QuadraticHamiltonian:
    """Entrywise complex conjugate model (time-reversed coefficients)."""
    return QuadraticHamiltonian(h.lattice, h.hop.conj(), h.pair.conj())


def _chain_bonds(v: int, periodic: bool) -> list[tuple[int, int]]:
    bonds = [(i, i + 1) for i in range(v - 1)]
    if periodic:
        bonds.append((v - 1, 0))
    return bonds


def _disorder_diagonal(v: int, disorder: float, seed) -> np.ndarray:
    if not disorder:
        return np.zeros(v)
    rng = np.random.default_rng(seed)
    return rng.uniform(-disorder, disorder, size=v)


def kitaev_chain(
    v: int,
    t: float = 1.0,
    delta: float = 1.0,
    mu_chem: float = 0.0,
    periodic: bool = True,
    disorder: float = 0.0,
    seed: int | None = None,
) -> QuadraticHamiltonian:
    """1D p-wave chain: hopping -t, directed bond pairing delta, potential -mu_chem.

    Topological for |mu_chem| < 2|t| (at delta != 0), trivial outside.
    Optional seeded uniform on-site disorder.
    """
    lat = build_chain(v, periodic)
    hop = np.zeros((v, v), dtype=complex)
    pair = np.zeros((v, v), dtype=complex)
    np.fill_diagonal(hop, -mu_chem + _disorder_diagonal(v, disorder, seed))
    for i, j in _chain_bonds(v, periodic):
        hop[i, j] += -t
        hop[j, i] += -t
        pair[i, j] += delta
        pair[j, i] -= delta
    return QuadraticHamiltonian(lat, hop, pair)


def pplusip_model(
    lx: int,
    ly: int,
    t: float = 1.0,
    delta: float = 1.0,
    mu_chem: float = 1.0,
    periodic: bool = True,
) -> QuadraticHamiltonian:
    """2D chiral p-wave superconductor: pairing delta on x bonds, i*delta on y bonds."""
    lat = build_square(lx, ly, periodic)
    v = lat.nsites
    hop = np.zeros((v, v), dtype=complex)
    pair = np.zeros((v, v), dtype=complex)
    np.fill_diagonal(hop, -mu_chem)

    def idx(x, y):
        return x * ly + y

    for x in range(lx):
        for y in range(ly):
            i = idx(x, y)
            if x + 1 < lx or periodic:
                j = idx((x + 1) % lx, y)
                hop[i, j] += -t
                hop[j, i] += -t
                pair[i, j] += delta
                pair[j, i] -= delta
            if y + 1 < ly or periodic:
                j = idx(x, (y + 1) % ly)
                hop[i, j] += -t
                hop[j, i] += -t
                pair[i, j] += 1j * delta
                pair[j, i] -= 1j * delta
    return QuadraticHamiltonian(lat, hop, pair)


_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def chern_insulator_model(
    lx: int,
    ly: int,
    mass: float = -1.0,
    periodic: bool = True,
) -> QuadraticHamiltonian:
    """Two-band number-conserving model with Chern bands (no pairing).

    Unit cells occupy column pairs of an lx x ly site lattice (lx even); the
    two orbitals of a cell sit on adjacent sites. The lower band carries
    Chern number +/-1 for 0 < |mass| < 2 and 0 for |mass| > 2.
    """
    if lx % 2:
        raise InvalidParameterError(f"lx must be even (two orbitals per cell), got {lx}")
    lat = build_square(lx, ly, periodic)
    ncx = lx // 2
    v = lat.nsites
    hop = np.zeros((v, v), dtype=complex)

    def idx(cx, y, orb):
        return (2 * cx + orb) * ly + y

    t0 = mass * _SZ
    tx = (_SZ - 1j * _SX) / 2.0
    ty = (_SZ - 1j * _SY) / 2.0
    for cx in range(ncx):
        for y in range(ly):
            for a in range(2):
                for b in range(2):
                    hop[idx(cx, y, a), idx(cx, y, b)] += t0[a, b]
                    if cx + 1 < ncx or periodic:
                        i = idx((cx + 1) % ncx, y, a)
                        j = idx(cx, y, b)
                        hop[i, j] += tx[a, b]
                        hop[j, i] += np.conj(tx[a, b])
                    if y + 1 < ly or periodic:
                        i = idx(cx, (y + 1) % ly, a)
                        j = idx(cx, y, b)
                        hop[i, j] += ty[a, b]
                        hop[j, i] += np.conj(ty[a, b])
    return QuadraticHamiltonian(lat, hop, np.zeros((v, v), dtype=complex))


def staggered_chain(
    v: int,
    t: float = 1.0,
    stagger: float = 0.8,
    periodic: bool = False,
    disorder: float = 0.0,
    seed: int | None = None,
) -> QuadraticHamiltonian:
    """Number-conserving chain with alternating on-site energies +/-stagger.

    Gapped at half filling for stagger > 0; the workhorse for localized-basis
    experiments. Optional seeded diagonal disorder.
    """
    if stagger <= 0:
        raise InvalidParameterError(f"stagger must be positive, got {stagger}")
    lat = build_chain(v, periodic)
    hop = np.zeros((v, v), dtype=complex)
    diag = stagger * np.where(np.arange(v) % 2 == 0, 1.0, -1.0)
    np.fill_diagonal(hop, diag + _disorder_diagonal(v, disorder, seed))
    for i, j in _chain_bonds(v, periodic):
        hop[i, j] += -t
        hop[j, i] += -t
    return QuadraticHamiltonian(lat, hop, np.zeros((v, v), dtype=complex))


def trivial_model(v: int, gap: float) -> QuadraticHamiltonian:
    """Uncoupled sites at energy -gap each (fully occupied ground state)."""
    if gap <= 0:
        raise InvalidParameterError(f"gap must be positive, got {gap}")
    lat = build_chain(v, periodic=False)
    hop = -gap * np.eye(v, dtype=complex)
    return QuadraticHamiltonian(lat, hop, np.zeros((v, v), dtype=complex))
