"""Reduced density matrices of Gaussian states and the boundary-sensitivity probe.

A Gaussian state restricted to a subset Y is fully described by the principal
submatrix B_Y of the covariance; the dense 2^|Y| density matrix is assembled
from its real orthogonal normal form

    B_Y = W (direct sum of nu_k J2) W^T,   J2 = [[0, 1], [-1, 0]],

by rotating Jordan-Wigner Majoranas d = W^T c and taking
rho = prod_k (1 + i nu_k d_{2k-1} d_{2k}) / 2. Each normal-form factor is a
single filled/empty/mixed mode, which makes every step separately testable.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .exceptions import (
    CapacityError,
    ConfigurationError,
    GaplessInputError,
    InvalidInputError,
)
from .fits import DecayFit, fit_log_decay
from .hamiltonians import QuadraticHamiltonian, assemble_bdg, locality_profile
from .spectral import MajoranaCovariance, ground_covariance, spectral_gap

MAX_SUBSET = 12


def restrict_covariance(b, subset) -> np.ndarray:
    """Principal submatrix of a covariance on the Majorana indices of `subset`."""
    m = b.data if isinstance(b, MajoranaCovariance) else np.asarray(b)
    sites = [int(i) for i in subset]
    if len(sites) == 0:
        raise InvalidInputError("subset must be nonempty")
    if len(set(sites)) != len(sites):
        raise InvalidInputError("subset has repeated sites")
    nmodes = m.shape[0] // 2
    if any(not 0 <= i < nmodes for i in sites):
        raise InvalidInputError(f"subset {sites} outside the {nmodes}-mode system")
    idx = np.array([2 * i + r for i in sites for r in (0, 1)])
    return m[np.ix_(idx, idx)]


def williamson_values(b_y: np.ndarray) -> np.ndarray:
    """Pairing amplitudes nu_k in [-1, 1]: positive imaginary eigenvalues of B_Y."""
    w = np.linalg.eigvalsh(1j * np.asarray(b_y))
    return np.sort(w[w >= 0])[::-1]


def _canonical_form(b_y: np.ndarray, clamp_tol: float = 1e-8):
    """Real orthogonal W and amplitudes nu with B_Y = W (sum nu_k J2) W^T."""
    n = b_y.shape[0]
    t, q = sla.schur(np.real(b_y), output="real")
    # schur of a real antisymmetric matrix: 2x2 antisymmetric blocks plus zeros
    nus = np.zeros(n // 2)
    order = []
    singles = []
    k = 0
    while k < n:
        if k + 1 < n and abs(t[k, k + 1]) > 1e-14:
            order.extend([k, k + 1])
            nus[len(order) // 2 - 1] = t[k, k + 1]
            k += 2
        else:
            singles.append(k)
            k += 1
    for s in range(0, len(singles), 2):
        order.extend([singles[s], singles[s + 1]])
    w = q[:, order]
    nus = nus[: n // 2]
    over = np.abs(nus) - 1.0
    if np.any(over > clamp_tol):
        raise InvalidInputError(
            f"pairing amplitude {np.abs(nus).max():.12f} exceeds 1 beyond tolerance"
        )
    return w, np.clip(nus, -1.0, 1.0)


def _jw_majoranas_sparse(nmodes: int) -> list[sp.csr_matrix]:
    x = sp.csr_matrix(np.array([[0, 1], [1, 0]], dtype=complex))
    y = sp.csr_matrix(np.array([[0, -1j], [1j, 0]], dtype=complex))
    z = sp.csr_matrix(np.diag([1.0, -1.0]).astype(complex))
    eye = sp.identity(2, format="csr", dtype=complex)
    ops = []
    for k in range(nmodes):
        for tail in (x, y):
            mats = [z] * k + [tail] + [eye] * (nmodes - k - 1)
            m = mats[0]
            for f in mats[1:]:
                m = sp.kron(m, f, format="csr")
            ops.append(m)
    return ops


def rdm_from_covariance(b_y: np.ndarray, clamp_tol: float = 1e-8) -> np.ndarray:
    """Dense density matrix of the Gaussian state with covariance B_Y."""
    b = np.asarray(b_y)
    if b.ndim != 2 or b.shape[0] != b.shape[1] or b.shape[0] % 2:
        raise InvalidInputError(f"covariance must be even square, got {b.shape}")
    if np.iscomplexobj(b):
        if np.abs(b.imag).max() > 1e-10:
            raise InvalidInputError("covariance must be real")
        b = b.real
    if np.abs(b + b.T).max() > 1e-10 * max(1.0, np.abs(b).max()):
        raise InvalidInputError("covariance not antisymmetric")
    nmodes = b.shape[0] // 2
    if nmodes > MAX_SUBSET:
        raise CapacityError(f"{nmodes} modes exceeds the dense ceiling of {MAX_SUBSET}")
    w, nus = _canonical_form(b, clamp_tol)
    c = _jw_majoranas_sparse(nmodes)
    dim = 2**nmodes
    rho = np.eye(dim, dtype=complex) / dim
    for k, nu in enumerate(nus):
        if nu == 0.0:
            continue
        d1 = sum(w[j, 2 * k] * c[j] for j in range(2 * nmodes))
        d2 = sum(w[j, 2 * k + 1] * c[j] for j in range(2 * nmodes))
        factor = sp.identity(dim, format="csr", dtype=complex) + 1j * nu * (d1 @ d2)
        rho = factor @ rho
    rho = np.asarray(rho)
    return 0.5 * (rho + rho.conj().T)


def covariance_of_rdm(rho: np.ndarray) -> np.ndarray:
    """Majorana covariance extracted from a density matrix (identity check helper)."""
    dim = rho.shape[0]
    nmodes = int(np.log2(dim))
    c = [m.toarray() for m in _jw_majoranas_sparse(nmodes)]
    b = np.zeros((2 * nmodes, 2 * nmodes), dtype=complex)
    for j in range(2 * nmodes):
        for k in range(2 * nmodes):
            b[j, k] = 1j * (np.trace(rho @ c[j] @ c[k]) - (1.0 if j == k else 0.0))
    return b


def trace_norm_distance(rho: np.ndarray, rho2: np.ndarray) -> float:
    """Sum of absolute eigenvalues of rho - rho2; between 0 and 2 for states."""
    a = np.asarray(rho)
    b = np.asarray(rho2)
    if a.shape != b.shape:
        raise InvalidInputError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.abs(np.linalg.eigvalsh(a - b)).sum())


@dataclass(frozen=True)
class BoundaryRecord:
    margin: int
    subset: tuple[int, ...]
    distance: float
    envelope: float


@dataclass(frozen=True)
class BoundaryExperiment:
    """Trace distances between two systems' marginals at increasing defect margins."""

    records: list[BoundaryRecord]
    disagreement: tuple[int, ...]
    fit: DecayFit | None
    xi_prime: float
    bound_constant: float

    @property
    def distances(self) -> np.ndarray:
        return np.array([r.distance for r in self.records])

    @property
    def margins(self) -> np.ndarray:
        return np.array([r.margin for r in self.records])


def _disagreement_sites(a: QuadraticHamiltonian, b: QuadraticHamiltonian, tol=0.0) -> list[int]:
    dh = np.abs(a.hop - b.hop)
    dpair = np.abs(a.pair - b.pair)
    touched = (dh.sum(axis=1) + dh.sum(axis=0) + dpair.sum(axis=1) + dpair.sum(axis=0)) > tol
    return list(np.where(touched)[0])


def _window_at_margin(lat, disagreement, size: int, margin: int) -> list[int]:
    """Contiguous window of `size` sites with min distance margin+1 to the defect."""
    v = lat.nsites
    best = None
    for start in range(v):
        window = [(start + k) % v for k in range(size)]
        dmin = min(lat.distance(i, j) for i in window for j in disagreement)
        if dmin == margin + 1:
            mid = min(abs(w - v / 2) for w in window)
            if best is None or mid < best[0]:
                best = (mid, window)
    if best is None:
        raise ConfigurationError(f"no {size}-site window exists at margin {margin}")
    return sorted(best[1])


def boundary_sensitivity(
    base: QuadraticHamiltonian,
    perturbed: QuadraticHamiltonian,
    subset,
    margins,
    mu: float = 0.5,
    xi_prime: float | None = None,
) -> BoundaryExperiment:
    """Marginal distinguishability of two ground states versus distance to their disagreement.

    The two models must act on equal-sized lattices and both be gapped. For
    each margin l the |subset|-site window is placed so that every site within
    distance l of it carries identical Hamiltonian terms in the two systems;
    the trace distance of the two reduced states on that window is recorded,
    together with an exponential reference envelope
    const * |Y| sqrt(l / (v dE)) s1 exp(-l/xi') xi'^d fitted by its maximal ratio.
    """
    if base.nsites != perturbed.nsites:
        raise ConfigurationError("systems must share a lattice size")
    subset = sorted(int(i) for i in subset)
    if len(subset) > MAX_SUBSET:
        raise CapacityError(f"subset of {len(subset)} exceeds the ceiling of {MAX_SUBSET}")
    margins = sorted(int(m) for m in margins)

    a1 = assemble_bdg(base)
    a2 = assemble_bdg(perturbed)
    for a in (a1, a2):
        if spectral_gap(a) <= 1e-10:
            raise GaplessInputError("boundary experiment needs both systems gapped")
    b1 = ground_covariance(a1).data
    b2 = ground_covariance(a2).data

    disagreement = _disagreement_sites(base, perturbed)
    prof = locality_profile(base, mu)
    de = spectral_gap(a1)
    if xi_prime is None:
        xi_prime = prof.correlation_scale(de)
    dim = base.lattice.dimension

    records = []
    for m in margins:
        if disagreement:
            window = _window_at_margin(base.lattice, disagreement, len(subset), m)
            # terms touching the fattened window must agree exactly
            fat = [
                i
                for i in range(base.nsites)
                if min(base.lattice.distance(i, w) for w in window) <= m
            ]
            rows = np.ix_(fat, range(base.nsites))
            if (
                np.abs(base.hop[rows] - perturbed.hop[rows]).max() > 0
                or np.abs(base.pair[rows] - perturbed.pair[rows]).max() > 0
            ):
                raise ConfigurationError(f"systems disagree within margin {m} of the window")
        else:
            window = subset
        rho1 = rdm_from_covariance(restrict_covariance(b1, window))
        rho2 = rdm_from_covariance(restrict_covariance(b2, window))
        dist = trace_norm_distance(rho1, rho2)
        env = (
            len(subset)
            * np.sqrt(max(m, 1) / (prof.v * de))
            * prof.s1
            * np.exp(-m / xi_prime)
            * xi_prime**dim
        )
        records.append(BoundaryRecord(m, tuple(window), dist, float(env)))

    distances = np.array([r.distance for r in records])
    fit = None
    if np.any(distances > 1e-12):
        try:
            fit = fit_log_decay(np.array(margins, dtype=float), distances)
        except Exception:
            fit = None
    ratios = [r.distance / r.envelope for r in records if r.envelope > 0]
    const = float(max(ratios)) if ratios else 0.0
    return BoundaryExperiment(records, tuple(disagreement), fit, float(xi_prime), const)
