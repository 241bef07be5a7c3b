"""Dense spectral engine: gaps, matrix sign, ground-state covariance, projectors.

Conventions (frozen against the small-system Fock-space oracle):

* Nambu vector v = (Psi_1..Psi_V, Psi_1^dag..Psi_V^dag); the quadratic form is
  (1/2) v^dag A v with A = [[H, D], [D^dag, -H*]].
* Majorana operators are interleaved per site: c_{2j} = Psi_j + Psi_j^dag and
  c_{2j+1} = (Psi_j - Psi_j^dag)/i (0-based).
* Ground-state covariance B_jk = i(<c_j c_k> - delta_jk) = +i sgn(A_M) where
  A_M is A rotated to the Majorana basis. B is real antisymmetric with
  B^2 = -1 for any gapped A.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .exceptions import GaplessInputError, InvalidInputError, UnsupportedModelError

if TYPE_CHECKING:  # pragma: no cover
    from .hamiltonians import QuadraticHamiltonian

DIRAC = "dirac"
MAJORANA = "majorana"
INTERPOLATION = "interpolation"

HERMITICITY_TOL = 1e-12
ANTISYMMETRY_TOL = 1e-10


def _as_array(m) -> np.ndarray:
    # unwrap our matrix containers; plain ndarrays expose .data as a buffer
    if isinstance(m, np.ndarray):
        return m
    return np.asarray(getattr(m, "data", m))


def _check_hermitian(m: np.ndarray, tol: float, what: str) -> None:
    scale = max(1.0, np.abs(m).max()) if m.size else 1.0
    res = np.abs(m - m.conj().T).max() if m.size else 0.0
    if res > tol * scale:
        raise InvalidInputError(f"{what} not Hermitian: residual {res:.3e} (tol {tol:.1e} rel)")


@dataclass(frozen=True)
class BdGMatrix:
    """Single-particle matrix of a quadratic fermion Hamiltonian.

    basis is 'dirac' for the (Psi, Psi^dag) ordering, 'majorana' after the
    c-operator rotation, 'interpolation' for the rearranged two-copy ordering
    used along doubling paths (spectrum-only consumers).
    """

    data: np.ndarray
    basis: str = DIRAC

    def __post_init__(self):
        m = np.asarray(self.data)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise InvalidInputError(f"BdG matrix must be even-dimensional square, got {m.shape}")
        _check_hermitian(m, HERMITICITY_TOL, "BdG matrix")
        object.__setattr__(self, "data", m)

    @property
    def size(self) -> int:
        return self.data.shape[0]

    @property
    def nmodes(self) -> int:
        return self.data.shape[0] // 2


@dataclass(frozen=True)
class MajoranaCovariance:
    """Real antisymmetric covariance matrix of a Gaussian state."""

    data: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.data)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise InvalidInputError(f"covariance must be even-dimensional square, got {m.shape}")
        if np.iscomplexobj(m):
            if np.abs(m.imag).max() > ANTISYMMETRY_TOL:
                raise InvalidInputError("covariance has non-negligible imaginary part")
            m = m.real
        if np.abs(m + m.T).max() > ANTISYMMETRY_TOL:
            raise InvalidInputError("covariance not antisymmetric")
        object.__setattr__(self, "data", m)

    @property
    def size(self) -> int:
        return self.data.shape[0]

    @property
    def nmodes(self) -> int:
        return self.data.shape[0] // 2

    def purity_defect(self) -> float:
        """Max-norm distance of B^2 from -1; zero for a pure Gaussian state."""
        return float(np.abs(self.data @ self.data + np.eye(self.size)).max())


@dataclass(frozen=True)
class OccupiedProjector:
    """Correlator-convention projector P_jk = <Psi_j^dag Psi_k> onto occupied modes."""

    data: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.data)
        _check_hermitian(m, ANTISYMMETRY_TOL, "projector")
        res = np.abs(m @ m - m).max()
        if res > 1e-8:
            raise InvalidInputError(f"projector not idempotent: |P^2-P| = {res:.3e}")
        tr = m.trace().real
        if abs(tr - round(tr)) > 1e-8:
            raise InvalidInputError(f"projector trace {tr} not close to an integer")
        object.__setattr__(self, "data", m)

    @property
    def size(self) -> int:
        return self.data.shape[0]

    @property
    def rank(self) -> int:
        return int(round(self.data.trace().real))


def hermitian_spectrum(matrix) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix."""
    m = _as_array(matrix)
    _check_hermitian(m, 1e-10, "input")
    w, u = np.linalg.eigh(m)
    return w, u


def spectral_gap(a) -> float:
    """Smallest eigenvalue magnitude; the single-particle excitation gap."""
    w = np.linalg.eigvalsh(_as_array(a))
    return float(np.abs(w).min())


def default_gap_floor(a) -> float:
    w = np.linalg.eigvalsh(_as_array(a))
    return 1e-8 * float(np.abs(w).max() if w.size else 1.0)


def matrix_sign(a, gap_floor: float | None = None) -> np.ndarray:
    """Matrix sign function U sgn(Lambda) U^dag of a gapped Hermitian matrix."""
    m = _as_array(a)
    _check_hermitian(m, 1e-10, "input")
    w, u = np.linalg.eigh(m)
    floor = 1e-8 * float(np.abs(w).max()) if gap_floor is None else gap_floor
    gap = float(np.abs(w).min())
    if gap <= floor:
        raise GaplessInputError(f"gap {gap:.3e} at or below floor {floor:.3e}; sign ill-conditioned")
    return (u * np.sign(w)) @ u.conj().T


def majorana_rotation(nmodes: int) -> np.ndarray:
    """Unitary U with c = sqrt(2) U (Psi, Psi^dag); rows interleaved per site."""
    u = np.zeros((2 * nmodes, 2 * nmodes), dtype=complex)
    for j in range(nmodes):
        u[2 * j, j] = 1.0
        u[2 * j, nmodes + j] = 1.0
        u[2 * j + 1, j] = -1.0j
        u[2 * j + 1, nmodes + j] = 1.0j
    return u / np.sqrt(2.0)


def dirac_to_majorana(a: BdGMatrix) -> BdGMatrix:
    """Rotate a Dirac-basis BdG matrix to the Majorana basis.

    The result A_M is Hermitian and purely imaginary, so i*A_M is real
    antisymmetric; the spectrum is unchanged.
    """
    if a.basis != DIRAC:
        raise InvalidInputError(f"expected a Dirac-basis matrix, got basis {a.basis!r}")
    u = majorana_rotation(a.nmodes)
    am = u @ a.data @ u.conj().T
    return BdGMatrix(0.5 * (am + am.conj().T), basis=MAJORANA)


def ground_covariance(a: BdGMatrix, gap_floor: float | None = None) -> MajoranaCovariance:
    """Covariance B = i sgn(A_M) of the ground state of a gapped BdG matrix.

    Entries decay exponentially in the site distance for local gapped models.
    The overall sign is fixed by the Fock-space oracle: a fully occupied
    trivial model gives B = diag blocks [[0,1],[-1,0]].
    """
    am = a if a.basis == MAJORANA else dirac_to_majorana(a)
    s = matrix_sign(am, gap_floor=gap_floor)
    b = 1.0j * s
    if np.abs(b.imag).max() > 1e-10:
        raise InvalidInputError("Majorana-basis sign function is not purely imaginary")
    b = 0.5 * (b.real - b.real.T)
    return MajoranaCovariance(b)


def occupied_projector(h: "QuadraticHamiltonian", gap_floor: float = 1e-10) -> OccupiedProjector:
    """Correlator projector P_jk = <Psi_j^dag Psi_k> for a number-conserving model.

    Requires pair = 0 and no single-particle level within gap_floor of zero.
    """
    if np.abs(h.pair).max() > 1e-12:
        raise UnsupportedModelError("pairing terms present; particle-number projector undefined")
    w, u = np.linalg.eigh(h.hop)
    if np.abs(w).min() <= gap_floor:
        raise GaplessInputError(f"level within {gap_floor:.1e} of zero; occupied space ambiguous")
    occ = u[:, w < 0]
    p_std = occ @ occ.conj().T
    return OccupiedProjector(p_std.conj())
