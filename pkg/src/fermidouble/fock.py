"""Dense Fock-space machinery for small systems (exact-diagonalization oracles).

Jordan-Wigner convention: qubit basis |0> = empty, |1> = occupied; mode k
carries the parity string over modes 0..k-1. Capacity is capped because
everything here is dense 2^V x 2^V.
"""
from __future__ import annotations

import numpy as np

from .exceptions import CapacityError
from .hamiltonians import QuadraticHamiltonian

MAX_MODES = 12

_CREATE = np.array([[0, 0], [1, 0]], dtype=complex)
_PARITY = np.diag([1.0, -1.0]).astype(complex)
_EYE2 = np.eye(2, dtype=complex)


def _kron_chain(mats) -> np.ndarray:
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def creation_operators(nmodes: int) -> list[np.ndarray]:
    if nmodes > MAX_MODES:
        raise CapacityError(f"{nmodes} modes exceeds the dense Fock ceiling of {MAX_MODES}")
    ops = []
    for k in range(nmodes):
        ops.append(_kron_chain([_PARITY] * k + [_CREATE] + [_EYE2] * (nmodes - k - 1)))
    return ops


def majorana_operators(nmodes: int) -> list[np.ndarray]:
    """Interleaved c_{2k} = a_k + a_k^dag, c_{2k+1} = (a_k - a_k^dag)/i."""
    cr = creation_operators(nmodes)
    out = []
    for k in range(nmodes):
        an = cr[k].conj().T
        out.append(an + cr[k])
        out.append(-1j * (an - cr[k]))
    return out


def many_body_matrix(hop: np.ndarray, pair: np.ndarray) -> np.ndarray:
    """Fock matrix of sum H_ij a_i^dag a_j + (1/2) sum (D_ij a_i^dag a_j^dag + h.c.) - tr(H)/2.

    The trace shift makes the operator equal to (1/2) v^dag A v, so the
    ground energy is -(1/2) sum of the positive eigenvalues of A.
    """
    n = hop.shape[0]
    cr = creation_operators(n)
    an = [c.conj().T for c in cr]
    m = np.zeros((2**n, 2**n), dtype=complex)
    for i in range(n):
        for j in range(n):
            if hop[i, j] != 0:
                m += hop[i, j] * cr[i] @ an[j]
            if pair[i, j] != 0:
                m += 0.5 * pair[i, j] * cr[i] @ cr[j]
                m += 0.5 * np.conj(pair[i, j]) * an[j] @ an[i]
    m -= 0.5 * np.trace(hop).real * np.eye(2**n)
    return m


def fock_spectrum(h: QuadraticHamiltonian) -> np.ndarray:
    return np.linalg.eigvalsh(many_body_matrix(h.hop, h.pair))


def fock_gap(h: QuadraticHamiltonian) -> float:
    w = fock_spectrum(h)
    return float(w[1] - w[0])


def fock_ground_state(h: QuadraticHamiltonian) -> np.ndarray:
    _, u = np.linalg.eigh(many_body_matrix(h.hop, h.pair))
    return u[:, 0]


def fock_covariance(h: QuadraticHamiltonian) -> np.ndarray:
    """Ground-state Majorana covariance B_jk = i(<c_j c_k> - delta_jk), exactly."""
    gs = fock_ground_state(h)
    n = h.nsites
    c = majorana_operators(n)
    cpsi = [op @ gs for op in c]
    b = np.zeros((2 * n, 2 * n), dtype=complex)
    for j in range(2 * n):
        for k in range(2 * n):
            b[j, k] = 1j * (np.vdot(cpsi[j], cpsi[k]) - (1.0 if j == k else 0.0))
    return b


def fock_reduced_density_matrix(h: QuadraticHamiltonian, subset) -> np.ndarray:
    """Partial trace of the exact ground state onto `subset` (ascending order).

    The model is rebuilt with the subset modes leading in the Jordan-Wigner
    order, so tracing the tail yields the correct fermionic marginal.
    """
    subset = sorted(int(i) for i in subset)
    n = h.nsites
    rest = [i for i in range(n) if i not in subset]
    perm = subset + rest
    hop = h.hop[np.ix_(perm, perm)]
    pair = h.pair[np.ix_(perm, perm)]
    _, u = np.linalg.eigh(many_body_matrix(hop, pair))
    gs = u[:, 0]
    k = len(subset)
    m = gs.reshape(2**k, 2 ** (n - k))
    return m @ m.conj().T
