"""Independent reference computations used to verify the production paths.

Everything here is deliberately slow and structurally different from the
implementation it checks: combinatorial Pfaffian, Brillouin-zone plaquette
Chern integral, explicit two-mode Fock algebra. The Fock-space exact
diagonalization oracles live in the fock module.
"""
from __future__ import annotations

import numpy as np

from .exceptions import CapacityError, InvalidInputError
from .fock import creation_operators

MATCHING_MAX = 10

_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def pfaffian_matching_sum(skew: np.ndarray):
    """Pfaffian as the signed sum over perfect matchings (brute force)."""
    s = np.asarray(skew)
    n = s.shape[0]
    if n % 2:
        raise InvalidInputError("even dimension required")
    if n > MATCHING_MAX:
        raise CapacityError(f"matching sum limited to n <= {MATCHING_MAX}")
    if n == 0:
        return 1.0

    def expand(rows):
        if len(rows) == 2:
            return s[rows[0], rows[1]]
        total = 0.0
        first = rows[0]
        for pos in range(1, len(rows)):
            rest = rows[1:pos] + rows[pos + 1 :]
            sign = (-1) ** (pos - 1)
            total = total + sign * s[first, rows[pos]] * expand(rest)
        return total

    return expand(list(range(n)))


def bloch_chern_hamiltonian(mass: float, kx: float, ky: float) -> np.ndarray:
    """Momentum-space 2x2 block of the two-band model used for Chern scans."""
    return (
        np.sin(kx) * _SX
        + np.sin(ky) * _SY
        + (mass + np.cos(kx) + np.cos(ky)) * _SZ
    )


def tknn_chern(mass: float, nk: int = 60) -> float:
    """Lower-band Chern number from plaquette Berry fluxes over the Brillouin zone.

    The plaquette orientation is chosen to match the occupied-correlator
    projector convention P_jk = <Psi_j^dag Psi_k> used by the real-space
    sector invariant, so the two agree in sign as well as magnitude.
    """
    ks = 2 * np.pi * np.arange(nk) / nk
    band = np.zeros((nk, nk, 2), dtype=complex)
    for i, kx in enumerate(ks):
        for j, ky in enumerate(ks):
            _, q = np.linalg.eigh(bloch_chern_hamiltonian(mass, kx, ky))
            band[i, j] = q[:, 0]
    total = 0.0
    for i in range(nk):
        for j in range(nk):
            u1 = band[i, j]
            u2 = band[(i + 1) % nk, j]
            u3 = band[(i + 1) % nk, (j + 1) % nk]
            u4 = band[i, (j + 1) % nk]
            plaquette = (
                np.vdot(u1, u2) * np.vdot(u2, u3) * np.vdot(u3, u4) * np.vdot(u4, u1)
            )
            total += np.angle(plaquette)
    return float(-total / (2 * np.pi))


def two_mode_product_correlators() -> dict[str, complex]:
    """Correlators of (|00> + |11>)/sqrt(2) from explicit 4-dimensional Fock algebra."""
    cr = creation_operators(2)
    an = [c.conj().T for c in cr]
    vac = np.zeros(4)
    vac[0] = 1.0
    psi = (vac + cr[0] @ cr[1] @ vac) / np.sqrt(2.0)
    return {
        "occupation_up": complex(np.vdot(psi, cr[0] @ an[0] @ psi)),
        "occupation_down": complex(np.vdot(psi, cr[1] @ an[1] @ psi)),
        "pair": complex(np.vdot(psi, cr[0] @ cr[1] @ psi)),
    }


def two_mode_product_covariance() -> np.ndarray:
    """Majorana covariance of (|00> + |11>)/sqrt(2), modes ordered (up, down)."""
    cr = creation_operators(2)
    an = [c.conj().T for c in cr]
    vac = np.zeros(4)
    vac[0] = 1.0
    psi = (vac + cr[0] @ cr[1] @ vac) / np.sqrt(2.0)
    majoranas = []
    for k in range(2):
        majoranas.append(cr[k] + an[k])
        majoranas.append(-1j * (an[k] - cr[k]))
    b = np.zeros((4, 4), dtype=complex)
    for j in range(4):
        for k in range(4):
            b[j, k] = 1j * (np.vdot(psi, majoranas[j] @ majoranas[k] @ psi) - (j == k))
    return b.real
