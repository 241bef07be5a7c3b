"""Spectral flow of the negative-energy projector along a gapped path.

The family is traversed in the angle theta = arcsin(s), where it reads
A(theta) = cos(theta) A0 - sin(theta) dE Y and is analytic; the square-root
form in s has a divergent derivative at the product endpoint.

Two generators are provided. The exact one, K = i [dP, P], transports the
spectral projector identically (dP/dtheta = -i[K, P] holds as an operator
identity for any projector family). The filtered one builds K in the
instantaneous eigenbasis with an odd spectral weight

    g(omega) = -(1 - exp(-omega^2 T^2 / 2)) / omega,

which equals -1/omega beyond the gap up to a Gaussian tail exp(-dE^2 T^2/2);
its locality length grows with the time cutoff T while its transport error
shrinks superpolynomially, the trade-off that makes gapped transport local.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import GaplessInputError, InvalidInputError, InvalidParameterError
from .fits import DecayFit, envelope_by_distance, fit_log_decay
from .doubling import DoubledSystem, path_matrix
from .lattice import Lattice
from .spectral import BdGMatrix

EXACT = "exact"
FILTERED = "filtered"


@dataclass(frozen=True)
class FlowGenerator:
    """Hermitian transport generator at one point of the path."""

    s: float
    matrix: np.ndarray
    variant: str
    width: float | None = None

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if np.abs(m - m.conj().T).max() > 1e-10 * max(1.0, np.abs(m).max()):
            raise InvalidInputError("flow generator must be Hermitian")
        object.__setattr__(self, "matrix", m)


def _eig_gapped(c: np.ndarray, gap_floor: float):
    w, q = np.linalg.eigh(c)
    gap = np.abs(w).min()
    if gap <= gap_floor:
        raise GaplessInputError(f"gap {gap:.3e} at or below {gap_floor:.1e}")
    return w, q


def negative_projector(c) -> np.ndarray:
    m = c.data if isinstance(c, BdGMatrix) else np.asarray(c)
    w, q = np.linalg.eigh(m)
    occ = q[:, w < 0]
    return occ @ occ.conj().T


def _projector_derivative(w, q, dc: np.ndarray) -> np.ndarray:
    """First-order perturbation form of dP for the negative-energy projector."""
    dce = q.conj().T @ dc @ q
    occ = w < 0
    g = np.zeros_like(dce)
    rows_u = ~occ
    cols_o = occ
    denom = w[None, cols_o] - w[rows_u, None]
    g[np.ix_(rows_u, cols_o)] = dce[np.ix_(rows_u, cols_o)] / denom
    half = q @ g @ q.conj().T
    return half + half.conj().T


def exact_flow_generator(c, dc, s: float = 0.0, gap_floor: float = 1e-12) -> FlowGenerator:
    """K = i [dP, P] built from the eigendecomposition; dP = -i[K, P] exactly."""
    cm = c.data if isinstance(c, BdGMatrix) else np.asarray(c)
    dcm = dc.data if isinstance(dc, BdGMatrix) else np.asarray(dc)
    if np.abs(dcm - dcm.conj().T).max() > 1e-10 * max(1.0, np.abs(dcm).max()):
        raise InvalidInputError("path derivative must be Hermitian")
    w, q = _eig_gapped(cm, gap_floor)
    occ = q[:, w < 0]
    p = occ @ occ.conj().T
    dp = _projector_derivative(w, q, dcm)
    k = 1j * (dp @ p - p @ dp)
    return FlowGenerator(s, 0.5 * (k + k.conj().T), EXACT)


def filtered_flow_generator(
    c, dc, delta_e: float, width: float, s: float = 0.0, gap_floor: float = 1e-12
) -> FlowGenerator:
    """Eigenbasis generator K_mn = i g(w_m - w_n) dC_mn with a Gaussian-tail weight."""
    if width <= 0:
        raise InvalidParameterError(f"time cutoff must be positive, got {width}")
    if delta_e <= 0:
        raise InvalidParameterError(f"gap scale must be positive, got {delta_e}")
    cm = c.data if isinstance(c, BdGMatrix) else np.asarray(c)
    dcm = dc.data if isinstance(dc, BdGMatrix) else np.asarray(dc)
    w, q = _eig_gapped(cm, gap_floor)
    omega = w[:, None] - w[None, :]
    g = np.zeros_like(omega)
    nz = omega != 0
    g[nz] = -(1.0 - np.exp(-0.5 * (omega[nz] * width) ** 2)) / omega[nz]
    dce = q.conj().T @ dcm @ q
    k = q @ (1j * g * dce) @ q.conj().T
    return FlowGenerator(s, 0.5 * (k + k.conj().T), FILTERED, width=width)


@dataclass(frozen=True)
class TransportResult:
    s_grid: np.ndarray
    step_errors: np.ndarray
    final_error: float
    unitarity_residual: float
    trace_drift: float
    variant: str
    steps: int
    width: float | None = None


def _family(sys: DoubledSystem):
    a0 = path_matrix(sys, 0.0).data
    a1 = path_matrix(sys, 1.0).data

    def c_of(theta: float) -> np.ndarray:
        return np.cos(theta) * a0 + np.sin(theta) * a1

    def dc_of(theta: float) -> np.ndarray:
        return -np.sin(theta) * a0 + np.cos(theta) * a1

    return c_of, dc_of


def _unitary_step(k: np.ndarray, dt: float) -> np.ndarray:
    w, q = np.linalg.eigh(k)
    return (q * np.exp(-1j * w * dt)) @ q.conj().T


def transport_projector(
    sys: DoubledSystem,
    steps: int,
    variant: str = EXACT,
    width: float | None = None,
    record_every: int = 0,
) -> TransportResult:
    """Integrate the flow from the product endpoint s=1 down to s=0.

    Midpoint exponential stepping in theta; unitary by construction, so the
    transported projector keeps its spectrum and trace at every step. The
    reported error is the spectral-norm distance to the instantaneous exact
    projector.
    """
    if steps < 1:
        raise InvalidParameterError(f"need at least one step, got {steps}")
    if variant not in (EXACT, FILTERED):
        raise InvalidParameterError(f"unknown variant {variant!r}")
    if variant == FILTERED and (width is None or width <= 0):
        raise InvalidParameterError("filtered transport needs a positive width")
    c_of, dc_of = _family(sys)
    thetas = np.linspace(np.pi / 2, 0.0, steps + 1)
    p = negative_projector(c_of(thetas[0]))
    tr0 = p.trace().real
    n = p.shape[0]
    u_tot = np.eye(n, dtype=complex)
    s_points = [1.0]
    errors = [0.0]
    for k in range(steps):
        mid = 0.5 * (thetas[k] + thetas[k + 1])
        dt = thetas[k + 1] - thetas[k]
        if variant == EXACT:
            gen = exact_flow_generator(c_of(mid), dc_of(mid), s=float(np.sin(mid)))
        else:
            gen = filtered_flow_generator(
                c_of(mid), dc_of(mid), sys.delta_e, width, s=float(np.sin(mid))
            )
        u = _unitary_step(gen.matrix, dt)
        u_tot = u @ u_tot
        if record_every and (k + 1) % record_every == 0 and k + 1 < steps:
            pk = u_tot @ p @ u_tot.conj().T
            pex = negative_projector(c_of(thetas[k + 1]))
            s_points.append(float(np.sin(thetas[k + 1])))
            errors.append(float(np.linalg.norm(pk - pex, 2)))
    p_end = u_tot @ p @ u_tot.conj().T
    p_exact = negative_projector(c_of(0.0))
    final = float(np.linalg.norm(p_end - p_exact, 2))
    s_points.append(0.0)
    errors.append(final)
    unit = float(np.linalg.norm(u_tot.conj().T @ u_tot - np.eye(n), 2))
    drift = abs(p_end.trace().real - tr0)
    return TransportResult(
        np.array(s_points), np.array(errors), final, unit, float(drift), variant, steps, width
    )


@dataclass(frozen=True)
class LocalityRecord:
    distance: float
    max_abs: float


@dataclass(frozen=True)
class GeneratorLocalityProfile:
    records: list[LocalityRecord]
    fit: DecayFit

    @property
    def xi_fit(self) -> float:
        return self.fit.xi


def doubled_index_sites(v: int) -> np.ndarray:
    """Map matrix index of the rearranged two-copy basis to (base site, copy)."""
    quarters = np.arange(4 * v) // v
    sites = np.arange(4 * v) % v
    copies = (quarters >= 2).astype(int)
    return np.stack([sites, copies], axis=1)


def generator_locality_profile(
    gen: FlowGenerator, base_lattice: Lattice, floor: float = 1e-12
) -> GeneratorLocalityProfile:
    """Envelope of |K| entries against the two-copy metric, with its decay fit."""
    v = base_lattice.nsites
    if gen.matrix.shape[0] != 4 * v:
        raise InvalidInputError(
            f"generator of size {gen.matrix.shape[0]} does not match lattice of {v} sites"
        )
    info = doubled_index_sites(v)
    base_d = base_lattice.distance_matrix()
    d = base_d[np.ix_(info[:, 0], info[:, 0])] + (info[:, 1][:, None] != info[:, 1][None, :])
    centers, env = envelope_by_distance(gen.matrix, d)
    fit = fit_log_decay(centers, env, floor=floor)
    return GeneratorLocalityProfile(
        [LocalityRecord(float(c), float(e)) for c, e in zip(centers, env)], fit
    )
