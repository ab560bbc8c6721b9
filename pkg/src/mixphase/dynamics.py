"""Hamiltonian and Uhlmann-flow evolution, dynamic phases, incompatibility witness.

Units: hbar = 1, so a Hamiltonian sampled at time ``t`` generates
``exp(-i H dt)``.  Time-ordered products use the same midpoint /
later-on-the-left convention as :mod:`mixphase.holonomy`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import NotAResolution, NotClosed, ZeroMagnitude
from .holonomy import VISIBILITY_TOL, d_sqrt, uhlmann_connection_sample
from .linalg import (
    dagger,
    eig_hermitian,
    expm_antihermitian_many,
    expm_many,
    is_hermitian,
    ordered_product,
    principal_arg,
)
from .states import DensityMatrix, as_density


@dataclass(frozen=True)
class HamiltonianPath:
    """Time-dependent Hamiltonian ``h_at(t)`` on ``[0, tau]``.

    ``h_many`` optionally maps an array of times to a stack of Hamiltonians
    and is used instead of ``h_at`` when sampling whole grids.
    """

    tau: float
    h_at: Callable[[float], np.ndarray]
    h_many: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be positive")

    def midpoint_samples(self, steps: int) -> np.ndarray:
        if steps < 1:
            raise ValueError("need at least one step")
        dt = self.tau / steps
        times = (np.arange(steps) + 0.5) * dt
        if self.h_many is not None:
            hs = np.asarray(self.h_many(times), dtype=complex)
        else:
            hs = np.asarray([self.h_at(t) for t in times], dtype=complex)
        if np.any(np.linalg.norm(hs - dagger(hs), axis=(1, 2)) > 1e-10 * (1 + np.linalg.norm(hs, axis=(1, 2)))):
            raise ValueError("Hamiltonian samples must be Hermitian")
        return 0.5 * (hs + dagger(hs))

    def propagator(self, steps: int) -> np.ndarray:
        """Time-ordered ``T exp(-i int_0^tau H dt)`` with midpoint sampling."""
        dt = self.tau / steps
        return ordered_product(expm_antihermitian_many(-1j * dt * self.midpoint_samples(steps)))


def constant_path(h, tau: float) -> HamiltonianPath:
    h = np.asarray(h, dtype=complex)
    return HamiltonianPath(tau, lambda t: h)


@dataclass(frozen=True, eq=False)
class FlowGenerator:
    """Anti-Hermitian generator of the Uhlmann flow and the connection it came from."""

    h_tilde: np.ndarray
    a_u_sample: np.ndarray


@dataclass(frozen=True, eq=False)
class WitnessReport:
    """Numerical evidence that Hamiltonian and Uhlmann dynamics cannot be combined.

    Attributes:
        similarity_eigenvalues: spectrum of ``rho^{-1/2} H~ rho^{1/2}``.
        similarity_max_real: largest ``|Re|`` among them (zero for an
            anti-Hermitian ``H~``, so that matrix is never Hermitian unless
            ``H~ = 0``).
        anticommutator_norm: ``||{H~, rho}||_F``.
        sylvester_gain: ``min_ij (lambda_i + lambda_j)``, the lower bound of
            ``||{X, rho}||_F / ||X||_F`` over all nonzero ``X``.
        trace_drift: ``|d Tr(rho)/dt| = 2 |Tr(H~ rho)|`` for the hybrid
            equation ``rho' = -i([H, rho] + {H~, rho})``.
    """

    similarity_eigenvalues: np.ndarray
    similarity_max_real: float
    anticommutator_norm: float
    sylvester_gain: float
    trace_drift: float


def von_neumann_evolve(rho0, path: HamiltonianPath, steps: int) -> DensityMatrix:
    """Evolve ``rho' = -i[H, rho]`` by per-step unitary conjugation.

    The state is carried as its eigenvalues plus a unitary frame; only the
    frame is propagated, so the spectrum (and hence the trace) is that of
    ``rho0`` by construction.
    """
    r0 = as_density(rho0)
    frame = path.propagator(steps) @ r0.vectors
    return DensityMatrix((frame * r0.values) @ dagger(frame))


def adiabatic_generator(projectors: Sequence, rates: Sequence) -> np.ndarray:
    """``K = sum_m dP_m/dt P_m`` for a complete set of instantaneous projectors.

    ``H + i K`` is the adiabatic Hamiltonian (hbar = 1) that carries each
    ``P_m`` along the path.
    """
    ps = np.asarray(projectors, dtype=complex)
    dps = np.asarray(rates, dtype=complex)
    if ps.ndim != 3 or ps.shape != dps.shape:
        raise ValueError("projectors and rates must be matching stacks of square matrices")
    n = ps.shape[1]
    if np.linalg.norm(ps.sum(axis=0) - np.eye(n)) > 1e-10:
        raise NotAResolution("projectors do not sum to the identity")
    if np.any(np.linalg.norm(ps @ ps - ps, axis=(1, 2)) > 1e-10):
        raise NotAResolution("a projector is not idempotent")
    return np.einsum("mij,mjk->ik", dps, ps)


def uhlmann_flow_generator(rho, drho_dt) -> FlowGenerator:
    """``H~ = i [d sqrt(rho) rho^{-1/2} - sqrt(rho) A_U rho^{-1/2}]`` for a full-rank state.

    The amplitude ``W = sqrt(rho) U`` transported horizontally obeys
    ``i W' = H~ W`` and therefore ``rho' = -i {H~, rho}``.
    """
    r = as_density(rho).require_full_rank()
    drho = np.asarray(drho_dt, dtype=complex)
    a_u = uhlmann_connection_sample(r, drho).a_u
    dsq = d_sqrt(r, drho)
    h_tilde = 1j * (dsq @ r.inv_sqrt - r.sqrt @ a_u @ r.inv_sqrt)
    return FlowGenerator(h_tilde, a_u)


def _closed_samples(rho_path, steps: int) -> list[DensityMatrix]:
    rhos = [as_density(r).require_full_rank() for r in rho_path]
    if len(rhos) != steps + 1:
        raise ValueError(f"expected {steps + 1} density samples, got {len(rhos)}")
    if np.linalg.norm(rhos[-1].mat - rhos[0].mat) > 1e-10:
        raise NotClosed("density path is not closed")
    return rhos


def _visible_arg(z: complex) -> float:
    if abs(z) < VISIBILITY_TOL:
        raise ZeroMagnitude(f"visibility |Tr| = {abs(z):.3e}; dynamic phase undefined")
    return principal_arg(z)


def dynamic_phase_general(rho_path, path: HamiltonianPath, steps: int) -> float:
    """Dynamic phase of an amplitude driven by ``H`` along a closed density path.

    ``theta_D = arg Tr[rho(0) T exp(-oint (i rho^{-1/2} H rho^{1/2}
    + rho^{-1/2} d sqrt(rho)/dt) dt)]``.  Step ``j`` uses the average of the
    neighbouring square roots as the midpoint and their difference as the
    increment of ``sqrt(rho)``.
    """
    rhos = _closed_samples(rho_path, steps)
    dt = path.tau / steps
    hs = path.midpoint_samples(steps)
    sq = np.asarray([r.sqrt for r in rhos])
    sq_mid = 0.5 * (sq[1:] + sq[:-1])
    inv_mid = np.linalg.inv(sq_mid)
    gens = 1j * dt * (inv_mid @ hs @ sq_mid) + inv_mid @ (sq[1:] - sq[:-1])
    total = ordered_product(expm_many(-gens))
    return _visible_arg(complex(np.trace(rhos[0].mat @ total)))


def dynamic_phase_quasistatic(rho0, path: HamiltonianPath, steps: int) -> float:
    """Dynamic phase ``arg Tr[rho(0) T exp(-i oint H dt)]`` of a quasi-static cycle."""
    r0 = as_density(rho0)
    return _visible_arg(complex(np.trace(r0.mat @ path.propagator(steps))))


def dynamic_phase_constant(rho0, h, tau: float) -> float:
    """Time-independent shortcut ``arg sum_n <n|rho(0)|n> exp(-i E_n tau)``."""
    r0 = as_density(rho0)
    es = eig_hermitian(h)
    pops = np.einsum("in,ij,jn->n", es.vectors.conj(), r0.mat, es.vectors).real
    return _visible_arg(complex(np.sum(pops * np.exp(-1j * es.values * tau))))


def incompatibility_witness(rho, h_tilde) -> WitnessReport:
    """Evaluate the three witnesses for a full-rank ``rho`` and anti-Hermitian ``H~``."""
    r = as_density(rho).require_full_rank()
    h = np.asarray(h_tilde, dtype=complex)
    if not is_hermitian(1j * h, 1e-9) and np.linalg.norm(h) > 0:
        raise ValueError("h_tilde must be anti-Hermitian")
    sim = r.inv_sqrt @ h @ r.sqrt
    eigs = np.linalg.eigvals(sim)
    lam = r.values
    return WitnessReport(
        similarity_eigenvalues=eigs,
        similarity_max_real=float(np.max(np.abs(eigs.real))) if eigs.size else 0.0,
        anticommutator_norm=float(np.linalg.norm(h @ r.mat + r.mat @ h)),
        sylvester_gain=float(2.0 * lam[0]),
        trace_drift=float(abs(-2j * np.trace(h @ r.mat))),
    )
