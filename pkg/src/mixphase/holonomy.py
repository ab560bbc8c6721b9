"""Discrete parallel transport: Berry phase, Uhlmann connection and holonomy.

Path-ordered exponentials follow one convention throughout the package:
the loop ``t_0 < t_1 < ... < t_N`` is cut into ``N`` steps, each step
contributes ``exp(-A(t_{j+1/2}) dt)`` with the generator sampled at the
midpoint, and later steps multiply on the left.

Sign convention: the Uhlmann connection is ``A_U = -dU U^dag``, i.e.

    A_U = -sum_ij |i> <i|[d sqrt(rho), sqrt(rho)]|j> / (lambda_i + lambda_j) <j|

which is the negative of the form used in some of the literature.  With this
sign, ``U(1) = P exp(-oint A_U) U(0)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import NotClosed, NotNormalized, RankDeficient, VanishingOverlap, ZeroMagnitude
from .linalg import (
    RANK_TOL,
    dagger,
    expm_antihermitian_many,
    ordered_product,
    polar_decompose,
    principal_arg,
)
from .states import DensityMatrix, as_density

VISIBILITY_TOL = 1e-12
OVERLAP_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ParamLoop:
    """Discretised path ``t_j = j tau / N`` with parameter samples ``R(t_j)``.

    ``samples`` holds ``N + 1`` points.  A closed loop has
    ``samples[N] == samples[0]`` exactly.
    """

    tau: float
    samples: np.ndarray
    closed: bool = True

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if s.shape[0] < 3:
            raise ValueError("a loop needs at least N = 2 steps")
        if self.closed and not np.array_equal(s[-1], s[0]):
            raise NotClosed("closed loop must end exactly where it starts")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def n_steps(self) -> int:
        return self.samples.shape[0] - 1

    @property
    def dt(self) -> float:
        return self.tau / self.n_steps

    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.dt

    def midpoint_times(self) -> np.ndarray:
        return (np.arange(self.n_steps) + 0.5) * self.dt


@dataclass(frozen=True, eq=False)
class ConnectionSample:
    t: float
    a_u: np.ndarray


def berry_phase_discrete(states: Sequence) -> float:
    """Berry phase of a closed loop of pure states, ``arg prod <psi_j|psi_{j+1}>``.

    The last state only has to be proportional to the first; it is replaced
    by the first so the product is invariant under independent rephasing of
    every sample.
    """
    psi = np.asarray(states, dtype=complex)
    if psi.ndim != 2 or psi.shape[0] < 3:
        raise ValueError("need a (N+1, dim) array of states with N >= 2")
    norms = np.linalg.norm(psi, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-10):
        raise NotNormalized("every state on the loop must be unit norm")
    closing = abs(np.vdot(psi[0], psi[-1]))
    if abs(closing - 1.0) > 1e-8:
        raise NotClosed("last state is not proportional to the first")
    psi = psi.copy()
    psi[-1] = psi[0]
    overlaps = np.einsum("ji,ji->j", psi[:-1].conj(), psi[1:])
    mags = np.abs(overlaps)
    if np.min(mags) < OVERLAP_TOL:
        raise VanishingOverlap(
            f"consecutive overlap {np.min(mags):.3e} vanishes at step {int(np.argmin(mags))}"
        )
    # unit-modulus factors keep the running product away from underflow
    return principal_arg(np.prod(overlaps / mags))


def _connection_eigenbasis(lam: np.ndarray, vec: np.ndarray, drho: np.ndarray) -> np.ndarray:
    """Stacked ``A_U`` from eigenpairs of ``rho`` and the differential ``d rho``."""
    s = np.sqrt(lam)
    d = dagger(vec) @ drho @ vec
    s_sum = s[..., :, None] + s[..., None, :]
    lam_sum = lam[..., :, None] + lam[..., None, :]
    dsqrt = d / s_sum
    # <i|[d sqrt(rho), sqrt(rho)]|j> = dsqrt_ij (s_j - s_i)
    comm = dsqrt * (s[..., None, :] - s[..., :, None])
    a = -comm / lam_sum
    return vec @ a @ dagger(vec)


def _check_full_rank(lam: np.ndarray) -> None:
    lo = lam[..., 0]
    hi = lam[..., -1]
    bad = lo < RANK_TOL * hi
    if np.any(bad):
        raise RankDeficient(f"density matrix with eigenvalue {float(np.min(lo)):.3e} is not full rank")


def uhlmann_connection_sample(rho, drho, t: float = 0.0) -> ConnectionSample:
    """Uhlmann connection ``A_U`` of a full-rank ``rho`` along ``drho``.

    ``d sqrt(rho)`` is obtained in the eigenbasis of ``rho`` by dividing
    ``<i|d rho|j>`` by ``sqrt(lambda_i) + sqrt(lambda_j)``.
    """
    r = as_density(rho).require_full_rank()
    d = np.asarray(drho, dtype=complex)
    if d.shape != r.mat.shape:
        raise ValueError("drho must have the same shape as rho")
    d = 0.5 * (d + dagger(d))
    return ConnectionSample(float(t), _connection_eigenbasis(r.values, r.vectors, d))


def d_sqrt(rho, drho) -> np.ndarray:
    """Differential of ``sqrt(rho)`` along ``drho`` (eigenbasis division)."""
    r = as_density(rho)
    s = np.sqrt(r.values)
    d = dagger(r.vectors) @ np.asarray(drho, dtype=complex) @ r.vectors
    return r.vectors @ (d / (s[:, None] + s[None, :])) @ dagger(r.vectors)


def _as_rho_stack(rho_of_t) -> np.ndarray:
    mats = [r.mat if isinstance(r, DensityMatrix) else np.asarray(r, dtype=complex) for r in rho_of_t]
    stack = np.asarray(mats, dtype=complex)
    if stack.ndim != 3 or stack.shape[1] != stack.shape[2]:
        raise ValueError("expected a sequence of square density matrices")
    herm = np.linalg.norm(stack - dagger(stack), axis=(1, 2))
    if np.any(herm > 1e-10):
        raise ValueError("density samples must be Hermitian")
    traces = np.trace(stack, axis1=1, axis2=2).real
    if np.any(np.abs(traces - 1.0) > 1e-10):
        raise NotNormalized("density samples must have unit trace")
    return 0.5 * (stack + dagger(stack))


def uhlmann_step_generators(rho_of_t) -> np.ndarray:
    """Stack of ``A_U(t_{j+1/2}) dt`` for consecutive density samples.

    The midpoint state is the average of the two neighbouring samples and
    the differential is their difference, which is second-order accurate.
    """
    rhos = _as_rho_stack(rho_of_t)
    lam_s = np.linalg.eigvalsh(rhos)
    _check_full_rank(lam_s)
    mid = 0.5 * (rhos[1:] + rhos[:-1])
    diff = rhos[1:] - rhos[:-1]
    lam, vec = np.linalg.eigh(mid)
    _check_full_rank(lam)
    return _connection_eigenbasis(lam, vec, diff)


def _require_closed(loop: ParamLoop, rhos: np.ndarray) -> None:
    if not loop.closed:
        raise NotClosed("holonomy needs a closed loop")
    if rhos.shape[0] != loop.n_steps + 1:
        raise ValueError(f"expected {loop.n_steps + 1} density samples, got {rhos.shape[0]}")
    if np.linalg.norm(rhos[-1] - rhos[0]) > 1e-10:
        raise NotClosed("density matrix at the end of the loop differs from the start")


def path_ordered_exp(step_generators) -> np.ndarray:
    """``P exp(-sum_j A_j)`` for a stack of anti-Hermitian step generators ``A_j = A(t_{j+1/2}) dt``."""
    return ordered_product(expm_antihermitian_many(-np.asarray(step_generators, dtype=complex)))


def uhlmann_holonomy(loop: ParamLoop, rho_of_t) -> np.ndarray:
    """Uhlmann holonomy ``P exp(-oint A_U)`` along a closed loop of full-rank states."""
    rhos = _as_rho_stack(rho_of_t)
    _require_closed(loop, rhos)
    return path_ordered_exp(uhlmann_step_generators(rhos))


def uhlmann_phase(loop: ParamLoop, rho_of_t, rho0=None) -> float:
    """Uhlmann phase ``arg Tr[rho(0) P exp(-oint A_U)]``."""
    rhos = _as_rho_stack(rho_of_t)
    hol = uhlmann_holonomy(loop, rhos)
    r0 = rhos[0] if rho0 is None else as_density(rho0).mat
    z = complex(np.trace(r0 @ hol))
    if abs(z) < VISIBILITY_TOL:
        raise ZeroMagnitude(f"|Tr[rho(0) holonomy]| = {abs(z):.3e}; Uhlmann phase undefined")
    return principal_arg(z)


def discrete_parallel_transport(rho_of_t) -> np.ndarray:
    """Uhlmann holonomy as a product of finite parallel transports.

    Each step applies the relative gauge that makes neighbouring amplitudes
    parallel (the adjoint polar factor of ``sqrt(rho_j) sqrt(rho_{j+1})``).
    No connection is evaluated, so this is an independent route to the
    same limit as :func:`uhlmann_holonomy`.
    """
    rhos = [as_density(r).require_full_rank() for r in rho_of_t]
    n = rhos[0].dim
    total = np.eye(n, dtype=complex)
    for a, b in zip(rhos[:-1], rhos[1:]):
        _, u_x = polar_decompose(a.sqrt @ b.sqrt)
        total = dagger(u_x) @ total
    return total


def plaquette_loop(origin: tuple[float, float], eps: float, steps_per_side: int = 1) -> np.ndarray:
    """Counter-clockwise square of side ``eps`` as ``(4 s + 1, 2)`` points."""
    x0, y0 = origin
    f = np.arange(steps_per_side) / steps_per_side
    sides = [
        np.column_stack([x0 + eps * f, np.full_like(f, y0)]),
        np.column_stack([np.full_like(f, x0 + eps), y0 + eps * f]),
        np.column_stack([x0 + eps * (1 - f), np.full_like(f, y0 + eps)]),
        np.column_stack([np.full_like(f, x0), y0 + eps * (1 - f)]),
    ]
    pts = np.vstack(sides + [np.array([[x0, y0]])])
    return pts


def curvature_triviality_check(
    rho_of: Callable[[float, float], np.ndarray],
    origin: tuple[float, float],
    eps: float,
    steps_per_side: int = 1,
) -> float:
    """``||H - 1||_F`` for the Uhlmann holonomy ``H`` around a small plaquette.

    A flat connection gives a residual that vanishes faster than the
    plaquette area, so the log-log slope against ``eps`` exceeds 2.
    """
    pts = plaquette_loop(origin, eps, steps_per_side)
    rhos = [as_density(rho_of(x, y)).mat for x, y in pts]
    rhos[-1] = rhos[0]
    loop = ParamLoop(1.0, pts)
    hol = uhlmann_holonomy(loop, rhos)
    return float(np.linalg.norm(hol - np.eye(hol.shape[0])))


def loglog_slope(eps, residuals) -> float:
    """Least-squares slope of ``log(residual)`` against ``log(eps)``."""
    x, y = np.log(np.asarray(eps, dtype=float)), np.log(np.asarray(residuals, dtype=float))
    return float(np.polyfit(x, y, 1)[0])
