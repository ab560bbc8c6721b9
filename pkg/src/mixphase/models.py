"""Concrete systems: Kitaev and SSH chains, harmonic oscillator, gapless continuum.

All inputs are dimensionless groups (hbar = k_B = 1): ``mMtau`` stands for
``m M tau / hbar``, ``betaM`` for ``beta M`` and so on.  ``math.inf`` is
accepted for inverse temperatures by the closed forms (zero temperature) and
routed to the saturated ``tanh``/``coth`` values; matrix numerics never see it.

Closed forms return ``(theta, branch)``.  ``branch`` names the case of the
piecewise formula that produced the value:

* ``"central"``  reduced argument in ``(-pi/2, pi/2)``
* ``"upper"``    reduced argument in ``(pi/2, pi)``
* ``"lower"``    reduced argument in ``[-pi, -pi/2)``
* ``"resonant+"`` / ``"resonant-"``  reduced argument at ``+pi/2`` / ``-pi/2``
* ``"infinite_T"`` oscillator at ``beta = 0`` (sign rule)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .dynamics import HamiltonianPath, dynamic_phase_quasistatic
from .errors import BetaZero, GapClosure, TruncationInsufficient
from .holonomy import ParamLoop
from .linalg import dagger, expm_antihermitian_many, principal_arg, wrap_angle
from .states import thermal_state

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])

GAP_TOL = 1e-10
# Resonances sit at irrational multiples of pi; floating-point inputs such as
# ``math.pi / 2`` miss them by ~1e-16, so they are matched within this window.
RESONANCE_TOL = 1e-12


@dataclass(frozen=True)
class KitaevSpec:
    """Periodic Kitaev chain with ``m = mu / 2M`` and ``c = J / M``."""

    m: float = 0.6
    c: float = 1.0
    M: float = 1.0

    def __post_init__(self):
        if not self.M > 0:
            raise ValueError("superconducting gap M must be positive")

    @property
    def energy_scale(self) -> float:
        return self.M

    def d_vector(self, k):
        """``(Delta_k / 2) n_k``."""
        k = np.asarray(k, dtype=float)
        return self.M * np.stack([np.zeros_like(k), -np.sin(k), self.c * np.cos(k) - self.m])


@dataclass(frozen=True)
class SSHSpec:
    """SSH chain with hoppings ``j1``, ``j2`` and no staggered potential."""

    j1: float = 1.0
    j2: float = 1.2

    @property
    def energy_scale(self) -> float:
        return abs(self.j1)

    def d_vector(self, k):
        k = np.asarray(k, dtype=float)
        return np.stack([-self.j1 - self.j2 * np.cos(k), self.j2 * np.sin(k), np.zeros_like(k)])


TwoBandSpec = Union[KitaevSpec, SSHSpec]


def band_gap(spec: TwoBandSpec, k) -> np.ndarray:
    """``Delta_k``: twice the length of the d-vector."""
    return 2.0 * np.linalg.norm(spec.d_vector(k), axis=0)


def bloch_vector(spec: TwoBandSpec, k) -> np.ndarray:
    """Unit vector ``n_k``; raises :class:`GapClosure` where the gap vanishes."""
    d = spec.d_vector(k)
    gap = 2.0 * np.linalg.norm(d, axis=0)
    if np.any(gap < GAP_TOL * spec.energy_scale):
        raise GapClosure(f"gap {float(np.min(gap)):.3e} closes; n_k is undefined")
    return 2.0 * d / gap


def two_band_hamiltonian(spec: TwoBandSpec, k: float) -> np.ndarray:
    """``H_k = f(k) 1 + (Delta_k / 2) sigma . n_k`` with ``f = 0`` for both chains."""
    n = bloch_vector(spec, k)
    gap = float(band_gap(spec, k))
    return 0.5 * gap * np.einsum("a,aij->ij", n, PAULI)


def two_band_hamiltonians(spec: TwoBandSpec, ks) -> np.ndarray:
    """Stack of ``H_k`` for an array of momenta."""
    ks = np.asarray(ks, dtype=float)
    bloch_vector(spec, ks)
    return np.einsum("aj,aik->jik", spec.d_vector(ks), PAULI)


def brillouin_loop(spec: TwoBandSpec, tau: float, n_samples: int) -> ParamLoop:
    """Loop ``k(t) = 2 pi t / tau`` over the Brillouin circle.

    Sample ``j`` carries ``k_j = 2 pi j / n``; the closing sample is ``k = 0``
    exactly.  Integrators evaluate at ``k = 2 pi (j + 1/2) / n``.
    """
    if n_samples < 2:
        raise ValueError("need at least two samples")
    ks = 2.0 * math.pi * np.arange(n_samples + 1) / n_samples
    ks[-1] = 0.0
    return ParamLoop(tau, ks)


def brillouin_path(spec: TwoBandSpec, tau: float) -> HamiltonianPath:
    """``H_{k(t)}`` with ``k(t) = 2 pi t / tau``."""
    return HamiltonianPath(
        tau,
        lambda t: two_band_hamiltonian(spec, 2.0 * math.pi * t / tau),
        lambda ts: two_band_hamiltonians(spec, 2.0 * math.pi * np.asarray(ts) / tau),
    )


def _saturating_tanh(x: float) -> float:
    if math.isnan(x):
        raise ValueError("argument is NaN")
    return math.tanh(x) if math.isfinite(x) else math.copysign(1.0, x)


def _reduce(x: float) -> float:
    """Map onto ``[-pi, pi)``, the period used by the piecewise formulas."""
    y = math.remainder(x, 2.0 * math.pi)
    if y >= math.pi:
        y -= 2.0 * math.pi
    return y


def _piecewise(x: float, slope: float, sign: float) -> tuple[float, str]:
    """Shared four-branch evaluation of ``sign * arctan(tan(x) * slope)``.

    ``sign = -1`` gives the Kitaev / oscillator form, ``+1`` the SSH form.
    """
    y = _reduce(x)
    half = math.pi / 2
    if abs(y - half) <= RESONANCE_TOL:
        return sign * half, "resonant+"
    if abs(y + half) <= RESONANCE_TOL:
        return -sign * half, "resonant-"
    base = sign * math.atan(math.tan(y) * slope)
    if -half < y < half:
        return wrap_angle(base), "central"
    if y > half:
        return wrap_angle(base + sign * math.pi), "upper"
    return wrap_angle(base - sign * math.pi), "lower"


def kitaev_theta_d(m: float, c: float, mM_tau: float, betaM: float) -> tuple[float, str]:
    """Closed-form dynamic phase of the Kitaev chain.

    ``theta_D = arg[cos x - i sin x tanh(beta M (c - m))]`` with
    ``x = m M tau``, evaluated branch by branch on ``[-pi, pi)``.
    """
    if betaM < 0 or math.isnan(betaM):
        raise ValueError("betaM must be in [0, inf]")
    if abs(c - m) <= GAP_TOL:
        raise GapClosure("m = c closes the gap at k = 0")
    t = _saturating_tanh(betaM * (c - m)) if betaM > 0 else 0.0
    return _piecewise(mM_tau, t, -1.0)


def ssh_theta_d(j1_tau: float, beta_j1: float, j2_over_j1: float) -> tuple[float, str]:
    """Closed-form dynamic phase of the SSH chain.

    ``theta_D = arg[cos x + i sin x tanh(beta (J1 + J2))]`` with
    ``x = J1 tau``.
    """
    if beta_j1 < 0 or math.isnan(beta_j1):
        raise ValueError("beta_j1 must be in [0, inf]")
    if abs(j2_over_j1 - 1.0) <= GAP_TOL:
        raise GapClosure("J2 = J1 closes the gap at k = pi")
    t = _saturating_tanh(beta_j1 * (1.0 + j2_over_j1)) if beta_j1 > 0 else 0.0
    return _piecewise(j1_tau, t, 1.0)


@dataclass(frozen=True)
class OscillatorSpec:
    """Harmonic oscillator run for ``omega tau`` at inverse temperature ``beta hbar omega``.

    ``n_max=None`` lets the numeric sum pick its own truncation.
    """

    omega_tau: float
    beta_hw: float
    n_max: Optional[int] = None

    def __post_init__(self):
        if self.n_max is not None and self.n_max < 1:
            raise ValueError("n_max must be at least 1")
        if not self.beta_hw >= 0:
            raise ValueError("beta_hw must be in [0, inf]")


def oscillator_theta_d(spec: OscillatorSpec) -> tuple[float, str]:
    """Closed-form oscillator phase ``-arctan(tan(w tau / 2) coth(beta hbar w / 2))`` by branch.

    At infinite temperature the sign rule applies: ``(1 - (-1)^n) pi / 2`` at
    ``w tau = 2 n pi`` and ``-sgn(sin(w tau / 2)) pi / 2`` elsewhere.
    """
    half_x = 0.5 * spec.omega_tau
    if spec.beta_hw == 0.0:
        y = _reduce(half_x)
        if abs(y) <= RESONANCE_TOL:
            return 0.0, "infinite_T"
        if abs(y + math.pi) <= RESONANCE_TOL:
            return math.pi, "infinite_T"
        return -math.copysign(math.pi / 2, y), "infinite_T"
    coth = 1.0 if math.isinf(spec.beta_hw) else 1.0 / math.tanh(0.5 * spec.beta_hw)
    return _piecewise(half_x, coth, -1.0)


def oscillator_tail_bound(beta_hw: float, n_max: int) -> float:
    """Upper bound on the dropped terms ``sum_{n > n_max} e^{-beta hbar w (n + 1/2)}``
    relative to the leading factor: ``e^{-beta hbar w (n_max + 1)} / (1 - e^{-beta hbar w})``."""
    return math.exp(-beta_hw * (n_max + 1)) / -math.expm1(-beta_hw)


def choose_n_max(beta_hw: float, rel_tol: float = 1e-10, start: int = 200) -> int:
    """Smallest ``n_max >= start`` whose tail bound is below ``rel_tol`` of the sum's lower bound."""
    # |partial sum| >= e^{-b/2} / (1 + e^{-b}) for every omega tau
    floor = 1.0 / (1.0 + math.exp(-beta_hw))
    need = math.log(rel_tol * floor * -math.expm1(-beta_hw)) / -beta_hw - 1.0
    return max(start, int(math.ceil(need)))


def oscillator_theta_d_numeric(spec: OscillatorSpec) -> float:
    """Phase of the truncated Fock sum ``sum_{n <= n_max} e^{-(beta hbar + i tau) w (n + 1/2)}``."""
    b = spec.beta_hw
    if b == 0.0:
        raise BetaZero("the Fock sum diverges at beta = 0; use oscillator_theta_d")
    if math.isinf(b):
        n_max = spec.n_max or 1
    else:
        n_max = spec.n_max if spec.n_max is not None else choose_n_max(b)
        bound = oscillator_tail_bound(b, n_max)
        if bound > 1e-8:
            raise TruncationInsufficient(f"tail bound {bound:.3e} with n_max={n_max}")
    n = np.arange(n_max + 1) + 0.5
    if math.isinf(b):
        return principal_arg(np.exp(-0.5j * spec.omega_tau))
    terms = np.exp(-b * (n - 0.5)) * np.exp(-1j * spec.omega_tau * n)
    return principal_arg(terms.sum())


def continuum_theta_d(tau_over_beta_h: float) -> float:
    """Gapless continuum: ``-arctan(tau / (beta hbar))``; ``inf`` gives ``-pi/2``."""
    r = float(tau_over_beta_h)
    if r < 0 or math.isnan(r):
        raise ValueError("tau / (beta hbar) must be non-negative")
    return -math.atan(r) if math.isfinite(r) else -math.pi / 2


def two_band_rho0(spec: TwoBandSpec, beta: float):
    """Thermal state of ``H_{k=0}`` at inverse temperature ``beta`` (energy units of the spec)."""
    return thermal_state(two_band_hamiltonian(spec, 0.0), beta)


def two_band_theta_d_numeric(spec: TwoBandSpec, tau: float, beta: float, n_samples: int = 4096) -> float:
    """Time-ordered dynamic phase over the Brillouin loop.

    ``theta_D = arg Tr[rho(0) T exp(-i oint H_{k(t)} dt)]`` with
    ``rho(0)`` the thermal state at ``k = 0`` and ``k(t) = 2 pi t / tau``.
    The ``H_k`` at different momenta do not commute, so this differs from
    :func:`two_band_theta_d_unordered` at order ``tau^2``.
    """
    if not math.isfinite(beta):
        raise ValueError("numeric route needs finite beta")
    return dynamic_phase_quasistatic(two_band_rho0(spec, beta), brillouin_path(spec, tau), n_samples)


def two_band_theta_d_unordered(spec: TwoBandSpec, tau: float, beta: float, n_samples: int = 4096) -> float:
    """Dynamic phase with the loop integral exponentiated in one piece.

    ``arg Tr[rho(0) exp(-i tau <H_k>_BZ)]`` where ``<H_k>_BZ`` is the
    Brillouin-zone average of ``H_k`` (midpoint rule).  This drops time
    ordering and is the route on which the closed forms are built.
    """
    if not math.isfinite(beta):
        raise ValueError("numeric route needs finite beta")
    ks = 2.0 * math.pi * (np.arange(n_samples) + 0.5) / n_samples
    h_avg = two_band_hamiltonians(spec, ks).mean(axis=0)
    h_avg = 0.5 * (h_avg + dagger(h_avg))
    u = expm_antihermitian_many(-1j * tau * h_avg[None])[0]
    rho0 = two_band_rho0(spec, beta)
    return principal_arg(np.trace(rho0.mat @ u))
