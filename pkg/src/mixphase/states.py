"""Density matrices, thermal ensembles, purification and state metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import BetaTooLarge, DimMismatch, NotHermitian, NotNormalized, NotPSD, RankDeficient
from .linalg import (
    HERM_TOL,
    PSD_TOL,
    RANK_TOL,
    EigenSystem,
    as_square,
    dagger,
    eig_hermitian,
    hermiticity_residual,
    is_unitary,
    polar_decompose,
)

TRACE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated density matrix.

    The eigendecomposition is computed once and cached; ``sqrt`` and
    ``inv_sqrt`` are built from it.
    """

    mat: np.ndarray
    _eig: EigenSystem = field(init=False, repr=False)

    def __post_init__(self):
        a = as_square(self.mat, "density matrix")
        if hermiticity_residual(a) > HERM_TOL:
            raise NotHermitian("density matrix is not Hermitian")
        a = 0.5 * (a + dagger(a))
        tr = np.trace(a).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise NotNormalized(f"trace {tr!r} differs from 1")
        es = eig_hermitian(a)
        if es.values[0] < -PSD_TOL:
            raise NotPSD(f"eigenvalue {es.values[0]:.3e} is negative")
        a.setflags(write=False)
        object.__setattr__(self, "mat", a)
        object.__setattr__(self, "_eig", es)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def values(self) -> np.ndarray:
        """Eigenvalues in ascending order, clamped at zero."""
        return np.clip(self._eig.values, 0.0, None)

    @property
    def vectors(self) -> np.ndarray:
        return self._eig.vectors

    @property
    def full_rank(self) -> bool:
        lam = self.values
        return bool(lam[0] >= RANK_TOL * lam[-1])

    def require_full_rank(self) -> "DensityMatrix":
        if not self.full_rank:
            raise RankDeficient(
                f"density matrix has eigenvalue {self.values[0]:.3e}; a full-rank state is required"
            )
        return self

    @cached_property
    def sqrt(self) -> np.ndarray:
        return (self.vectors * np.sqrt(self.values)) @ dagger(self.vectors)

    @cached_property
    def inv_sqrt(self) -> np.ndarray:
        self.require_full_rank()
        return (self.vectors / np.sqrt(self.values)) @ dagger(self.vectors)


def as_density(rho) -> DensityMatrix:
    return rho if isinstance(rho, DensityMatrix) else DensityMatrix(np.asarray(rho))


@dataclass(frozen=True, eq=False)
class Amplitude:
    """Purification ``W = sqrt(rho) U`` of a density matrix together with its gauge ``U``."""

    w: np.ndarray
    gauge: np.ndarray

    @property
    def rho(self) -> np.ndarray:
        return self.w @ dagger(self.w)


def _amp(x) -> np.ndarray:
    return x.w if isinstance(x, Amplitude) else np.asarray(x, dtype=complex)


def thermal_state(h, beta: float) -> DensityMatrix:
    """Gibbs state ``exp(-beta H) / Tr exp(-beta H)`` (units with k_B = 1).

    The spectrum is shifted by its minimum before exponentiating, so the
    largest Boltzmann weight is exactly one and nothing overflows.

    Raises:
        BetaTooLarge: if some weight underflows to exactly zero, which would
            leave the state rank deficient.
    """
    beta = float(beta)
    if not math.isfinite(beta) or beta < 0.0:
        raise ValueError(f"beta must be finite and non-negative, got {beta!r}")
    es = eig_hermitian(h)
    weights = np.exp(-beta * (es.values - es.values[0]))
    if np.any(weights == 0.0):
        raise BetaTooLarge(f"beta={beta:g} underflows Boltzmann weights to zero")
    p = weights / weights.sum()
    return DensityMatrix((es.vectors * p) @ dagger(es.vectors))


def purify(rho, gauge) -> Amplitude:
    """Amplitude ``W = sqrt(rho) @ gauge`` for a full-rank state."""
    rho = as_density(rho).require_full_rank()
    u = as_square(gauge, "gauge")
    if u.shape != rho.mat.shape:
        raise DimMismatch(f"gauge shape {u.shape} does not match state {rho.mat.shape}")
    if not is_unitary(u):
        raise ValueError("gauge is not unitary")
    return Amplitude(rho.sqrt @ u, u)


def hs_inner(w1, w2) -> complex:
    """Hilbert-Schmidt product ``Tr(W1^dag W2)``."""
    a, b = _amp(w1), _amp(w2)
    if a.shape != b.shape:
        raise DimMismatch(f"shapes {a.shape} and {b.shape} differ")
    return complex(np.trace(dagger(a) @ b))


def fidelity(rho1, rho2) -> float:
    """Root fidelity ``Tr sqrt(sqrt(rho1) rho2 sqrt(rho1))`` (not squared)."""
    r1, r2 = as_density(rho1), as_density(rho2)
    if r1.dim != r2.dim:
        raise DimMismatch("states have different dimensions")
    s = r1.sqrt
    inner = s @ r2.mat @ s
    lam = eig_hermitian(0.5 * (inner + dagger(inner)), herm_tol=1e-8).values
    if lam[0] < -PSD_TOL:
        raise NotPSD(f"sqrt(rho1) rho2 sqrt(rho1) has eigenvalue {lam[0]:.3e}")
    return float(np.sum(np.sqrt(np.clip(lam, 0.0, None))))


def bures_hs_distance(rho1, rho2) -> float:
    """Bures distance ``sqrt(2 - 2 F)``, the minimal Hilbert-Schmidt distance of purifications."""
    return math.sqrt(max(0.0, 2.0 - 2.0 * fidelity(rho1, rho2)))


def parallel_gauge(rho1, rho2, gauge1) -> np.ndarray:
    """Gauge of ``rho2`` that is parallel to ``sqrt(rho1) @ gauge1``.

    The relative gauge ``U2 U1^dag`` is the adjoint of the unitary polar
    factor of ``sqrt(rho1) sqrt(rho2)``; algebraically this is
    ``rho2^{-1/2} rho1^{-1/2} sqrt(sqrt(rho1) rho2 sqrt(rho1))``.  With it,
    ``W1^dag W2`` is Hermitian positive definite and ``Tr(W1^dag W2)``
    equals the fidelity.
    """
    r1 = as_density(rho1).require_full_rank()
    r2 = as_density(rho2).require_full_rank()
    if r1.dim != r2.dim:
        raise DimMismatch("states have different dimensions")
    _, u_x = polar_decompose(r1.sqrt @ r2.sqrt)
    return dagger(u_x) @ np.asarray(gauge1, dtype=complex)


def _unit_vector(psi) -> np.ndarray:
    v = np.asarray(psi, dtype=complex).ravel()
    if abs(np.linalg.norm(v) - 1.0) > 1e-12:
        raise NotNormalized(f"state norm {np.linalg.norm(v)!r} differs from 1")
    return v


def fubini_study_distance(psi1, psi2) -> float:
    """``sqrt(2 - 2 |<psi1|psi2>|)`` between two rays."""
    a, b = _unit_vector(psi1), _unit_vector(psi2)
    if a.shape != b.shape:
        raise DimMismatch("state vectors have different lengths")
    return math.sqrt(max(0.0, 2.0 - 2.0 * abs(np.vdot(a, b))))


def regularize(rho, eps: float = 1e-8) -> DensityMatrix:
    """Mix ``rho`` with the identity so every eigenvalue is at least ``eps``.

    Returns ``(1 - n eps) rho + eps 1``; the stand-in for zero-temperature
    (pure) states wherever a full-rank matrix is required.
    """
    r = np.asarray(rho.mat if isinstance(rho, DensityMatrix) else rho, dtype=complex)
    n = r.shape[0]
    if not 0.0 <= eps * n < 1.0:
        raise ValueError("eps must satisfy 0 <= n * eps < 1")
    return DensityMatrix((1.0 - n * eps) * r + eps * np.eye(n))
