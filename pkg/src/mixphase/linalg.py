"""Dense complex linear algebra for small square matrices.

Everything here works on plain ``numpy`` arrays of shape ``(n, n)``.  The
heavy lifting is delegated to LAPACK through :mod:`numpy.linalg` and
:mod:`scipy.linalg`; this module adds the validation, tolerances and
deterministic conventions (eigenvalue order, eigenvector phases, branch of
``arg``) the rest of the package relies on.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import NoConvergence, NotHermitian, NotPSD, RankDeficient, ZeroMagnitude

HERM_TOL = 1e-10
PSD_TOL = 1e-10
RANK_TOL = 1e-12
ARG_TOL = 1e-14


class EigenSystem(NamedTuple):
    """Ascending real eigenvalues and orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def as_square(m, name: str = "matrix") -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def hermiticity_residual(m: np.ndarray) -> float:
    """Relative Frobenius distance of ``m`` from its adjoint."""
    scale = np.linalg.norm(m)
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(m - dagger(m)) / scale)


def is_hermitian(m: np.ndarray, tol: float = HERM_TOL) -> bool:
    return hermiticity_residual(m) <= tol


def is_unitary(u: np.ndarray, tol: float = 1e-11) -> bool:
    u = np.asarray(u)
    return bool(np.linalg.norm(dagger(u) @ u - np.eye(u.shape[0])) <= tol)


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    # Largest-magnitude component of each column made real positive;
    # argmax picks the first index on ties.
    idx = np.argmax(np.abs(vectors), axis=0)
    pivots = vectors[idx, np.arange(vectors.shape[1])]
    return vectors * (np.conj(pivots) / np.abs(pivots))


def eig_hermitian(m, herm_tol: float = HERM_TOL) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix.

    Eigenvalues come back in ascending order (ties keep LAPACK's column
    order) and each eigenvector is rephased so that its largest-magnitude
    component is real and positive, which makes the result reproducible.

    Raises:
        NotHermitian: if ``||M - M^dag||_F > herm_tol * ||M||_F``.
        NoConvergence: if LAPACK fails to converge.
    """
    a = as_square(m)
    if hermiticity_residual(a) > herm_tol:
        raise NotHermitian(f"hermiticity residual {hermiticity_residual(a):.3e} exceeds {herm_tol:g}")
    a = 0.5 * (a + dagger(a))
    try:
        values, vectors = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NoConvergence(str(exc)) from exc
    order = np.argsort(values, kind="stable")
    return EigenSystem(values[order], _fix_phases(vectors[:, order]))


def _psd_values(es: EigenSystem, psd_tol: float) -> np.ndarray:
    scale = max(float(np.max(np.abs(es.values))), np.finfo(float).tiny)
    if es.values[0] < -psd_tol * scale:
        raise NotPSD(f"eigenvalue {es.values[0]:.3e} below -{psd_tol:g} (relative)")
    return np.clip(es.values, 0.0, None)


def matrix_sqrt_psd(m, psd_tol: float = PSD_TOL) -> np.ndarray:
    """Principal square root of a positive-semidefinite Hermitian matrix.

    Slightly negative eigenvalues (within ``psd_tol`` relative to the
    spectral radius) are clamped to zero.
    """
    es = eig_hermitian(m)
    lam = _psd_values(es, psd_tol)
    return (es.vectors * np.sqrt(lam)) @ dagger(es.vectors)


def matrix_inv_sqrt_pd(m, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Inverse square root of a positive-definite Hermitian matrix."""
    es = eig_hermitian(m)
    lam = _psd_values(es, PSD_TOL)
    if lam[0] < rank_tol * lam[-1] or lam[-1] == 0.0:
        raise RankDeficient(f"smallest eigenvalue {lam[0]:.3e} below rank tolerance")
    return (es.vectors / np.sqrt(lam)) @ dagger(es.vectors)


def is_normal(m: np.ndarray, tol: float = 1e-12) -> bool:
    scale = np.linalg.norm(m) ** 2
    if scale == 0.0:
        return True
    return float(np.linalg.norm(m @ dagger(m) - dagger(m) @ m)) <= tol * scale


def matrix_exp(m) -> np.ndarray:
    """Matrix exponential.

    Hermitian and anti-Hermitian inputs are exponentiated through an
    eigendecomposition, so ``exp`` of an anti-Hermitian matrix is unitary to
    rounding.  Other normal matrices are diagonalised through the complex
    Schur form; anything else goes through scaling and squaring with Pade
    approximants (:func:`scipy.linalg.expm`).
    """
    a = as_square(m)
    if is_hermitian(a, 1e-14):
        es = eig_hermitian(a, herm_tol=1e-14)
        return (es.vectors * np.exp(es.values)) @ dagger(es.vectors)
    if is_hermitian(1j * a, 1e-14):
        es = eig_hermitian(1j * a, herm_tol=1e-14)
        return (es.vectors * np.exp(-1j * es.values)) @ dagger(es.vectors)
    if is_normal(a):
        t, z = scipy.linalg.schur(a, output="complex")
        return (z * np.exp(np.diag(t))) @ dagger(z)
    out = scipy.linalg.expm(a)
    if not np.all(np.isfinite(out)):
        raise NoConvergence("matrix exponential overflowed")
    return out


def expm_antihermitian_many(a: np.ndarray) -> np.ndarray:
    """``exp(A_j)`` for a stack of anti-Hermitian matrices ``A_j``.

    Uses one batched Hermitian eigendecomposition of ``i A_j``; every output
    is unitary to rounding.
    """
    h = 1j * np.asarray(a, dtype=complex)
    h = 0.5 * (h + dagger(h))
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w)[..., None, :]) @ dagger(v)


def expm_many(a: np.ndarray) -> np.ndarray:
    """``exp(A_j)`` for a stack of general square matrices."""
    out = scipy.linalg.expm(np.asarray(a, dtype=complex))
    if not np.all(np.isfinite(out)):
        raise NoConvergence("matrix exponential overflowed")
    return out


def ordered_product(factors: np.ndarray) -> np.ndarray:
    """``F_{N-1} @ ... @ F_1 @ F_0`` for a stack of factors ``F_j``.

    Later factors multiply on the left.  The reduction is pairwise so it
    runs in ``log2(N)`` batched matrix products while keeping the order.
    """
    f = np.asarray(factors)
    if f.shape[0] == 0:
        raise ValueError("empty product")
    while f.shape[0] > 1:
        if f.shape[0] % 2:
            tail = f[-1:]
            f = np.concatenate([f[1:-1:2] @ f[0:-1:2], tail])
        else:
            f = f[1::2] @ f[0::2]
    return f[0]


def polar_decompose(a, rank_tol: float = RANK_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Left polar decomposition ``A = |A| U`` with ``|A| = sqrt(A A^dag)``.

    Returns:
        ``(modulus, gauge)``: the positive-definite modulus and the unitary
        factor.

    Raises:
        RankDeficient: if the smallest singular value is below
            ``rank_tol`` times the largest.
    """
    x = as_square(a)
    try:
        left, sing, right_h = np.linalg.svd(x)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NoConvergence(str(exc)) from exc
    if sing[0] == 0.0 or sing[-1] < rank_tol * sing[0]:
        raise RankDeficient(f"singular values span {sing[-1]:.3e}..{sing[0]:.3e}")
    modulus = (left * sing) @ dagger(left)
    modulus = 0.5 * (modulus + dagger(modulus))
    return modulus, left @ right_h


def principal_arg(z: complex, arg_tol: float = ARG_TOL) -> float:
    """Argument of ``z`` on the branch ``(-pi, pi]``.

    Negative reals map to ``+pi`` regardless of the sign of their zero
    imaginary part.
    """
    z = complex(z)
    if abs(z) < arg_tol:
        raise ZeroMagnitude(f"|z| = {abs(z):.3e} is below {arg_tol:g}; phase is undefined")
    return wrap_angle(math.atan2(z.imag, z.real))


def wrap_angle(x: float) -> float:
    """Map a real angle onto ``(-pi, pi]``."""
    y = math.remainder(x, 2.0 * math.pi)
    if y <= -math.pi:
        y += 2.0 * math.pi
    return y


def angle_distance(a: float, b: float) -> float:
    """Absolute difference of two angles after wrapping by ``2 pi``."""
    return abs(wrap_angle(a - b))
