"""Gaussian states, symplectic evolution and loss.

Convention: hbar = 1, ``x = (a + a^dag)/sqrt(2)``, so the vacuum has
covariance ``I/2``. Quadratures are interleaved ``(x_1, p_1, ..., x_N, p_N)``.
States are immutable; every operation returns a new one.
"""

from __future__ import annotations

from dataclasses import dataclass

import math

import numpy as np

from .errors import DimensionMismatch, NonSymplectic, OutOfRange
from .interaction import symplectic_form

SYMMETRY_TOL = 1e-12
NON_SYMPLECTIC_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class GaussianState:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float)
        cov = np.array(self.cov, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
            raise DimensionMismatch(f"covariance must be square with even size, got {cov.shape}")
        if mean.shape != (cov.shape[0],):
            raise DimensionMismatch(f"mean shape {mean.shape} does not match covariance {cov.shape}")
        scale = max(1.0, float(np.max(np.abs(cov))))
        if np.max(np.abs(cov - cov.T)) > SYMMETRY_TOL * scale:
            raise ValueError("covariance matrix is not symmetric")
        cov = 0.5 * (cov + cov.T)
        mean.flags.writeable = False
        cov.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def n_modes(self) -> int:
        return self.cov.shape[0] // 2

    def symplectic_eigenvalues(self) -> np.ndarray:
        return symplectic_eigenvalues(self.cov)

    def is_physical(self, tol: float = 1e-9) -> bool:
        return bool(np.all(self.symplectic_eigenvalues() >= 0.5 - tol))

    def mode_block(self, i: int, j: int) -> np.ndarray:
        return self.cov[2 * i:2 * i + 2, 2 * j:2 * j + 2]


def vacuum_state(n_modes: int) -> GaussianState:
    if n_modes < 1:
        raise ValueError(f"n_modes must be >= 1, got {n_modes}")
    return GaussianState(np.zeros(2 * n_modes), 0.5 * np.eye(2 * n_modes))


def symplectic_eigenvalues(cov) -> np.ndarray:
    """Symplectic spectrum of a covariance matrix, ascending, one value per mode."""
    cov = np.asarray(cov, dtype=float)
    n = cov.shape[0] // 2
    eig = np.abs(np.linalg.eigvals(1j * symplectic_form(n) @ cov))
    # eigenvalues come in +/- pairs
    return np.sort(eig)[::2]


def symplectic_residual(S) -> float:
    """``max |S Omega S^T - Omega|`` (entrywise infinity norm)."""
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] % 2:
        raise DimensionMismatch(f"symplectic matrix must be square with even size, got {S.shape}")
    omega = symplectic_form(S.shape[0] // 2)
    return float(np.max(np.abs(S @ omega @ S.T - omega), initial=0.0))


def _expm_extended(M: np.ndarray) -> np.ndarray:
    """``exp(M)`` by Taylor scaling and squaring in extended precision, rounded to float64.

    Rounding error in a float64 propagator feeds the symplectic residual at
    roughly ``eps * ||S||^2``; carrying the arithmetic in ``np.longdouble``
    keeps the result within a rounding of the exact exponential.
    """
    X = M.astype(np.longdouble)
    norm = float(np.max(np.sum(np.abs(X), axis=1), initial=0.0))
    squarings = max(0, math.ceil(math.log2(norm / 0.25))) if norm > 0 else 0
    X /= np.longdouble(2.0) ** squarings
    eps = np.finfo(np.longdouble).eps
    total = np.eye(X.shape[0], dtype=np.longdouble)
    term = total.copy()
    for k in range(1, 60):
        term = term @ X / k
        total += term
        if np.max(np.abs(term)) <= eps * np.max(np.abs(total)):
            break
    for _ in range(squarings):
        total = total @ total
    return total.astype(float)


def symplectic_exponential(K, t: float) -> np.ndarray:
    """``exp(K t)`` by scaling and squaring.

    Generators without x-p cross terms (every two-mode-squeezing graph) are
    exponentiated block by block, which keeps the decoupled structure exact.
    """
    K = np.asarray(K, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1] or K.shape[0] % 2:
        raise DimensionMismatch(f"generator must be square with even size, got {K.shape}")
    if not np.isfinite(t):
        raise ValueError(f"evolution time must be finite, got {t}")
    Kt = K * t
    if not Kt[0::2, 1::2].any() and not Kt[1::2, 0::2].any():
        S = np.zeros_like(Kt)
        S[0::2, 0::2] = _expm_extended(Kt[0::2, 0::2])
        S[1::2, 1::2] = _expm_extended(Kt[1::2, 1::2])
        return S
    return _expm_extended(Kt)


def evolve(state: GaussianState, K, t: float) -> GaussianState:
    """Propagate ``state`` for time ``t`` under the quadratic generator ``K``.

    Raises:
        DimensionMismatch: if ``K`` does not act on ``state``'s modes.
        NonSymplectic: if the computed propagator drifts more than 1e-8 off
            the symplectic group.
    """
    K = np.asarray(K, dtype=float)
    if K.shape != state.cov.shape:
        raise DimensionMismatch(f"generator {K.shape} vs state {state.cov.shape}")
    S = symplectic_exponential(K, t)
    residual = symplectic_residual(S)
    if residual > NON_SYMPLECTIC_TOL:
        raise NonSymplectic(f"propagator symplectic residual {residual:.3e} exceeds {NON_SYMPLECTIC_TOL}")
    return GaussianState(S @ state.mean, S @ state.cov @ S.T)


def apply_loss(state: GaussianState, transmissions) -> GaussianState:
    """Mix each mode with vacuum on a beam splitter of power transmission ``tau_j``.

    A scalar applies the same transmission to every mode.
    """
    tau = np.broadcast_to(np.asarray(transmissions, dtype=float), (state.n_modes,))
    if np.any(~np.isfinite(tau)) or np.any(tau < 0) or np.any(tau > 1):
        raise OutOfRange(f"transmissions must lie in [0, 1], got {tau.tolist()}")
    t_diag = np.repeat(np.sqrt(tau), 2)
    T = np.diag(t_diag)
    noise = 0.5 * np.diag(1.0 - t_diag ** 2)
    return GaussianState(T @ state.mean, T @ state.cov @ T + noise)
