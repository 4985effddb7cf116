"""Brute-force truncated Fock-space reference for the Gaussian engine.

The propagator ``exp(-iHt)`` for ``H = i * sum eps (a_i^dag a_j^dag - a_i a_j)``
equals ``exp(t G)`` with the real antisymmetric ``G = sum eps (a_i^dag a_j^dag -
a_i a_j)``. Starting from vacuum the amplitudes therefore stay real.

The state is evolved with one guard level above ``cutoff``. The returned
:class:`FockState` holds the projection onto occupations ``<= cutoff``, and the
weight that reached the guard level is reported as leakage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionGuard
from .gaussian import evolve, vacuum_state
from .interaction import CouplingGraph, hamiltonian_generator

MAX_MODES = 4
MAX_CUTOFF = 14
MAX_AMPLITUDES = 70_000
DEFAULT_CUTOFF = 12

_STEP_NORM = 0.5
_SERIES_TOL = 1e-17


@dataclass(frozen=True, eq=False)
class FockState:
    n_modes: int
    cutoff: int
    amplitudes: np.ndarray  # shape (cutoff + 1,) * n_modes
    leakage: float

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def vector(self) -> np.ndarray:
        return self.amplitudes.reshape(-1)

    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def amplitude(self, occupations) -> complex:
        return self.amplitudes[tuple(occupations)]


def _check_guards(n_modes: int, cutoff: int, max_amplitudes: int) -> None:
    if n_modes > MAX_MODES:
        raise DimensionGuard(f"{n_modes} modes exceeds the Fock oracle limit of {MAX_MODES}")
    if cutoff > MAX_CUTOFF or cutoff < 1:
        raise DimensionGuard(f"cutoff {cutoff} outside 1..{MAX_CUTOFF}")
    size = (cutoff + 2) ** n_modes
    if size > max_amplitudes:
        raise DimensionGuard(f"{size} amplitudes exceeds ceiling {max_amplitudes}")


def _slc(ndim, axis, s):
    idx = [slice(None)] * ndim
    idx[axis] = s
    return tuple(idx)


def lower(psi: np.ndarray, axis: int) -> np.ndarray:
    """Apply the annihilation operator of mode ``axis``."""
    d = psi.shape[axis]
    shape = [1] * psi.ndim
    shape[axis] = d - 1
    out = np.zeros_like(psi)
    out[_slc(psi.ndim, axis, slice(0, d - 1))] = (
        psi[_slc(psi.ndim, axis, slice(1, d))] * np.sqrt(np.arange(1, d)).reshape(shape)
    )
    return out


def raise_(psi: np.ndarray, axis: int) -> np.ndarray:
    """Apply the creation operator of mode ``axis``; the top level is dropped."""
    d = psi.shape[axis]
    shape = [1] * psi.ndim
    shape[axis] = d - 1
    out = np.zeros_like(psi)
    out[_slc(psi.ndim, axis, slice(1, d))] = (
        psi[_slc(psi.ndim, axis, slice(0, d - 1))] * np.sqrt(np.arange(1, d)).reshape(shape)
    )
    return out


def apply_generator(graph: CouplingGraph, psi: np.ndarray) -> np.ndarray:
    out = np.zeros_like(psi)
    for i, j, eps in graph.edges:
        if eps == 0.0:
            continue
        out += eps * (raise_(raise_(psi, j), i) - lower(lower(psi, j), i))
    return out


def fock_evolve(graph: CouplingGraph, t: float, cutoff: int = DEFAULT_CUTOFF,
                max_amplitudes: int = MAX_AMPLITUDES) -> FockState:
    """Evolve the vacuum under ``graph`` for time ``t`` by a stepped Taylor series.

    Raises:
        DimensionGuard: if the mode count, cutoff or state size is too large.
    """
    n = graph.n_modes
    _check_guards(n, cutoff, max_amplitudes)
    d = cutoff + 2
    psi = np.zeros((d,) * n)
    psi[(0,) * n] = 1.0

    # ||a_i a_j|| <= d - 1 on the truncated space
    bound = sum(2.0 * eps * (d - 1) for _, _, eps in graph.edges) * abs(t)
    steps = max(1, math.ceil(bound / _STEP_NORM))
    dt = t / steps
    for _ in range(steps):
        term = psi
        total = psi.copy()
        for k in range(1, 200):
            term = apply_generator(graph, term) * (dt / k)
            total += term
            if np.linalg.norm(term) < _SERIES_TOL:
                break
        psi = total

    kept = psi[(slice(0, cutoff + 1),) * n].copy()
    leakage = max(0.0, 1.0 - float(np.sum(kept ** 2)))
    return FockState(n, cutoff, kept, leakage)


def _expect(psi, phi) -> float:
    return float(np.vdot(psi, phi).real)


def fock_covariance(fs: FockState):
    """Quadrature covariance matrix and mean vector of a Fock state.

    Moments are taken in the same ``(x_1, p_1, ..., x_N, p_N)`` ordering and
    vacuum-variance-1/2 convention as :class:`~fwmsim.gaussian.GaussianState`.
    Returns ``(cov, mean)``.
    """
    n = fs.n_modes
    psi = fs.amplitudes.astype(complex)
    norm2 = float(np.vdot(psi, psi).real)
    lowered = [lower(psi, m) for m in range(n)]

    # <a_m>, <a_m a_l>, <a_m^dag a_l>
    a1 = np.array([np.vdot(psi, lowered[m]) for m in range(n)]) / norm2
    aa = np.array([[np.vdot(psi, lower(lowered[l], m)) for l in range(n)] for m in range(n)]) / norm2
    ada = np.array([[np.vdot(lowered[m], lowered[l]) for l in range(n)] for m in range(n)]) / norm2

    # symmetrised products of x = (a + a^dag)/sqrt2, p = (a - a^dag)/(i sqrt2)
    mean = np.zeros(2 * n)
    mean[0::2] = np.sqrt(2.0) * a1.real
    mean[1::2] = np.sqrt(2.0) * a1.imag
    eye = np.eye(n)
    sym_ada = ada + ada.T.conj()
    xx = 0.5 * (aa + aa.conj()).real + 0.5 * (sym_ada + eye).real
    pp = -0.5 * (aa + aa.conj()).real + 0.5 * (sym_ada + eye).real
    xp = 0.5 * ((aa - aa.conj()) / 1j).real + 0.5 * ((ada - ada.T) / 1j).real
    cov = np.zeros((2 * n, 2 * n))
    cov[0::2, 0::2] = xx
    cov[1::2, 1::2] = pp
    cov[0::2, 1::2] = xp
    cov[1::2, 0::2] = xp.T
    cov -= np.outer(mean, mean)
    return 0.5 * (cov + cov.T), mean


def total_photon_number(fs: FockState) -> float:
    occ = np.indices(fs.amplitudes.shape).sum(axis=0)
    return float(np.sum(occ * fs.populations()) / fs.norm ** 2)


def odd_parity_population(fs: FockState) -> float:
    occ = np.indices(fs.amplitudes.shape).sum(axis=0)
    return float(np.sum(fs.populations()[occ % 2 == 1]))


@dataclass(frozen=True)
class OracleComparison:
    deviation: float
    leakage: float


def oracle_compare(graph: CouplingGraph, t: float, cutoff: int = DEFAULT_CUTOFF,
                   max_amplitudes: int = MAX_AMPLITUDES) -> OracleComparison:
    """Largest entrywise gap between Fock and Gaussian covariances from vacuum."""
    fs = fock_evolve(graph, t, cutoff, max_amplitudes)
    fock_cov, _ = fock_covariance(fs)
    gauss = evolve(vacuum_state(graph.n_modes), hamiltonian_generator(graph), t)
    return OracleComparison(float(np.max(np.abs(fock_cov - gauss.cov))), fs.leakage)
