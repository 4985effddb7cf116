"""Observables of Gaussian states: photon numbers, squeezing, entanglement, correlations."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import IndexOutOfRange, InvalidPartition, ZeroVector
from .gaussian import GaussianState, evolve, symplectic_eigenvalues, vacuum_state


def mean_photon_numbers(state: GaussianState) -> np.ndarray:
    var = np.diag(state.cov)
    total = var[0::2] + var[1::2] + state.mean[0::2] ** 2 + state.mean[1::2] ** 2
    return 0.5 * (total - 1.0)


def quadrature_vector(n_modes: int, terms: dict) -> np.ndarray:
    """Coefficient vector from ``{("x", mode): weight, ("p", mode): weight}``."""
    c = np.zeros(2 * n_modes)
    for (quad, mode), weight in terms.items():
        if quad not in ("x", "p"):
            raise ValueError(f"unknown quadrature {quad!r}")
        if not 0 <= mode < n_modes:
            raise IndexOutOfRange(f"mode {mode} outside 0..{n_modes - 1}")
        c[2 * mode + (quad == "p")] += weight
    return c


class QuadratureVariance(NamedTuple):
    variance: float
    coefficients: np.ndarray
    norm: float


def joint_quadrature_variance(state: GaussianState, coefficients) -> QuadratureVariance:
    """Variance of the normalised linear quadrature combination ``c . r``.

    The input is rescaled to unit length; the applied norm is returned with
    the result.
    """
    c = np.asarray(coefficients, dtype=float)
    if c.shape != (2 * state.n_modes,):
        raise ValueError(f"expected {2 * state.n_modes} coefficients, got shape {c.shape}")
    norm = float(np.linalg.norm(c))
    if norm == 0.0:
        raise ZeroVector("quadrature coefficient vector is zero")
    c = c / norm
    return QuadratureVariance(float(c @ state.cov @ c), c, norm)


class PairSqueezing(NamedTuple):
    variance: float
    label: str
    coefficients: np.ndarray


def two_mode_squeezing(state: GaussianState, i: int, j: int) -> PairSqueezing:
    """Smallest variance among ``(x_i +/- x_j)/sqrt(2)`` and ``(p_i +/- p_j)/sqrt(2)``.

    Labels use one-based mode numbers, e.g. ``"x1-x4"``.
    """
    n = state.n_modes
    for m in (i, j):
        if not 0 <= m < n:
            raise IndexOutOfRange(f"mode {m} outside 0..{n - 1}")
    if i == j:
        raise ValueError("two_mode_squeezing needs two distinct modes")
    best = None
    for quad in ("x", "p"):
        for sign, symbol in ((1.0, "+"), (-1.0, "-")):
            c = quadrature_vector(n, {(quad, i): 1.0, (quad, j): sign})
            var = joint_quadrature_variance(state, c)
            if best is None or var.variance < best.variance:
                best = PairSqueezing(var.variance, f"{quad}{i + 1}{symbol}{quad}{j + 1}",
                                     var.coefficients)
    return best


def _partial_transpose(cov, partition) -> np.ndarray:
    flip = np.ones(cov.shape[0])
    for m in partition:
        flip[2 * m + 1] = -1.0
    return cov * np.outer(flip, flip)


def log_negativity(state: GaussianState, partition) -> float:
    """Base-2 logarithmic negativity across ``partition`` versus the remaining modes."""
    n = state.n_modes
    part = sorted(set(int(m) for m in partition))
    if not part or len(part) >= n or part[0] < 0 or part[-1] >= n:
        raise InvalidPartition(f"partition {list(partition)} is not a proper non-empty subset of {n} modes")
    nu = symplectic_eigenvalues(_partial_transpose(state.cov, part))
    small = nu[nu < 0.5]
    return float(np.sum(-np.log2(2.0 * small)))


@dataclass(frozen=True)
class CorrelationGraph:
    n_modes: int
    adjacency: np.ndarray
    threshold: float
    strengths: np.ndarray

    def edges(self) -> list:
        """Adjacent pairs as zero-based ``(i, j)`` with ``i < j``."""
        return [(i, j) for i, j in itertools.combinations(range(self.n_modes), 2)
                if self.adjacency[i, j]]

    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)


def cross_covariance_strengths(state: GaussianState) -> np.ndarray:
    """Largest absolute entry of every inter-mode covariance block."""
    n = state.n_modes
    blocks = np.abs(state.cov).reshape(n, 2, n, 2).max(axis=(1, 3))
    np.fill_diagonal(blocks, 0.0)
    return blocks


def correlation_graph(K, t_small: float, threshold: float = 0.1,
                      state: GaussianState | None = None) -> CorrelationGraph:
    """Which mode pairs pick up cross-covariance at first order in ``t_small``.

    A pair is adjacent when its strongest cross-covariance entry exceeds
    ``threshold * t_small``; indirect couplings only appear at second order.
    """
    if not t_small > 0:
        raise ValueError(f"t_small must be > 0, got {t_small}")
    K = np.asarray(K, dtype=float)
    n = K.shape[0] // 2
    start = vacuum_state(n) if state is None else state
    evolved = evolve(start, K, t_small)
    strengths = cross_covariance_strengths(evolved)
    adjacency = strengths > threshold * t_small
    return CorrelationGraph(n, adjacency, threshold, strengths)


def power_law_exponent(ts, values) -> float:
    """Least-squares slope of ``log(values)`` against ``log(ts)``."""
    slope, _ = np.polyfit(np.log(np.asarray(ts)), np.log(np.asarray(values)), 1)
    return float(slope)


def squeezing_floor(graph, t: float) -> float:
    """Lower bound ``exp(-2 * sum(eps) * t) / 2`` on any evolved joint variance."""
    total = sum(eps for _, _, eps in graph.edges)
    return 0.5 * math.exp(-2.0 * total * abs(t))
