"""Quadratic four-wave-mixing Hamiltonians as coupling graphs and generators.

Every edge ``(i, j, eps)`` of a :class:`CouplingGraph` is a two-mode
squeezing term ``eps * (a_i^dag a_j^dag - a_i a_j)`` (units of 1/s, with
hbar = 1). In the Heisenberg picture the quadratures obey

    dx_i/dt = eps * x_j,    dp_i/dt = -eps * p_j

and symmetrically for mode ``j``. The generator acts on the interleaved
quadrature vector ``(x_1, p_1, ..., x_N, p_N)``.

Mode indices are zero-based. For the four-mode configuration index 0..3
corresponds to the spatial modes labelled 1..4 clockwise from top left:
single-pump pairs are (0, 3) and (1, 2), dual-pump pairs (0, 2) and (1, 3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonRealSpectrum

# zero-based edges of the four-mode configuration
SINGLE_PUMP_EDGES = ((0, 3), (1, 2))
DUAL_PUMP_EDGES = ((0, 2), (1, 3))

IMAG_DISCARD = 1e-10
IMAG_REJECT = 1e-8


@dataclass(frozen=True)
class CouplingGraph:
    """Two-mode-squeezing couplings between ``n_modes`` bosonic modes."""

    n_modes: int
    edges: tuple = field(default=())

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError(f"n_modes must be >= 1, got {self.n_modes}")
        normalised = []
        seen = set()
        for edge in self.edges:
            i, j, eps = edge
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"self-edge on mode {i}")
            if i > j:
                i, j = j, i
            if j >= self.n_modes or i < 0:
                raise ValueError(f"edge ({i}, {j}) outside 0..{self.n_modes - 1}")
            if (i, j) in seen:
                raise ValueError(f"duplicate edge ({i}, {j})")
            eps = float(eps)
            if not eps >= 0.0:
                raise ValueError(f"edge ({i}, {j}) has negative or NaN strength {eps}")
            seen.add((i, j))
            normalised.append((i, j, eps))
        object.__setattr__(self, "edges", tuple(normalised))

    def degrees(self) -> np.ndarray:
        """Number of incident edges per mode (zero-strength edges included)."""
        deg = np.zeros(self.n_modes, dtype=int)
        for i, j, _ in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def strength(self, i: int, j: int) -> float:
        i, j = min(i, j), max(i, j)
        for a, b, eps in self.edges:
            if (a, b) == (i, j):
                return eps
        return 0.0

    def adjacency(self) -> np.ndarray:
        """Symmetric weighted adjacency matrix in mode space."""
        adj = np.zeros((self.n_modes, self.n_modes))
        for i, j, eps in self.edges:
            adj[i, j] = adj[j, i] = eps
        return adj

    def max_strength(self) -> float:
        return max((eps for _, _, eps in self.edges), default=0.0)

    def permuted(self, perm) -> "CouplingGraph":
        """Relabel mode ``k`` as ``perm[k]``."""
        perm = list(perm)
        if sorted(perm) != list(range(self.n_modes)):
            raise ValueError(f"not a permutation of {self.n_modes} modes: {perm}")
        return CouplingGraph(self.n_modes, tuple((perm[i], perm[j], e) for i, j, e in self.edges))

    def scaled(self, factor: float) -> "CouplingGraph":
        return CouplingGraph(self.n_modes, tuple((i, j, e * factor) for i, j, e in self.edges))


def four_mode_graph(eps_a, eps_b, eps_c, eps_d) -> CouplingGraph:
    """Four-mode graph with independent single-pump (a, b) and dual-pump (c, d) strengths."""
    (i_a, j_a), (i_b, j_b) = SINGLE_PUMP_EDGES
    (i_c, j_c), (i_d, j_d) = DUAL_PUMP_EDGES
    return CouplingGraph(
        4,
        ((i_a, j_a, eps_a), (i_b, j_b, eps_b), (i_c, j_c, eps_c), (i_d, j_d, eps_d)),
    )


def symmetric_graph(eps_single, eps_dual) -> CouplingGraph:
    """Balanced-pump graph: both single-pump and both dual-pump edges equal."""
    return four_mode_graph(eps_single, eps_single, eps_dual, eps_dual)


def coupling_graph_from_powers(power_a, power_b, g_single, g_dual) -> CouplingGraph:
    """Coupling strengths for undepleted pumps of the given powers.

    A single-pump process consumes two photons from one beam, so its strength
    scales with that beam's power. A dual-pump process takes one photon from
    each beam and scales with the geometric mean of the powers.
    """
    for name, value in (("power_a", power_a), ("power_b", power_b),
                        ("g_single", g_single), ("g_dual", g_dual)):
        if not value >= 0:
            raise ValueError(f"{name} must be >= 0, got {value}")
    eps_dual = g_dual * math.sqrt(power_a * power_b)
    return four_mode_graph(g_single * power_a, g_single * power_b, eps_dual, eps_dual)


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form with blocks [[0, 1], [-1, 0]]."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def hamiltonian_generator(graph: CouplingGraph) -> np.ndarray:
    """Heisenberg-picture generator ``K`` with ``dr/dt = K r``."""
    n = graph.n_modes
    K = np.zeros((2 * n, 2 * n))
    for i, j, eps in graph.edges:
        K[2 * i, 2 * j] += eps
        K[2 * j, 2 * i] += eps
        K[2 * i + 1, 2 * j + 1] -= eps
        K[2 * j + 1, 2 * i + 1] -= eps
    return K


def algebra_residual(K: np.ndarray) -> float:
    """``max |K Omega + Omega K^T|``; zero for members of the symplectic algebra."""
    omega = symplectic_form(K.shape[0] // 2)
    return float(np.max(np.abs(K @ omega + omega @ K.T), initial=0.0))


def gain_spectrum(graph_or_generator) -> np.ndarray:
    """Real growth rates of the generator, sorted descending.

    Accepts either a :class:`CouplingGraph` or a generator matrix. Each
    mode-space rate shows up twice, once in the x and once in the p block.

    Raises:
        NonRealSpectrum: if an eigenvalue carries an imaginary part larger
            than ``1e-8 * ||K||``.
    """
    if isinstance(graph_or_generator, CouplingGraph):
        K = hamiltonian_generator(graph_or_generator)
    else:
        K = np.asarray(graph_or_generator, dtype=float)
    if K.size == 0:
        return np.zeros(0)
    eig = np.linalg.eigvals(K)
    scale = np.linalg.norm(K, 2)
    worst = float(np.max(np.abs(eig.imag)))
    if worst > IMAG_REJECT * max(scale, 1.0):
        raise NonRealSpectrum(
            f"generator has complex eigenvalue (|Im| = {worst:.3e}, ||K|| = {scale:.3e})"
        )
    rates = eig.real.copy()
    return np.sort(rates)[::-1]


def dominant_rate(graph_or_generator) -> float:
    spectrum = gain_spectrum(graph_or_generator)
    return float(spectrum[0]) if spectrum.size else 0.0


@dataclass(frozen=True)
class Ranking:
    rank: int
    kind: object
    gain_score: float
    spectrum: np.ndarray
    degrees: np.ndarray


def ranked_indices(scores) -> list:
    """Indices sorting ``scores`` descending, with near-ties kept in input order.

    Scores are chained into tie groups: walking down the sorted list, a score
    within 1e-12 of its predecessor joins that group. Each group keeps input
    order, which makes the ranking well defined even for long near-tie chains.
    """
    scores = [float(s) for s in scores]
    by_value = sorted(range(len(scores)), key=lambda i: -scores[i])
    groups = []
    for i in by_value:
        if groups and math.isclose(scores[groups[-1][-1]], scores[i], rel_tol=1e-12, abs_tol=1e-12):
            groups[-1].append(i)
        else:
            groups.append([i])
    return [i for group in groups for i in sorted(group)]


def compare_configurations(candidates) -> list:
    """Rank candidate mode configurations by their dominant growth rate.

    Each candidate needs ``kind`` and ``graph`` attributes. Scores equal to
    within 1e-12 keep their input order.
    """
    candidates = list(candidates)
    if len(candidates) < 2:
        raise ValueError("need at least two candidates to compare")
    spectra = [gain_spectrum(c.graph) for c in candidates]
    order = ranked_indices([s[0] if s.size else 0.0 for s in spectra])
    return [
        Ranking(rank=r + 1, kind=candidates[i].kind, gain_score=float(spectra[i][0]),
                spectrum=spectra[i], degrees=candidates[i].graph.degrees())
        for r, i in enumerate(order)
    ]
