import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fwmsim.errors import IndexOutOfRange, InvalidPartition, ZeroVector
from fwmsim.gaussian import GaussianState, apply_loss, evolve, vacuum_state
from fwmsim.interaction import CouplingGraph, four_mode_graph, hamiltonian_generator, symmetric_graph
from fwmsim.metrics import (
    correlation_graph,
    cross_covariance_strengths,
    joint_quadrature_variance,
    log_negativity,
    mean_photon_numbers,
    power_law_exponent,
    quadrature_vector,
    squeezing_floor,
    two_mode_squeezing,
)

LOG2E = math.log2(math.e)
CYCLE = {(0, 3), (1, 2), (0, 2), (1, 3)}


def tms_state(r):
    return evolve(vacuum_state(2), hamiltonian_generator(CouplingGraph(2, ((0, 1, r),))), 1.0)


def evolved(graph, t):
    return evolve(vacuum_state(graph.n_modes), hamiltonian_generator(graph), t)


class TestPhotonsAndVariances:
    def test_tms_photons(self):
        np.testing.assert_allclose(mean_photon_numbers(tms_state(0.5)), [0.2715403] * 2, atol=1e-7)

    def test_displaced_vacuum(self):
        state = GaussianState(np.array([math.sqrt(2.0), 0.0]), 0.5 * np.eye(2))
        assert mean_photon_numbers(state)[0] == pytest.approx(1.0)

    def test_variance_normalises(self):
        state = tms_state(0.5)
        raw = quadrature_vector(2, {("x", 0): 3.0, ("x", 1): -3.0})
        result = joint_quadrature_variance(state, raw)
        assert result.norm == pytest.approx(math.sqrt(18.0))
        assert result.variance == pytest.approx(math.exp(-1.0) / 2, abs=1e-12)
        assert np.linalg.norm(result.coefficients) == pytest.approx(1.0)

    def test_zero_vector(self):
        with pytest.raises(ZeroVector):
            joint_quadrature_variance(vacuum_state(2), np.zeros(4))

    def test_wrong_length(self):
        with pytest.raises(ValueError):
            joint_quadrature_variance(vacuum_state(2), np.ones(3))

    def test_quadrature_vector_validation(self):
        with pytest.raises(IndexOutOfRange):
            quadrature_vector(2, {("x", 2): 1.0})
        with pytest.raises(ValueError):
            quadrature_vector(2, {("q", 0): 1.0})


class TestPairSqueezing:
    def test_tms_best_combination(self):
        sq = two_mode_squeezing(tms_state(0.5), 0, 1)
        assert sq.variance == pytest.approx(math.exp(-1.0) / 2, abs=1e-12)
        assert sq.label in ("x1-x2", "p1+p2")

    def test_vacuum_no_squeezing(self):
        assert two_mode_squeezing(vacuum_state(3), 0, 2).variance == pytest.approx(0.5)

    def test_bad_indices(self):
        with pytest.raises(IndexOutOfRange):
            two_mode_squeezing(vacuum_state(2), 0, 2)
        with pytest.raises(ValueError):
            two_mode_squeezing(vacuum_state(2), 1, 1)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0),
           st.floats(0.0, 2.0))
    def test_variance_above_floor(self, a, b, c, d, t):
        g = four_mode_graph(a, b, c, d)
        state = evolved(g, t)
        floor = squeezing_floor(g, t)
        for i, j in itertools.combinations(range(4), 2):
            assert two_mode_squeezing(state, i, j).variance >= floor - 1e-12


class TestLogNegativity:
    @pytest.mark.parametrize("r,expected", [(0.5, 1.4427), (1.0, 2.8854)])
    def test_tms_examples(self, r, expected):
        assert log_negativity(tms_state(r), [0]) == pytest.approx(expected, abs=1e-4)

    @settings(max_examples=30)
    @given(st.floats(0.0, 2.0))
    def test_tms_closed_form(self, r):
        assert log_negativity(tms_state(r), [0]) == pytest.approx(2 * r * LOG2E, abs=1e-9)

    def test_vacuum_zero(self):
        assert log_negativity(vacuum_state(4), [0, 1]) == 0.0

    def test_product_state_zero(self):
        # two independent pairs: no entanglement across the pair boundary
        state = evolved(CouplingGraph(4, ((0, 1, 0.5), (2, 3, 0.5))), 1.0)
        assert log_negativity(state, [0, 1]) == pytest.approx(0.0, abs=1e-12)
        assert log_negativity(state, [0, 2]) == pytest.approx(2 * 2 * 0.5 * LOG2E, abs=1e-9)

    @pytest.mark.parametrize("part", [[], [0, 1, 2, 3], [4], [-1]])
    def test_invalid_partition(self, part):
        with pytest.raises(InvalidPartition):
            log_negativity(vacuum_state(4), part)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0),
           st.sets(st.integers(0, 3), min_size=1, max_size=3))
    def test_complement_symmetry(self, a, b, c, d, part):
        state = evolved(four_mode_graph(a, b, c, d), 1.0)
        rest = set(range(4)) - part
        assert log_negativity(state, part) == pytest.approx(log_negativity(state, rest), abs=1e-9)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.05, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0),
           st.sets(st.integers(0, 3), min_size=1, max_size=3))
    def test_loss_never_increases(self, a, b, c, d, part):
        state = evolved(four_mode_graph(a, b, c, d), 1.0)
        assert log_negativity(apply_loss(state, 0.7), part) <= log_negativity(state, part) + 1e-12


class TestCorrelationGraph:
    def test_four_cycle(self):
        corr = correlation_graph(hamiltonian_generator(symmetric_graph(1.0, 0.8)), 1e-3)
        assert set(corr.edges()) == CYCLE
        assert list(corr.degrees()) == [2, 2, 2, 2]

    def test_single_pump_only(self):
        corr = correlation_graph(hamiltonian_generator(symmetric_graph(1.0, 0.0)), 1e-3)
        assert set(corr.edges()) == {(0, 3), (1, 2)}

    def test_rejects_non_positive_time(self):
        with pytest.raises(ValueError):
            correlation_graph(hamiltonian_generator(symmetric_graph(1.0, 1.0)), 0.0)

    def test_scaling_exponents(self):
        K = hamiltonian_generator(symmetric_graph(1.0, 1.0))
        ts = np.logspace(-4, -2, 9)
        strengths = [cross_covariance_strengths(evolve(vacuum_state(4), K, t)) for t in ts]
        edge = power_law_exponent(ts, [s[0, 3] for s in strengths])
        non_edge = power_law_exponent(ts, [s[0, 1] for s in strengths])
        assert edge <= 1.1
        assert non_edge >= 1.9

    def test_power_law_exact(self):
        ts = np.array([1.0, 2.0, 4.0])
        assert power_law_exponent(ts, 3.0 * ts ** 2) == pytest.approx(2.0)
