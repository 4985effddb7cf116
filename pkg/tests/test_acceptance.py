"""End-to-end acceptance checks, one test per criterion.

Each test records a one-line verdict that is printed in the terminal summary.
"""

import math
import time

import numpy as np
import pytest

from conftest import random_graph, supermode
from fwmsim import cli
from fwmsim.commands import random_four_mode_graph, sweep_ratio
from fwmsim.config import load_config
from fwmsim.gaussian import apply_loss, evolve, symplectic_exponential, symplectic_residual, vacuum_state
from fwmsim.geometry import (
    CALIBRATED_DISPERSION,
    ConfigKind,
    PumpConfig,
    cone_half_angle,
    enumerate_candidate_configs,
    solve_four_mode_geometry,
)
from fwmsim.interaction import (
    dominant_rate,
    four_mode_graph,
    hamiltonian_generator,
    symmetric_graph,
)
from fwmsim.metrics import (
    correlation_graph,
    cross_covariance_strengths,
    joint_quadrature_variance,
    log_negativity,
    power_law_exponent,
)
from fwmsim.oracle import oracle_compare

pytestmark = pytest.mark.acceptance

SEED = 2026


@pytest.mark.criterion(1, "symplectic integrity")
def test_symplectic_integrity(criterion):
    rng = np.random.default_rng(SEED)
    start = time.perf_counter()
    residuals = []
    for _ in range(200):
        n = int(rng.integers(2, 9))
        graph = random_graph(rng, n, eps_max=2.0)
        t = rng.uniform(0.0, 2.0)
        residuals.append(symplectic_residual(symplectic_exponential(hamiltonian_generator(graph), t)))
    elapsed = time.perf_counter() - start
    worst = max(residuals)
    failing = sum(r >= 1e-10 for r in residuals)
    ok = worst < 1e-10 and elapsed < 10.0
    criterion.check(ok, f"worst residual {worst:.3e} (bound 1e-10), {failing}/200 over, {elapsed:.2f} s")
    assert ok


@pytest.mark.criterion(2, "oracle equivalence")
def test_oracle_equivalence(criterion):
    rng = np.random.default_rng(SEED)
    start = time.perf_counter()
    results = [oracle_compare(random_four_mode_graph(rng, 0.3), 1.0, cutoff=12) for _ in range(20)]
    elapsed = time.perf_counter() - start
    dev = max(r.deviation for r in results)
    leak = max(r.leakage for r in results)
    ok = dev < 1e-3 and leak < 1e-4 and elapsed < 300.0
    criterion.check(ok, f"max deviation {dev:.2e}, max leakage {leak:.2e}, {elapsed:.1f} s")
    assert ok


@pytest.mark.criterion(3, "analytic two-mode squeezing")
def test_analytic_tms(criterion):
    r = 0.5
    graph = symmetric_graph(r, 0.0)
    state = evolve(vacuum_state(4), hamiltonian_generator(graph), 1.0)
    var = joint_quadrature_variance(state, supermode(4, {0: 1.0, 3: -1.0})).variance
    en = log_negativity(state, [0])
    dv = abs(var - math.exp(-2 * r) / 2)
    de = abs(en - 2 * r * math.log2(math.e))
    ok = dv < 1e-9 and de < 1e-9
    criterion.check(ok, f"variance error {dv:.1e}, E_N error {de:.1e}")
    assert ok


@pytest.mark.criterion(4, "reinforcement of single- and dual-pump gain")
def test_reinforcement(criterion):
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for eps_s, eps_d in rng.uniform(0.0, 2.0, size=(200, 2)):
        worst = max(worst, abs(dominant_rate(symmetric_graph(eps_s, eps_d)) - (eps_s + eps_d)))
    margins = []
    for g_s, g_d, power in zip(rng.uniform(0.01, 5.0, 50), rng.uniform(0.01, 5.0, 50),
                               rng.uniform(0.01, 1.0, 50)):
        four, six = enumerate_candidate_configs(PumpConfig(power_a=power, power_b=power),
                                                CALIBRATED_DISPERSION, g_s, g_d)
        assert four.kind == ConfigKind.FOUR_MODE
        margins.append(four.gain_score - six.gain_score)
    ok = worst < 1e-10 and min(margins) > 0
    criterion.check(ok, f"max |rate - (eps_S + eps_D)| {worst:.1e}; FourMode ahead in "
                        f"{sum(m > 0 for m in margins)}/50, smallest margin {min(margins):.3e}")
    assert ok


@pytest.mark.criterion(5, "correlation degree")
def test_correlation_degree(criterion):
    K = hamiltonian_generator(symmetric_graph(1.0, 0.8))
    edges = set(correlation_graph(K, 1e-3).edges())
    expected = {(0, 3), (1, 2), (0, 2), (1, 3)}
    ts = np.logspace(-4, -2, 9)
    strengths = [cross_covariance_strengths(evolve(vacuum_state(4), K, t)) for t in ts]
    exponents = [power_law_exponent(ts, [s[i, j] for s in strengths]) for i, j in ((0, 1), (2, 3))]
    ok = edges == expected and min(exponents) >= 1.9
    labels = sorted(f"{i + 1}{j + 1}" for i, j in edges)
    criterion.check(ok, f"edges {labels}, non-edge exponents {', '.join(f'{e:.3f}' for e in exponents)}")
    assert ok


@pytest.mark.criterion(6, "decoupled supermodes")
def test_decoupled_supermodes(criterion):
    worst = 0.0
    for eps in (0.25, 0.5, 1.0):
        K = hamiltonian_generator(symmetric_graph(eps, eps))
        for t in np.linspace(0.0, 3.0, 31):
            state = evolve(vacuum_state(4), K, t)
            for a, b in ((0, 1), (2, 3)):
                for quad in "xp":
                    v = joint_quadrature_variance(state, supermode(4, {a: 1.0, b: -1.0}, quad)).variance
                    worst = max(worst, abs(v - 0.5))
    ok = worst < 1e-9
    criterion.check(ok, f"max |Var - 1/2| {worst:.1e} over eps in (0.25, 0.5, 1), t in [0, 3]")
    assert ok


@pytest.mark.criterion(7, "phase-matching calibration")
def test_phase_matching_calibration(criterion):
    cfg = load_config()
    theta = cone_half_angle(cfg.dispersion, cfg.pump)
    geo = solve_four_mode_geometry(cfg.pump, cfg.dispersion)
    rel = geo.total_residual / geo.k_pump
    collinear = solve_four_mode_geometry(PumpConfig(half_cross_angle=0.0), cfg.dispersion)
    ok = abs(theta - 8e-3) <= 0.05 * 8e-3 and rel < 1e-3 and collinear.degenerate and not geo.degenerate
    criterion.check(ok, f"cone {theta * 1e3:.4f} mrad, residual {rel:.1e} |k_pump|, "
                        f"alpha=0 degenerate={collinear.degenerate}")
    assert ok


@pytest.mark.criterion(8, "power-ratio photon-number minimum")
def test_power_ratio_minimum(criterion):
    cfg = load_config()
    assert cfg.g_dual / cfg.g_single == pytest.approx(0.8)
    table = sweep_ratio(cfg)
    ratios = np.array(table.column("ratio"))
    totals = np.array(table.column("n_total"))
    assert len(ratios) == 64
    k = int(np.argmin(totals))
    step = ratios[1] - ratios[0]
    interior = 0 < k < len(ratios) - 1
    mid = int(np.argmin(np.abs(ratios - 0.5)))
    modes = [table.rows[mid][table.columns.index(c)] for c in ("n1", "n2", "n3", "n4")]
    spread = max(modes) - min(modes)
    ok = interior and abs(ratios[k] - 0.5) <= step + 1e-12 and abs(ratios[mid] - 0.5) < 1e-12 and spread < 1e-9
    criterion.check(ok, f"minimum at ratio {ratios[k]:.4f} (step {step:.4f}), mode spread at 0.5 {spread:.1e}")
    assert ok


@pytest.mark.criterion(9, "loss monotonicity")
def test_loss_monotonicity(criterion):
    rng = np.random.default_rng(SEED)
    drops, identity = [], 0.0
    for _ in range(50):
        graph = four_mode_graph(*rng.uniform(0.05, 1.0, size=4))
        state = evolve(vacuum_state(4), hamiltonian_generator(graph), rng.uniform(0.1, 1.0))
        size = int(rng.integers(1, 4))
        part = sorted(rng.choice(4, size=size, replace=False).tolist())
        drops.append(log_negativity(state, part) - log_negativity(apply_loss(state, 0.7), part))
        same = apply_loss(state, 1.0)
        identity = max(identity, float(np.max(np.abs(same.cov - state.cov))),
                       float(np.max(np.abs(same.mean - state.mean))))
    ok = min(drops) > 0 and identity < 1e-12
    criterion.check(ok, f"smallest E_N drop {min(drops):.3e} over 50 states, tau=1 error {identity:.1e}")
    assert ok


@pytest.mark.criterion(10, "determinism across worker counts")
def test_determinism(criterion, tmp_path):
    one, four = tmp_path / "w1.csv", tmp_path / "w4.csv"
    codes = [cli.main(["sweep-ratio", "--seed", "7", "--workers", "1", "--out", str(one)]),
             cli.main(["sweep-ratio", "--seed", "7", "--workers", "4", "--out", str(four)])]
    same = one.read_bytes() == four.read_bytes()
    ok = codes == [0, 0] and same
    criterion.check(ok, f"exit codes {codes}, byte-identical={same}, {len(one.read_bytes())} bytes")
    assert ok
