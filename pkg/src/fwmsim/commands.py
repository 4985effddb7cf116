"""Table-producing implementations behind the CLI subcommands."""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .config import RunConfig, time_for_r
from .gaussian import apply_loss, evolve, vacuum_state
from .interaction import (
    CouplingGraph,
    compare_configurations,
    coupling_graph_from_powers,
    dominant_rate,
    hamiltonian_generator,
)
from .metrics import correlation_graph, log_negativity, mean_photon_numbers, two_mode_squeezing
from .oracle import oracle_compare

ORACLE_TOLERANCE = 1e-3
MODE_LABELS = ("1", "2", "3", "4")
ALL_PAIRS = tuple(itertools.combinations(range(4), 2))


@dataclass
class Table:
    columns: list
    rows: list = field(default_factory=list)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} values for {len(self.columns)} columns")
        self.rows.append(list(values))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_value(v) for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        records = [dict(zip(self.columns, (json_value(v) for v in row))) for row in self.rows]
        return json.dumps({"columns": self.columns, "rows": records}, indent=2) + "\n"

    def column(self, name):
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]


def format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        text = f"{float(value):.12g}"
        return "0" if text == "-0" else text
    return str(value)


def json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def _pair_label(i, j):
    return f"{i + 1}-{j + 1}"


def _partition_label(part, n=4):
    rest = [m for m in range(n) if m not in part]
    return ",".join(str(m + 1) for m in part) + "|" + ",".join(str(m + 1) for m in rest)


def _map(fn, items, workers):
    # executor.map yields in submission order, so output is independent of workers
    if workers <= 1:
        return list(map(fn, items))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def phase_match(cfg: RunConfig) -> Table:
    """Cone angle, four-mode directions and per-pair residuals."""
    pump, disp = cfg.pump, cfg.dispersion
    theta = geometry.cone_half_angle(disp, pump)
    geo = geometry.solve_four_mode_geometry(pump, disp)
    table = Table(["quantity", "subject", "value"])
    table.add("cone_half_angle_mrad", "probe", theta * 1e3)
    table.add("cone_half_angle_mrad", "conjugate", geo.cone_angles[1] * 1e3)
    table.add("half_cross_angle_deg", "pumps", math.degrees(pump.half_cross_angle))
    table.add("degenerate", "geometry", geo.degenerate)
    for m, label in enumerate(MODE_LABELS):
        for axis, comp in zip("xyz", geo.directions[m]):
            table.add(f"direction_{axis}", label, comp)
        table.add("azimuth_deg", label, math.degrees(geo.azimuths[m]))
    for (i, j), res in geo.pair_residuals.items():
        table.add("mismatch_rad_per_m", _pair_label(i, j), res)
    table.add("total_residual_rad_per_m", "all", geo.total_residual)
    table.add("relative_residual", "all", geo.total_residual / geo.k_pump)
    return table


def _evolved(cfg: RunConfig, graph=None):
    graph = cfg.graph() if graph is None else graph
    K = hamiltonian_generator(graph)
    t = cfg.evolution_time(graph)
    state = evolve(vacuum_state(graph.n_modes), K, t)
    return graph, t, state


def evolve_report(cfg: RunConfig) -> Table:
    graph, t, state = _evolved(cfg)
    lossy = apply_loss(state, cfg.transmissions)
    table = Table(["quantity", "stage", "subject", "value"])
    table.add("time_s", "setup", "all", t)
    table.add("dominant_gain_per_s", "setup", "all", dominant_rate(graph))
    for (i, j, eps) in graph.edges:
        table.add("coupling_per_s", "setup", _pair_label(i, j), eps)
    for stage, st in (("lossless", state), ("lossy", lossy)):
        n = mean_photon_numbers(st)
        for m, label in enumerate(MODE_LABELS):
            table.add("mean_photons", stage, label, n[m])
        table.add("mean_photons", stage, "total", float(n.sum()))
        for i, j in ALL_PAIRS:
            table.add("pair_variance", stage, _pair_label(i, j), two_mode_squeezing(st, i, j).variance)
        for part in cfg.partitions:
            table.add("log_negativity", stage, _partition_label(part), log_negativity(st, part))
    return table


SWEEP_RATIO_COLUMNS = ["ratio", "power_a_w", "power_b_w", "n1", "n2", "n3", "n4",
                       "n_total", "dominant_gain_per_s"]


def _ratio_row(args):
    cfg, ratio = args
    total = cfg.ratio_total_power
    pa, pb = ratio * total, (1.0 - ratio) * total
    graph = coupling_graph_from_powers(pa, pb, cfg.g_single, cfg.g_dual)
    state = evolve(vacuum_state(4), hamiltonian_generator(graph), cfg.ratio_time)
    n = mean_photon_numbers(state)
    return [ratio, pa, pb, *n.tolist(), float(n.sum()), dominant_rate(graph)]


def sweep_ratio(cfg: RunConfig, workers: int = 1) -> Table:
    """Lossless photon numbers against ``P_A / (P_A + P_B)`` at fixed total power."""
    items = [(cfg, r) for r in cfg.ratio_sweep.values()]
    table = Table(list(SWEEP_RATIO_COLUMNS))
    for row in _map(_ratio_row, items, workers):
        table.add(*row)
    return table


SWEEP_STRENGTH_COLUMNS = ["value", "time_s", "n1", "n2", "n3", "n4", "n_total",
                          "log_neg_12_34", "log_neg_12_34_lossy", "best_pair_variance",
                          "best_pair", "dominant_gain_per_s"]


def _strength_row(args):
    cfg, name, value = args
    point = cfg.with_parameter(name, value)
    graph, t, state = _evolved(point)
    lossy = apply_loss(state, point.transmissions)
    n = mean_photon_numbers(state)
    best = min((two_mode_squeezing(state, i, j) for i, j in ALL_PAIRS), key=lambda s: s.variance)
    return [value, t, *n.tolist(), float(n.sum()),
            log_negativity(state, (0, 1)), log_negativity(lossy, (0, 1)),
            best.variance, best.label, dominant_rate(graph)]


def sweep_strength(cfg: RunConfig, workers: int = 1) -> Table:
    """Metrics along a sweep of one named parameter."""
    spec = cfg.sweep
    items = [(cfg, spec.parameter, v) for v in spec.values()]
    table = Table(["parameter"] + list(SWEEP_STRENGTH_COLUMNS))
    for row in _map(_strength_row, items, workers):
        table.add(spec.parameter, *row)
    return table


def compare_configs(cfg: RunConfig) -> Table:
    candidates = geometry.enumerate_candidate_configs(cfg.pump, cfg.dispersion, cfg.g_single, cfg.g_dual)
    table = Table(["rank", "kind", "gain_score_per_s", "n_modes", "degrees", "max_mismatch_rad_per_m"])
    by_kind = {c.kind: c for c in candidates}
    for entry in compare_configurations(candidates):
        cand = by_kind[entry.kind]
        table.add(entry.rank, entry.kind.name, entry.gain_score, cand.graph.n_modes,
                  " ".join(str(d) for d in entry.degrees),
                  max(cand.pair_residuals.values(), default=0.0))
    return table


def entanglement(cfg: RunConfig) -> Table:
    """E_N, pair squeezing and correlation edges for each requested ``r``."""
    graph = cfg.graph()
    K = hamiltonian_generator(graph)
    table = Table(["squeezing_r", "stage", "quantity", "subject", "value"])
    corr = correlation_graph(K, cfg.t_small, cfg.correlation_threshold)
    for r in cfg.ent_r_values:
        t = time_for_r(r, graph)
        state = evolve(vacuum_state(4), K, t)
        lossy = apply_loss(state, cfg.transmissions)
        for stage, st in (("lossless", state), ("lossy", lossy)):
            for part in cfg.partitions:
                table.add(r, stage, "log_negativity", _partition_label(part), log_negativity(st, part))
            for i, j in ALL_PAIRS:
                sq = two_mode_squeezing(st, i, j)
                table.add(r, stage, "pair_variance", _pair_label(i, j), sq.variance)
        for i, j in corr.edges():
            table.add(r, "lossless", "correlation_edge", _pair_label(i, j), True)
    return table


def random_four_mode_graph(rng: np.random.Generator, max_eps_t: float, t: float = 1.0) -> CouplingGraph:
    """Random edge subset of four modes, strongest edge scaled to ``max_eps_t / t``."""
    while True:
        present = rng.random(len(ALL_PAIRS)) < 0.5
        if present.any():
            break
    eps = rng.uniform(0.0, 1.0, size=len(ALL_PAIRS)) * present
    eps *= (max_eps_t / t) / eps.max()
    return CouplingGraph(4, tuple((i, j, e) for (i, j), e in zip(ALL_PAIRS, eps) if e > 0))


def oracle_check(cfg: RunConfig, seed: int | None = None):
    """Fock-versus-Gaussian comparison on the configured and random graphs.

    Returns ``(table, all_passed)``.
    """
    seed = cfg.seed if seed is None else seed
    rng = np.random.default_rng(seed)
    graphs = []
    base = cfg.graph()
    if base.max_strength() > 0:
        graphs.append(("configured", base.scaled(cfg.oracle_r / base.max_strength())))
    for k in range(cfg.oracle_random_graphs):
        graphs.append((f"random_{k}", random_four_mode_graph(rng, cfg.oracle_r)))
    table = Table(["graph", "max_eps_t", "cutoff", "deviation", "leakage", "passed"])
    ok = True
    for name, graph in graphs:
        result = oracle_compare(graph, 1.0, cfg.oracle_cutoff)
        passed = result.deviation <= ORACLE_TOLERANCE
        ok &= passed
        table.add(name, graph.max_strength(), cfg.oracle_cutoff, result.deviation, result.leakage, passed)
    return table, ok
