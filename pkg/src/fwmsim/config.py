"""INI run configuration with unit-suffixed keys.

Every physical quantity names its unit in the key (``power_a_mw``,
``half_cross_angle_deg``); values are converted to SI and radians here, and
the rest of the package only sees SI. Numbers may be written as fractions
such as ``1/66``. The whole file is validated before anything runs.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .geometry import CALIBRATED_DISPERSION, DispersionParams, PumpConfig
from .interaction import coupling_graph_from_powers

SWEEP_PARAMETERS = (
    "squeezing_r", "time_s", "power_a_mw", "power_b_mw",
    "g_single_per_s_per_w", "g_dual_per_s_per_w", "transmission",
)

# section -> allowed keys
SCHEMA = {
    "pump": {"wavelength_nm", "half_cross_angle_deg", "half_cross_angle_mrad",
             "power_a_mw", "power_b_mw", "detuning_mhz"},
    "dispersion": {"preset", "n_pump", "n_probe", "n_conj", "freq_offset_ghz"},
    "gain": {"g_single_per_s_per_w", "g_dual_per_s_per_w"},
    "loss": {"transmission"},
    "evolve": {"time_s", "squeezing_r"},
    "entanglement": {"squeezing_r", "partitions", "t_small_s", "correlation_threshold"},
    "sweep_ratio": {"total_power_mw", "ratio_min", "ratio_max", "steps", "time_s"},
    "sweep": {"parameter", "min", "max", "steps"},
    "oracle": {"cutoff", "squeezing_r", "random_graphs"},
    "run": {"seed"},
}


class ConfigError(ValueError):
    def __init__(self, message, key=None, line=None):
        where = ""
        if key is not None:
            where = f"[{key}] "
        if line is not None:
            where = f"line {line}: {where}"
        super().__init__(where + message)
        self.key = key
        self.line = line


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    start: float
    stop: float
    steps: int

    def values(self):
        if self.steps == 1:
            return [self.start]
        h = (self.stop - self.start) / (self.steps - 1)
        return [self.start + k * h for k in range(self.steps)]


@dataclass(frozen=True)
class RunConfig:
    pump: PumpConfig = field(default_factory=PumpConfig)
    dispersion: DispersionParams = CALIBRATED_DISPERSION
    g_single: float = 1.0
    g_dual: float = 0.8
    transmissions: tuple = (0.7, 0.7, 0.7, 0.7)
    time_s: float | None = None
    squeezing_r: float | None = 0.5
    ent_r_values: tuple = (0.0, 0.5, 1.0)
    partitions: tuple = ((0,), (0, 1), (0, 2))
    t_small: float = 1e-3
    correlation_threshold: float = 0.1
    ratio_total_power: float = 0.2
    ratio_sweep: SweepSpec = SweepSpec("ratio", 1 / 66, 64 / 66, 64)
    ratio_time: float = 1.0
    sweep: SweepSpec = SweepSpec("squeezing_r", 0.0, 1.5, 16)
    oracle_cutoff: int = 12
    oracle_r: float = 0.3
    oracle_random_graphs: int = 4
    seed: int = 0

    def graph(self):
        return coupling_graph_from_powers(self.pump.power_a, self.pump.power_b,
                                          self.g_single, self.g_dual)

    def evolution_time(self, graph=None) -> float:
        """Evolution time, derived from ``squeezing_r`` when no time is given."""
        if self.time_s is not None:
            return self.time_s
        graph = self.graph() if graph is None else graph
        return time_for_r(self.squeezing_r, graph)

    def with_parameter(self, name: str, value: float) -> "RunConfig":
        """Copy with one sweepable parameter replaced (value in the key's units)."""
        if name == "squeezing_r":
            return replace(self, squeezing_r=value, time_s=None)
        if name == "time_s":
            return replace(self, time_s=value, squeezing_r=None)
        if name == "power_a_mw":
            return replace(self, pump=replace(self.pump, power_a=value * 1e-3))
        if name == "power_b_mw":
            return replace(self, pump=replace(self.pump, power_b=value * 1e-3))
        if name == "g_single_per_s_per_w":
            return replace(self, g_single=value)
        if name == "g_dual_per_s_per_w":
            return replace(self, g_dual=value)
        if name == "transmission":
            return replace(self, transmissions=(value,) * 4)
        raise ConfigError(f"unknown sweep parameter {name!r}", key="sweep.parameter")


def time_for_r(r: float, graph) -> float:
    """Time at which the strongest edge reaches squeezing parameter ``r``."""
    eps = graph.max_strength()
    if r == 0:
        return 0.0
    if eps == 0:
        raise ConfigError("squeezing_r > 0 needs at least one non-zero coupling", key="evolve.squeezing_r")
    return r / eps


def default_config_text() -> str:
    return resources.files("fwmsim").joinpath("default.ini").read_text()


def _parse_number(text: str) -> float:
    text = text.strip()
    if "/" in text:
        return float(Fraction(text))
    return float(text)


def _line_of(raw_lines, section, key):
    current = None
    for lineno, line in enumerate(raw_lines, start=1):
        stripped = line.strip()
        m = re.match(r"\[([^\]]+)\]", stripped)
        if m:
            current = m.group(1).strip()
            continue
        if current == section and re.match(rf"{re.escape(key)}\s*[=:]", stripped):
            return lineno
    return None


class _Reader:
    def __init__(self, parser, raw_lines):
        self.parser = parser
        self.raw = raw_lines

    def has(self, section, key):
        return self.parser.has_option(section, key)

    def fail(self, section, key, message):
        raise ConfigError(message, key=f"{section}.{key}", line=_line_of(self.raw, section, key))

    def text(self, section, key, default=None):
        if not self.has(section, key):
            return default
        return self.parser.get(section, key)

    def number(self, section, key, default=None, lo=None, hi=None, lo_open=False):
        if not self.has(section, key):
            return default
        raw = self.parser.get(section, key)
        try:
            value = _parse_number(raw)
        except (ValueError, ZeroDivisionError):
            self.fail(section, key, f"expected a number, got {raw!r}")
        if not math.isfinite(value):
            self.fail(section, key, f"expected a finite number, got {raw!r}")
        if lo is not None and (value < lo or (lo_open and value == lo)):
            self.fail(section, key, f"value {value} must be {'>' if lo_open else '>='} {lo}")
        if hi is not None and value > hi:
            self.fail(section, key, f"value {value} must be <= {hi}")
        return value

    def integer(self, section, key, default=None, lo=None):
        if not self.has(section, key):
            return default
        raw = self.parser.get(section, key).strip()
        try:
            value = int(raw)
        except ValueError:
            self.fail(section, key, f"expected an integer, got {raw!r}")
        if lo is not None and value < lo:
            self.fail(section, key, f"value {value} must be >= {lo}")
        return value

    def numbers(self, section, key, default=None):
        if not self.has(section, key):
            return default
        raw = self.parser.get(section, key)
        out = []
        for part in raw.split(","):
            try:
                out.append(_parse_number(part))
            except (ValueError, ZeroDivisionError):
                self.fail(section, key, f"expected comma-separated numbers, got {raw!r}")
        return tuple(out)


def _parse_partitions(reader, section, key, default):
    raw = reader.text(section, key)
    if raw is None:
        return default
    parts = []
    for chunk in raw.split("|"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            modes = tuple(sorted({int(m) - 1 for m in chunk.split(",")}))
        except ValueError:
            reader.fail(section, key, f"partition {chunk!r} must list mode numbers 1..4")
        if not modes or modes[0] < 0 or modes[-1] > 3 or len(modes) >= 4:
            reader.fail(section, key, f"partition {chunk!r} must be a proper subset of modes 1..4")
        parts.append(modes)
    if not parts:
        reader.fail(section, key, "no partitions given")
    return tuple(parts)


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    """Parse INI text on top of ``base`` (defaults when omitted)."""
    base = RunConfig() if base is None else base
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        raise ConfigError(f"malformed config: {exc.message if hasattr(exc, 'message') else exc}",
                          line=line) from None
    raw = text.splitlines()
    reader = _Reader(parser, raw)

    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]", key=section,
                              line=_line_of_section(raw, section))
        for key in parser.options(section):
            if key not in SCHEMA[section]:
                reader.fail(section, key, f"unknown key {key!r} in section [{section}]")

    pump = base.pump
    wl = reader.number("pump", "wavelength_nm", pump.wavelength_vacuum * 1e9, lo=0, lo_open=True)
    if reader.has("pump", "half_cross_angle_deg") and reader.has("pump", "half_cross_angle_mrad"):
        reader.fail("pump", "half_cross_angle_mrad", "give the crossing angle in degrees or mrad, not both")
    angle = pump.half_cross_angle
    if reader.has("pump", "half_cross_angle_deg"):
        angle = math.radians(reader.number("pump", "half_cross_angle_deg", lo=0, hi=89.999))
    elif reader.has("pump", "half_cross_angle_mrad"):
        angle = reader.number("pump", "half_cross_angle_mrad", lo=0, hi=1570) * 1e-3
    power_a = reader.number("pump", "power_a_mw", pump.power_a * 1e3, lo=0) * 1e-3
    power_b = reader.number("pump", "power_b_mw", pump.power_b * 1e3, lo=0) * 1e-3
    detuning = reader.number("pump", "detuning_mhz", pump.detuning / (2 * math.pi * 1e6)) * 2 * math.pi * 1e6
    pump = PumpConfig(wl * 1e-9, angle, power_a, power_b, detuning)

    disp = base.dispersion
    preset = reader.text("dispersion", "preset")
    if preset is not None:
        if preset.strip() != "calibrated-8mrad":
            reader.fail("dispersion", "preset", f"unknown preset {preset.strip()!r}")
        disp = CALIBRATED_DISPERSION
    overrides = ("n_pump", "n_probe", "n_conj", "freq_offset_ghz")
    try:
        if any(reader.has("dispersion", k) for k in overrides):
            disp = DispersionParams(
                n_pump=reader.number("dispersion", "n_pump", disp.n_pump),
                n_probe=reader.number("dispersion", "n_probe", disp.n_probe),
                n_conj=reader.number("dispersion", "n_conj", disp.n_conj),
                freq_offset=reader.number("dispersion", "freq_offset_ghz",
                                          disp.freq_offset / (2 * math.pi * 1e9), lo=0) * 2 * math.pi * 1e9,
            )
    except ValueError as exc:
        raise ConfigError(str(exc), key="dispersion") from None

    g_single = reader.number("gain", "g_single_per_s_per_w", base.g_single, lo=0)
    g_dual = reader.number("gain", "g_dual_per_s_per_w", base.g_dual, lo=0)

    trans = reader.numbers("loss", "transmission", base.transmissions)
    if len(trans) == 1:
        trans = trans * 4
    if len(trans) != 4:
        reader.fail("loss", "transmission", f"expected 1 or 4 values, got {len(trans)}")
    if any(not 0 <= t <= 1 for t in trans):
        reader.fail("loss", "transmission", f"transmissions must lie in [0, 1], got {list(trans)}")

    time_s, r = base.time_s, base.squeezing_r
    if reader.has("evolve", "time_s") and reader.has("evolve", "squeezing_r"):
        reader.fail("evolve", "squeezing_r", "give either time_s or squeezing_r, not both")
    if reader.has("evolve", "time_s"):
        time_s, r = reader.number("evolve", "time_s"), None
    elif reader.has("evolve", "squeezing_r"):
        time_s, r = None, reader.number("evolve", "squeezing_r", lo=0)

    ent_r = reader.numbers("entanglement", "squeezing_r", base.ent_r_values)
    if any(v < 0 for v in ent_r):
        reader.fail("entanglement", "squeezing_r", "squeezing values must be >= 0")
    partitions = _parse_partitions(reader, "entanglement", "partitions", base.partitions)
    t_small = reader.number("entanglement", "t_small_s", base.t_small, lo=0, lo_open=True)
    threshold = reader.number("entanglement", "correlation_threshold", base.correlation_threshold,
                              lo=0, lo_open=True)

    total = reader.number("sweep_ratio", "total_power_mw", base.ratio_total_power * 1e3,
                          lo=0, lo_open=True) * 1e-3
    rs = base.ratio_sweep
    ratio_min = reader.number("sweep_ratio", "ratio_min", rs.start, lo=0, hi=1)
    ratio_max = reader.number("sweep_ratio", "ratio_max", rs.stop, lo=0, hi=1)
    ratio_steps = reader.integer("sweep_ratio", "steps", rs.steps, lo=2)
    if ratio_max <= ratio_min:
        reader.fail("sweep_ratio", "ratio_max", "ratio_max must exceed ratio_min")
    ratio_time = reader.number("sweep_ratio", "time_s", base.ratio_time, lo=0)

    sw = base.sweep
    parameter = (reader.text("sweep", "parameter", sw.parameter) or "").strip()
    if parameter not in SWEEP_PARAMETERS:
        reader.fail("sweep", "parameter",
                    f"unknown sweep parameter {parameter!r}; choose from {', '.join(SWEEP_PARAMETERS)}")
    sweep = SweepSpec(parameter, reader.number("sweep", "min", sw.start),
                      reader.number("sweep", "max", sw.stop), reader.integer("sweep", "steps", sw.steps, lo=2))
    if sweep.stop < sweep.start:
        reader.fail("sweep", "max", "max must be >= min")
    if parameter == "transmission" and not (0 <= sweep.start and sweep.stop <= 1):
        reader.fail("sweep", "max", "transmission sweep must stay inside [0, 1]")
    if parameter != "time_s" and sweep.start < 0:
        reader.fail("sweep", "min", f"{parameter} cannot be negative")

    cutoff = reader.integer("oracle", "cutoff", base.oracle_cutoff, lo=1)
    oracle_r = reader.number("oracle", "squeezing_r", base.oracle_r, lo=0, hi=0.4)
    n_random = reader.integer("oracle", "random_graphs", base.oracle_random_graphs, lo=0)
    seed = reader.integer("run", "seed", base.seed, lo=0)

    cfg = RunConfig(
        pump=pump, dispersion=disp, g_single=g_single, g_dual=g_dual,
        transmissions=tuple(trans), time_s=time_s, squeezing_r=r,
        ent_r_values=tuple(ent_r), partitions=partitions, t_small=t_small,
        correlation_threshold=threshold, ratio_total_power=total,
        ratio_sweep=SweepSpec("ratio", ratio_min, ratio_max, ratio_steps), ratio_time=ratio_time,
        sweep=sweep, oracle_cutoff=cutoff, oracle_r=oracle_r, oracle_random_graphs=n_random, seed=seed,
    )
    if cfg.time_s is None and cfg.squeezing_r and cfg.graph().max_strength() == 0:
        reader.fail("evolve", "squeezing_r", "squeezing_r > 0 needs at least one non-zero coupling")
    return cfg


def _line_of_section(raw, section):
    for lineno, line in enumerate(raw, start=1):
        if line.strip() == f"[{section}]":
            return lineno
    return None


def load_config(path=None) -> RunConfig:
    """Read the shipped defaults, then overlay ``path`` if given."""
    cfg = parse_config(default_config_text())
    if path is None:
        return cfg
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, base=cfg)
