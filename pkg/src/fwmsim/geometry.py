"""Phase-matching geometry for single- and dual-pump four-wave mixing.

Coordinates: ``z`` is the bisector of the two pumps, ``x`` horizontal and
``y`` vertical. Pump A travels at ``-half_cross_angle`` (left), pump B at
``+half_cross_angle`` (right). Spatial modes 1..4 (indices 0..3) run
clockwise from top left, so modes 1 and 4 sit above and below pump A and
modes 2 and 3 above and below pump B. The upper modes carry the probe
frequency and the lower modes the conjugate frequency.

Azimuths on a cone are measured from the horizontal ``+x`` side toward
``+y``, so "directly above" a pump is ``pi/2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .errors import NoSolution
from .interaction import CouplingGraph, coupling_graph_from_powers, gain_spectrum, ranked_indices

C_LIGHT = 299_792_458.0

CONE_TOLERANCE = 1e-12
RESIDUAL_CEILING = 1e-3


@dataclass(frozen=True)
class PumpConfig:
    """Two pump beams of one frequency crossing in the horizontal plane.

    ``detuning`` is carried for bookkeeping only; nothing downstream reads it.
    """

    wavelength_vacuum: float = 795e-9
    half_cross_angle: float = math.radians(0.45)
    power_a: float = 0.1
    power_b: float = 0.1
    detuning: float = 0.0

    def __post_init__(self):
        if not self.wavelength_vacuum > 0:
            raise ValueError(f"wavelength_vacuum must be > 0, got {self.wavelength_vacuum}")
        if not 0 <= self.half_cross_angle < math.pi / 2:
            raise ValueError(f"half_cross_angle must lie in [0, pi/2), got {self.half_cross_angle}")
        if not (self.power_a >= 0 and self.power_b >= 0):
            raise ValueError("pump powers must be >= 0")

    @property
    def omega(self) -> float:
        return 2 * math.pi * C_LIGHT / self.wavelength_vacuum

    def swapped(self) -> "PumpConfig":
        return PumpConfig(self.wavelength_vacuum, self.half_cross_angle,
                          self.power_b, self.power_a, self.detuning)


@dataclass(frozen=True)
class DispersionParams:
    """Refractive indices at the pump, probe (w - offset) and conjugate (w + offset)."""

    n_pump: float
    n_probe: float
    n_conj: float
    freq_offset: float = 2 * math.pi * 3e9

    def __post_init__(self):
        for name in ("n_pump", "n_probe", "n_conj"):
            if not getattr(self, name) >= 1 - 1e-3:
                raise ValueError(f"{name} must be >= 1 - 1e-3, got {getattr(self, name)}")
        if not self.freq_offset >= 0:
            raise ValueError(f"freq_offset must be >= 0, got {self.freq_offset}")


# Indices tuned so the probe cone opens at 8.0 mrad for a 795 nm pump with a
# 3 GHz probe/conjugate offset. There is no atomic model behind these values.
CALIBRATED_DISPERSION = DispersionParams(
    n_pump=1.0, n_probe=1.0000640053, n_conj=1.0, freq_offset=2 * math.pi * 3e9
)


@dataclass(frozen=True)
class Wavevector:
    kx: float
    ky: float
    kz: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.kx, self.ky, self.kz)):
            raise ValueError(f"non-finite wavevector {self}")

    @classmethod
    def from_direction(cls, direction, omega: float, index: float) -> "Wavevector":
        d = np.asarray(direction, dtype=float)
        d = d / np.linalg.norm(d)
        k = index * omega / C_LIGHT
        return cls(*(k * d))

    def as_array(self) -> np.ndarray:
        return np.array([self.kx, self.ky, self.kz])

    @property
    def magnitude(self) -> float:
        return float(np.linalg.norm(self.as_array()))


def wavenumbers(disp: DispersionParams, pump: PumpConfig):
    """Wavenumbers ``(k_pump, k_probe, k_conj)`` in rad/m."""
    w = pump.omega
    return (
        disp.n_pump * w / C_LIGHT,
        disp.n_probe * (w - disp.freq_offset) / C_LIGHT,
        disp.n_conj * (w + disp.freq_offset) / C_LIGHT,
    )


def mode_frequencies(disp: DispersionParams, pump: PumpConfig):
    """Angular frequencies ``(pump, probe, conj)``."""
    w = pump.omega
    return w, w - disp.freq_offset, w + disp.freq_offset


def cone_residual(theta_probe, k_pump, k_probe, k_conj) -> float:
    """Longitudinal mismatch once the transverse condition fixes the conjugate angle.

    Returns ``k_probe cos(theta_probe) + k_conj cos(theta_conj) - 2 k_pump``
    with ``k_probe sin(theta_probe) = k_conj sin(theta_conj)``.
    """
    s = k_probe * math.sin(theta_probe) / k_conj
    return k_probe * math.cos(theta_probe) + k_conj * math.sqrt(max(0.0, 1.0 - s * s)) - 2 * k_pump


def conjugate_angle(theta_probe, k_probe, k_conj) -> float:
    return math.asin(min(1.0, k_probe * math.sin(theta_probe) / k_conj))


def _cone_bracket(k_probe, k_conj):
    # the transverse condition stops having a solution past this probe angle
    return min(math.pi / 2, math.asin(min(1.0, k_conj / k_probe)))


def cone_half_angle(disp: DispersionParams, pump: PumpConfig) -> float:
    """Probe half-angle of the single-pump emission cone, found by bisection.

    Raises:
        NoSolution: if the residual keeps one sign across the bracket; the
            residuals at both ends are attached to the exception.
    """
    kp, kpr, kc = wavenumbers(disp, pump)
    lo, hi = 0.0, _cone_bracket(kpr, kc)
    f_lo = cone_residual(lo, kp, kpr, kc)
    f_hi = cone_residual(hi, kp, kpr, kc)
    tol = CONE_TOLERANCE * kp
    if abs(f_lo) <= tol:
        return 0.0
    if f_lo * f_hi > 0:
        raise NoSolution(
            f"no cone solution in [{lo}, {hi:.6g}] rad: residual {f_lo:.6g} and {f_hi:.6g} rad/m",
            residuals=(f_lo, f_hi),
        )
    # residual decreases monotonically with angle on the bracket
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = cone_residual(mid, kp, kpr, kc)
        if abs(f_mid) <= tol or hi - lo <= 4 * np.finfo(float).eps * max(mid, 1e-300):
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def phase_mismatch(pump_ks, out_ks) -> np.ndarray:
    """Total pump wavevector minus total generated wavevector (rad/m)."""
    pump_ks, out_ks = list(pump_ks), list(out_ks)
    if not pump_ks or not out_ks:
        raise ValueError("wavevector lists must be non-empty")
    return sum(k.as_array() for k in pump_ks) - sum(k.as_array() for k in out_ks)


def pump_directions(pump: PumpConfig):
    a = pump.half_cross_angle
    return (np.array([-math.sin(a), 0.0, math.cos(a)]),
            np.array([math.sin(a), 0.0, math.cos(a)]))


def cone_frame(axis):
    """Horizontal and vertical unit vectors perpendicular to ``axis``."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    up = np.array([0.0, 1.0, 0.0])
    if abs(axis @ up) > 0.9:
        up = np.array([1.0, 0.0, 0.0])
    e_h = np.cross(up, axis)
    e_h /= np.linalg.norm(e_h)
    e_v = np.cross(axis, e_h)
    return e_h, e_v


def cone_direction(axis, theta, azimuth) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    e_h, e_v = cone_frame(axis)
    return (math.cos(theta) * axis
            + math.sin(theta) * (math.cos(azimuth) * e_h + math.sin(azimuth) * e_v))


def cone_pair(axis, azimuth, disp: DispersionParams, pump: PumpConfig):
    """Probe and conjugate wavevectors at opposite azimuths of one pump's cone."""
    kp, kpr, kc = wavenumbers(disp, pump)
    theta = cone_half_angle(disp, pump)
    theta_c = conjugate_angle(theta, kpr, kc)
    _, w_pr, w_c = mode_frequencies(disp, pump)
    probe = Wavevector.from_direction(cone_direction(axis, theta, azimuth), w_pr, disp.n_probe)
    conj = Wavevector.from_direction(cone_direction(axis, theta_c, azimuth + math.pi), w_c, disp.n_conj)
    return probe, conj


@dataclass(frozen=True)
class ModeGeometry:
    """Directions and frequencies of the four generated modes.

    ``pair_residuals`` maps each matched pair of zero-based mode indices to
    the norm of its phase mismatch in rad/m.
    """

    directions: np.ndarray
    frequencies: np.ndarray
    azimuths: np.ndarray
    cone_angles: tuple
    pair_residuals: dict
    total_residual: float
    k_pump: float
    degenerate: bool = False
    labels: tuple = ("1", "2", "3", "4")

    def wavevectors(self, disp: DispersionParams):
        indices = (disp.n_probe, disp.n_probe, disp.n_conj, disp.n_conj)
        return [Wavevector.from_direction(d, w, n)
                for d, w, n in zip(self.directions, self.frequencies, indices)]


# (mode index, pump index, frequency class) with 0 = probe, 1 = conjugate
_FOUR_MODE_LAYOUT = ((0, 0, 0), (1, 1, 0), (2, 1, 1), (3, 0, 1))
_SEED_AZIMUTHS = np.array([math.pi / 2, math.pi / 2, -math.pi / 2, -math.pi / 2])
MATCHED_PAIRS = {
    (0, 3): (0, 0),  # single pump A
    (1, 2): (1, 1),  # single pump B
    (0, 2): (0, 1),  # dual pump
    (1, 3): (0, 1),  # dual pump
}


def _four_mode_vectors(azimuths, axes, thetas, ks):
    return [ks[f] * cone_direction(axes[p], thetas[f], azimuths[m])
            for m, p, f in _FOUR_MODE_LAYOUT]


def _four_mode_residuals(azimuths, axes, thetas, ks, k_pump):
    vecs = _four_mode_vectors(azimuths, axes, thetas, ks)
    out = []
    for (i, j), (pa, pb) in MATCHED_PAIRS.items():
        out.append(k_pump * (axes[pa] + axes[pb]) - vecs[i] - vecs[j])
    return np.concatenate(out)


def solve_four_mode_geometry(pump: PumpConfig, disp: DispersionParams,
                             ceiling: float = RESIDUAL_CEILING) -> ModeGeometry:
    """Place modes 1..4 on the pump cones and relax their azimuths.

    Each mode keeps the cone angle of its frequency class; the four azimuths
    are optimised from the directly-above/below seed to minimise the summed
    squared mismatch over the single-pump pairs (1,4), (2,3) and the dual-pump
    pairs (1,3), (2,4).

    Raises:
        NoSolution: if the best total residual exceeds ``ceiling * k_pump``.
    """
    kp, kpr, kc = wavenumbers(disp, pump)
    theta_pr = cone_half_angle(disp, pump)
    theta_c = conjugate_angle(theta_pr, kpr, kc)
    axes = pump_directions(pump)
    thetas = (theta_pr, theta_c)
    ks = (kpr, kc)

    def scaled(phi):
        return _four_mode_residuals(phi, axes, thetas, ks, kp) / kp

    fit = least_squares(scaled, _SEED_AZIMUTHS.copy(), method="lm",
                        xtol=1e-15, ftol=1e-15, gtol=1e-15)
    phi = fit.x
    raw = _four_mode_residuals(phi, axes, thetas, ks, kp).reshape(len(MATCHED_PAIRS), 3)
    pair_res = {pair: float(np.linalg.norm(r)) for pair, r in zip(MATCHED_PAIRS, raw)}
    total = float(math.sqrt(sum(v * v for v in pair_res.values())))
    if total > ceiling * kp:
        raise NoSolution(
            f"four-mode residual {total:.6g} rad/m exceeds ceiling {ceiling * kp:.6g} rad/m",
            residuals=pair_res,
        )
    dirs = np.array([cone_direction(axes[p], thetas[f], phi[m]) for m, p, f in _FOUR_MODE_LAYOUT])
    _, w_pr, w_c = mode_frequencies(disp, pump)
    freqs = np.array([w_pr, w_pr, w_c, w_c])
    degenerate = pump.half_cross_angle == 0.0 or (
        np.allclose(dirs[0], dirs[1], atol=1e-12) and np.allclose(dirs[2], dirs[3], atol=1e-12)
    )
    return ModeGeometry(
        directions=dirs, frequencies=freqs, azimuths=phi, cone_angles=thetas,
        pair_residuals=pair_res, total_residual=total, k_pump=kp, degenerate=bool(degenerate),
    )


def mirror_x(vectors) -> np.ndarray:
    """Reflect through the vertical plane containing the pump bisector."""
    return np.asarray(vectors) * np.array([-1.0, 1.0, 1.0])


def cone_intersections(pump: PumpConfig, theta: float):
    """Upper and lower points shared by the two cones of half-angle ``theta``."""
    a = pump.half_cross_angle
    dz = math.cos(theta) / math.cos(a)
    if dz > 1.0:
        raise NoSolution(
            f"cones of half-angle {theta:.6g} rad do not intersect for half-crossing {a:.6g} rad"
        )
    dy = math.sqrt(1.0 - dz * dz)
    return np.array([0.0, dy, dz]), np.array([0.0, -dy, dz])


class ConfigKind(enum.IntEnum):
    # value doubles as the tie-break order
    FOUR_MODE = 0
    SIX_MODE = 1


@dataclass(frozen=True)
class CandidateConfig:
    kind: ConfigKind
    directions: np.ndarray
    graph: CouplingGraph
    gain_score: float
    pair_residuals: dict = field(default_factory=dict)

    def __post_init__(self):
        expected = 4 if self.kind == ConfigKind.FOUR_MODE else 6
        if len(self.directions) != expected or self.graph.n_modes != expected:
            raise ValueError(f"{self.kind.name} needs {expected} modes")
        if not self.gain_score >= 0:
            raise ValueError(f"gain_score must be >= 0, got {self.gain_score}")


def six_mode_geometry(pump: PumpConfig, disp: DispersionParams):
    """Directions of the six-mode alternative and its pair mismatches.

    Modes 0/1 sit at the upper (probe) and lower (conjugate) cone
    intersections and form the dual-pump pair. Modes 2/3 and 4/5 are
    horizontal single-pump pairs on the cones of pump A and pump B.
    """
    kp, kpr, kc = wavenumbers(disp, pump)
    theta_pr = cone_half_angle(disp, pump)
    theta_c = conjugate_angle(theta_pr, kpr, kc)
    top, _ = cone_intersections(pump, theta_pr)
    _, bottom = cone_intersections(pump, theta_c)
    axis_a, axis_b = pump_directions(pump)
    dirs = np.array([
        top, bottom,
        cone_direction(axis_a, theta_pr, math.pi), cone_direction(axis_a, theta_c, 0.0),
        cone_direction(axis_b, theta_pr, 0.0), cone_direction(axis_b, theta_c, math.pi),
    ])
    ks = np.array([kpr, kc, kpr, kc, kpr, kc])
    vecs = dirs * ks[:, None]
    residuals = {
        (0, 1): float(np.linalg.norm(kp * (axis_a + axis_b) - vecs[0] - vecs[1])),
        (2, 3): float(np.linalg.norm(2 * kp * axis_a - vecs[2] - vecs[3])),
        (4, 5): float(np.linalg.norm(2 * kp * axis_b - vecs[4] - vecs[5])),
    }
    return dirs, residuals


def six_mode_graph(power_a, power_b, g_single, g_dual) -> CouplingGraph:
    eps_dual = g_dual * math.sqrt(power_a * power_b)
    return CouplingGraph(6, ((0, 1, eps_dual), (2, 3, g_single * power_a), (4, 5, g_single * power_b)))


def enumerate_candidate_configs(pump: PumpConfig, disp: DispersionParams,
                                g_single: float, g_dual: float) -> list:
    """Four-mode and six-mode candidates, best gain score first.

    Ties within 1e-12 keep the four-mode candidate in front.
    """
    geo = solve_four_mode_geometry(pump, disp)
    four_graph = coupling_graph_from_powers(pump.power_a, pump.power_b, g_single, g_dual)
    six_dirs, six_res = six_mode_geometry(pump, disp)
    six_graph = six_mode_graph(pump.power_a, pump.power_b, g_single, g_dual)
    candidates = [
        CandidateConfig(ConfigKind.FOUR_MODE, geo.directions, four_graph,
                        max(0.0, float(gain_spectrum(four_graph)[0])), geo.pair_residuals),
        CandidateConfig(ConfigKind.SIX_MODE, six_dirs, six_graph,
                        max(0.0, float(gain_spectrum(six_graph)[0])), six_res),
    ]

    # kind order is the tie-break
    candidates.sort(key=lambda c: c.kind.value)
    return [candidates[i] for i in ranked_indices([c.gain_score for c in candidates])]
