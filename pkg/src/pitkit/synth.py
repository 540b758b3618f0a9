"""Synthetic frequency-sweep generation.

Combines the coupled-coil and bridge models with a calibrated
coupling-vs-geometry law, analyzer noise, slow drift, and optional
metal-proximity perturbations to produce traces the detector consumes.

Generation is a pure function of (configs, seed, timestamp): the noise
generator is re-seeded per call from (seed, timestamp), so sweeps can be
produced in any order or in parallel and stay bit-identical.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .bridge import BridgeConfig, bridge_output, to_db_magnitude
from .circuit import CoilParams, CoupledPair, capacitance_for_resonance, load_impedance, sensor_impedance
from .decode import RingProfile
from .trace import Sweep

# Period of the slow sinusoidal wander used to realize drift rates.
DRIFT_PERIOD_S = 10.0


class DataFormatError(ValueError):
    """Malformed sweep/session file."""


@dataclass(frozen=True)
class SweepConfig:
    start_frequency: float = 27e6
    stop_frequency: float = 30e6
    step: float = 60e3
    acquisition_rate: float = 5.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.start_frequency >= self.stop_frequency:
            raise ValueError("start_frequency must be < stop_frequency")
        if self.step <= 0:
            raise ValueError("step must be > 0")
        span = (self.stop_frequency - self.start_frequency) / self.step
        if abs(span - round(span)) > 1e-9 * max(1.0, span):
            raise ValueError("(stop - start) / step must be integral")
        if self.acquisition_rate <= 0:
            raise ValueError("acquisition_rate must be > 0")

    @property
    def point_count(self) -> int:
        return int(round((self.stop_frequency - self.start_frequency) / self.step)) + 1

    def frequencies(self) -> np.ndarray:
        return self.start_frequency + self.step * np.arange(self.point_count)


@dataclass(frozen=True)
class GeometryScenario:
    """Ring-to-wristband geometry mapped to a coupling coefficient."""

    distance: float = 0.13
    bend_angle: float = 0.0
    reference_coupling: float = 1e-3
    reference_distance: float = 0.13

    def __post_init__(self) -> None:
        if self.distance <= 0:
            raise ValueError("distance must be > 0")
        if not 0.0 <= self.bend_angle <= 90.0:
            raise ValueError("bend_angle must be in [0, 90] degrees")
        if not 0.0 < self.reference_coupling < 1.0:
            raise ValueError("reference_coupling must be in (0, 1)")
        if self.reference_distance <= 0:
            raise ValueError("reference_distance must be > 0")


@dataclass(frozen=True)
class DisturbanceModel:
    noise_sigma: float = 0.002
    amplitude_drift: float = 0.0
    frequency_drift: float = 0.0
    metal_baseline: Optional[tuple] = None
    nearby_resonator_shift: float = 0.0

    def __post_init__(self) -> None:
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if self.amplitude_drift < 0:
            raise ValueError("amplitude_drift must be >= 0")
        if self.frequency_drift < 0:
            raise ValueError("frequency_drift must be >= 0")


def coupling_from_geometry(scene: GeometryScenario) -> float:
    """Coupling coefficient from distance and finger-bend angle.

    Far-field dipole falloff (inverse cube in distance) anchored at the
    scenario's reference point, with a cosine misalignment factor.
    """
    k = (
        scene.reference_coupling
        * (scene.reference_distance / scene.distance) ** 3
        * math.cos(math.radians(scene.bend_angle))
    )
    return min(max(k, 0.0), 1.0 - 1e-12)


def _drift_phases(seed: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFF, 0xD217]))
    return rng.uniform(0.0, 2.0 * math.pi, size=4)


def _noise_rng(seed: int, t: float) -> np.random.Generator:
    key = int(round(t * 1e9))
    if key < 0:
        raise ValueError("timestamp must be >= 0")
    return np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFF, key]))


def _shifted_sensor(sensor: CoilParams, shift_hz: float) -> CoilParams:
    if shift_hz == 0.0:
        return sensor
    f0 = sensor.resonant_frequency + shift_hz
    return CoilParams(
        inductance=sensor.inductance,
        resistance=sensor.resistance,
        capacitance=capacitance_for_resonance(sensor.inductance, f0),
        label=sensor.label,
    )


def synthesize_sweep(
    cfg: SweepConfig,
    pair: CoupledPair,
    bridge: BridgeConfig,
    disturb: DisturbanceModel = DisturbanceModel(),
    t: float = 0.0,
) -> Sweep:
    """One analyzer sweep at time ``t``: bridge transfer magnitude in dB
    plus metal baseline, drift, and per-point Gaussian noise."""
    f = cfg.frequencies()
    x = (f - f.mean()) / ((f[-1] - f[0]) / 2.0)
    phases = _drift_phases(cfg.seed)

    f0_shift = disturb.nearby_resonator_shift
    if disturb.frequency_drift > 0.0:
        f0_shift += (
            disturb.frequency_drift
            * DRIFT_PERIOD_S
            / (2.0 * math.pi)
            * math.sin(2.0 * math.pi * t / DRIFT_PERIOD_S + phases[3])
        )
    pair_t = CoupledPair(pair.reader, _shifted_sensor(pair.sensor, f0_shift), pair.coupling)

    z_reader = sensor_impedance(pair_t.reader, f)
    z_load = load_impedance(pair_t, f)
    v_loaded = bridge_output(bridge, z_load, z_reader)
    v_unloaded = bridge_output(bridge, z_reader, z_reader)
    p_loaded = to_db_magnitude(v_loaded, bridge.input_amplitude)
    p_unloaded = to_db_magnitude(v_unloaded, bridge.input_amplitude)

    # Static offset from the deliberate reference mismatch: a quadratic in
    # f carrying the magnitude of the unloaded bridge response.  The
    # sensor's reflected signature rides on top of it as the exact
    # loaded/unloaded level difference.
    quad = np.polynomial.polynomial.polyfit(x, p_unloaded, 2)
    p = np.polynomial.polynomial.polyval(x, quad) + (p_loaded - p_unloaded)

    if disturb.metal_baseline is not None:
        p = p + np.polynomial.polynomial.polyval(x, np.asarray(disturb.metal_baseline, float))

    if disturb.amplitude_drift > 0.0:
        amp = disturb.amplitude_drift * DRIFT_PERIOD_S / (2.0 * math.pi)
        coeffs = amp * np.sin(2.0 * math.pi * t / DRIFT_PERIOD_S + phases[:3])
        p = p + np.polynomial.polynomial.polyval(x, coeffs)

    if disturb.noise_sigma > 0.0:
        p = p + _noise_rng(cfg.seed, t).normal(0.0, disturb.noise_sigma, size=len(f))

    return Sweep(f, p, timestamp=t)


def scripted_session(
    events: Sequence[tuple],
    profile: RingProfile,
    cfg: SweepConfig,
    *,
    reader: CoilParams,
    bridge: BridgeConfig,
    sensor_inductance: float,
    sensor_resistance: float,
    duration: float,
    disturb: DisturbanceModel = DisturbanceModel(),
    scene_timeline: Sequence[tuple] | GeometryScenario = GeometryScenario(),
) -> list[Sweep]:
    """Generate the sweep train for a timed switch-state sequence.

    ``events`` is a list of (time_s, state_label); the ring idles in the
    profile's first state until the first event.  ``scene_timeline`` is
    either one geometry or a list of (time_s, GeometryScenario).
    """
    events = sorted(events, key=lambda e: e[0])
    for _, label in events:
        if profile.frequency_of(label) is None:
            raise ValueError(f"unknown state label {label!r} for profile {profile.name!r}")
    if isinstance(scene_timeline, GeometryScenario):
        scene_timeline = [(0.0, scene_timeline)]
    scene_timeline = sorted(scene_timeline, key=lambda e: e[0])

    frame_count = int(round(duration * cfg.acquisition_rate))
    sweeps = []
    state = profile.states[0].label
    ei = 0
    si = 0
    scene = scene_timeline[0][1]
    for i in range(frame_count):
        t = i / cfg.acquisition_rate
        while ei < len(events) and events[ei][0] <= t:
            state = events[ei][1]
            ei += 1
        while si < len(scene_timeline) and scene_timeline[si][0] <= t:
            scene = scene_timeline[si][1]
            si += 1
        f0 = profile.frequency_of(state)
        sensor = CoilParams(
            inductance=sensor_inductance,
            resistance=sensor_resistance,
            capacitance=capacitance_for_resonance(sensor_inductance, f0),
        )
        pair = CoupledPair(reader, sensor, coupling_from_geometry(scene))
        sweeps.append(synthesize_sweep(cfg, pair, bridge, disturb, t=t))
    return sweeps


# ---------------------------------------------------------------------------
# serialization

CSV_HEADER = "frequency_hz,magnitude_db"


def sweep_to_csv(sweep: Sweep, path) -> None:
    """Write one sweep as CSV.  Floats use shortest round-trip formatting,
    so reading the file back reproduces the values bit-exactly."""
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for f, m in zip(sweep.frequencies, sweep.magnitudes_db):
            fh.write(f"{float(f)!r},{float(m)!r}\n")


def sweep_from_csv(path, timestamp: float = 0.0) -> Sweep:
    freqs = []
    mags = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise DataFormatError(
                f"{path}: line 1: expected header {CSV_HEADER!r}, got {header!r}"
            )
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise DataFormatError(f"{path}: line {lineno}: expected 2 fields, got {len(parts)}")
            try:
                freqs.append(float(parts[0]))
                mags.append(float(parts[1]))
            except ValueError as exc:
                raise DataFormatError(f"{path}: line {lineno}: {exc}") from None
    try:
        return Sweep(np.array(freqs), np.array(mags), timestamp=timestamp)
    except ValueError as exc:
        raise DataFormatError(f"{path}: {exc}") from None


def session_to_json(sweeps: Sequence[Sweep], path) -> None:
    """Write a sweep train as a JSON array with inline points."""
    records = [
        {
            "timestamp_s": float(s.timestamp),
            "frequencies_hz": [float(v) for v in s.frequencies],
            "magnitudes_db": [float(v) for v in s.magnitudes_db],
        }
        for s in sweeps
    ]
    with open(path, "w") as fh:
        json.dump(records, fh)
        fh.write("\n")


def session_from_json(path) -> list[Sweep]:
    """Read a session file: a JSON array of records carrying either
    inline points or a ``sweep_file`` reference relative to the session."""
    import os

    with open(path) as fh:
        try:
            records = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"{path}: {exc}") from None
    if not isinstance(records, list):
        raise DataFormatError(f"{path}: expected a JSON array of sweep records")
    sweeps = []
    for i, rec in enumerate(records):
        if not isinstance(rec, dict) or "timestamp_s" not in rec:
            raise DataFormatError(f"{path}: record {i}: missing 'timestamp_s'")
        t = float(rec["timestamp_s"])
        if "sweep_file" in rec:
            ref = os.path.join(os.path.dirname(os.fspath(path)), rec["sweep_file"])
            sweeps.append(sweep_from_csv(ref, timestamp=t))
        elif "frequencies_hz" in rec and "magnitudes_db" in rec:
            try:
                sweeps.append(
                    Sweep(
                        np.asarray(rec["frequencies_hz"], float),
                        np.asarray(rec["magnitudes_db"], float),
                        timestamp=t,
                    )
                )
            except ValueError as exc:
                raise DataFormatError(f"{path}: record {i}: {exc}") from None
        else:
            raise DataFormatError(
                f"{path}: record {i}: needs 'sweep_file' or inline points"
            )
    return sweeps
