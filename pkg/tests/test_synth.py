"""Frequency-sweep synthesis tests: grid construction, the static
baseline, peak placement, disturbances, sessions and serialization."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pitkit import defaults
from pitkit.circuit import CoilParams, CoupledPair, capacitance_for_resonance
from pitkit.detect import DetectorConfig, detect_peaks, fit_baseline
from pitkit.synth import (
    DataFormatError,
    DisturbanceModel,
    GeometryScenario,
    SweepConfig,
    coupling_from_geometry,
    scripted_session,
    session_from_json,
    session_to_json,
    sweep_from_csv,
    sweep_to_csv,
    synthesize_sweep,
)
from pitkit.trace import Sweep

QUIET = DisturbanceModel(noise_sigma=0.0)


def ring(f0, turns=8):
    inductance, resistance, _ = defaults.TURN_TABLE[turns]
    return CoilParams(
        inductance=inductance,
        resistance=resistance,
        capacitance=capacitance_for_resonance(inductance, f0),
    )


def default_pair(f0=29.0e6, coupling=1e-3):
    return CoupledPair(defaults.reader_coil(), ring(f0), coupling)


class TestSweepConfig:
    def test_default_grid(self):
        cfg = SweepConfig()
        f = cfg.frequencies()
        assert cfg.point_count == 51
        assert f[0] == 27e6
        assert f[-1] == 30e6
        assert np.all(np.diff(f) == pytest.approx(60e3))

    def test_rejects_non_integral_span(self):
        with pytest.raises(ValueError):
            SweepConfig(start_frequency=27e6, stop_frequency=30e6, step=70e3)

    def test_rejects_inverted_range(self):
        with pytest.raises(ValueError):
            SweepConfig(start_frequency=30e6, stop_frequency=27e6)


class TestSweepValidation:
    def test_rejects_decreasing_frequencies(self):
        with pytest.raises(ValueError):
            Sweep(np.array([2.0, 1.0, 3.0]), np.zeros(3))

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError):
            Sweep(np.array([1.0, 2.0]), np.zeros(3))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            Sweep(np.array([1.0, 2.0]), np.array([0.0, np.nan]))

    def test_arrays_are_read_only(self):
        sweep = Sweep(np.array([1.0, 2.0]), np.zeros(2))
        with pytest.raises(ValueError):
            sweep.magnitudes_db[0] = 1.0

    def test_nearest_index(self):
        sweep = Sweep(np.array([1.0, 2.0, 3.0]), np.zeros(3))
        assert sweep.nearest_index(2.4) == 1
        assert sweep.nearest_index(2.6) == 2


class TestStaticBaseline:
    def test_zero_coupling_zero_noise_is_pure_quadratic(self):
        """With no sensor the trace is exactly the static bridge offset,
        a quadratic in frequency."""
        cfg = SweepConfig()
        pair = default_pair(coupling=0.0)
        sweep = synthesize_sweep(cfg, pair, defaults.bridge_config(), QUIET)
        residual = sweep.magnitudes_db - fit_baseline(sweep, 2)
        assert np.max(np.abs(residual)) < 1e-9

    def test_zero_coupling_yields_no_peaks(self):
        cfg = SweepConfig()
        pair = default_pair(coupling=0.0)
        sweep = synthesize_sweep(cfg, pair, defaults.bridge_config(), QUIET)
        assert detect_peaks(sweep) == []

    def test_static_offset_grows_with_mismatch(self):
        cfg = SweepConfig()
        pair = default_pair(coupling=0.0)
        small = synthesize_sweep(cfg, pair, defaults.bridge_config(0.05), QUIET)
        large = synthesize_sweep(cfg, pair, defaults.bridge_config(0.15), QUIET)
        assert large.magnitudes_db.mean() > small.magnitudes_db.mean()


class TestPeakPlacement:
    def test_default_scenario_peak_height_and_location(self):
        """8-turn ring at 29 MHz, k = 1e-3: peak lands within one grid
        step of 29 MHz with height in the detectable 0.02-0.2 dB band."""
        cfg = SweepConfig()
        sweep = synthesize_sweep(cfg, default_pair(), defaults.bridge_config(), QUIET)
        peaks = detect_peaks(sweep)
        assert len(peaks) == 1
        assert abs(peaks[0].peak_frequency - 29.0e6) <= 60e3
        assert 0.02 <= peaks[0].peak_height <= 0.2

    @pytest.mark.parametrize("coupling", [1e-4, 3e-4, 1e-3, 3e-3])
    @pytest.mark.parametrize("f0", [27.6e6, 28.4e6, 29.3e6])
    def test_argmax_within_one_step_of_resonance(self, coupling, f0):
        cfg = SweepConfig()
        pair = default_pair(f0=f0, coupling=coupling)
        sweep = synthesize_sweep(cfg, pair, defaults.bridge_config(), QUIET)
        baseline = sweep.magnitudes_db - fit_baseline(sweep, 2)
        f_hat = sweep.frequencies[np.argmax(baseline)]
        assert abs(f_hat - f0) <= cfg.step

    def test_difference_from_reference_equals_reflected_signature(self):
        """The with-sensor minus without-sensor difference is independent
        of the static offset, by construction."""
        cfg = SweepConfig()
        bridge = defaults.bridge_config()
        with_sensor = synthesize_sweep(cfg, default_pair(), bridge, QUIET)
        without = synthesize_sweep(cfg, default_pair(coupling=0.0), bridge, QUIET)
        diff = with_sensor.magnitudes_db - without.magnitudes_db
        assert diff[np.argmax(diff)] > 0.02
        assert abs(diff[0]) < 2e-3 and abs(diff[-1]) < 2e-3


class TestDeterminismAndNoise:
    def test_same_seed_same_trace(self):
        cfg = SweepConfig(seed=42)
        a = synthesize_sweep(cfg, default_pair(), defaults.bridge_config(), t=1.2)
        b = synthesize_sweep(cfg, default_pair(), defaults.bridge_config(), t=1.2)
        assert np.array_equal(a.magnitudes_db, b.magnitudes_db)

    def test_different_timestamps_different_noise(self):
        cfg = SweepConfig(seed=42)
        a = synthesize_sweep(cfg, default_pair(), defaults.bridge_config(), t=0.0)
        b = synthesize_sweep(cfg, default_pair(), defaults.bridge_config(), t=0.2)
        assert not np.array_equal(a.magnitudes_db, b.magnitudes_db)

    def test_noise_sigma_zero_removes_randomness(self):
        cfg = SweepConfig(seed=1)
        a = synthesize_sweep(cfg, default_pair(), defaults.bridge_config(), QUIET, t=0.0)
        b = synthesize_sweep(cfg, default_pair(), defaults.bridge_config(), QUIET, t=0.4)
        assert np.array_equal(a.magnitudes_db, b.magnitudes_db)

    def test_noise_statistics(self):
        cfg = SweepConfig(seed=9)
        pair = default_pair(coupling=0.0)
        bridge = defaults.bridge_config()
        quiet = synthesize_sweep(cfg, pair, bridge, QUIET)
        noise = np.concatenate(
            [
                synthesize_sweep(cfg, pair, bridge, t=i / 5.0).magnitudes_db
                - quiet.magnitudes_db
                for i in range(40)
            ]
        )
        assert abs(noise.mean()) < 3 * 0.002 / np.sqrt(noise.size)
        assert noise.std() == pytest.approx(0.002, rel=0.1)

    def test_amplitude_drift_is_smooth_and_bounded(self):
        cfg = SweepConfig(seed=3)
        disturb = DisturbanceModel(noise_sigma=0.0, amplitude_drift=0.01)
        pair = default_pair(coupling=0.0)
        a = synthesize_sweep(cfg, pair, defaults.bridge_config(), disturb, t=0.0)
        b = synthesize_sweep(cfg, pair, defaults.bridge_config(), disturb, t=2.0)
        assert not np.array_equal(a.magnitudes_db, b.magnitudes_db)
        # drift stays a low-order polynomial: the detector never sees it
        assert detect_peaks(a) == [] and detect_peaks(b) == []

    def test_frequency_drift_moves_the_peak(self):
        cfg = SweepConfig(seed=3)
        disturb = DisturbanceModel(noise_sigma=0.0, frequency_drift=50e3)
        bridge = defaults.bridge_config()
        positions = set()
        for t in np.arange(0.0, 10.0, 1.0):
            sweep = synthesize_sweep(cfg, default_pair(), bridge, disturb, t=t)
            positions.add(round(detect_peaks(sweep)[0].peak_frequency, -3))
        assert len(positions) > 1


class TestGeometry:
    def test_reference_anchor(self):
        scene = GeometryScenario(distance=0.13)
        assert coupling_from_geometry(scene) == pytest.approx(1e-3, rel=1e-12)

    def test_inverse_cube_falloff(self):
        near = coupling_from_geometry(GeometryScenario(distance=0.13))
        far = coupling_from_geometry(GeometryScenario(distance=0.26))
        assert far == pytest.approx(near / 8.0, rel=1e-9)

    def test_bend_angle_cosine(self):
        flat = coupling_from_geometry(GeometryScenario(bend_angle=0.0))
        bent = coupling_from_geometry(GeometryScenario(bend_angle=60.0))
        assert bent == pytest.approx(flat / 2.0, rel=1e-9)

    @given(distance=st.floats(0.001, 10.0), angle=st.floats(0.0, 90.0))
    def test_coupling_always_physical(self, distance, angle):
        scene = GeometryScenario(distance=distance, bend_angle=angle)
        k = coupling_from_geometry(scene)
        assert 0.0 <= k < 1.0

    def test_validation(self):
        with pytest.raises(ValueError):
            GeometryScenario(distance=-0.1)
        with pytest.raises(ValueError):
            GeometryScenario(bend_angle=120.0)


class TestScriptedSession:
    def session(self, events, duration, profile_name="slide", **kwargs):
        from pitkit.decode import PROFILE_PRESETS

        profile = PROFILE_PRESETS[profile_name]
        inductance, resistance, n_caps = defaults.TURN_TABLE[8]
        return scripted_session(
            events,
            profile,
            SweepConfig(seed=0),
            reader=defaults.reader_coil(),
            bridge=defaults.bridge_config(),
            sensor_inductance=inductance,
            sensor_resistance=resistance + n_caps * defaults.CAPACITOR_ESR_OHM,
            duration=duration,
            disturb=kwargs.pop("disturb", QUIET),
            **kwargs,
        )

    def test_empty_events_constant_idle_train(self):
        sweeps = self.session([], duration=2.0)
        assert len(sweeps) == 10
        for s in sweeps[1:]:
            assert np.array_equal(s.magnitudes_db, sweeps[0].magnitudes_db)

    def test_slide_walk_peak_ladder(self):
        """idle -> 2 mm left -> 4 mm left walks the peak 28.7 -> 28.4 ->
        28.1 MHz."""
        events = [(1.0, "left-2mm"), (2.0, "left-4mm")]
        sweeps = self.session(events, duration=3.0)
        expected = [28.7e6, 28.4e6, 28.1e6]
        for second, f0 in zip(range(3), expected):
            sweep = sweeps[second * 5 + 2]
            peak = detect_peaks(sweep)[0]
            assert abs(peak.peak_frequency - f0) <= 60e3

    def test_unknown_label_raises(self):
        with pytest.raises(ValueError, match="unknown state"):
            self.session([(1.0, "no-such-state")], duration=2.0)

    def test_scene_timeline_changes_coupling(self):
        near = GeometryScenario(distance=0.10)
        far = GeometryScenario(distance=0.16)
        sweeps = self.session(
            [], duration=4.0, scene_timeline=[(0.0, near), (2.0, far)]
        )
        h_near = detect_peaks(sweeps[2])[0].peak_height
        peaks_far = detect_peaks(sweeps[-1])
        h_far = peaks_far[0].peak_height if peaks_far else 0.0
        assert h_near > h_far

    def test_timestamps_follow_acquisition_rate(self):
        sweeps = self.session([], duration=2.0)
        times = [s.timestamp for s in sweeps]
        assert times == pytest.approx(np.arange(10) / 5.0)


class TestSerialization:
    def test_csv_round_trip_bit_exact(self, tmp_path):
        cfg = SweepConfig(seed=5)
        sweep = synthesize_sweep(cfg, default_pair(), defaults.bridge_config(), t=0.4)
        path = tmp_path / "sweep.csv"
        sweep_to_csv(sweep, path)
        back = sweep_from_csv(path, timestamp=0.4)
        assert np.array_equal(back.frequencies, sweep.frequencies)
        assert np.array_equal(back.magnitudes_db, sweep.magnitudes_db)

    def test_csv_header(self, tmp_path):
        sweep = Sweep(np.array([1.0, 2.0]), np.array([-55.0, -54.0]))
        path = tmp_path / "s.csv"
        sweep_to_csv(sweep, path)
        assert path.read_text().splitlines()[0] == "frequency_hz,magnitude_db"

    def test_bad_header_raises(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("freq,mag\n1.0,2.0\n")
        with pytest.raises(DataFormatError):
            sweep_from_csv(path)

    def test_bad_field_count_raises(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("frequency_hz,magnitude_db\n1.0,2.0,3.0\n")
        with pytest.raises(DataFormatError):
            sweep_from_csv(path)

    def test_session_json_round_trip(self, tmp_path):
        cfg = SweepConfig(seed=2)
        bridge = defaults.bridge_config()
        sweeps = [
            synthesize_sweep(cfg, default_pair(), bridge, t=i / 5.0) for i in range(4)
        ]
        path = tmp_path / "session.json"
        session_to_json(sweeps, path)
        back = session_from_json(path)
        assert len(back) == 4
        for a, b in zip(sweeps, back):
            assert a.timestamp == b.timestamp
            assert np.array_equal(a.magnitudes_db, b.magnitudes_db)

    def test_session_json_rejects_garbage(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"not": "a session"}\n')
        with pytest.raises(DataFormatError):
            session_from_json(path)
