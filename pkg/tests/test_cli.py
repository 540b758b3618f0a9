"""Command-line interface: each subcommand end to end, in process via
``main`` so exit codes and output files are checked directly."""

import json

import pytest

from pitkit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestDesignCoil:
    def test_stdout_json(self, capsys):
        code, out, _ = run(
            capsys,
            "design-coil",
            "--inductance", "3.7e-6",
            "--frequency", "26.93e6",
            "--segments", "18",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["segment_count"] == 18
        assert doc["per_segment_capacitance_f"] == pytest.approx(170e-12, rel=0.01)
        assert doc["achieved_frequency_hz"] == pytest.approx(26.93e6, rel=1e-6)

    def test_output_file_and_e12(self, capsys, tmp_path):
        out_path = tmp_path / "design.json"
        code, out, _ = run(
            capsys,
            "design-coil",
            "--inductance", "3.7e-6",
            "--frequency", "26.93e6",
            "--segments", "18",
            "--e12",
            "--output", str(out_path),
        )
        assert code == 0 and out == ""
        doc = json.loads(out_path.read_text())
        assert doc["per_segment_capacitance_f"] == pytest.approx(180e-12)

    def test_wire_length_violation_is_error(self, capsys):
        code, _, err = run(
            capsys,
            "design-coil",
            "--inductance", "3.7e-6",
            "--frequency", "26.93e6",
            "--segments", "2",
            "--wire-length", "10.0",
        )
        assert code == 1
        assert "lambda/20" in err


class TestSynthDetect:
    def test_sweep_chain(self, capsys, tmp_path):
        sweep_path = tmp_path / "sweep.csv"
        code, _, _ = run(
            capsys,
            "synth",
            "--output", str(sweep_path),
            "--f0", "29e6",
            "--coupling", "1e-3",
            "--seed", "3",
        )
        assert code == 0
        code, out, _ = run(capsys, "detect", str(sweep_path))
        assert code == 0
        peaks = [json.loads(line) for line in out.splitlines()]
        assert len(peaks) == 1
        assert abs(peaks[0]["peak_frequency_hz"] - 29e6) <= 60e3
        assert peaks[0]["snr"] > 5.0

    def test_synth_deterministic(self, capsys, tmp_path):
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for p in paths:
            assert run(capsys, "synth", "--output", str(p), "--seed", "11")[0] == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_detect_missing_file(self, capsys):
        code, _, err = run(capsys, "detect", "/no/such/file.csv")
        assert code == 1
        assert "error" in err

    def test_config_env_override(self, capsys, tmp_path, monkeypatch):
        cfg_path = tmp_path / "grid.json"
        cfg_path.write_text(
            json.dumps(
                {
                    "start_frequency_hz": 27e6,
                    "stop_frequency_hz": 30e6,
                    "step_hz": 30e3,
                }
            )
        )
        monkeypatch.setenv("PITKIT_CONFIG", str(cfg_path))
        out_path = tmp_path / "fine.csv"
        assert run(capsys, "synth", "--output", str(out_path))[0] == 0
        assert len(out_path.read_text().splitlines()) == 1 + 101

    def test_config_env_bad_json(self, capsys, tmp_path, monkeypatch):
        cfg_path = tmp_path / "grid.json"
        cfg_path.write_text("{not json")
        monkeypatch.setenv("PITKIT_CONFIG", str(cfg_path))
        code, _, err = run(capsys, "synth", "--output", str(tmp_path / "x.csv"))
        assert code == 1 and "error" in err


class TestSynthDecode:
    def test_session_chain(self, capsys, tmp_path):
        events_path = tmp_path / "events.json"
        events_path.write_text(json.dumps([[2.0, "off"], [4.0, "on"]]))
        session_path = tmp_path / "session.json"
        code, _, _ = run(
            capsys,
            "synth",
            "--output", str(session_path),
            "--events", str(events_path),
            "--profile", "press",
            "--duration", "6.0",
            "--seed", "0",
        )
        assert code == 0
        code, out, _ = run(
            capsys, "decode", "--session", str(session_path), "--profile", "press"
        )
        assert code == 0
        names = [json.loads(line)["event"] for line in out.splitlines()]
        assert names == ["press-down", "press-up"]

    def test_decode_with_profile_file(self, capsys, tmp_path):
        from pitkit.decode import PROFILE_PRESETS

        profile_path = tmp_path / "press.json"
        PROFILE_PRESETS["press"].save(profile_path)
        events_path = tmp_path / "events.json"
        events_path.write_text(json.dumps([[1.0, "off"], [3.0, "on"]]))
        session_path = tmp_path / "session.json"
        run(
            capsys,
            "synth",
            "--output", str(session_path),
            "--events", str(events_path),
            "--profile", str(profile_path),
            "--duration", "5.0",
        )
        out_path = tmp_path / "events.jsonl"
        code, _, _ = run(
            capsys,
            "decode",
            "--session", str(session_path),
            "--profile", str(profile_path),
            "--output", str(out_path),
        )
        assert code == 0
        names = [
            json.loads(line)["event"]
            for line in out_path.read_text().splitlines()
        ]
        assert names == ["press-down", "press-up"]

    def test_unknown_profile_name(self, capsys, tmp_path):
        session_path = tmp_path / "session.json"
        session_path.write_text("[]")
        code, _, err = run(
            capsys, "decode", "--session", str(session_path), "--profile", "dial"
        )
        assert code == 1 and "error" in err


class TestEvaluate:
    def test_turns_experiment(self, capsys, tmp_path):
        out_path = tmp_path / "turns.csv"
        code, out, _ = run(
            capsys,
            "evaluate",
            "--experiment", "snr-vs-turns",
            "--trials", "1",
            "--seed", "0",
            "--output", str(out_path),
        )
        assert code == 0
        summary = json.loads(out)
        assert summary["summary"]["monotone_3_to_7"] is True
        assert out_path.exists()
        assert (tmp_path / "turns.csv.summary.json").exists()

    def test_unknown_experiment_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["evaluate", "--experiment", "nope", "--output", "x.csv"])
        assert exc.value.code == 2

    def test_missing_subcommand_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2
