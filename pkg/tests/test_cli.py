"""Config parsing and the command-line entry points."""

import csv
import json

import numpy as np
import pytest

from conswave import cli
from conswave.errors import ConfigurationError

FAST_GAUSSIAN = [
    "initial.amplitude=0.3",
    "initial.rho_amplitude=0.1",
    "grid.n=1024",
    "time.t_end=0.1",
    "time.dt=0.005",
    "time.output_every=0.05",
    "outputs.x_samples=201",
]


class TestConfig:
    def test_defaults_round_trip(self):
        cfg = cli.parse_config()
        assert cfg == cli.DEFAULTS

    def test_file_and_overrides(self, tmp_path):
        path = tmp_path / "scenario.cfg"
        path.write_text("grid.n = 512\ntime.dt = 0.002  # comment\n")
        cfg = cli.parse_config(path, ["grid.n=128"])
        assert cfg["grid.n"] == 128          # override wins over file
        assert cfg["time.dt"] == 0.002
        assert cfg["model.preset"] == "camassa_holm"

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("grid.m = 12\n")
        with pytest.raises(ConfigurationError):
            cli.parse_config(path)

    def test_type_coercion(self):
        cfg = cli.parse_config(None, ["outputs.write_frames=no", "grid.n=64"])
        assert cfg["outputs.write_frames"] is False
        assert isinstance(cfg["grid.n"], int)

    def test_bad_boolean_rejected(self):
        with pytest.raises(ConfigurationError):
            cli.parse_config(None, ["outputs.write_frames=maybe"])

    def test_window_must_clear_support(self):
        cfg = cli.parse_config(None, ["grid.x_min=-3", "grid.x_max=3"])
        initial = cli.build_initial(cfg)
        with pytest.raises(ConfigurationError, match="padding"):
            cli.validate_config(cfg, initial, 1.0)

    def test_output_times_cover_span(self):
        cfg = cli.parse_config(None, ["time.t_end=0.25", "time.output_every=0.1"])
        times = cli.output_times(cfg)
        assert times[0] == 0.0 and times[-1] == 0.25


class TestCommands:
    def test_run_writes_artifacts(self, tmp_path):
        out = tmp_path / "out"
        rc = cli.main(["run", "--out", str(out)]
                      + [f"--override={o}" for o in FAST_GAUSSIAN])
        assert rc == 0
        meta = json.loads((out / "metadata.json").read_text())
        assert meta["E0"] == pytest.approx(
            0.09 * np.sqrt(2 * np.pi) + 0.01 * np.sqrt(np.pi / 2), rel=1e-6)
        with open(out / "diagnostics.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0][0] == "t"
        assert len(rows) == 4  # header + t in {0, 0.05, 0.1}
        frame = np.genfromtxt(out / "frame_0000.csv", delimiter=",", names=True)
        assert frame.shape[0] == 201
        assert np.max(np.abs(frame["u"])) == pytest.approx(0.3, abs=1e-3)

    def test_verify_passes_on_smooth_scenario(self, capsys):
        rc = cli.main(["verify"] + [f"--override={o}" for o in FAST_GAUSSIAN])
        captured = capsys.readouterr().out
        assert rc == 0
        assert "[FAIL]" not in captured
        assert captured.count("[PASS]") >= 5

    def test_compare_reports_small_gap(self, capsys):
        rc = cli.main(["compare"] + [f"--override={o}" for o in FAST_GAUSSIAN])
        assert rc == 0
        assert "max over times" in capsys.readouterr().out

    def test_compare_survives_oracle_blowup(self, capsys):
        overrides = [
            "initial.kind=peakon_antipeakon",
            "grid.x_min=-30", "grid.x_max=30",
            "grid.n=1024", "time.t_end=2.0", "time.dt=0.002",
            "time.output_every=0.5",
            # a tight slope guard makes the Eulerian reference give up early
            "numerics.oracle_blowup_guard=0.5",
        ]
        rc = cli.main(["compare"] + [f"--override={o}" for o in overrides])
        out = capsys.readouterr().out
        assert rc == 0
        assert "oracle stopped" in out

    def test_convergence_table(self, capsys):
        overrides = [
            "initial.amplitude=0.3", "grid.n=128",
            "time.t_end=0.05", "time.dt=0.01", "time.output_every=0",
        ]
        rc = cli.main(["convergence", "--levels", "2"]
                      + [f"--override={o}" for o in overrides])
        out = capsys.readouterr().out
        assert rc == 0
        assert "reference" in out

    def test_presets_lists_models(self, capsys):
        assert cli.main(["presets"]) == 0
        out = capsys.readouterr().out
        assert "camassa_holm" in out and "peakon_antipeakon" in out

    def test_config_error_exit_code(self, capsys):
        rc = cli.main(["run", "--override", "grid.n=4"])
        assert rc == 2
        assert "error:" in capsys.readouterr().err
