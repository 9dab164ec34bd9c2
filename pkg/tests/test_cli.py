"""Command-line surface: outputs, exit codes, determinism."""

import json

import numpy as np
import pytest

from cuq.cli import main
from cuq.fit import save_dataset, synthesize_dataset


def run(argv):
    try:
        return main(argv)
    except SystemExit as exc:  # argparse flag errors
        return exc.code


class TestSimulate:
    def test_writes_trajectory_csv(self, tmp_path):
        assert run(["--output-dir", str(tmp_path), "simulate",
                    "--r", "0.85", "--t-max", "2P"]) == 0
        lines = (tmp_path / "trajectory.csv").read_text().splitlines()
        assert lines[0] == "tau,b1,b2,b3,b_mag,b_dot_gamma,b_dot_exg"
        last = [float(x) for x in lines[-1].split(",")]
        P = 2 * np.pi * 0.85 / np.sqrt(1 - 0.85 ** 2)
        assert last[0] == pytest.approx(2 * P, rel=1e-12)
        assert last[4] == pytest.approx(1.0, abs=1e-7)  # pure orbit

    def test_named_and_vector_b0(self, tmp_path):
        assert run(["--output-dir", str(tmp_path), "simulate", "--r", "0.5",
                    "--b0", "0.1,0.2,0.3", "--t-max", "1.0"]) == 0
        assert run(["--output-dir", str(tmp_path), "simulate", "--r", "0.5",
                    "--b0", "mixed", "--t-max", "1.0"]) == 0

    def test_period_syntax_needs_oscillation(self, tmp_path):
        assert run(["--output-dir", str(tmp_path), "simulate",
                    "--r", "1.5", "--t-max", "2P"]) == 2

    def test_deterministic_bytes(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for d in (a, b):
            assert run(["--output-dir", str(d), "simulate", "--r", "0.7",
                        "--t-max", "1P"]) == 0
        assert (a / "trajectory.csv").read_bytes() == \
            (b / "trajectory.csv").read_bytes()


class TestSweep:
    def test_bmax_from_mixed_state(self, tmp_path):
        assert run(["--output-dir", str(tmp_path), "sweep-bmax",
                    "--r-grid", "0.3,0.85", "--b0-grid", "0"]) == 0
        rows = (tmp_path / "bmax.csv").read_text().splitlines()[1:]
        for row in rows:
            r, b0, bmax = (float(x) for x in row.split(","))
            assert bmax == pytest.approx(2 * r / (1 + r * r), abs=1e-6)


class TestFourier:
    def test_json_report(self, tmp_path):
        assert run(["--output-dir", str(tmp_path), "--format", "json",
                    "fourier", "--r", "0.85", "--n-max", "6"]) == 0
        rep = json.loads((tmp_path / "spectrum.json").read_text())
        assert rep["max_deviation"] < 1e-8
        assert len(rep["coefficients"]) == 6

    def test_rejects_overdamped(self, tmp_path):
        assert run(["--output-dir", str(tmp_path), "fourier",
                    "--r", "1.5"]) == 2


class TestConvert:
    def test_forward(self, capsys):
        assert run(["convert", "--from-bloch", "0.945", "179.6322",
                    "0.00264652"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["observables"]["delta_E"] == pytest.approx(0.005293,
                                                              abs=2e-6)
        assert out["damping"] == "oscillatory"

    def test_inverse_roundtrip(self, capsys):
        assert run(["convert", "--from-observables", "0.005293",
                    "-0.0100037", "0.9968006"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["bloch"]["r"] == pytest.approx(0.945, abs=1e-4)


class TestFit:
    def test_end_to_end(self, tmp_path, capsys):
        ds = synthesize_dataset(r=0.85, E_mag=1.0, n_points=120,
                                t_max=3 * np.pi / np.sqrt(1 - 0.85 ** 2),
                                noise_sigma=0.02, seed=1)
        data = tmp_path / "data.csv"
        save_dataset(ds, data)
        assert run(["--output-dir", str(tmp_path), "fit",
                    "--data", str(data), "--omega", repr(float(ds.omega)),
                    "--n-harmonics", "3"]) == 0
        rep = json.loads((tmp_path / "fit.json").read_text())
        assert rep["weighted_r"] == pytest.approx(0.85, abs=0.05)
        assert (tmp_path / "residuals.csv").exists()

    def test_missing_file_is_data_error(self, tmp_path):
        assert run(["--output-dir", str(tmp_path), "fit",
                    "--data", str(tmp_path / "nope.csv"),
                    "--omega", "1.0"]) == 3

    def test_malformed_file_is_data_error(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("t_ps,asymmetry,sigma\n0.0,x,0.1\n")
        assert run(["--output-dir", str(tmp_path), "fit",
                    "--data", str(bad), "--omega", "1.0"]) == 3

    def test_rank_deficiency_is_numerical_error(self, tmp_path):
        ds = synthesize_dataset(r=0.5, E_mag=1.0, n_points=12, t_max=1e-4,
                                noise_sigma=0.0, seed=0)
        data = tmp_path / "flat.csv"
        save_dataset(ds, data)
        assert run(["--output-dir", str(tmp_path), "fit",
                    "--data", str(data), "--omega", repr(float(ds.omega)),
                    "--n-harmonics", "4"]) == 4


class TestCatalogue:
    def test_csv_and_json(self, tmp_path):
        assert run(["--output-dir", str(tmp_path), "catalogue"]) == 0
        assert run(["--output-dir", str(tmp_path), "--format", "json",
                    "catalogue"]) == 0
        rows = json.loads((tmp_path / "catalogue.json").read_text())
        assert [r["system"] for r in rows] == ["K0", "D0", "Bd0", "Bs0"]
        header = (tmp_path / "catalogue.csv").read_text().splitlines()[0]
        assert header.startswith("system,delta_E")


class TestFlagErrors:
    def test_unknown_command(self):
        assert run(["frobnicate"]) == 2

    def test_missing_required_flag(self):
        assert run(["simulate"]) == 2
