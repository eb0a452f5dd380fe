"""CLI contract tests: commands, outputs, exit codes, determinism."""

import json
import subprocess
import sys

import numpy as np
import pytest

from besselops.cli import main
from besselops.fixtures import bundled_ball_atoms, bundled_line_atoms
from besselops.grids import gridfunction_to_csv


@pytest.fixture()
def ball_atom_csv(tmp_path):
    label, atom, expected = bundled_ball_atoms()[0]
    path = tmp_path / "atom.csv"
    gridfunction_to_csv(atom.f, path)
    ball = ",".join(map(str, atom.ball.center)) + ";" + str(atom.ball.radius)
    return path, ball, expected


class TestExitCodes:
    def test_missing_config_is_2(self, capsys):
        rc = main(["campaign", "run", "--config", "/no/such/file.json"])
        assert rc == 2

    def test_unknown_inequality_id_is_2(self):
        rc = main(["campaign", "run", "--config", "thm9_9"])
        assert rc == 2

    def test_kernel_eval_ok(self, capsys):
        rc = main(["kernel", "eval", "--nu", "0.5", "--t", "1.0", "--x", "1.0", "--y", "2.0"])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["value"] == pytest.approx(0.18996, abs=1e-5)

    def test_atom_check_valid_and_invalid(self, tmp_path, capsys):
        for (label, atom, expected) in bundled_ball_atoms():
            path = tmp_path / f"{label}.csv"
            gridfunction_to_csv(atom.f, path)
            ball = ",".join(map(str, atom.ball.center)) + ";" + str(atom.ball.radius)
            rc = main(["atoms", "check", "--input", str(path), "--ball", ball, "--p", "1.0"])
            capsys.readouterr()
            assert rc == (0 if expected else 1), label

    def test_f_atom_check(self, tmp_path, capsys):
        for label, f, expected in bundled_line_atoms():
            path = tmp_path / f"{label}.csv"
            gridfunction_to_csv(f, path)
            rc = main(["atoms", "check", "--input", str(path), "--f-atom"])
            capsys.readouterr()
            assert rc == (0 if expected else 1), label


class TestCampaignRun:
    def test_bundled_id_and_report_files(self, tmp_path, capsys):
        rc = main(
            [
                "--out",
                str(tmp_path),
                "--seed",
                "0",
                "campaign",
                "run",
                "--config",
                "thm2_1",
            ]
        )
        assert rc == 0
        report = json.loads((tmp_path / "thm2_1.report.json").read_text())
        assert report["verdict"] == "stable"
        meta = json.loads((tmp_path / "thm2_1.meta.json").read_text())
        assert "runtime_seconds" in meta
        assert "runtime" not in json.dumps(report)

    def test_byte_identical_reruns(self, tmp_path, capsys):
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        for out in (out1, out2):
            rc = main(["--out", str(out), "campaign", "run", "--config", "prop2_7"])
            assert rc == 0
        b1 = (out1 / "prop2_7.report.json").read_bytes()
        b2 = (out2 / "prop2_7.report.json").read_bytes()
        assert b1 == b2

    def test_csv_sample_dump(self, tmp_path, capsys):
        rc = main(
            [
                "--out",
                str(tmp_path),
                "--format",
                "csv",
                "campaign",
                "run",
                "--config",
                "thm2_1",
            ]
        )
        assert rc == 0
        lines = (tmp_path / "thm2_1.samples.csv").read_text().splitlines()
        assert lines[0] == "t,x1,y1,lhs,rhs,ratio"
        assert len(lines) == 1 + 10000 * 4


class TestMiscCommands:
    def test_kernel_verify(self, capsys):
        rc = main(["kernel", "verify"])
        out = json.loads(capsys.readouterr().out)
        assert rc == 0 and out["verdict"] == "valid"

    def test_cover_build(self, capsys):
        rc = main(["cover", "build", "--box", "0.5", "8.0", "--dim", "1", "--nodes", "512"])
        out = json.loads(capsys.readouterr().out)
        assert rc == 0
        assert out["verdict"] == "valid"
        assert out["max_overlap"] >= 1

    def test_bmo_norm_command(self, tmp_path, capsys):
        from besselops.grids import GridFunction, default_grid

        g = default_grid(1, nodes_per_axis=256)
        f = GridFunction(g, np.log(g.axes[0].nodes))
        path = tmp_path / "f.csv"
        gridfunction_to_csv(f, path)
        rc = main(["bmo", "norm", "--input", str(path), "--s", "0.0", "--degree", "1"])
        out = json.loads(capsys.readouterr().out)
        assert rc == 0 and out["value"] > 0

    def test_riesz_kernel_command(self, capsys):
        rc = main(
            [
                "riesz", "kernel", "--nu", "0.5", "--k", "1", "--x", "1.0", "--y", "3.0",
                "--plan-t-max", "1e8",
            ]
        )
        out = json.loads(capsys.readouterr().out)
        assert rc == 0
        import math

        K = math.log(4.0 / 2.0) / math.pi
        oracle = (1.0 / 4.0 - 1.0 / (-2.0)) / math.pi - K / 1.0
        assert out["value"] == pytest.approx(oracle, rel=1e-8)

    def test_console_entrypoint(self):
        proc = subprocess.run(
            [sys.executable, "-m", "besselops.cli", "--help"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "campaign" in proc.stdout
