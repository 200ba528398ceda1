import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from deltoid_lab.cli import load_config_file, main
from deltoid_lab.hypergroup import MarkovMatrix
from deltoid_lab.models import ThetaPair
from deltoid_lab.report import (
    IdentityEntry,
    VerificationReport,
    deltoid_svg,
    emit_report,
    markov_matrices_from_csv,
    markov_matrices_to_csv,
    theta_coverage_svg,
)

GOLDEN = Path(__file__).parent / "golden"


class TestReport:
    def test_entry_status_validated(self):
        with pytest.raises(ValueError):
            IdentityEntry("x", "y", "unknown-status")

    def test_duplicate_registration_rejected(self):
        report = VerificationReport(config={})
        report.add("a", "anchor", "proven-exact")
        with pytest.raises(ValueError):
            report.add("a", "anchor", "proven-exact")

    def test_exit_code_logic(self):
        report = VerificationReport(config={})
        report.add("a", "x", "numeric-pass")
        assert report.exit_code() == 0
        report.add("b", "y", "numeric-fail")
        assert report.exit_code() == 1

    def test_emission_deterministic(self, tmp_path):
        report = VerificationReport(config={"seed": 1})
        report.add("a", "x", "proven-exact", "details")
        p1, p2 = tmp_path / "r1.json", tmp_path / "r2.json"
        emit_report(report, str(p1))
        emit_report(report, str(p2))
        assert p1.read_bytes() == p2.read_bytes()


class TestMarkovCsv:
    def test_round_trip(self):
        m = MarkovMatrix(
            2, 1, ThetaPair(1.0, 2.0), 0.5, -0.25, 0.25, 0.5,
            {"alpha": ("exact", 0.0), "beta": ("exact", 0.0),
             "gamma": ("exact", 0.0), "delta": ("exact", 0.0)},
        )
        text = markov_matrices_to_csv([m])
        (row,) = markov_matrices_from_csv(text)
        assert row["n"] == 2 and row["k"] == 1
        assert row["alpha"] == 0.5 and row["beta"] == -0.25
        assert row["theta"] == (1.0, 2.0)
        assert row["provenance"] == "exact"


class TestSvg:
    def test_deltoid_curve_content(self):
        text = deltoid_svg(samples=720)
        assert text.startswith("<?xml")
        # one path with 720 sampled points, three cusp markers
        assert text.count("circle") == 3
        path = next(line for line in text.splitlines() if line.startswith("<path"))
        assert path.count("L") == 719  # M + 719 L commands

    def test_cusp_positions_marked(self):
        text = deltoid_svg(width=200, height=200)
        # cusp at Z = 1 maps to pixel x = (1 + 1.15)/2.3 * 200
        expected_x = (1.0 + 1.15) / 2.3 * 200
        assert f'cx="{expected_x:.3f}"' in text

    def test_coverage_svg(self):
        text = theta_coverage_svg(theta_per_axis=20)
        assert text.count("circle") == 400

    def test_deterministic(self):
        assert deltoid_svg() == deltoid_svg()


class TestConfigFile:
    def test_parse(self, tmp_path):
        cfg = tmp_path / "verify.cfg"
        cfg.write_text("seed = 7\n# comment\ngrid_n = 32  # inline\n")
        assert load_config_file(str(cfg)) == {"seed": "7", "grid_n": "32"}

    def test_bad_line(self, tmp_path):
        from deltoid_lab.cli import UsageError

        cfg = tmp_path / "verify.cfg"
        cfg.write_text("this is not a config\n")
        with pytest.raises(UsageError):
            load_config_file(str(cfg))


class TestCli:
    def test_usage_error_exit_code(self, capsys):
        assert main(["eigen", "--lambda", "zero/0"]) == 3
        assert "usage error" in capsys.readouterr().err

    def test_eigen_matches_golden(self, tmp_path, capsys):
        out = tmp_path / "eigen.json"
        assert main(["eigen", "--lambda", "7/3", "--degree-max", "4", "--out", str(out)]) == 0
        got = json.loads(out.read_text())
        expected = json.loads((GOLDEN / "eigen_degree4_lambda_7_3.json").read_text())
        assert got == expected

    def test_gram_cli(self, tmp_path):
        out = tmp_path / "gram.json"
        assert main([
            "gram", "--lambda", "4", "--degree-max", "2", "--grid", "32",
            "--out", str(out),
        ]) == 0
        doc = json.loads(out.read_text())
        assert doc["labels"][0] == "P10"
        assert float(doc["max_offdiagonal"]) < 1e-8

    def test_sample_cli_csv(self, tmp_path):
        out = tmp_path / "torus.csv"
        assert main(["sample", "torus", "--n", "50", "--seed", "3", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "t1,t2"
        assert len(lines) == 51

    def test_sample_cli_npz(self, tmp_path):
        out = tmp_path / "omega1.npz"
        assert main([
            "sample", "omega1", "--lambda", "11/2", "--n", "100", "--seed", "5",
            "--format", "npz", "--out", str(out),
        ]) == 0
        data = np.load(out)
        assert set(data.files) == {"re1", "im1", "re2", "im2", "re3", "im3"}
        assert len(data["re1"]) == 100

    def test_markov_cli(self, tmp_path):
        csv_out = tmp_path / "markov.csv"
        verdict_out = tmp_path / "verdict.json"
        code = main([
            "markov", "--lambda", "11/2", "--n", "1", "--k", "0",
            "--theta-grid", "2", "--samples", "20000", "--seed", "9",
            "--out", str(csv_out), "--verdict", str(verdict_out),
        ])
        assert code == 0
        rows = markov_matrices_from_csv(csv_out.read_text())
        exact = [r for r in rows if r["provenance"] == "exact"]
        estimated = [r for r in rows if r["provenance"] == "estimated"]
        assert len(exact) == len(estimated) > 0
        verdict = json.loads(verdict_out.read_text())
        assert verdict["pass"] is True

    def test_plot_eigen(self, tmp_path):
        out = tmp_path / "eigen.svg"
        assert main(["plot", "eigen", "--lambda", "4", "--n", "2", "--k", "0",
                     "--out", str(out)]) == 0
        assert out.read_text().startswith("<?xml")


class TestVerifyCli:
    FAST = [
        "--torus-samples", "20000", "--su3-samples", "20000",
        "--omega1-samples", "5000", "--eigen-degree-max", "3",
    ]

    def test_negative_control_exits_two(self, tmp_path, capsys):
        code = main(["verify", "--negative-control", *self.FAST])
        captured = capsys.readouterr()
        assert code == 2
        assert "EXACT IDENTITY FAILURE" in captured.out
        assert "deltoid.metric_determinant" in captured.out

    def test_config_file_roundtrip(self, tmp_path):
        cfg = tmp_path / "v.cfg"
        cfg.write_text(
            "torus_samples = 20000\nsu3_samples = 20000\n"
            "omega1_samples = 5000\neigen_degree_max = 3\n"
            "coverage_theta_n = 300\ncusp_grid_n = 200\n"
        )
        out = tmp_path / "report.json"
        code = main(["verify", "--config", str(cfg), "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["summary"]["discrepancy-noted"] == 3
        assert doc["summary"]["numeric-fail"] == 0
        # The report embeds the serialized reference models.
        assert set(doc["models"]) == {"deltoid", "sixdim", "g2"}
        assert doc["models"]["deltoid"]["drift"]["Z"] == "-7/3*Z"

    def test_unknown_config_key(self, tmp_path):
        cfg = tmp_path / "v.cfg"
        cfg.write_text("bogus_key = 3\n")
        assert main(["verify", "--config", str(cfg)]) == 3


def test_manifest_matches_docs():
    from deltoid_lab.verify import IDENTITY_MANIFEST

    docs = json.loads((Path(__file__).parent.parent / "docs" / "identities.json").read_text())
    doc_pairs = {(e["name"], e["anchor"]) for e in docs["identities"]}
    assert doc_pairs == set(IDENTITY_MANIFEST)
