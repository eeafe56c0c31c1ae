"""Tests for config parsing and the CLI subcommands."""

import csv
import json
import math
import subprocess
import sys

import pytest

from qtelegraph.cli import (
    ConfigError,
    main,
    parse_config,
    resolve_config,
    run_command,
)
from qtelegraph.protocol import Detector, ModelMode


def read_csv_body(path):
    lines = [line for line in path.read_text().splitlines() if not line.startswith("#")]
    return list(csv.reader(lines))


def comment_header(path):
    return [line for line in path.read_text().splitlines() if line.startswith("#")]


class TestParseConfig:
    def test_empty_document_gives_defaults(self):
        cfg = parse_config("")
        assert cfg.seed == 0
        assert cfg.device.kappa == pytest.approx(math.pi)
        assert cfg.device.envelope_width == 2.0
        assert cfg.device.x_max == 5.0
        assert cfg.device.bins == 256
        assert cfg.plan.M == 1000 and cfg.plan.T == 1.0 and cfg.plan.N == 1
        assert cfg.alpha == 0.01
        assert cfg.mode is ModelMode.UNITARY_QM
        assert cfg.detectors is Detector.OFF

    def test_zero_n_names_field_and_constraint(self):
        with pytest.raises(ConfigError, match=r"N must be an integer >= 1"):
            parse_config("N: 0")

    def test_mode_override(self):
        cfg = parse_config("mode: NaiveCollapse")
        assert cfg.mode is ModelMode.NAIVE_COLLAPSE

    def test_unknown_key_named(self):
        with pytest.raises(ConfigError, match="wavelength"):
            parse_config("wavelength: 5")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config("seed: 1\nseed: 2")

    def test_comments_and_blank_lines_ignored(self):
        cfg = parse_config("# a comment\n\nseed: 7\n")
        assert cfg.seed == 7

    def test_non_integer_bins_rejected(self):
        with pytest.raises(ConfigError, match="bins"):
            parse_config("bins: 12.5")

    def test_alpha_bounds(self):
        with pytest.raises(ConfigError, match="alpha"):
            parse_config("alpha: 1.5")

    def test_bits_validation(self):
        with pytest.raises(ConfigError, match="bits"):
            parse_config("bits: 01x")

    def test_malformed_line(self):
        with pytest.raises(ConfigError, match="key: value"):
            parse_config("just some words")

    def test_strategy_values(self):
        assert parse_config("strategy: privileged").strategy == "privileged"
        with pytest.raises(ConfigError, match="strategy"):
            parse_config("strategy: bogus")

    def test_resolved_mapping_is_complete(self):
        resolved = parse_config("seed: 3").resolved()
        assert resolved["seed"] == 3
        assert resolved["mode"] == "UnitaryQM"
        assert set(resolved) >= {"kappa", "M", "T", "N", "alpha", "output_dir"}


class TestRunCommand:
    def test_unknown_subcommand(self):
        with pytest.raises(ConfigError, match="subcommand"):
            run_command("teleport", parse_config(""))

    def test_unwritable_output_dir(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        cfg = resolve_config({"output_dir": str(blocker / "sub")})
        with pytest.raises(ConfigError, match="not writable|output"):
            run_command("distributions", cfg)


class TestSubcommands:
    def test_distributions(self, tmp_path):
        code = main(["distributions", "--bins", "32", "--output-dir", str(tmp_path)])
        assert code == 0
        path = tmp_path / "distributions.csv"
        header = comment_header(path)
        assert any("seed: 0" in line for line in header)
        rows = read_csv_body(path)
        assert rows[0] == ["x", "p_coherent", "p_incoherent", "p_plus", "p_minus"]
        assert len(rows) == 33

    def test_simulate(self, tmp_path):
        code = main(
            [
                "simulate",
                "--M", "50",
                "--N", "3",
                "--detectors", "on",
                "--mode", "NaiveCollapse",
                "--output-dir", str(tmp_path),
            ]
        )
        assert code == 0
        rows = read_csv_body(tmp_path / "hits.csv")
        assert rows[0] == ["telegraph_id", "time", "x"]
        assert len(rows) == 51
        times = [float(r[1]) for r in rows[1:]]
        assert times == sorted(times)
        payload = json.loads((tmp_path / "decision.json").read_text())
        assert payload["config"]["M"] == 50
        assert payload["decision"]["decided"] in ("interference", "no-interference")
        assert payload["detectors"] == "on"

    def test_plan(self, tmp_path):
        code = main(
            ["plan", "--alpha", "0.2", "--seed", "5", "--output-dir", str(tmp_path)]
        )
        assert code == 0
        payload = json.loads((tmp_path / "plan.json").read_text())
        assert payload["feasible"] is True
        assert payload["m_star"] >= 1
        assert payload["error_interference"] <= 0.2
        assert payload["config"]["alpha"] == 0.2

    def test_transmit_explicit_bits(self, tmp_path):
        code = main(
            [
                "transmit",
                "--bits", "0101",
                "--M", "60",
                "--mode", "NaiveCollapse",
                "--output-dir", str(tmp_path),
            ]
        )
        assert code == 0
        transcript = json.loads((tmp_path / "transcript.json").read_text())
        assert transcript["sent"] == [0, 1, 0, 1]
        assert transcript["received"] == [0, 1, 0, 1]
        assert len(transcript["decisions"]) == 4
        assert transcript["hit_counts"] == [60, 60, 60, 60]
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["symbol_error_rate"] == 0.0
        assert summary["symbols"] == 4

    def test_nosignal_check_exit_codes(self, tmp_path):
        assert main(["nosignal-check", "--output-dir", str(tmp_path)]) == 0
        report = json.loads((tmp_path / "nosignal.json").read_text())
        assert report["report"]["verdict"] == "pass"
        assert "verdict: pass" in (tmp_path / "nosignal.txt").read_text()

        assert (
            main(
                [
                    "nosignal-check",
                    "--mode", "NaiveCollapse",
                    "--output-dir", str(tmp_path),
                ]
            )
            != 0
        )
        report = json.loads((tmp_path / "nosignal.json").read_text())
        assert report["report"]["verdict"] == "fail"

    def test_paradox(self, tmp_path):
        code = main(
            [
                "paradox",
                "--v", "0.5",
                "--separation", "1",
                "--output-dir", str(tmp_path),
            ]
        )
        assert code == 0
        payload = json.loads((tmp_path / "paradox.json").read_text())
        assert payload["trace"]["loop_advance"] == pytest.approx(1.0, abs=1e-12)
        assert payload["trace"]["closed_loop"] is True
        assert payload["automaton"]["fixed_points"] == []
        assert payload["automaton"]["inconsistent"] is True
        rows = read_csv_body(tmp_path / "events.csv")
        assert rows[0] == ["label", "t", "x"]
        assert [r[0] for r in rows[1:]] == [
            "a_emission",
            "a_reception",
            "b_emission",
            "b_reception",
        ]

    def test_config_file_with_flag_override(self, tmp_path):
        config = tmp_path / "run.conf"
        config.write_text("bins: 64\nseed: 9\n")
        out = tmp_path / "out"
        code = main(
            ["distributions", "--config", str(config), "--bins", "16", "--output-dir", str(out)]
        )
        assert code == 0
        rows = read_csv_body(out / "distributions.csv")
        assert len(rows) == 17  # flag overrides the file's 64
        assert any("seed: 9" in line for line in comment_header(out / "distributions.csv"))

    def test_config_error_exit_code(self, tmp_path):
        assert main(["distributions", "--bins", "1", "--output-dir", str(tmp_path)]) == 2

    def test_unknown_subcommand_exits_via_argparse(self):
        with pytest.raises(SystemExit) as exc:
            main(["teleport"])
        assert exc.value.code == 2

    def test_byte_identical_reruns(self, tmp_path):
        args = [
            "transmit",
            "--symbols", "6",
            "--M", "40",
            "--seed", "11",
            "--output-dir", str(tmp_path),
        ]
        assert main(args) == 0
        first = {
            p.name: p.read_bytes() for p in tmp_path.iterdir() if p.is_file()
        }
        assert main(args) == 0
        second = {
            p.name: p.read_bytes() for p in tmp_path.iterdir() if p.is_file()
        }
        assert first == second
        assert set(first) == {"transcript.json", "summary.json"}

    def test_console_entry_point(self, tmp_path):
        result = subprocess.run(
            [
                sys.executable,
                "-m",
                "qtelegraph.cli",
                "paradox",
                "--v", "0.5",
                "--separation", "2",
                "--output-dir", str(tmp_path),
            ],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 0
        payload = json.loads((tmp_path / "paradox.json").read_text())
        assert payload["trace"]["loop_advance"] == pytest.approx(2.0, abs=1e-12)
