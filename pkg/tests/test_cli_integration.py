"""Integration tests for CLI functionality."""

import csv
import json
import os
from unittest.mock import patch

import pytest

from unitary_dual_lab.cli.main import cli


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def read_json_lines(path):
    return [json.loads(line) for line in path.read_text().splitlines()]


@pytest.fixture(autouse=True)
def isolated_cwd(tmp_path, monkeypatch):
    """Keep a stray udl.yaml or .env out of the CLI runs."""
    monkeypatch.chdir(tmp_path)


class TestCLIBasics:
    """Test the command group itself."""

    def test_cli_version(self, runner):
        result = runner.invoke(cli, ["version"])

        assert result.exit_code == 0
        assert "Unitary Dual Lab version" in result.output

    def test_cli_help(self, runner):
        result = runner.invoke(cli, ["--help"])

        assert result.exit_code == 0
        for command in ["partitions", "moments", "simulate", "compare", "schurmann", "config"]:
            assert command in result.output

    def test_missing_config_file(self, runner, cli_args, tmp_path):
        result = runner.invoke(cli, cli_args + ["--config", str(tmp_path / "none.yaml"), "version"])

        assert result.exit_code == 1
        assert "Configuration error" in result.output

    @patch.dict(os.environ, {"UDL_PATHS": "0"})
    def test_invalid_environment(self, runner, cli_args):
        result = runner.invoke(cli, cli_args + ["version"])

        assert result.exit_code == 1


class TestPartitionsCommand:
    """Test ``partitions``."""

    def test_listing(self, runner, cli_args, tmp_path):
        out = tmp_path / "p4.txt"
        result = runner.invoke(cli, cli_args + ["partitions", "4", "--out", str(out)])

        assert result.exit_code == 0
        lines = out.read_text().splitlines()
        assert lines == ["(4)", "(3, 1)", "(2, 2)", "(2, 1, 1)", "(1, 1, 1, 1)", "total: 5"]

        manifest = json.loads((tmp_path / "p4.txt.manifest.json").read_text())
        assert manifest["command"] == "partitions"
        assert manifest["extra"]["count"] == 5
        assert manifest["outputs"] == [str(out)]

    def test_total_on_stdout(self, runner, cli_args):
        result = runner.invoke(cli, cli_args + ["partitions", "10"])

        assert result.exit_code == 0
        assert "total: 42" in result.output

    def test_zero_is_usage_error(self, runner, cli_args):
        result = runner.invoke(cli, cli_args + ["partitions", "0"])

        assert result.exit_code == 2


class TestMomentsCommand:
    """Test ``moments``."""

    def test_first_moment(self, runner, cli_args, tmp_path):
        out = tmp_path / "m.csv"
        result = runner.invoke(
            cli, cli_args + ["moments", "--word", "tr(u11)", "--n", "2", "--t", "1", "--out", str(out)]
        )

        assert result.exit_code == 0
        rows = read_csv(out)
        assert rows == [{"time": "1", "re": "0.6065306597", "im": "0.0000000000"}]

    def test_several_times(self, runner, cli_args, tmp_path):
        out = tmp_path / "m.csv"
        result = runner.invoke(
            cli,
            cli_args
            + ["moments", "--word", "tr(u12 u21)", "--n", "2", "--times", "0,1", "--out", str(out)],
        )

        assert result.exit_code == 0
        rows = read_csv(out)
        assert [row["re"] for row in rows] == ["0.0000000000", "-0.1839397206"]

    def test_free_square_vanishes_at_one(self, runner, cli_args, tmp_path):
        out = tmp_path / "m.csv"
        result = runner.invoke(
            cli, cli_args + ["moments", "--word", "tr(u u)", "--t", "1", "--out", str(out)]
        )

        assert result.exit_code == 0
        assert read_csv(out)[0]["re"] == "0.0000000000"

    def test_stamped_word(self, runner, cli_args, tmp_path):
        out = tmp_path / "m.csv"
        result = runner.invoke(
            cli, cli_args + ["moments", "--word", "tr(u@0.5 u@1)", "--out", str(out)]
        )

        assert result.exit_code == 0
        assert read_csv(out) == [{"time": "1", "re": "0.2361832764", "im": "0.0000000000"}]

    def test_stamped_word_rejects_times(self, runner, cli_args):
        result = runner.invoke(cli, cli_args + ["moments", "--word", "tr(u@0.5 u@1)", "--t", "1"])

        assert result.exit_code == 2

    def test_biane_finite_single_block(self, runner, cli_args, tmp_path):
        out = tmp_path / "m.csv"
        result = runner.invoke(
            cli,
            cli_args
            + ["moments", "--word", "tr(u u)", "--t", "1", "--mode", "biane-finite", "--d", "1"]
            + ["--out", str(out)],
        )

        assert result.exit_code == 0
        assert read_csv(out)[0]["re"] == "0.1353352832"

    def test_biane_requires_one_block(self, runner, cli_args):
        result = runner.invoke(
            cli, cli_args + ["moments", "--word", "tr(u11)", "--n", "2", "--mode", "biane-finite"]
        )

        assert result.exit_code == 2

    def test_biane_finite_requires_d(self, runner, cli_args):
        result = runner.invoke(cli, cli_args + ["moments", "--word", "tr(u)", "--mode", "biane-finite"])

        assert result.exit_code == 2

    def test_index_out_of_range_is_usage_error(self, runner, cli_args):
        result = runner.invoke(cli, cli_args + ["moments", "--word", "tr(u13)", "--n", "2"])

        assert result.exit_code == 2
        assert "invalid --word" in result.output

    def test_unclosed_trace_is_usage_error(self, runner, cli_args):
        result = runner.invoke(cli, cli_args + ["moments", "--word", "tr(u11", "--n", "2"])

        assert result.exit_code == 2
        assert "invalid --word" in result.output

    def test_mixed_powers_fail_in_biane_mode(self, runner, cli_args):
        result = runner.invoke(
            cli, cli_args + ["moments", "--word", "tr(u u); tr(u*)", "--mode", "biane-limit"]
        )

        assert result.exit_code == 1
        assert "Moment computation failed" in result.output

    def test_state_budget_from_config(self, runner, cli_args, tmp_path):
        config = tmp_path / "tight.yaml"
        config.write_text("solver:\n  max_states: 2\n")
        result = runner.invoke(
            cli,
            cli_args + ["--config", str(config), "moments", "--word", "tr(u u u u)", "--t", "1"],
        )

        assert result.exit_code == 1
        assert "states built" in result.output

    def test_table_display(self, runner, cli_args):
        result = runner.invoke(
            cli, cli_args + ["--display", "table", "moments", "--word", "tr(u11)", "--n", "2"]
        )

        assert result.exit_code == 0
        assert "0.6065306597" in result.output
        assert "time,re,im" not in result.output


class TestSimulateCommand:
    """Test ``simulate``."""

    def test_zero_time_is_exact(self, runner, cli_args, tmp_path):
        out = tmp_path / "s.jsonl"
        result = runner.invoke(
            cli,
            cli_args
            + ["simulate", "--word", "tr(u11)", "--n", "2", "--d", "2", "--t", "0"]
            + ["--paths", "8", "--out", str(out)],
        )

        assert result.exit_code == 0
        (record,) = read_json_lines(out)
        assert record["mean_re"] == 1
        assert record["stderr"] == 0
        assert record["paths"] == 8

    def test_same_seed_same_bytes(self, runner, cli_args, tmp_path):
        outputs = []
        for workers in ("1", "3"):
            out = tmp_path / f"s{workers}.jsonl"
            result = runner.invoke(
                cli,
                cli_args
                + ["simulate", "--word", "tr(u12 u21)", "--n", "2", "--d", "2", "--times", "0.1,0.2"]
                + ["--paths", "24", "--dt", "0.05", "--seed", "5", "--workers", workers]
                + ["--out", str(out)],
            )
            assert result.exit_code == 0
            outputs.append(out.read_bytes())

        assert outputs[0] == outputs[1]
        assert len(outputs[0].splitlines()) == 2

    def test_invalid_block_size(self, runner, cli_args):
        result = runner.invoke(cli, cli_args + ["simulate", "--word", "tr(u)", "--d", "0"])

        assert result.exit_code == 2

    def test_bad_word_is_usage_error(self, runner, cli_args):
        result = runner.invoke(cli, cli_args + ["simulate", "--word", "tr()", "--d", "2"])

        assert result.exit_code == 2
        assert "invalid --word" in result.output

    def test_manifest_records_seed(self, runner, cli_args, tmp_path):
        out = tmp_path / "s.jsonl"
        runner.invoke(
            cli,
            cli_args
            + ["simulate", "--word", "tr(u)", "--d", "2", "--t", "0.1"]
            + ["--paths", "4", "--seed", "99", "--out", str(out)],
        )

        manifest = json.loads((tmp_path / "s.jsonl.manifest.json").read_text())
        assert manifest["seed"] == 99
        assert manifest["arguments"]["paths"] == 4


class TestCompareCommand:
    """Test ``compare``."""

    def test_csv_columns(self, runner, cli_args, tmp_path):
        out = tmp_path / "c.csv"
        result = runner.invoke(
            cli,
            cli_args
            + ["compare", "--word", "tr(u u)", "--t", "1", "--d-list", "1,2"]
            + ["--paths", "16", "--dt", "0.1", "--out", str(out)],
        )

        assert result.exit_code == 0
        rows = read_csv(out)
        assert list(rows[0]) == [
            "d",
            "mc_re",
            "mc_im",
            "stderr",
            "free_re",
            "free_im",
            "bias",
            "exact_re",
            "exact_im",
        ]
        assert [row["d"] for row in rows] == ["1", "2"]
        assert rows[0]["exact_re"] == "0.1353352832"
        assert "fitted slope" in result.output

    def test_bad_size_list(self, runner, cli_args):
        result = runner.invoke(cli, cli_args + ["compare", "--word", "tr(u)", "--d-list", "2,x"])

        assert result.exit_code == 2

    def test_bad_word_is_usage_error(self, runner, cli_args):
        result = runner.invoke(cli, cli_args + ["compare", "--word", "tr(v)", "--d-list", "2"])

        assert result.exit_code == 2
        assert "invalid --word" in result.output


class TestSchurmannCommand:
    """Test ``schurmann``."""

    def test_base_values(self, runner, cli_args, tmp_path):
        out = tmp_path / "base.json"
        result = runner.invoke(cli, cli_args + ["schurmann", "--n", "3", "--out", str(out)])

        assert result.exit_code == 0
        report = json.loads(out.read_text())
        assert len(report["values"]) == 18
        assert report["violations"] == []
        assert {v["ell"] for v in report["values"]} == {"-1/2", "0"}

    def test_gaussianity(self, runner, cli_args, tmp_path):
        out = tmp_path / "g.json"
        result = runner.invoke(
            cli, cli_args + ["schurmann", "--n", "2", "--check", "gaussianity", "--out", str(out)]
        )

        assert result.exit_code == 0
        report = json.loads(out.read_text())
        assert report["passed"] is True
        assert report["triples_checked"] == 512

    def test_crosscheck(self, runner, cli_args, tmp_path):
        out = tmp_path / "x.json"
        result = runner.invoke(
            cli, cli_args + ["schurmann", "--n", "2", "--check", "crosscheck", "--out", str(out)]
        )

        assert result.exit_code == 0
        report = json.loads(out.read_text())
        assert report["max_abs_difference"] == "0"
        assert report["violations"] == []
        assert (tmp_path / "x.json.manifest.json").exists()


class TestConfigCommands:
    """Test ``config``."""

    def test_set_and_show(self, runner, cli_args, temp_config_dir):
        result = runner.invoke(cli, cli_args + ["config", "set", "--paths", "321", "--log-level", "info"])
        assert result.exit_code == 0

        saved = json.loads((temp_config_dir / "config.json").read_text())
        assert saved["paths"] == 321
        assert saved["log_level"] == "INFO"

        result = runner.invoke(cli, cli_args + ["config", "show"])
        assert result.exit_code == 0
        assert "321" in result.output

    def test_set_invalid_value(self, runner, cli_args):
        result = runner.invoke(cli, cli_args + ["config", "set", "--dt", "-1"])

        assert result.exit_code == 1

    def test_clear(self, runner, cli_args, temp_config_dir):
        runner.invoke(cli, cli_args + ["config", "set", "--seed", "1"])
        result = runner.invoke(cli, cli_args + ["config", "clear", "--yes"])

        assert result.exit_code == 0
        assert not (temp_config_dir / "config.json").exists()

    def test_clear_declined(self, runner, cli_args, temp_config_dir):
        runner.invoke(cli, cli_args + ["config", "set", "--seed", "1"])
        result = runner.invoke(cli, cli_args + ["config", "clear"], input="n\n")

        assert result.exit_code == 0
        assert (temp_config_dir / "config.json").exists()
