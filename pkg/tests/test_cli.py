"""End-to-end checks of the click commands and their exit codes."""
import json

import pandas as pd
import pytest
from click.testing import CliRunner

from main import cli

P1_JSON = {"labels": ["a1", "a2", "a3", "a4"], "probs": [0.1, 0.2, 0.3, 0.4]}


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def p1_file(write_dist):
    return str(write_dist(P1_JSON, name="p1.json"))


class TestCompute:

    def test_zero_omega_echoes_source(self, runner, p1_file):
        result = runner.invoke(cli, ["compute", "--dist", p1_file, "--omega", "0", "--json"])
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert payload["beta"] == pytest.approx(0.3, abs=1e-12)
        assert payload["utility"] == pytest.approx([0.1, 0.2, 0.3, 0.4], abs=1e-15)

    def test_text_output(self, runner, p1_file):
        result = runner.invoke(cli, ["compute", "--dist", p1_file, "--omega", "3.3333"])
        assert result.exit_code == 0, result.output
        assert "MIM total" in result.output
        assert "D(U*||P)" in result.output
        assert "overused" in result.output

    def test_argmax_at_one_over_p3(self, runner, p1_file):
        result = runner.invoke(cli, ["compute", "--dist", p1_file, "--omega", "3.3333", "--json"])
        payload = json.loads(result.output)
        utility = payload["utility"]
        assert payload["labels"][utility.index(max(utility))] == "a3"

    def test_malformed_file(self, runner, write_dist):
        path = write_dist("{\"labels\": [", name="bad.json")
        result = runner.invoke(cli, ["compute", "--dist", str(path), "--omega", "1"])
        assert result.exit_code == 2
        assert "DistributionFormatError" in result.output

    def test_unnormalized_file(self, runner, write_dist):
        path = write_dist({"labels": ["a", "b"], "probs": [0.5, 0.6]})
        result = runner.invoke(cli, ["compute", "--dist", str(path), "--omega", "1"])
        assert result.exit_code == 2
        assert "NotNormalizedError" in result.output


class TestSolve:

    def test_equality_neutral_budget(self, runner, p1_file):
        result = runner.invoke(cli, ["solve", "--dist", p1_file, "--beta", "0.3",
                                     "--mode", "equality", "--json"])
        assert result.exit_code == 0, result.output
        assert json.loads(result.output)["omega"] == pytest.approx(0.0, abs=1e-9)

    def test_inequality_inactive(self, runner, p1_file):
        result = runner.invoke(cli, ["solve", "--dist", p1_file, "--beta", "0.35",
                                     "--mode", "inequality"])
        assert result.exit_code == 0, result.output
        assert "constraint inactive" in result.output
        assert "omega     = 0" in result.output

    def test_out_of_range(self, runner, p1_file):
        result = runner.invoke(cli, ["solve", "--dist", p1_file, "--beta", "0.05",
                                     "--mode", "equality"])
        assert result.exit_code == 3
        assert "[0.1, 0.4]" in result.output

    def test_infeasible_inequality(self, runner, p1_file):
        result = runner.invoke(cli, ["solve", "--dist", p1_file, "--beta", "0.05",
                                     "--mode", "inequality"])
        assert result.exit_code == 3
        assert "InfeasibleBudgetError" in result.output

    def test_budget_at_p_min_emits_valid_json(self, runner, p1_file):
        result = runner.invoke(cli, ["solve", "--dist", p1_file, "--beta", "0.1",
                                     "--mode", "inequality", "--json"])
        assert result.exit_code == 0, result.output
        assert "Infinity" not in result.output
        payload = json.loads(result.output)
        assert payload["omega"] == "inf"
        assert payload["lambda"] == "-inf"
        assert payload["utility"] == pytest.approx([1.0, 0.0, 0.0, 0.0])


class TestUnreadableInputs:

    def test_dist_not_utf8(self, runner, tmp_path):
        path = tmp_path / "bad.json"
        path.write_bytes(b"\xff\xfe{}")
        result = runner.invoke(cli, ["compute", "--dist", str(path), "--omega", "1"])
        assert result.exit_code == 2
        assert "DistributionFormatError" in result.output

    def test_dist_is_directory(self, runner, tmp_path):
        result = runner.invoke(cli, ["compute", "--dist", str(tmp_path), "--omega", "1"])
        assert result.exit_code == 2
        assert "DistributionFormatError" in result.output

    def test_counts_not_utf8(self, runner, tmp_path):
        path = tmp_path / "counts.csv"
        path.write_bytes(b"label,count\n\xff\xfe,1\nb,2\n")
        result = runner.invoke(cli, ["ingest", "--counts", str(path)])
        assert result.exit_code == 2
        assert "DistributionFormatError" in result.output


class TestSweep:

    def test_omega_sweep_csv(self, runner, p1_file, tmp_path):
        out = tmp_path / "fig3.csv"
        result = runner.invoke(cli, ["sweep", "--dist", p1_file, "--axis", "omega",
                                     "--range", "-10:10:0.1", "--out", str(out)])
        assert result.exit_code == 0, result.output
        df = pd.read_csv(out)
        assert list(df.columns) == ["omega", "beta", "a1", "a2", "a3", "a4"]
        assert len(df) == 201
        assert df.loc[df["omega"] == 0.0, "beta"].iloc[0] == pytest.approx(0.3, abs=1e-12)

    def test_beta_sweep_first_column_decreasing(self, runner, p1_file, tmp_path):
        out = tmp_path / "fig2.csv"
        result = runner.invoke(cli, ["sweep", "--dist", p1_file, "--axis", "beta",
                                     "--range", "0.11:0.39:0.01", "--out", str(out)])
        assert result.exit_code == 0, result.output
        df = pd.read_csv(out).sort_values("beta")
        assert df["a1"].is_monotonic_decreasing and df["a1"].is_unique

    def test_infeasible_beta_range(self, runner, p1_file, tmp_path):
        result = runner.invoke(cli, ["sweep", "--dist", p1_file, "--axis", "beta",
                                     "--range", "0.0:0.5:0.1", "--out", str(tmp_path / "x.csv")])
        assert result.exit_code == 3

    def test_beta_range_with_off_grid_stop(self, runner, p1_file, tmp_path):
        out = tmp_path / "coarse.csv"
        result = runner.invoke(cli, ["sweep", "--dist", p1_file, "--axis", "beta",
                                     "--range", "0.11:0.38:0.06", "--out", str(out)])
        assert result.exit_code == 0, result.output
        df = pd.read_csv(out)
        assert sorted(df["beta"]) == pytest.approx([0.11, 0.17, 0.23, 0.29, 0.35], abs=1e-12)

    def test_same_inputs_same_bytes(self, runner, p1_file, tmp_path):
        outputs = []
        for name in ("one.csv", "two.csv"):
            out = tmp_path / name
            runner.invoke(cli, ["sweep", "--dist", p1_file, "--axis", "omega",
                                "--range", "-3:3:0.25", "--out", str(out)])
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]


class TestVerify:

    def test_p1_passes(self, runner, p1_file):
        result = runner.invoke(cli, ["verify", "--dist", p1_file, "--beta", "0.2", "--no-properties"])
        assert result.exit_code == 0, result.output
        assert "FAIL" not in result.output
        assert "PASS" in result.output

    def test_binary_with_enumeration(self, runner, write_dist):
        path = write_dist({"labels": ["x", "y"], "probs": [0.3, 0.7]})
        result = runner.invoke(cli, ["verify", "--dist", str(path), "--beta", "0.5", "--n", "8"])
        assert result.exit_code == 0, result.output
        assert "exact probability within bound" in result.output

    def test_five_atoms_rejected(self, runner, write_dist):
        path = write_dist({"labels": list("abcde"), "probs": [0.1, 0.15, 0.2, 0.25, 0.3]})
        result = runner.invoke(cli, ["verify", "--dist", str(path), "--beta", "0.2"])
        assert result.exit_code == 3

    def test_grid_step_outside_bounds(self, runner, p1_file):
        result = runner.invoke(cli, ["verify", "--dist", p1_file, "--beta", "0.2",
                                     "--grid-step", "0.5", "--no-properties"])
        assert result.exit_code == 3
        assert "InvalidGridStepError" in result.output


class TestIngest:

    def test_counts_to_json(self, runner, write_dist):
        path = write_dist("label,count\na1,1\na2,2\na3,3\na4,4\n", name="counts.csv")
        result = runner.invoke(cli, ["ingest", "--counts", str(path)])
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert payload["probs"] == pytest.approx([0.1, 0.2, 0.3, 0.4], abs=1e-15)

    def test_usage_adds_beta(self, runner, write_dist):
        counts = write_dist("label,count\na1,1\na2,2\na3,3\na4,4\n", name="counts.csv")
        usage = write_dist("label,count\na1,1\na2,2\na3,3\na4,4\n", name="usage.csv")
        result = runner.invoke(cli, ["ingest", "--counts", str(counts), "--usage", str(usage)])
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert payload["usage"]["beta"] == pytest.approx(0.3, abs=1e-12)
        assert payload["usage"]["alpha"] == pytest.approx(0.7, abs=1e-12)

    def test_empty_file(self, runner, write_dist):
        path = write_dist("", name="empty.csv")
        result = runner.invoke(cli, ["ingest", "--counts", str(path)])
        assert result.exit_code == 2


class TestTableAndFigures:

    def test_table(self, runner, p1_file, tmp_path):
        out = tmp_path / "table.csv"
        result = runner.invoke(cli, ["table", "--dist", p1_file, "--out", str(out)])
        assert result.exit_code == 0, result.output
        df = pd.read_csv(out)
        assert list(df["beta"]) == pytest.approx([0.4, 0.3, 0.1], abs=1e-12)

    def test_figures(self, runner, tmp_path):
        result = runner.invoke(cli, ["figures", "--out-dir", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert (tmp_path / "utility_vs_beta_P1.csv").exists()
        assert "cross at omega" in result.output
