"""Test the command-line interface."""

import json
import math

import numpy as np
import pytest
import yaml
from click.testing import CliRunner

from discriminability.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, cli, run_cli


@pytest.fixture
def dataset(write_csv):
    rows = ["spread,flat,scaled,noise"]
    values = [(0, 5, 0, 1), (1, 5, 2, 0), (3, 5, 6, 2), (7, 5, 14, 1), (4, 5, 8, 0), (2, 5, 4, 3)]
    rows += [",".join(str(v) for v in row) for row in values]
    return write_csv("\n".join(rows) + "\n")


def run(args, tmp_path):
    """Invoke the CLI writing its document to a file and return (exit code, document)."""
    out = tmp_path / "out.json"
    code = run_cli(args + ["--out", str(out)])
    document = json.loads(out.read_text()) if out.exists() else None
    return code, document


class TestRank:
    def test_full_ranking(self, dataset, tmp_path):
        code, document = run(["rank", dataset, "--threads", "1"], tmp_path)
        assert code == EXIT_OK
        assert document["method"] == "fsd"
        assert [row["name"] for row in document["ranking"]][:2] == ["scaled", "spread"]
        assert document["ranking"][-1]["name"] == "flat"
        assert math.isinf(document["ranking"][-1]["partial_dim"])
        assert len(document["selected"]) == 4

    def test_with_correlation_discard(self, dataset, tmp_path):
        code, document = run(["rank", dataset, "--discard-correlated", "1"], tmp_path)
        assert code == EXIT_OK
        assert document["method"] == "fsdc"
        assert len(document["ranking"]) + len(document["discarded"]) == 4

    def test_csv_export(self, dataset, tmp_path):
        csv_path = tmp_path / "scores.csv"
        code, _ = run(["rank", dataset, "--csv", str(csv_path)], tmp_path)
        assert code == EXIT_OK
        assert csv_path.read_text().splitlines()[0] == "rank,index,name,delta_star,delta,partial_dim"

    def test_stdout_yaml(self, dataset):
        result = CliRunner().invoke(cli, ["rank", dataset, "--format", "yaml", "--budget", "1"])
        assert result.exit_code == 0
        payload = yaml.safe_load(result.output)
        assert payload["selected_names"] == ["scaled"]

    def test_text_report(self, dataset):
        result = CliRunner().invoke(cli, ["rank", dataset, "--format", "text"])
        assert result.exit_code == 0
        assert "Feature selection: fsd" in result.output
        assert "scaled" in result.output


class TestSelect:
    def test_budget_prefix(self, dataset, tmp_path):
        code, document = run(["select", dataset, "--budget", "50%"], tmp_path)
        assert code == EXIT_OK
        assert document["selected_names"] == ["scaled", "spread"]
        assert document["params"]["budget"] == 2

    def test_default_budget(self, dataset, tmp_path):
        code, document = run(["select", dataset], tmp_path)
        assert code == EXIT_OK
        assert len(document["selected"]) == 1

    def test_csv_has_selected_only(self, dataset, tmp_path):
        csv_path = tmp_path / "selected.csv"
        code, _ = run(["select", dataset, "--budget", "2", "--csv", str(csv_path)], tmp_path)
        assert code == EXIT_OK
        assert len(csv_path.read_text().splitlines()) == 3

    def test_deterministic_across_threads(self, dataset, tmp_path):
        _, serial = run(["select", dataset, "--budget", "2", "--threads", "1"], tmp_path)
        _, threaded = run(["select", dataset, "--budget", "2", "--threads", "max"], tmp_path)
        serial.pop("timing")
        threaded.pop("timing")
        assert serial == threaded


DETERMINISM_COMMANDS = [
    ["rank"],
    ["select", "--budget", "2", "--discard-correlated", "1"],
    ["approx-rank", "--support-length", "5", "--verify-exact", "--budget", "2"],
    ["error-bound", "--relative-length", "0.2"],
    ["baseline", "--method", "rrfs", "--budget", "2"],
]


@pytest.mark.parametrize("seed", range(20))
def test_threads_do_not_change_documents(seed, write_csv, tmp_path):
    """Test serial and threaded runs give identical documents on random inputs."""
    gen = np.random.default_rng(seed)
    n, d = int(gen.integers(8, 60)), int(gen.integers(3, 8))
    values = gen.standard_normal((n, d)) * gen.uniform(0.1, 5.0, size=d)
    header = ",".join(f"c{j}" for j in range(d))
    body = "\n".join(",".join(repr(float(v)) for v in row) for row in values)
    path = write_csv(header + "\n" + body + "\n")

    command = DETERMINISM_COMMANDS[seed % len(DETERMINISM_COMMANDS)]
    documents = []
    for threads in ("1", "max"):
        code, document = run([command[0], path, *command[1:], "--threads", threads], tmp_path)
        assert code == EXIT_OK
        document.pop("timing")
        documents.append(json.dumps(document, sort_keys=True))
    assert documents[0] == documents[1]


class TestApproxRank:
    def test_with_verification(self, dataset, tmp_path):
        code, document = run(["approx-rank", dataset, "--support-length", "3",
                              "--verify-exact", "--budget", "2"], tmp_path)
        assert code == EXIT_OK
        assert document["method"] == "lsfsd"
        report = document["error_report"]
        assert report["true_error_ratio"] <= report["max_error_ratio"]
        assert "id_approx" in document["ranking"][0]

    def test_relative_length(self, dataset, tmp_path):
        code, document = run(["approx-rank", dataset, "--relative-length", "0.5",
                              "--budget", "1"], tmp_path)
        assert code == EXIT_OK
        assert document["params"]["support_length"] == 3

    def test_needs_a_length(self, dataset, tmp_path):
        code, _ = run(["approx-rank", dataset, "--budget", "1"], tmp_path)
        assert code == EXIT_USAGE

    def test_lengths_are_exclusive(self, dataset, tmp_path):
        code, _ = run(["approx-rank", dataset, "-l", "3", "-r", "0.5"], tmp_path)
        assert code == EXIT_USAGE


class TestErrorBound:
    def test_single_length(self, dataset, tmp_path):
        code, document = run(["error-bound", dataset, "--support-length", "6"], tmp_path)
        assert code == EXIT_OK
        assert document["error_report"]["max_error_ratio"] == 0.0
        assert document["params"]["effective_length"] == 5

    def test_sweep(self, dataset, tmp_path):
        code, document = run(["error-bound", dataset, "--sweep"], tmp_path)
        assert code == EXIT_OK
        assert len(document["sweep"]) == 20
        assert document["sweep"][0]["relative_length"] == 0.01


class TestBaseline:
    @pytest.mark.parametrize("method", ["random", "variance", "correlation", "rrfs"])
    def test_methods(self, dataset, tmp_path, method):
        code, document = run(["baseline", dataset, "--method", method, "--budget", "2"], tmp_path)
        assert code == EXIT_OK
        assert document["method"] == method
        assert len(document["selected"]) == 2

    def test_random_seed_echoed(self, dataset, tmp_path):
        _, first = run(["baseline", dataset, "-m", "random", "-k", "2", "--seed", "7"], tmp_path)
        _, second = run(["baseline", dataset, "-m", "random", "-k", "2", "--seed", "7"], tmp_path)
        assert first["params"]["seed"] == 7
        assert first["selected"] == second["selected"]

    def test_unknown_method(self, dataset, tmp_path):
        code, _ = run(["baseline", dataset, "--method", "spectral"], tmp_path)
        assert code == EXIT_USAGE


class TestDescribe:
    def test_dataset_scores(self, dataset, tmp_path):
        code, document = run(["describe", dataset, "--alpha", "0.2"], tmp_path)
        assert code == EXIT_OK
        assert document["dataset"]["n"] == 6
        assert document["metadata"]["discriminability"] > 0
        assert document["metadata"]["observable_diameter"] == 8


class TestBench:
    def test_small_run(self, tmp_path):
        code, document = run(["bench", "--rows", "200", "--features", "6", "--planted", "2",
                              "--seeds", "2", "--threads", "1"], tmp_path)
        assert code == EXIT_OK
        recall = document["metadata"]["mean_recall"]
        assert set(recall) == {"fsd", "lsfsd", "random", "variance", "correlation", "rrfs"}
        assert recall["fsd"] == 1.0
        assert len(document["metadata"]["rows"]) == 12

    def test_planted_exceeds_features(self, tmp_path):
        code, _ = run(["bench", "--features", "3", "--planted", "4"], tmp_path)
        assert code == EXIT_USAGE


class TestExitCodes:
    def test_data_error(self, write_csv, tmp_path):
        path = write_csv("a,b\n1,2\n3,NaN\n")
        code, _ = run(["rank", path], tmp_path)
        assert code == EXIT_DATA

    def test_missing_input(self, tmp_path):
        code, _ = run(["rank", str(tmp_path / "absent.csv")], tmp_path)
        assert code == EXIT_DATA

    def test_budget_too_large(self, dataset, tmp_path):
        code, _ = run(["select", dataset, "--budget", "9"], tmp_path)
        assert code == EXIT_USAGE

    def test_unknown_option(self, dataset, tmp_path):
        code, _ = run(["rank", dataset, "--support-length", "3"], tmp_path)
        assert code == EXIT_USAGE

    def test_bad_threads(self, dataset, tmp_path):
        code, _ = run(["rank", dataset, "--threads", "0"], tmp_path)
        assert code == EXIT_USAGE

    def test_bad_config(self, dataset, write_csv, tmp_path):
        config = write_csv("selection:\n  budget: [1, 2]\n", name="bad.yaml")
        assert run_cli(["--config", config, "rank", dataset]) == EXIT_USAGE

    def test_help(self):
        assert run_cli(["--help"]) == EXIT_OK


class TestConfigCommands:
    def test_init_config(self, tmp_path):
        path = tmp_path / "config.yaml"
        assert run_cli(["init-config", "--output", str(path)]) == EXIT_OK
        assert yaml.safe_load(path.read_text())["selection"]["budget"] == "10%"
        assert run_cli(["validate-config", str(path)]) == EXIT_OK

    def test_config_budget_applies(self, dataset, write_csv, tmp_path):
        config = write_csv("selection:\n  budget: 3\n", name="config.yaml")
        code, document = run(["--config", config, "select", dataset], tmp_path)
        assert code == EXIT_OK
        assert len(document["selected"]) == 3

    def test_validate_reports_problems(self, write_csv):
        config = write_csv("bench:\n  features: 2\n  planted: 5\n", name="config.yaml")
        assert run_cli(["validate-config", config]) == EXIT_USAGE
