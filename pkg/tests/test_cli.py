"""Tests for the mtd-bench command line."""

from unittest.mock import patch

import pytest

from src.cli import EXIT_INPUT, EXIT_NOT_CONVERGED, EXIT_OK, main
from src.evaluation.reporting import RunManifest
from src.graphs.endorsement import WalkConvergenceError
from src.ingestion.parsers.claim_parser import write_claims

GOLD_TSV = (
    "Harry Potter\tdaniel radcliffe\n"
    "Harry Potter\temma watson\n"
    "Harry Potter\trupert grint\n"
)


@pytest.fixture
def claims_file(tmp_path, cast_claims):
    path = tmp_path / "claims.tsv"
    with open(path, "w", encoding="utf-8") as f:
        write_claims(cast_claims, f)
    return path


@pytest.fixture
def gold_file(tmp_path):
    path = tmp_path / "gold.tsv"
    path.write_text(GOLD_TSV, encoding="utf-8")
    return path


def read_key_values(path):
    pairs = (line.split("=", 1) for line in path.read_text(encoding="utf-8").splitlines())
    return {key: value for key, value in pairs}


@pytest.mark.integration
class TestRunCommand:
    """Test `run`."""

    def test_smartmtd_artifacts(self, tmp_path, claims_file):
        """Test a results directory with truths, profile, report and manifest."""
        out = tmp_path / "results"
        assert main(["run", "--claims", str(claims_file), "--out", str(out)]) == EXIT_OK
        for name in ("truths.tsv", "profile.tsv", "report.txt", "manifest.json"):
            assert (out / name).exists()
        report = read_key_values(out / "report.txt")
        assert report["method"] == "smartmtd"
        assert report["converged"] == "True"

    def test_truths_header_names_manifest(self, tmp_path, claims_file):
        """Test result TSVs start with the version and manifest hash."""
        out = tmp_path / "results"
        main(["run", "--claims", str(claims_file), "--out", str(out)])
        lines = (out / "truths.tsv").read_text(encoding="utf-8").splitlines()
        assert lines[0].startswith("# produced-by: mtd-bench")
        assert lines[1].startswith("# manifest: ")

    def test_voting_has_no_profile(self, tmp_path, claims_file):
        """Test baselines write truths but no source profile."""
        out = tmp_path / "voting"
        args = ["run", "--method", "voting", "--claims", str(claims_file), "--out", str(out)]
        assert main(args) == EXIT_OK
        assert (out / "truths.tsv").exists()
        assert not (out / "profile.tsv").exists()

    def test_bad_beta(self, tmp_path, claims_file, capsys):
        """Test beta = 1.5 exits 2 naming the flag and the bound."""
        code = main([
            "run", "--claims", str(claims_file), "--out", str(tmp_path / "r"), "--beta", "1.5"
        ])
        assert code == EXIT_INPUT
        err = capsys.readouterr().err
        assert "--beta" in err
        assert "less than 1" in err

    def test_zero_beta(self, tmp_path, capsys):
        """Test beta = 0 exits 2 naming the flag even when two sources share nothing."""
        claims = tmp_path / "disjoint.tsv"
        claims.write_text("s1\to1\ta\ns2\to1\tb\n", encoding="utf-8")
        code = main(["run", "--claims", str(claims), "--out", str(tmp_path / "r"), "--beta", "0"])
        assert code == EXIT_INPUT
        err = capsys.readouterr().err
        assert "--beta" in err
        assert "greater than 0" in err

    def test_missing_claims_file(self, tmp_path):
        """Test a missing input file exits 2."""
        code = main(["run", "--claims", str(tmp_path / "nope.tsv"), "--out", str(tmp_path / "r")])
        assert code == EXIT_INPUT

    def test_missing_arguments(self, tmp_path):
        """Test run without --claims exits 2."""
        assert main(["run", "--out", str(tmp_path / "r")]) == EXIT_INPUT

    def test_thread_count_byte_identical(self, tmp_path, claims_file):
        """Test one and four workers write byte-identical truths."""
        main(["run", "--claims", str(claims_file), "--out", str(tmp_path / "t1"), "--threads", "1"])
        main(["run", "--claims", str(claims_file), "--out", str(tmp_path / "t4"), "--threads", "4"])
        assert (tmp_path / "t1" / "truths.tsv").read_bytes() == (
            tmp_path / "t4" / "truths.tsv"
        ).read_bytes()

    def test_manifest_replay_byte_identical(self, tmp_path, claims_file):
        """Test re-running from a manifest reproduces the truths file."""
        out = tmp_path / "original"
        main(["run", "--claims", str(claims_file), "--out", str(out), "--beta", "0.2"])
        replay = tmp_path / "replay"
        code = main(["run", "--manifest", str(out / "manifest.json"), "--out", str(replay)])
        assert code == EXIT_OK
        assert (out / "truths.tsv").read_bytes() == (replay / "truths.tsv").read_bytes()

    def test_trace_with_gold(self, tmp_path, claims_file, gold_file):
        """Test --trace writes per-iteration rows with accuracy columns."""
        out = tmp_path / "traced"
        main([
            "run", "--claims", str(claims_file), "--gold", str(gold_file), "--out", str(out),
            "--trace",
        ])
        lines = (out / "trace.tsv").read_text(encoding="utf-8").splitlines()
        header = [line for line in lines if line.startswith("# iteration")][0]
        assert header.split("\t")[-1] == "f1"
        assert len([line for line in lines if not line.startswith("#")]) >= 2

    def test_dump_graphs(self, tmp_path, claims_file):
        """Test --dump-graphs writes both supportive graphs."""
        out = tmp_path / "graphs"
        main(["run", "--claims", str(claims_file), "--out", str(out), "--dump-graphs"])
        assert (out / "graphs" / "supportive_positive.tsv").exists()
        assert (out / "graphs" / "supportive_negative.tsv").exists()

    def test_outer_loop_cap_exits_3(self, tmp_path, claims_file):
        """Test an unconverged run still writes results and exits 3."""
        out = tmp_path / "capped"
        code = main(["run", "--claims", str(claims_file), "--out", str(out), "--max-iters", "1"])
        assert code == EXIT_NOT_CONVERGED
        assert (out / "truths.tsv").exists()

    def test_walk_failure_exits_3(self, tmp_path, claims_file):
        """Test walk non-convergence maps to exit 3."""
        with patch("src.cli.run", side_effect=WalkConvergenceError(0.1, 5, "Harry Potter")):
            code = main(["run", "--claims", str(claims_file), "--out", str(tmp_path / "w")])
        assert code == EXIT_NOT_CONVERGED


@pytest.mark.integration
class TestEvalCommand:
    """Test `eval`."""

    def test_perfect_prediction(self, tmp_path, gold_file):
        """Test scoring the gold file against itself gives 1.0 everywhere."""
        out = tmp_path / "metrics.txt"
        code = main([
            "eval", "--predictions", str(gold_file), "--gold", str(gold_file), "--out", str(out)
        ])
        assert code == EXIT_OK
        metrics = read_key_values(out)
        for name in ("precision", "recall", "f1", "weighted_precision", "weighted_recall",
                     "weighted_f1"):
            assert float(metrics[f"predictions.{name}"]) == 1.0

    def test_perfect_prediction_with_popularity_weights(self, tmp_path):
        """Test gold scored against itself with claim-derived weights exits 0 with 1.0."""
        data = tmp_path / "synth"
        main(["synth", "--out", str(data), "--n-copiers", "3", "--seed", "0"])
        out = tmp_path / "metrics.txt"
        code = main([
            "eval", "--claims", str(data / "claims.tsv"), "--gold", str(data / "gold.tsv"),
            "--predictions", str(data / "gold.tsv"), "--out", str(out),
        ])
        assert code == EXIT_OK
        metrics = read_key_values(out)
        assert float(metrics["predictions.weighted_precision"]) == 1.0
        assert float(metrics["predictions.weighted_f1"]) == 1.0

    def test_disjoint_prediction(self, tmp_path, gold_file):
        """Test a disjoint prediction scores 0 precision and recall."""
        predictions = tmp_path / "pred.tsv"
        predictions.write_text("Harry Potter\tjonny depp\n", encoding="utf-8")
        out = tmp_path / "metrics.txt"
        main([
            "eval", "--predictions", str(predictions), "--gold", str(gold_file), "--out", str(out)
        ])
        metrics = read_key_values(out)
        assert float(metrics["predictions.precision"]) == 0.0
        assert float(metrics["predictions.recall"]) == 0.0

    def test_all_methods_table(self, claims_file, gold_file, capsys):
        """Test --method all prints one row per variant and baseline."""
        code = main([
            "eval", "--claims", str(claims_file), "--gold", str(gold_file), "--method", "all"
        ])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        for label in ("smartmtd", "smartmtd-core", "smartmtd-copy", "smartmtd-popularity",
                      "voting", "sums", "avglog"):
            assert f"\n{label} " in out

    def test_repeated_runs(self, tmp_path, claims_file, gold_file):
        """Test --runs K is reflected in the report."""
        out = tmp_path / "metrics.txt"
        main([
            "eval", "--claims", str(claims_file), "--gold", str(gold_file), "--method", "voting",
            "--runs", "3", "--out", str(out),
        ])
        assert read_key_values(out)["voting.runs"] == "3"

    def test_gold_mismatch(self, tmp_path, claims_file, capsys):
        """Test claim objects missing from gold exit 2 and are listed."""
        gold = tmp_path / "other_gold.tsv"
        gold.write_text("Star Wars\tmark hamill\n", encoding="utf-8")
        code = main([
            "eval", "--claims", str(claims_file), "--gold", str(gold), "--method", "voting"
        ])
        assert code == EXIT_INPUT
        assert "Harry Potter" in capsys.readouterr().err

    def test_top_popular(self, claims_file, gold_file, capsys):
        """Test --top-popular lists the wrongly resolved popular objects."""
        main([
            "eval", "--claims", str(claims_file), "--gold", str(gold_file), "--method", "voting",
            "--top-popular", "5",
        ])
        out = capsys.readouterr().out
        assert "voting: " in out
        assert "errors among the 5 most popular objects" in out


@pytest.mark.integration
class TestSynthAndDumps:
    """Test `synth`, `dump-popularity` and `dump-dependence`."""

    def test_synth_writes_dataset(self, tmp_path):
        """Test claims, gold, spec and roles are written."""
        out = tmp_path / "synth"
        code = main([
            "synth", "--out", str(out), "--n-objects", "5", "--n-sources", "6",
            "--n-copiers", "1", "--seed", "3",
        ])
        assert code == EXIT_OK
        for name in ("claims.tsv", "gold.tsv", "spec.env", "roles.tsv"):
            assert (out / name).exists()
        assert "rng_seed=3" in (out / "spec.env").read_text(encoding="utf-8")

    def test_run_records_dataset_seed(self, tmp_path):
        """Test running on a synthetic claim file stores its seed in the manifest."""
        data = tmp_path / "synth"
        main(["synth", "--out", str(data), "--n-objects", "4", "--seed", "11"])
        out = tmp_path / "results"
        main(["run", "--method", "voting", "--claims", str(data / "claims.tsv"), "--out", str(out)])
        assert RunManifest.load(out / "manifest.json").seed == 11

    def test_synth_spec_file_reproduces(self, tmp_path):
        """Test regenerating from the written spec.env gives the same claims."""
        first = tmp_path / "first"
        main(["synth", "--out", str(first), "--n-objects", "6", "--seed", "8"])
        second = tmp_path / "second"
        main(["synth", "--spec", str(first / "spec.env"), "--out", str(second)])
        assert (first / "claims.tsv").read_bytes() == (second / "claims.tsv").read_bytes()

    def test_synth_infeasible(self, tmp_path):
        """Test an infeasible spec exits 2."""
        code = main([
            "synth", "--out", str(tmp_path / "bad"), "--truths-max", "5", "--false-pool-size", "2"
        ])
        assert code == EXIT_INPUT

    def test_dump_popularity(self, tmp_path, claims_file):
        """Test the popularity dump ranks the single object first."""
        out = tmp_path / "popularity.tsv"
        assert main(["dump-popularity", "--claims", str(claims_file), "--out", str(out)]) == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        rows = [line for line in lines if not line.startswith("#")]
        assert rows == ["1\tHarry Potter\t1.0"]

    def test_dump_dependence(self, claims_file, capsys):
        """Test the dependence dump prints one row per claim pair."""
        assert main(["dump-dependence", "--claims", str(claims_file)]) == EXIT_OK
        rows = [
            line for line in capsys.readouterr().out.splitlines()
            if line and not line.startswith("#") and "\t" in line
        ]
        assert len(rows) == 3
