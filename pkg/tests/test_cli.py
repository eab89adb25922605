import json

import numpy as np
import pandas as pd
import pytest

from cli.config import RunBlock, load_config
from cli.main import main
from cli.report import read_report, write_report
from regularizer import deserialize, serialize
from shared.core import log_context, logger
from shared.core.logger import DIGEST_CHARS
from shared.errors import ConfigValidationError
from shared.models import ExitCode
from tests.conftest import quadratic_regularizer


def body_file(directory, name="ball.json", dim=1, radius=1.0):
    path = directory / name
    path.write_text(json.dumps({"kind": "euclidean-ball", "dim": dim, "params": {"radius": radius}}))
    return path


def first_line(path):
    return path.read_text().splitlines()[0]


class TestConfig:
    def test_unknown_field(self, tmp_path):
        body_file(tmp_path)
        path = tmp_path / "config.json"
        path.write_text(
            json.dumps(
                {
                    "command": "synthesize",
                    "synthesize": {
                        "action_set": "ball.json",
                        "loss_set": "ball.json",
                        "out": "g.json",
                        "report": "report.txt",
                        "gamma": 3,
                    },
                }
            )
        )
        with pytest.raises(ConfigValidationError) as e:
            load_config(path)
        assert any("gamma" in v for v in e.value.violations)

    def test_alpha_above_c2_over_r_squared(self, tmp_path):
        body_file(tmp_path, radius=0.5)
        path = tmp_path / "config.json"
        block = {"action_set": "ball.json", "loss_set": "ball.json", "out": "g", "report": "r", "alpha": 5.0, "c2": 1.0}
        path.write_text(json.dumps({"command": "synthesize", "synthesize": block}))
        with pytest.raises(ConfigValidationError, match="c2/r\\^2=4"):
            load_config(path)

    def test_every_violation_reported(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"command": "bench", "bench": {"suite": "s.json", "out_dir": "o", "extra": 1, "more": 2}}))
        with pytest.raises(ConfigValidationError) as e:
            load_config(path)
        assert len(e.value.violations) == 2

    def test_missing_block(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"command": "check"}))
        with pytest.raises(ConfigValidationError, match="needs a 'check' block"):
            load_config(path)

    def test_body_paths_relative_to_config(self, tmp_path):
        body_file(tmp_path, dim=2)
        path = tmp_path / "config.json"
        block = {"action_set": "ball.json", "loss_set": "ball.json", "trace_out": "t.csv", "baseline": "quadratic"}
        path.write_text(json.dumps({"command": "run", "run": block}))
        config = load_config(path)
        assert isinstance(config.block, RunBlock)
        assert config.block.action_set.dim == 2

    def test_run_needs_one_regularizer(self, tmp_path):
        body_file(tmp_path)
        path = tmp_path / "config.json"
        block = {"action_set": "ball.json", "loss_set": "ball.json", "trace_out": "t.csv"}
        path.write_text(json.dumps({"command": "run", "run": block}))
        with pytest.raises(ConfigValidationError, match="exactly one"):
            load_config(path)

    def test_digest_ignores_key_order(self, tmp_path):
        body_file(tmp_path, dim=2)
        block = {"action_set": "ball.json", "loss_set": "ball.json", "trace_out": "t.csv", "baseline": "quadratic"}
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        first.write_text(json.dumps({"command": "run", "run": block}))
        second.write_text(json.dumps({"run": dict(reversed(list(block.items()))), "command": "run"}))
        assert load_config(first).digest() == load_config(second).digest()


class TestReport:
    def test_digest_comes_first(self, tmp_path):
        path = write_report(tmp_path / "r.txt", {"b": 1.5, "config_digest": "abc", "ok": True, "gap": float("nan")})
        assert first_line(path) == "config_digest=abc"
        assert read_report(path) == {"config_digest": "abc", "b": "1.5", "ok": "true", "gap": "nan"}


class TestSynthesize:
    def test_toy_instance(self, tmp_path):
        ball = body_file(tmp_path)
        out, report = tmp_path / "g.json", tmp_path / "report.txt"
        code = main(
            [
                "synthesize",
                "--action-set", str(ball),
                "--loss-set", str(ball),
                "--out", str(out),
                "--report", str(report),
                "--eps-bar", "0.5",
                "--samples", "0",
            ]
        )
        assert code == ExitCode.OK
        g = deserialize(out.read_bytes())
        assert g.dim == 1
        items = read_report(report)
        assert first_line(report).startswith("config_digest=")
        assert items["certified"] == "true"
        assert items["validation_passed"] == "true"
        assert items["range_within_c0"] == "true"
        assert float(items["objective"]) <= float(items["C0"]) + 1e-9

    def test_infeasible_exit_code(self, tmp_path):
        ball = body_file(tmp_path)
        report = tmp_path / "report.txt"
        code = main(
            [
                "synthesize",
                "--action-set", str(ball),
                "--loss-set", str(ball),
                "--out", str(tmp_path / "g.json"),
                "--report", str(report),
                "--eps-bar", "0.5",
                "--alpha", "10",
                "--no-doubling",
            ]
        )
        assert code == ExitCode.INFEASIBLE
        items = read_report(report)
        assert items["status"] == "infeasible"
        assert "c2/r^2" in items["certificate"]
        assert not (tmp_path / "g.json").exists()

    def test_invalid_override(self, tmp_path):
        ball = body_file(tmp_path)
        code = main(
            ["synthesize", "--action-set", str(ball), "--loss-set", str(ball), "--out", "g", "--report", "r", "--eps-bar", "-1"]
        )
        assert code == ExitCode.INTERNAL


class TestRun:
    def test_missing_regularizer_file(self, tmp_path):
        ball = body_file(tmp_path, dim=2)
        code = main(
            [
                "run",
                "--regularizer", str(tmp_path / "missing.json"),
                "--action-set", str(ball),
                "--loss-set", str(ball),
                "--trace-out", str(tmp_path / "trace.csv"),
            ]
        )
        assert code == ExitCode.INTERNAL

    def test_baseline_trace(self, tmp_path):
        ball = body_file(tmp_path, dim=2)
        trace, report = tmp_path / "trace.csv", tmp_path / "report.txt"
        code = main(
            [
                "run",
                "--baseline", "quadratic",
                "--action-set", str(ball),
                "--loss-set", str(ball),
                "--adversary", "sign-adaptive",
                "--rounds", "100",
                "--eta", "10",
                "--trace-out", str(trace),
                "--report", str(report),
            ]
        )
        assert code == ExitCode.OK
        items = read_report(report)
        digest = items["config_digest"]
        assert items["weighting"] == "direct"
        assert float(items["regularizer_weight"]) == pytest.approx(10.0)
        assert first_line(trace) == f"# config_digest={digest}"
        frame = pd.read_csv(trace, skiprows=1)
        assert list(frame.columns[:5]) == ["t", "x_0", "x_1", "loss_0", "loss_1"]
        assert len(frame) == 100
        # with weight sqrt(T) on g, sign-adaptive costs 1/sqrt(T) on every other round
        assert frame["cumulative_regret"].iloc[-1] == pytest.approx(5.0)
        np.testing.assert_allclose(frame["instantaneous_regret"].cumsum(), frame["cumulative_regret"])

    def test_dimension_mismatch(self, tmp_path):
        ball = body_file(tmp_path, dim=2)
        g = tmp_path / "g.json"
        g.write_bytes(serialize(quadratic_regularizer([[0.0], [1.0], [-1.0]])))
        code = main(
            ["run", "--regularizer", str(g), "--action-set", str(ball), "--loss-set", str(ball), "--trace-out", str(tmp_path / "t.csv")]
        )
        assert code == ExitCode.INTERNAL


class TestBench:
    def test_failed_run_keeps_exit_zero(self, tmp_path):
        body_file(tmp_path, dim=2)
        suite = tmp_path / "suite.json"
        suite.write_text(
            json.dumps(
                {
                    "regularizers": [
                        {"name": "quad", "baseline": "quadratic"},
                        {"name": "lost", "path": "missing.json"},
                    ],
                    "instances": [{"name": "ball", "action_set": "ball.json", "loss_set": "ball.json"}],
                    "adversaries": ["iid-extreme"],
                    "horizons": [10],
                    "seeds": [0],
                }
            )
        )
        out = tmp_path / "out"
        assert main(["bench", "--suite", str(suite), "--out-dir", str(out)]) == ExitCode.OK
        runs = pd.read_csv(out / "runs.csv", skiprows=1)
        assert sorted(runs["status"]) == ["completed", "failed"]

    def test_bad_suite(self, tmp_path):
        suite = tmp_path / "suite.json"
        suite.write_text("{")
        assert main(["bench", "--suite", str(suite), "--out-dir", str(tmp_path / "out")]) == ExitCode.INTERNAL


class TestRerun:
    def test_synthesize_twice_writes_identical_bytes(self, tmp_path):
        ball = body_file(tmp_path, dim=2)
        out, report = tmp_path / "g.json", tmp_path / "report.txt"
        argv = [
            "synthesize",
            "--action-set", str(ball),
            "--loss-set", str(ball),
            "--out", str(out),
            "--report", str(report),
            "--eps-bar", "0.5",
            "--samples", "50",
        ]
        assert main(argv) == ExitCode.OK
        first = out.read_bytes(), report.read_bytes()
        out.unlink()
        report.unlink()
        assert main(argv) == ExitCode.OK
        assert (out.read_bytes(), report.read_bytes()) == first

    def test_bench_twice_writes_identical_rate_tables(self, tmp_path):
        body_file(tmp_path, dim=2)
        suite = tmp_path / "suite.json"
        suite.write_text(
            json.dumps(
                {
                    "regularizers": [{"name": "quad", "baseline": "quadratic"}],
                    "instances": [{"name": "ball", "action_set": "ball.json", "loss_set": "ball.json"}],
                    "adversaries": ["iid-extreme", "sign-adaptive"],
                    "horizons": [10, 40],
                    "seeds": [0, 1],
                }
            )
        )
        out = tmp_path / "out"
        argv = ["bench", "--suite", str(suite), "--out-dir", str(out)]
        assert main(argv) == ExitCode.OK
        first = {name: (out / name).read_bytes() for name in ("runs.csv", "summary.csv", "summary.dat", "meta.json")}
        for path in out.iterdir():
            path.unlink()
        assert main(argv) == ExitCode.OK
        assert {name: (out / name).read_bytes() for name in first} == first


class TestCheck:
    def test_quadratic_pieces(self, tmp_path):
        ball = body_file(tmp_path, dim=2)
        centers = [[a, b] for a in (-1.0, -0.5, 0.0, 0.5, 1.0) for b in (-1.0, -0.5, 0.0, 0.5, 1.0)]
        g = tmp_path / "g.json"
        g.write_bytes(serialize(quadratic_regularizer(centers, alpha=0.5)))
        report = tmp_path / "check.txt"
        code = main(
            ["check", "--regularizer", str(g), "--loss-set", str(ball), "--samples", "100", "--report", str(report)]
        )
        assert code == ExitCode.OK
        items = read_report(report)
        assert items["passed"] == "true"
        assert items["pieces"] == "25"
        assert float(items["alpha"]) == 0.5

    def test_no_loss_set_anywhere(self, tmp_path):
        g = tmp_path / "g.json"
        g.write_bytes(serialize(quadratic_regularizer([[0.0], [1.0], [-1.0]])))
        code = main(["check", "--regularizer", str(g), "--report", str(tmp_path / "r.txt")])
        assert code == ExitCode.INTERNAL


class TestLogContext:
    def test_records_carry_command_and_digest(self, tmp_path, log_records):
        ball = body_file(tmp_path, dim=2)
        report = tmp_path / "report.txt"
        argv = [
            "run",
            "--baseline", "quadratic",
            "--action-set", str(ball),
            "--loss-set", str(ball),
            "--rounds", "5",
            "--trace-out", str(tmp_path / "trace.csv"),
            "--report", str(report),
        ]
        assert main(argv) == ExitCode.OK
        digest = read_report(report)["config_digest"]
        tagged = [r for r in log_records if r["extra"]["command"] == "run"]
        assert tagged
        assert {r["extra"]["digest"] for r in tagged} == {digest[:DIGEST_CHARS]}

    def test_untagged_outside_a_command(self, log_records):
        logger.info("outside")
        assert log_records[-1]["extra"]["command"] == "-"
        assert log_records[-1]["extra"]["run_tag"] == ""

    def test_context_is_released(self, log_records):
        with log_context(command="check", digest="f" * 64, run="r1"):
            logger.info("inside")
        logger.info("after")
        inside, after = log_records[-2:]
        assert inside["extra"]["digest"] == "f" * DIGEST_CHARS
        assert inside["extra"]["run_tag"] == " [r1]"
        assert after["extra"]["digest"] == "-"


def test_no_command():
    assert main([]) == ExitCode.INTERNAL
