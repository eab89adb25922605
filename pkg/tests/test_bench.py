import json
import math

import numpy as np
import pandas as pd
import pytest

from bench.adversaries import Adversary
from bench.baselines import EntropyRegularizer, QuadraticRegularizer, build_baseline
from bench.compare import compare, load_suite, summarize
from bench.models import BenchSuite, RunSpec
from bench.regret import best_fixed_action, cumulative_regret, rate_estimate, regret, traces_frame
from bench.runner import RUN_COLUMNS, execute_run
from convex_sets import Ellipsoid, Simplex, box, euclidean_ball, lp_ball, unit_cube
from ftrl import InnerSolveConfig, run_ftrl
from regularizer import serialize
from shared.errors import BaselineDomainError, ConfigValidationError, RateEstimateError
from shared.models import AdversaryKind, RunStatus
from tests.conftest import quadratic_regularizer

BALL2 = {"kind": "euclidean-ball", "dim": 2, "params": {"radius": 1.0}}


def suite_payload(**changes):
    payload = {
        "regularizers": [{"name": "quad", "baseline": "quadratic"}],
        "instances": [{"name": "ball", "action_set": BALL2, "loss_set": BALL2}],
        "adversaries": ["iid-extreme"],
        "horizons": [10],
        "seeds": [0],
    }
    payload.update(changes)
    return payload


def read_stamped(path):
    with open(path, encoding="utf-8") as handle:
        stamp = handle.readline().strip()
    return stamp, pd.read_csv(path, skiprows=1)


class TestAdversaries:
    @pytest.mark.parametrize(
        "loss_set",
        [euclidean_ball(2), lp_ball(3, 1), box([1, 2]), Ellipsoid.axis_aligned([1, 3]), unit_cube(3)],
        ids=repr,
    )
    @pytest.mark.parametrize("kind", list(AdversaryKind))
    def test_contract(self, loss_set, kind, rng):
        adversary = Adversary(kind, loss_set, seed=7)
        for t in range(1_000):
            loss = adversary.next_loss(t, rng.standard_normal(loss_set.dim))
            assert loss_set.membership(loss, 1e-9)

    def test_iid_is_reproducible(self, ball2):
        adversary = Adversary(AdversaryKind.IID_EXTREME, ball2, seed=1)
        first = [adversary.next_loss(t, np.zeros(2)) for t in range(20)]
        adversary.reset()
        second = [adversary.next_loss(t, np.zeros(2)) for t in range(20)]
        np.testing.assert_array_equal(first, second)

    def test_sign_adaptive_aligns_with_action(self, ball2):
        adversary = Adversary(AdversaryKind.SIGN_ADAPTIVE, ball2)
        assert adversary.adaptive
        np.testing.assert_array_equal(adversary.next_loss(0, np.array([1.0, 0.2])), [1, 0])
        np.testing.assert_array_equal(adversary.next_loss(1, np.array([0.1, -0.5])), [0, -1])

    def test_trap_alternates(self, ball2):
        adversary = Adversary(AdversaryKind.FOLLOW_LEADER_TRAP, ball2)
        losses = [adversary.next_loss(t, np.zeros(2)) for t in range(4)]
        np.testing.assert_allclose(losses, [[0.5, 0], [-1, 0], [1, 0], [-1, 0]])

    def test_directions_outside_rejected(self, ball2):
        with pytest.raises(ConfigValidationError):
            Adversary(AdversaryKind.IID_EXTREME, ball2, directions=[[2.0, 0.0]])

    def test_directions_dimension_checked(self, ball2):
        with pytest.raises(ConfigValidationError):
            Adversary(AdversaryKind.IID_EXTREME, ball2, directions=[[1.0, 0.0, 0.0]])


class TestBaselines:
    def test_quadratic_step(self, ball2):
        g = QuadraticRegularizer(2, c=2.0)
        np.testing.assert_allclose(g.argmin_linear(np.array([0.4, 0.0]), 1.0, ball2), [-0.2, 0.0])
        assert g.value(np.array([1.0, 1.0])) == pytest.approx(2.0)

    def test_entropy_step_is_softmax(self):
        g = EntropyRegularizer(3)
        np.testing.assert_allclose(g.argmin_linear(np.zeros(3), 1.0, Simplex(3)), np.full(3, 1 / 3))
        weights = g.argmin_linear(np.array([0.0, math.log(2), 0.0]), 1.0, Simplex(3))
        np.testing.assert_allclose(weights, [0.4, 0.2, 0.4])

    def test_entropy_value(self):
        assert EntropyRegularizer(4).value(np.full(4, 0.25)) == pytest.approx(-math.log(4))
        assert EntropyRegularizer(2).value(np.array([1.0, 0.0])) == 0.0

    def test_entropy_rejects_other_domains(self, ball2):
        with pytest.raises(BaselineDomainError):
            build_baseline("entropy", ball2)
        with pytest.raises(BaselineDomainError):
            EntropyRegularizer(2).argmin_linear(np.zeros(2), 1.0, ball2)


class TestRegret:
    def test_best_fixed_action(self, ball2):
        np.testing.assert_allclose(best_fixed_action(np.array([1.0, 0.0]), ball2), [-1, 0])
        np.testing.assert_allclose(best_fixed_action(np.zeros(2), ball2), [0, 0])
        np.testing.assert_allclose(best_fixed_action(np.array([3.0, 1.0, 2.0]), Simplex(3)), [0, 1, 0])

    def test_optimal_single_round(self, ball2):
        assert cumulative_regret(np.array([[-1.0, 0.0]]), np.array([[1.0, 0.0]]), ball2)[0] == pytest.approx(0.0)

    def test_bench_reexports_learner_accounting(self):
        import ftrl.learner
        from ftrl.regret import cumulative_regret as learner_side

        assert cumulative_regret is learner_side
        assert ftrl.learner.cumulative_regret.__module__ == "ftrl.regret"

    def test_constant_play(self, ball2):
        x, loss = np.array([0.2, 0.1]), np.array([0.6, -0.8])
        values = cumulative_regret(np.tile(x, (5, 1)), np.tile(loss, (5, 1)), ball2)
        np.testing.assert_allclose(values, np.arange(1, 6) * (x @ loss + 1.0))

    def test_last_prefix_matches_recomputation(self, ball2, rng):
        adversary = Adversary(AdversaryKind.IID_EXTREME, ball2, seed=2)
        trace = run_ftrl(QuadraticRegularizer(2), ball2, ball2, adversary, 50)
        total = trace.losses.sum(axis=0)
        best = best_fixed_action(total, ball2)
        scratch = float(np.einsum("ti,ti->", trace.actions, trace.losses) - best @ total)
        assert regret(trace, ball2)[-1] == pytest.approx(scratch)
        assert trace.final_regret == pytest.approx(scratch)


def runs_table(regret_of, horizons=(100, 400, 1600), seeds=(0, 1, 2), adversary="a"):
    return pd.DataFrame(
        [{"adversary": adversary, "horizon": h, "seed": s, "regret": regret_of(h)} for h in horizons for s in seeds]
    )


class TestRateEstimate:
    def test_square_root_growth(self):
        estimate = rate_estimate(runs_table(lambda T: 3.0 * math.sqrt(T)))
        assert estimate.headline == pytest.approx(3.0)
        assert estimate.converging
        assert list(estimate.table["horizon"]) == [100, 400, 1600]

    def test_linear_growth_flagged(self):
        estimate = rate_estimate(runs_table(float))
        assert estimate.headline == pytest.approx(40.0)
        assert not estimate.converging

    def test_worst_adversary_counts(self):
        runs = pd.concat(
            [runs_table(lambda T: 3.0 * math.sqrt(T), adversary="a"), runs_table(lambda T: 5.0 * math.sqrt(T), adversary="b")]
        )
        assert rate_estimate(runs).headline == pytest.approx(5.0)

    def test_single_horizon_rejected(self):
        with pytest.raises(RateEstimateError, match="2 horizons"):
            rate_estimate(runs_table(math.sqrt, horizons=(100,)))

    def test_single_seed_rejected(self):
        with pytest.raises(RateEstimateError, match="seed"):
            rate_estimate(runs_table(math.sqrt, seeds=(0,)))

    def test_missing_column(self):
        with pytest.raises(RateEstimateError):
            rate_estimate(pd.DataFrame({"horizon": [1, 2]}))

    def test_sign_adaptive_trend_is_flat(self, ball2):
        traces = []
        for horizon in (100, 400, 1600):
            for seed in (0, 1):
                adversary = Adversary(AdversaryKind.SIGN_ADAPTIVE, ball2, seed)
                cfg = InnerSolveConfig(eta=math.sqrt(horizon))
                trace = run_ftrl(QuadraticRegularizer(2), ball2, ball2, adversary, horizon, cfg, seed=seed)
                traces.append(("sign-adaptive", trace))
        estimate = rate_estimate(traces_frame(traces))
        assert estimate.headline == pytest.approx(0.5)
        rates = estimate.table["rate"].to_numpy()
        assert np.all(rates[1:] <= rates[:-1] * 1.25)


class TestSuiteModels:
    def test_run_ids_are_canonical(self):
        suite = BenchSuite.model_validate(suite_payload(horizons=[20, 10], seeds=[1, 0]))
        ids = [spec.run_id for spec in suite.run_specs()]
        assert ids == ["quad/ball/iid-extreme/T10/s0", "quad/ball/iid-extreme/T10/s1", "quad/ball/iid-extreme/T20/s0", "quad/ball/iid-extreme/T20/s1"]

    def test_regularizer_needs_one_source(self):
        with pytest.raises(ValueError, match="exactly one"):
            BenchSuite.model_validate(
                suite_payload(regularizers=[{"name": "both", "baseline": "quadratic", "path": "g.json"}])
            )

    def test_duplicate_names(self):
        with pytest.raises(ValueError, match="duplicate regularizer"):
            BenchSuite.model_validate(
                suite_payload(regularizers=[{"name": "q", "baseline": "quadratic"}, {"name": "q", "baseline": "entropy"}])
            )

    def test_dimension_mismatch(self):
        instance = {"name": "bad", "action_set": BALL2, "loss_set": {**BALL2, "dim": 3}}
        with pytest.raises(ValueError, match="dimensional"):
            BenchSuite.model_validate(suite_payload(instances=[instance]))

    def test_load_suite_resolves_files(self, tmp_path):
        (tmp_path / "ball.json").write_text(json.dumps(BALL2))
        (tmp_path / "suite.json").write_text(
            json.dumps(
                suite_payload(
                    regularizers=[{"name": "g", "path": "g.json"}],
                    instances=[{"name": "ball", "action_set": "ball.json", "loss_set": "ball.json"}],
                )
            )
        )
        suite = load_suite(tmp_path / "suite.json")
        assert suite.regularizers[0].path == tmp_path / "g.json"
        assert suite.instances[0].action_set.dim == 2

    def test_load_suite_collects_errors(self, tmp_path):
        path = tmp_path / "suite.json"
        path.write_text(json.dumps(suite_payload(horizons=[0], seeds=[-1])))
        with pytest.raises(ConfigValidationError) as e:
            load_suite(path)
        assert len(e.value.violations) == 2


class TestRunner:
    def test_completed_row(self):
        spec = BenchSuite.model_validate(suite_payload()).run_specs()[0]
        row = execute_run(spec)
        assert set(RUN_COLUMNS) <= set(row)
        assert row["status"] == RunStatus.COMPLETED.value
        assert row["regret_over_sqrt_t"] == pytest.approx(row["regret"] / math.sqrt(10))

    def test_missing_regularizer_file_is_a_failed_row(self, tmp_path):
        suite = BenchSuite.model_validate(
            suite_payload(regularizers=[{"name": "g", "path": str(tmp_path / "missing.json")}])
        )
        row = execute_run(suite.run_specs()[0])
        assert row["status"] == RunStatus.FAILED.value
        assert "FileNotFoundError" in row["error"]
        assert math.isnan(row["regret"])

    def test_failure_is_logged_under_its_run_id(self, tmp_path, log_records):
        suite = BenchSuite.model_validate(
            suite_payload(regularizers=[{"name": "g", "path": str(tmp_path / "missing.json")}])
        )
        spec = suite.run_specs()[0]
        execute_run(spec)
        failures = [r for r in log_records if r["level"].name == "WARNING"]
        assert failures
        assert failures[-1]["extra"]["run"] == spec.run_id
        assert failures[-1]["extra"]["run_tag"] == f" [{spec.run_id}]"

    def test_spec_survives_json(self):
        spec = BenchSuite.model_validate(suite_payload()).run_specs()[0]
        assert RunSpec.model_validate(spec.model_dump(mode="json")) == spec


class TestCompare:
    def test_single_cell(self, tmp_path):
        suite = BenchSuite.model_validate(suite_payload())
        report = compare(suite, tmp_path)
        stamp, runs = read_stamped(report.files["runs"])
        assert stamp == f"# config_digest={suite.digest()}"
        assert len(runs) == 1
        _, summary = read_stamped(report.files["summary"])
        assert len(summary) == 1
        assert summary.loc[0, "n"] == 1
        meta = json.loads(report.files["meta"].read_text())
        assert meta["config_digest"] == suite.digest()
        assert "numpy" in meta["versions"]

    def test_failed_run_is_recorded(self, tmp_path):
        suite = BenchSuite.model_validate(
            suite_payload(regularizers=[{"name": "quad", "baseline": "quadratic"}, {"name": "ent", "baseline": "entropy"}])
        )
        report = compare(suite, tmp_path)
        assert report.failed == 1
        _, runs = read_stamped(report.files["runs"])
        failed = runs[runs["status"] == "failed"]
        assert list(failed["regularizer"]) == ["ent"]
        assert "BaselineDomainError" in failed["error"].iloc[0]
        assert list(report.summary["regularizer"]) == ["quad"]

    def test_identical_bytes(self, tmp_path):
        suite = BenchSuite.model_validate(suite_payload(adversaries=["iid-extreme", "sign-adaptive"], seeds=[0, 1]))
        first = compare(suite, tmp_path / "a")
        second = compare(suite, tmp_path / "b")
        for name in ("runs", "summary", "gnuplot", "meta"):
            assert first.files[name].read_bytes() == second.files[name].read_bytes()

    def test_rates_and_gnuplot(self, tmp_path):
        suite = BenchSuite.model_validate(suite_payload(horizons=[10, 40], seeds=[0, 1]))
        report = compare(suite, tmp_path)
        assert set(report.rates) == {"quad/ball"}
        lines = report.files["gnuplot"].read_text().splitlines()
        assert lines[0] == f"# config_digest={suite.digest()}"
        assert lines[2] == "# quad ball iid-extreme"
        assert lines[3].split()[0] == "10"

    def test_synthesized_file_entry(self, tmp_path):
        centers = np.array([[a, b] for a in (-1, 0, 1) for b in (-1, 0, 1)], dtype=float)
        (tmp_path / "g.json").write_bytes(serialize(quadratic_regularizer(centers, cubic_L=1.0)))
        suite = BenchSuite.model_validate(
            suite_payload(regularizers=[{"name": "g", "path": "g.json"}]), context={"base_dir": tmp_path}
        )
        report = compare(suite, tmp_path / "out")
        assert report.failed == 0

    def test_summary_statistics(self):
        runs = pd.DataFrame(
            {
                "regularizer": ["q", "q", "q"],
                "instance": ["i", "i", "i"],
                "adversary": ["a", "a", "a"],
                "horizon": [4, 4, 4],
                "status": ["completed", "completed", "failed"],
                "regret_over_sqrt_t": [1.0, 3.0, math.nan],
            }
        )
        summary = summarize(runs)
        assert summary.loc[0, "mean"] == pytest.approx(2.0)
        assert summary.loc[0, "sd"] == pytest.approx(math.sqrt(2.0))
        assert summary.loc[0, "n"] == 2
