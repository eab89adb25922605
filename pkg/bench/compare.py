"""Run a benchmark suite and write its report files.

Outputs in ``out_dir``: runs.csv (one row per run), summary.csv (mean and
sd of regret/sqrt(T) per regularizer, instance, adversary and horizon),
summary.dat (the same numbers as gnuplot blocks) and meta.json.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import pandas as pd
from pydantic import ValidationError

from bench.models import BenchSuite
from bench.regret import rate_estimate
from bench.runner import RUN_COLUMNS
from bench.tasks.runs import run_single
from bench.worker import celery_app
from shared.core import logger
from shared.digest import write_stamped_csv
from shared.errors import ConfigValidationError, RateEstimateError
from shared.models import RunStatus

FLOAT_FORMAT = "%.10g"
SUMMARY_KEYS = ["regularizer", "instance", "adversary", "horizon"]
_VERSIONED = ["numpy", "scipy", "pandas", "pydantic", "celery"]


@dataclass
class CompareReport:
    runs: pd.DataFrame
    summary: pd.DataFrame
    rates: dict[str, dict[str, float | bool]]
    digest: str
    files: dict[str, Path]

    @property
    def failed(self) -> int:
        return int((self.runs["status"] == RunStatus.FAILED.value).sum())


def load_suite(path: str | Path) -> BenchSuite:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigValidationError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from e
    try:
        return BenchSuite.model_validate(payload, context={"base_dir": path.parent})
    except ValidationError as e:
        raise ConfigValidationError(
            [f"{'.'.join(str(p) for p in err['loc']) or 'suite'}: {err['msg']}" for err in e.errors()]
        ) from e


def run_suite(suite: BenchSuite) -> pd.DataFrame:
    specs = suite.run_specs()
    logger.info(f"Dispatching {len(specs)} runs (eager={celery_app.conf.task_always_eager})")
    pending = [run_single.delay(spec.model_dump(mode="json")) for spec in specs]
    rows = [result.get() for result in pending]
    runs = pd.DataFrame(rows)
    extra = [c for c in runs.columns if c not in RUN_COLUMNS]
    # aggregation order is the canonical run-id order, whatever the completion order
    return runs[RUN_COLUMNS + extra].sort_values("run_id", kind="stable").reset_index(drop=True)


def summarize(runs: pd.DataFrame) -> pd.DataFrame:
    completed = runs[runs["status"] == RunStatus.COMPLETED.value]
    summary = (
        completed.groupby(SUMMARY_KEYS)["regret_over_sqrt_t"]
        .agg(mean="mean", sd="std", n="count")
        .reset_index()
    )
    summary["sd"] = summary["sd"].fillna(0.0)
    return summary.sort_values(SUMMARY_KEYS, kind="stable").reset_index(drop=True)


def estimate_rates(runs: pd.DataFrame) -> dict[str, dict[str, float | bool]]:
    """Headline rate per regularizer and instance, where the data allow one."""
    completed = runs[runs["status"] == RunStatus.COMPLETED.value]
    rates: dict[str, dict[str, float | bool]] = {}
    for (reg, inst), group in completed.groupby(["regularizer", "instance"], sort=True):
        try:
            estimate = rate_estimate(group[["adversary", "horizon", "seed", "regret"]])
        except RateEstimateError as e:
            logger.info(f"No rate estimate for {reg}/{inst}: {e}")
            continue
        rates[f"{reg}/{inst}"] = {
            "rate": estimate.headline,
            "growth": estimate.growth,
            "converging": estimate.converging,
        }
    return rates


def write_gnuplot(summary: pd.DataFrame, path: Path, digest: str) -> None:
    """One data block per (regularizer, instance, adversary), blocks separated by two blank lines."""
    lines = [f"# config_digest={digest}", "# horizon mean sd n"]
    for (reg, inst, adv), block in summary.groupby(["regularizer", "instance", "adversary"], sort=True):
        lines.append(f"# {reg} {inst} {adv}")
        for row in block.itertuples(index=False):
            lines.append(f"{row.horizon} {row.mean:.10g} {row.sd:.10g} {row.n}")
        lines.extend(["", ""])
    path.write_text("\n".join(lines), encoding="utf-8")


def _versions() -> dict[str, str]:
    versions = {}
    for name in _VERSIONED:
        try:
            versions[name] = version(name)
        except PackageNotFoundError:
            versions[name] = "unknown"
    return versions


def compare(suite: BenchSuite, out_dir: str | Path) -> CompareReport:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    runs = run_suite(suite)
    summary = summarize(runs)
    rates = estimate_rates(runs)
    digest = suite.digest()

    files = {
        "runs": out_dir / "runs.csv",
        "summary": out_dir / "summary.csv",
        "gnuplot": out_dir / "summary.dat",
        "meta": out_dir / "meta.json",
    }
    write_stamped_csv(runs, files["runs"], digest, FLOAT_FORMAT)
    write_stamped_csv(summary, files["summary"], digest, FLOAT_FORMAT)
    write_gnuplot(summary, files["gnuplot"], digest)
    meta = {
        "config_digest": digest,
        "runs": len(runs),
        "failed": int((runs["status"] == RunStatus.FAILED.value).sum()),
        "adversary_suite": "constructed benchmark adversaries; sign-adaptive responds to the played action",
        "rates": rates,
        "versions": _versions(),
    }
    files["meta"].write_text(json.dumps(meta, indent=1, sort_keys=True), encoding="utf-8")

    report = CompareReport(runs=runs, summary=summary, rates=rates, digest=digest, files=files)
    if report.failed:
        logger.warning(f"Benchmark finished with {report.failed} failed run(s) of {len(runs)}")
    else:
        logger.success(f"✅ Benchmark finished: {len(runs)} runs written to {out_dir}")
    return report
