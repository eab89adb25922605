from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import prometheus_client

METRICS_PREFIX = "ftrlsynth"


@dataclass(frozen=True)
class SolverMetrics:
    registry: prometheus_client.CollectorRegistry
    rounds: prometheus_client.Counter
    cuts: prometheus_client.Counter
    lp_duration: prometheus_client.Histogram
    max_violation: prometheus_client.Gauge
    infeasible: prometheus_client.Counter

    def write(self, path: str | Path) -> None:
        prometheus_client.write_to_textfile(str(path), self.registry)


def solver_metrics_factory(
    metrics_prefix: str = METRICS_PREFIX,
    registry: prometheus_client.CollectorRegistry | None = None,
) -> SolverMetrics:
    # a private registry per solve; the global one would reject re-registration
    used_registry = registry or prometheus_client.CollectorRegistry()

    rounds = prometheus_client.Counter(
        name=f"{metrics_prefix}_cut_rounds",
        documentation="Cutting-plane rounds performed.",
        registry=used_registry,
    )

    cuts = prometheus_client.Counter(
        name=f"{metrics_prefix}_cuts",
        documentation="Cuts added to the relaxation by family.",
        labelnames=["family"],
        registry=used_registry,
    )

    lp_duration = prometheus_client.Histogram(
        name=f"{metrics_prefix}_lp_duration",
        documentation="Histogram of LP relaxation solve time (in seconds)",
        unit="seconds",
        registry=used_registry,
    )

    max_violation = prometheus_client.Gauge(
        name=f"{metrics_prefix}_max_violation",
        documentation="Largest constraint violation at the last candidate.",
        registry=used_registry,
    )

    infeasible = prometheus_client.Counter(
        name=f"{metrics_prefix}_infeasible",
        documentation="Relaxations found infeasible.",
        registry=used_registry,
    )

    return SolverMetrics(used_registry, rounds, cuts, lp_duration, max_violation, infeasible)
