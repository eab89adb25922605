"""Benchmark suite: adversaries, baselines, regret and rate estimates.

Import ``bench.compare`` explicitly for suite execution; it pulls in the
Celery app.
"""
