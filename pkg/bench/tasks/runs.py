from typing import Any

from celery import shared_task

from bench.models import RunSpec
from bench.runner import execute_run
from shared.core import logger


@shared_task(bind=True, name="bench.tasks.runs.run_single")
def run_single(self, payload: dict[str, Any]) -> dict[str, Any]:
    """Run one (regularizer, instance, adversary, horizon, seed) cell of a suite"""
    spec = RunSpec.model_validate(payload)
    logger.debug(f"Task {self.request.id}: starting {spec.run_id}")
    return execute_run(spec)
