import os

from celery import Celery

from shared.config import settings

# Configure Celery; eager by default so a bench run needs no broker
celery_app = Celery("bench")
celery_app.conf.update(
    broker_connection_retry_on_startup=True,
    broker_url=settings.celery_broker_url,
    result_backend=settings.celery_result_backend,
    task_always_eager=settings.celery_always_eager,
    task_eager_propagates=True,
    task_serializer="json",
    result_serializer="json",
    accept_content=["json"],
    timezone="UTC",
    enable_utc=True,
    task_acks_late=True,
    worker_prefetch_multiplier=1,
    task_default_queue="bench",
    task_track_started=True,
    imports=[
        "bench.tasks.runs",
    ],
)


if __name__ == "__main__":
    os.environ.setdefault("CELERY_WORKER_NAME", "bench-runner")
    argv = [
        "worker",
        "--loglevel=INFO",
        "--concurrency=2",
        "--queues=bench",
    ]
    celery_app.start(argv=argv)
