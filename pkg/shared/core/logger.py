"""Loguru sinks whose records carry the subcommand, config digest and bench run id.

Handlers set the tags with ``log_context``; a record logged outside any
context shows ``-`` in their place.
"""
import sys
from contextlib import contextmanager
from typing import Any, Iterator

from loguru import logger as _logger

from shared.config import settings

DIGEST_CHARS = 12

LOG_LEVEL = settings.effective_log_level
LOG_FORMAT = (
    "<green>{time:HH:mm:ss.SSS}</green> | "
    "<level>{level: <7}</level> | "
    "<magenta>{extra[command]}@{extra[digest]}</magenta>{extra[run_tag]} | "
    "<cyan>{name}</cyan>:<cyan>{line}</cyan> - "
    "<level>{message}</level>"
)
JSON_LOGS = settings.log_json and not settings.debug
LOG_FILE_PATH = settings.log_file


def _tag(record: dict[str, Any]) -> None:
    extra = record["extra"]
    run = extra.get("run")
    extra["run_tag"] = f" [{run}]" if run else ""


@contextmanager
def log_context(*, command: str | None = None, digest: str | None = None, run: str | None = None) -> Iterator[None]:
    """Tag every record logged inside the block, whichever module logs it."""
    fields = {"command": command, "digest": digest[:DIGEST_CHARS] if digest else None, "run": run}
    with _logger.contextualize(**{k: v for k, v in fields.items() if v is not None}):
        yield


handlers: list[dict[str, Any]] = [
    # stdout belongs to subcommand output
    {
        "sink": sys.stderr,
        "format": LOG_FORMAT,
        "level": LOG_LEVEL,
        "serialize": JSON_LOGS,
        "backtrace": False,
        "diagnose": settings.debug,
    }
]
if LOG_FILE_PATH is not None:
    LOG_FILE_PATH.parent.mkdir(parents=True, exist_ok=True)
    handlers.append(
        {
            "sink": LOG_FILE_PATH,
            "level": LOG_LEVEL,
            "serialize": True,
            "rotation": "00:00",
            "retention": "14 days",
            "compression": "gz",
        }
    )

_logger.configure(handlers=handlers, extra={"command": "-", "digest": "-", "run": None}, patcher=_tag)

logger = _logger
