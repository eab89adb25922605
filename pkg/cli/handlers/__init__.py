from typing import Any, Callable

from cli.config import Command
from cli.handlers import bench, check, run, synthesize
from shared.models import ExitCode

Handler = Callable[[Any, str], ExitCode]

HANDLERS: dict[Command, Handler] = {
    Command.SYNTHESIZE: synthesize.handle,
    Command.RUN: run.handle,
    Command.BENCH: bench.handle,
    Command.CHECK: check.handle,
}
