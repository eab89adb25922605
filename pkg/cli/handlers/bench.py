from bench.compare import compare, load_suite
from cli.config import BenchBlock
from shared.models import ExitCode


def handle(block: BenchBlock, digest: str) -> ExitCode:
    """Run failures end up in runs.csv; the command itself still succeeds."""
    compare(load_suite(block.suite), block.out_dir)
    return ExitCode.OK
