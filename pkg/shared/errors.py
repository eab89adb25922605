"""Error hierarchy shared by every package.

The CLI maps ``ProgramInfeasibleError`` (and its doubling variant) to exit
status 1 and everything else to exit status 2.
"""
from __future__ import annotations

from dataclasses import dataclass, field


class FtrlSynthError(Exception):
    """Base exception for the toolkit."""
    pass


class ConfigValidationError(FtrlSynthError):
    """Invalid configuration; carries every violation, not just the first."""

    def __init__(self, violations: list[str] | str):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class InputError(FtrlSynthError):
    """Bad argument to an oracle (zero direction, dimension mismatch)."""
    pass


class SymmetryError(ConfigValidationError):
    """Body is not centrally symmetric where symmetry is required."""
    pass


class DegenerateBodyError(ConfigValidationError):
    """Body has empty interior (inner radius 0)."""
    pass


class ResourceError(FtrlSynthError):
    """A requested grid, cover or sample exceeds its budget."""

    def __init__(self, message: str, estimate: float | None = None):
        self.estimate = estimate
        if estimate is not None:
            message = f"{message} (estimate: {estimate:.3g})"
        super().__init__(message)


class NumericalError(FtrlSynthError):
    """A numerical routine failed to converge or returned garbage."""
    pass


class RegularizerFormatError(FtrlSynthError):
    """Malformed serialized regularizer."""

    def __init__(self, message: str, location: str = "<document>"):
        self.location = location
        super().__init__(f"{location}: {message}")


@dataclass(frozen=True)
class InfeasibilityCertificate:
    """What the cutting-plane solver knew when the relaxation went infeasible."""

    c_guess: float
    round: int
    cut_counts: dict[str, int] = field(default_factory=dict)
    reason: str = ""

    def describe(self) -> str:
        counts = ", ".join(f"{k}={v}" for k, v in sorted(self.cut_counts.items()))
        return f"C={self.c_guess:g} round={self.round} [{counts}] {self.reason}".strip()


class ProgramInfeasibleError(FtrlSynthError):
    """The program is infeasible at the current constants."""

    def __init__(self, message: str, certificate: InfeasibilityCertificate):
        self.certificate = certificate
        super().__init__(f"{message}: {certificate.describe()}")


class DoublingExhaustedError(ProgramInfeasibleError):
    """Doubling search hit its cap without a feasible program."""
    pass


class BaselineDomainError(ConfigValidationError):
    """Baseline regularizer used outside its domain."""
    pass


class RateEstimateError(ConfigValidationError):
    """Not enough horizons or seeds to estimate a rate."""
    pass
