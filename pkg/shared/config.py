from pathlib import Path

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="FTRLSYN_",
        extra="ignore",
    )

    # Logging
    log_level: str = "INFO"
    debug: bool = False
    log_json: bool = False
    log_file: Path | None = None

    # Oracles
    membership_tol: float = 1e-9
    gauge_max_iter: int = 60
    max_cover_size: int = 200_000
    max_lattice_candidates: int = 2_000_000
    max_grid_size: int = 2_000
    lp_method: str = "highs-ds"

    # Synthesis defaults
    default_eps_bar: float = 0.25
    default_alpha: float = 1.0
    default_margin: float = 0.1
    default_c_guess: float = 1.0
    max_doublings: int = 20
    max_cut_rounds: int = 200
    cuts_per_center: int = 4
    cut_tolerance: float = 1e-6

    # Bench / task queue
    celery_broker_url: str = "memory://"
    celery_result_backend: str = "cache+memory://"
    celery_always_eager: bool = True

    # Reports
    report_timings: bool = False

    @field_validator("log_level")
    @classmethod
    def upper_level(cls, v: str) -> str:
        return v.upper()

    @property
    def effective_log_level(self) -> str:
        return "DEBUG" if self.debug else self.log_level


settings = Settings()
