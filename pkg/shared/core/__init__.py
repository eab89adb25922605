from .logger import log_context, logger

__all__ = ["log_context", "logger"]
