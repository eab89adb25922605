"""Flat ``key=value`` report files."""
from __future__ import annotations

import math
from pathlib import Path
from typing import Any


def format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "nan" if math.isnan(value) else f"{value:.12g}"
    if value is None:
        return ""
    return str(value).replace("\n", " ")


def write_report(path: str | Path, items: dict[str, Any]) -> Path:
    """``config_digest`` comes first, the rest in insertion order."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    keys = sorted(items, key=lambda k: k != "config_digest")
    path.write_text("".join(f"{k}={format_value(items[k])}\n" for k in keys), encoding="utf-8")
    return path


def read_report(path: str | Path) -> dict[str, str]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return dict(line.split("=", 1) for line in lines if line and not line.startswith("#"))
