import hashlib
import json
from pathlib import Path
from typing import Any

import pandas as pd


def canonical_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), allow_nan=True)


def config_digest(payload: Any) -> str:
    """sha256 over canonical JSON, stable across key ordering"""
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()


def write_stamped_csv(frame: pd.DataFrame, path: str | Path, digest: str, float_format: str = "%.10g") -> Path:
    """CSV preceded by one ``# config_digest=...`` line; read back with ``skiprows=1``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        handle.write(f"# config_digest={digest}\n")
        frame.to_csv(handle, index=False, float_format=float_format, lineterminator="\n")
    return path
