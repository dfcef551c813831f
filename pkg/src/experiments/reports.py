"""
CSV / JSON report writers. Floats are printed with 6 significant digits and
every file carries the config hash.
"""

from pathlib import Path

import pandas as pd

from src.utils.io import atomic_write_text, write_json

FLOAT_FORMAT = "%.6g"


def write_csv(rows: list[dict], path: str | Path, config_hash: str, columns: list[str] | None = None) -> Path:
    frame = pd.DataFrame(rows, columns=columns)
    frame["config_hash"] = config_hash
    text = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return atomic_write_text(path, text)


def write_report(path: str | Path, payload: dict, config_hash: str) -> Path:
    return write_json(path, {**payload, "config_hash": config_hash})
