"""CSV and JSON artifacts with fixed headers and 17-significant-digit floats."""

import csv
import json
import logging
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from substrate_oscillator.exceptions import ConfigError

logger = logging.getLogger(__name__)

TRAJECTORY_HEADER = ("t", "x", "y")
SINGULAR_CYCLE_HEADER = ("arc_id", "t", "x", "y")
CYCLE_HEADER = ("t", "x", "y")
DIAGRAM_HEADER = ("eta", "eq_x", "eq_y", "stability", "cycle_max_x", "cycle_l2")
HET_HEADER = ("mu1", "etaL_het", "etaR_het")
RESIDUAL_HEADER = ("stage", "chart", "max_residual")
CONNECTION_HEADER = ("t", "c1", "c2")


def format_float(value: float, digits: int = 17) -> str:
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, f".{digits}g")


def _cell(value: Any, digits: int) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (float, np.floating)):
        return format_float(float(value), digits)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence], digits: int = 17) -> Path:
    """Write ``rows`` under ``header``; floats get ``digits`` significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            if len(row) != len(header):
                raise ValueError(f"row of length {len(row)} under a {len(header)}-column header")
            writer.writerow([_cell(v, digits) for v in row])
            count += 1
    logger.debug(f"Wrote {count} rows to {path}")
    return path


def _jsonable(value: Any, digits: int) -> Any:
    """Plain JSON types; floats rounded to ``digits`` significant digits, non-finite ones as strings."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_jsonable(v, digits) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return format_float(value)
        return float(format_float(value, digits))
    if isinstance(value, complex):
        return [_jsonable(value.real, digits), _jsonable(value.imag, digits)]
    return value


def dumps(record: dict, digits: int = 17) -> str:
    """Deterministic JSON: sorted keys, floats at ``digits`` significant digits."""
    return json.dumps(_jsonable(record, digits), sort_keys=True, indent=2)


def write_json(path: str | Path, record: dict, digits: int = 17) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(record, digits) + "\n", encoding="utf-8")
    logger.debug(f"Wrote {path}")
    return path


def read_het_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(mu1, etaL_het, etaR_het) columns of a heteroclinic-curve CSV.

    The mu1 column must be nonnegative and strictly increasing.

    Raises:
        ConfigError: If the file is missing, its header is not the het-curve header,
            a row does not hold three numbers, or the mu1 column is out of order
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"heteroclinic table not found: {path}")
    rows = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader, ()))
        if header != HET_HEADER:
            raise ConfigError(f"{path}: expected header {','.join(HET_HEADER)}, got {','.join(header)}")
        for row in reader:
            if not row:
                continue
            if len(row) != len(HET_HEADER):
                raise ConfigError(f"{path}:{reader.line_num}: expected {len(HET_HEADER)} columns, got {len(row)}")
            try:
                rows.append(tuple(float(v) for v in row))
            except ValueError as e:
                raise ConfigError(f"{path}:{reader.line_num}: {e}") from e
    if len(rows) < 2:
        raise ConfigError(f"{path}: need at least two rows")
    data = np.array(rows)
    if not np.all(np.isfinite(data)):
        raise ConfigError(f"{path}: non-finite value in table")
    mu1 = data[:, 0]
    if mu1[0] < 0.0:
        raise ConfigError(f"{path}: mu1 must be >= 0, got {mu1[0]:g}")
    if np.any(np.diff(mu1) <= 0.0):
        raise ConfigError(f"{path}: mu1 column must be strictly increasing")
    return mu1, data[:, 1], data[:, 2]
