"""Reading and writing return series, run metadata and reports."""
import math
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
import structlog
import toml

import microgarch
from microgarch import exc
from microgarch.context import RunContext
from microgarch.engine import ReturnSeries

LOG = structlog.get_logger(__name__)

# enough digits that every float reads back to the same bits
FLOAT_FORMAT = "%.17g"

RETURN_COLUMN = "r"


def metadata_path(csv_path: Path) -> Path:
    return csv_path.with_suffix(".meta.toml")


def _ensure_parent(path: Path) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise exc.OutputError(path=str(path), ctx=RunContext(path=str(path))) from e


def write_frame(frame: pd.DataFrame, path: Path) -> None:
    _ensure_parent(path)
    try:
        frame.to_csv(path, float_format=FLOAT_FORMAT, index=False, lineterminator="\n")
    except OSError as e:
        raise exc.OutputError(path=str(path), ctx=RunContext(path=str(path))) from e


def write_toml(values: dict[str, Any], path: Path) -> None:
    _ensure_parent(path)
    try:
        with open(path, "w") as h:
            toml.dump(values, h)
    except OSError as e:
        raise exc.OutputError(path=str(path), ctx=RunContext(path=str(path))) from e


def write_trajectory(series: ReturnSeries, path: Path) -> Path:
    """Write a simulated series as CSV, one row per kept step, and its run metadata
    next to it.

    :raises OutputError: If either file cannot be written.
    :return: The path of the metadata file.
    """
    if series.diagnostics is None:
        raise ValueError("only simulated series carry a trajectory")

    write_frame(series.diagnostics, path)
    meta = dict(series.metadata(), version=microgarch.__version__)
    meta_path = metadata_path(path)
    write_toml(meta, meta_path)
    LOG.info("Wrote trajectory", path=str(path), metadata=str(meta_path))
    return meta_path


def read_returns(path: Path) -> ReturnSeries:
    """Read a return series from CSV. The returns are taken from the ``r`` column, or
    from the only column if there is just one.

    :raises MalformedCSV: If the file cannot be read, has no return column, or has a
        cell that is not a finite number. The error names the data row, from 1.
    """
    ctx = RunContext(path=str(path))
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except FileNotFoundError as e:
        raise exc.MalformedCSV(reason="no such file", ctx=ctx) from e
    except pd.errors.EmptyDataError as e:
        raise exc.MalformedCSV(reason="the file is empty", ctx=ctx) from e
    except (pd.errors.ParserError, OSError, UnicodeDecodeError) as e:
        raise exc.MalformedCSV(reason=f"cannot parse: {e}", ctx=ctx) from e

    if RETURN_COLUMN in frame.columns:
        column = frame[RETURN_COLUMN]
    elif len(frame.columns) == 1:
        column = frame.iloc[:, 0]
    else:
        raise exc.MalformedCSV(reason=f"no `{RETURN_COLUMN}` column", ctx=ctx)

    returns = np.empty(len(column))
    for i, cell in enumerate(column.tolist()):
        row = i + 1
        try:
            value = float(cell)
        except ValueError:
            value = math.nan
        if not math.isfinite(value):
            ctx.row = row
            raise exc.MalformedCSV(
                reason=f"`{cell}` is not a finite number", row=row, ctx=ctx
            )
        returns[i] = value

    LOG.debug("Read returns", path=str(path), rows=len(returns))
    return ReturnSeries(returns=returns)
