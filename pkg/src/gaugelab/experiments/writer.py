"""Result files: JSON record, CSV series and a gnuplot script, written atomically."""
import logging
import os
import tempfile
from pathlib import Path
from typing import Dict

import pandas as pd

from ..core.errors import ConfigurationError
from .schemas import ResultRecord

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.15g"


def ensure_writable(directory: Path) -> Path:
    """Create the output directory if needed and check it accepts files."""
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ConfigurationError(f"Cannot create output directory {directory}: {e}") from e
    if not os.access(directory, os.W_OK | os.X_OK):
        raise ConfigurationError(f"Output directory {directory} is not writable")
    return directory


def atomic_write_text(path: Path, text: str) -> Path:
    """Write to a temp file in the same directory, then rename over path."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def series_to_csv(series: pd.DataFrame) -> str:
    return series.to_csv(index=False, float_format=FLOAT_FORMAT, na_rep="nan", lineterminator="\n")


def gnuplot_script(csv_name: str, columns, title: str) -> str:
    """Data-only plot script: every numeric column against the first."""
    lines = [
        f"# {title}",
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set grid",
        f"set xlabel '{columns[0]}'" if columns else "",
    ]
    if len(columns) > 1:
        plots = ", \\\n     ".join(
            f"'{csv_name}' using 1:{index} with linespoints" for index in range(2, len(columns) + 1)
        )
        lines.append(f"plot {plots}")
    lines.append("pause -1")
    return "\n".join(line for line in lines if line) + "\n"


def write_outputs(record: ResultRecord, series: pd.DataFrame, directory: Path, stem: str) -> Dict[str, Path]:
    """
    Write <stem>.csv, <stem>.gp and <stem>.json into directory.

    The JSON record is written last so its presence marks a complete run.
    """
    directory = ensure_writable(directory)
    csv_path = directory / f"{stem}.csv"
    gp_path = directory / f"{stem}.gp"
    json_path = directory / f"{stem}.json"

    columns = list(series.columns)
    atomic_write_text(csv_path, series_to_csv(series))
    atomic_write_text(gp_path, gnuplot_script(csv_path.name, columns, f"{record.kind}: {record.name}"))

    record.series_file = csv_path.name
    record.series_columns = columns
    atomic_write_text(json_path, record.model_dump_json(indent=2) + "\n")
    logger.debug(f"Wrote {json_path}, {csv_path}, {gp_path}")
    return {"json": json_path, "csv": csv_path, "gnuplot": gp_path}
