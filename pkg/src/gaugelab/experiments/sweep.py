"""Parameter sweeps: one run per value of a scalar config field."""
import asyncio
import logging
import math
from copy import deepcopy
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..core.errors import ConfigurationError
from .runner import PRIMARY_METRIC, RunResult, execute
from .schemas import ConfigFileError, ExperimentConfig, canonical_dict, to_toml, validate_config
from .writer import atomic_write_text, ensure_writable, series_to_csv

logger = logging.getLogger(__name__)

Scalar = Union[bool, int, float, str]


def _parse_scalar(token: str) -> Scalar:
    lowered = token.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    for cast in (int, float):
        try:
            return cast(token)
        except ValueError:
            pass
    return token


def parse_values(text: str) -> List[Scalar]:
    """Comma-separated value list, e.g. "0, 0.1, 0.3"."""
    tokens = [t.strip() for t in text.split(",") if t.strip()]
    if not tokens:
        raise ConfigurationError("sweep needs at least one value")
    return [_parse_scalar(t) for t in tokens]


def _step(node: Any, part: str, path: str) -> Any:
    if isinstance(node, dict):
        if part not in node:
            raise ConfigurationError(f"sweep parameter {path!r}: no field {part!r}")
        return node[part]
    if isinstance(node, list):
        try:
            return node[int(part)]
        except (ValueError, IndexError):
            raise ConfigurationError(f"sweep parameter {path!r}: bad list index {part!r}") from None
    raise ConfigurationError(f"sweep parameter {path!r}: {part!r} is below a scalar")


def set_parameter(data: Dict[str, Any], path: str, value: Scalar) -> Dict[str, Any]:
    """
    Copy of data with the scalar at a dotted path replaced.

    List elements are addressed by index ("signaling.remote.0.slope").

    Raises:
        ConfigurationError: Unknown path or a non-scalar target
    """
    parts = path.split(".")
    if not path or any(not p for p in parts):
        raise ConfigurationError(f"malformed sweep parameter {path!r}")
    updated = deepcopy(data)
    parent = updated
    for part in parts[:-1]:
        parent = _step(parent, part, path)
    current = _step(parent, parts[-1], path)
    if isinstance(current, (dict, list)):
        raise ConfigurationError(f"sweep parameter {path!r} is not a scalar field")
    if isinstance(parent, list):
        parent[int(parts[-1])] = value
    else:
        parent[parts[-1]] = value
    return updated


def _value_label(value: Scalar) -> str:
    return str(value).replace("/", "_").replace(" ", "_")


def member_configs(config: ExperimentConfig, path: str, values: Sequence[Scalar]) -> List[ExperimentConfig]:
    """Validated config per value; any invalid member fails the whole sweep up front."""
    base = canonical_dict(config)
    members = []
    for value in values:
        data = set_parameter(base, path, value)
        data.setdefault("output", {})["stem"] = f"{config.stem}__{path}={_value_label(value)}"
        try:
            members.append(validate_config(data))
        except ConfigFileError as e:
            raise ConfigFileError(f"sweep value {value!r} for {path}: {e}", e.diagnostics) from e
    return members


@dataclass
class SweepResult:
    parameter: str
    runs: List[RunResult]
    summary: pd.DataFrame
    paths: Dict[str, Path] = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        """Worst member exit code (blow-up outranks fail)."""
        return max((r.exit_code for r in self.runs), default=0)


def summarize(parameter: str, values: Sequence[Scalar], runs: Sequence[RunResult]) -> pd.DataFrame:
    rows = []
    previous: Optional[float] = None
    for value, run in zip(values, runs):
        metric = PRIMARY_METRIC[run.record.kind]
        statistic = run.record.metrics.get(metric, math.nan)
        ratio = math.nan
        if previous is not None and statistic != 0.0 and np.isfinite(statistic):
            ratio = previous / statistic
        rows.append({
            "value": value,
            "verdict": run.record.verdict,
            "metric": metric,
            "statistic": statistic,
            "ratio_to_previous": ratio,
        })
        previous = statistic
    return pd.DataFrame(rows, columns=["value", "verdict", "metric", "statistic", "ratio_to_previous"])


def is_monotone(series: pd.Series) -> bool:
    values = series.dropna().to_numpy(dtype=float)
    if values.size < 2:
        return True
    steps = np.diff(values)
    return bool(np.all(steps >= 0) or np.all(steps <= 0))


async def run_sweep(
    config: ExperimentConfig,
    parameter: str,
    values: Sequence[Scalar],
    output_dir: Path,
    workers: int = 1,
) -> SweepResult:
    """Run members concurrently (at most `workers` at once); write the summary after all finish."""
    if workers < 1:
        raise ConfigurationError("workers must be at least 1")
    members = member_configs(config, parameter, values)
    output_dir = ensure_writable(output_dir)
    semaphore = asyncio.Semaphore(workers)

    async def run_member(member: ExperimentConfig) -> RunResult:
        async with semaphore:
            logger.info(f"Sweep member {member.stem}")
            return await asyncio.to_thread(execute, member, to_toml(member).encode(), output_dir)

    runs = await asyncio.gather(*(run_member(m) for m in members))

    summary = summarize(parameter, values, runs)
    stem = f"{config.stem}__sweep"
    summary_path = atomic_write_text(output_dir / f"{stem}.csv", series_to_csv(summary))
    monotone = is_monotone(summary["statistic"])
    notes = "\n".join([
        f"parameter = {parameter}",
        f"values = {list(values)}",
        f"statistic monotone in value: {monotone}",
    ])
    notes_path = atomic_write_text(output_dir / f"{stem}.txt", notes + "\n")
    logger.info(f"Sweep over {parameter}: {len(runs)} runs, monotone={monotone}")
    return SweepResult(parameter, list(runs), summary, {"summary": summary_path, "notes": notes_path})
