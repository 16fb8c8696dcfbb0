import math

import pytest
import pytest_asyncio

from src.gaugelab.database.operations import ResultsDatabase
from src.gaugelab.experiments.schemas import ResultRecord


def _record(kind="linear_benchmark", verdict="pass", **metrics):
    return ResultRecord(
        name=f"{kind}_run",
        kind=kind,
        verdict=verdict,
        config_hash="a" * 64,
        input_digest="b" * 40,
        seed=3,
        metrics=metrics,
        notes=["first note"],
    )


@pytest_asyncio.fixture
async def db(tmp_path):
    database = ResultsDatabase(tmp_path / "ledger.db")
    await database.init_db()
    return database


@pytest.mark.asyncio
async def test_save_and_read_back(db, tmp_path):
    """Test a run survives the round trip through the ledger."""
    run_id = await db.save_run(_record(max_norm_drift=1e-14), tmp_path / "run.json")

    row = await db.get_run(run_id)

    assert row["kind"] == "linear_benchmark"
    assert row["seed"] == 3
    assert row["metrics"] == {"max_norm_drift": 1e-14}
    assert row["notes"] == ["first note"]
    assert row["result_path"].endswith("run.json")


@pytest.mark.asyncio
async def test_nan_metric_stored_as_null(db):
    """Test NaN metrics are stored as JSON null."""
    run_id = await db.save_run(_record(max_width_error=math.nan))

    row = await db.get_run(run_id)

    assert row["metrics"] == {"max_width_error": None}


@pytest.mark.asyncio
async def test_recent_runs_newest_first_and_filtered(db):
    """Test ordering, limit and the kind filter."""
    await db.save_run(_record())
    await db.save_run(_record(kind="blowup_scan", verdict="blowup"))
    await db.save_run(_record())

    recent = await db.get_recent_runs(limit=2)
    scans = await db.get_recent_runs(kind="blowup_scan")

    assert [r["id"] for r in recent] == [3, 2]
    assert [r["verdict"] for r in scans] == ["blowup"]


@pytest.mark.asyncio
async def test_missing_run(db):
    """Test unknown ids."""
    assert await db.get_run(42) is None
