"""SQLite schema for the run ledger."""
import aiosqlite
from pathlib import Path

DB_SCHEMA = """
CREATE TABLE IF NOT EXISTS experiment_runs (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    timestamp DATETIME DEFAULT CURRENT_TIMESTAMP,
    name TEXT NOT NULL,
    kind TEXT NOT NULL,
    verdict TEXT NOT NULL,
    config_hash TEXT NOT NULL,
    input_digest TEXT NOT NULL,
    seed INTEGER NOT NULL,
    duration_seconds REAL,
    metrics TEXT,
    notes TEXT,
    result_path TEXT
);

CREATE INDEX IF NOT EXISTS idx_runs_kind_timestamp ON experiment_runs(kind, timestamp);
CREATE INDEX IF NOT EXISTS idx_runs_config_hash ON experiment_runs(config_hash);
"""


async def init_results_db(db_path: Path) -> None:
    """Create the run ledger tables if missing."""
    async with aiosqlite.connect(db_path) as db:
        await db.executescript(DB_SCHEMA)
        await db.commit()
