"""Run ledger operations."""
import aiosqlite
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional

from ..experiments.schemas import ResultRecord
from .schema import init_results_db

logger = logging.getLogger(__name__)


def _json_metrics(metrics: Dict[str, float]) -> str:
    # NaN is not valid JSON
    return json.dumps({k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in metrics.items()})


class ResultsDatabase:
    def __init__(self, db_path: Path):
        self.db_path = db_path

    async def init_db(self) -> None:
        await init_results_db(self.db_path)

    async def save_run(self, record: ResultRecord, result_path: Optional[Path] = None) -> int:
        """Append one run; returns its row id."""
        async with aiosqlite.connect(self.db_path) as db:
            cursor = await db.execute(
                """
                INSERT INTO experiment_runs
                (name, kind, verdict, config_hash, input_digest, seed,
                 duration_seconds, metrics, notes, result_path)
                VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
                """,
                (
                    record.name, record.kind, record.verdict,
                    record.config_hash, record.input_digest, record.seed,
                    record.duration_seconds, _json_metrics(record.metrics),
                    json.dumps(record.notes), str(result_path) if result_path else None,
                )
            )
            await db.commit()
            logger.debug(f"Recorded run {cursor.lastrowid} ({record.kind}/{record.verdict})")
            return cursor.lastrowid

    async def get_recent_runs(self, kind: Optional[str] = None, limit: int = 10) -> List[Dict[str, Any]]:
        """Most recent runs first, optionally for one experiment kind."""
        query = "SELECT * FROM experiment_runs"
        params: tuple = ()
        if kind:
            query += " WHERE kind = ?"
            params = (kind,)
        query += " ORDER BY id DESC LIMIT ?"
        async with aiosqlite.connect(self.db_path) as db:
            db.row_factory = aiosqlite.Row
            async with db.execute(query, params + (limit,)) as cursor:
                rows = await cursor.fetchall()
                return [self._decode(dict(row)) for row in rows]

    async def get_run(self, run_id: int) -> Optional[Dict[str, Any]]:
        async with aiosqlite.connect(self.db_path) as db:
            db.row_factory = aiosqlite.Row
            async with db.execute("SELECT * FROM experiment_runs WHERE id = ?", (run_id,)) as cursor:
                row = await cursor.fetchone()
                return self._decode(dict(row)) if row else None

    @staticmethod
    def _decode(row: Dict[str, Any]) -> Dict[str, Any]:
        row['metrics'] = json.loads(row['metrics']) if row.get('metrics') else {}
        row['notes'] = json.loads(row['notes']) if row.get('notes') else []
        return row
