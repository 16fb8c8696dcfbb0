"""Configuration management."""
import os
from dataclasses import dataclass
from dotenv import load_dotenv

load_dotenv()


@dataclass
class LabConfig:
    # Output locations
    OUTPUT_DIR: str = os.getenv("LAB_OUTPUT_DIR", "./results")
    DB_PATH: str = os.getenv("LAB_DB_PATH", "./lab_runs.db")
    RECORD_RUNS: bool = os.getenv("LAB_RECORD_RUNS", "true").lower() == "true"

    # Sweep execution
    WORKERS: int = int(os.getenv("LAB_WORKERS", "1"))

    # Numerics
    NODE_FLOOR: float = float(os.getenv("LAB_NODE_FLOOR", "1e-12"))
    MAX_DENSITY_MATRIX_POINTS: int = int(os.getenv("LAB_MAX_DENSITY_MATRIX_POINTS", "512"))
    BLOWUP_NORM_GROWTH: float = float(os.getenv("LAB_BLOWUP_NORM_GROWTH", "10.0"))
    BLOWUP_AMPLITUDE: float = float(os.getenv("LAB_BLOWUP_AMPLITUDE", "1e150"))

    # Logging
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")

    def validate(self):
        """Validate configuration."""
        if self.WORKERS < 1:
            raise ValueError("LAB_WORKERS must be at least 1")
        if not 0 < self.NODE_FLOOR <= 1e-6:
            raise ValueError("LAB_NODE_FLOOR must lie in (0, 1e-6]")
        if self.MAX_DENSITY_MATRIX_POINTS < 8:
            raise ValueError("LAB_MAX_DENSITY_MATRIX_POINTS must be at least 8")
        if self.BLOWUP_NORM_GROWTH <= 1.0:
            raise ValueError("LAB_BLOWUP_NORM_GROWTH must exceed 1")
        if self.BLOWUP_AMPLITUDE <= 0:
            raise ValueError("LAB_BLOWUP_AMPLITUDE must be positive")


config = LabConfig()
