"""Config-driven experiments: schemas, builders, runner, sweeps and the acceptance suite."""
from .schemas import ExperimentConfig, ResultRecord, ConfigFileError, load_config, parse_config, to_toml
from .runner import ExperimentOutcome, RunResult, HANDLERS, PRIMARY_METRIC, execute, run_experiment
from .sweep import SweepResult, parse_values, run_sweep, set_parameter
from .verify import CRITERIA, CriterionResult, VerificationReport, run_verification
from .acceptance_config import AcceptanceConfig

__all__ = [
    'ExperimentConfig',
    'ResultRecord',
    'ConfigFileError',
    'load_config',
    'parse_config',
    'to_toml',
    'ExperimentOutcome',
    'RunResult',
    'HANDLERS',
    'PRIMARY_METRIC',
    'execute',
    'run_experiment',
    'SweepResult',
    'parse_values',
    'run_sweep',
    'set_parameter',
    'CRITERIA',
    'CriterionResult',
    'VerificationReport',
    'run_verification',
    'AcceptanceConfig',
]
