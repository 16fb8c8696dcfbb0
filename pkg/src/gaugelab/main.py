"""CLI interface for the gauge lab."""
import asyncio
import logging
import sys
from pathlib import Path
from typing import Optional

import click
from rich.console import Console
from rich.logging import RichHandler

from .config import config
from .core.errors import BlowupError, ConfigurationError, LabError
from .database.operations import ResultsDatabase
from .display.report import (
    create_criteria_table,
    create_history_table,
    create_run_table,
    create_sweep_table,
    format_verdict,
)
from .experiments.runner import RunResult, execute
from .experiments.schemas import ConfigFileError, ExperimentConfig, load_config, to_toml
from .experiments.sweep import parse_values, run_sweep
from .experiments.verify import CRITERIA, run_verification
from .experiments.writer import ensure_writable

console = Console()
logger = logging.getLogger(__name__)

EXIT_CONFIG_ERROR = 2
EXIT_BLOWUP = 3


def setup_logging(verbose: bool) -> None:
    logging.root.handlers = []
    rich_handler = RichHandler(
        console=console,
        show_time=True,
        show_path=False,
        markup=False,
        rich_tracebacks=True,
    )
    rich_handler.setFormatter(logging.Formatter("%(message)s"))
    logging.root.addHandler(rich_handler)
    logging.root.setLevel(logging.DEBUG if verbose else getattr(logging, config.LOG_LEVEL.upper(), logging.INFO))


def report_config_error(error: Exception) -> None:
    """Print a configuration problem with its diagnostics and exit 2."""
    console.print(f"[bold red]Configuration error:[/bold red] {error}")
    for diagnostic in getattr(error, "diagnostics", []):
        console.print(f"  [red]-[/red] {diagnostic}")
    sys.exit(EXIT_CONFIG_ERROR)


def report_blowup(error: BlowupError) -> None:
    """A blow-up that escaped the experiment handler still exits 3."""
    console.print(f"[bold red]Blow-up:[/bold red] {error.diagnostic.describe()}")
    sys.exit(EXIT_BLOWUP)


def resolve_output(experiment: ExperimentConfig, out: Optional[str]) -> Path:
    return Path(out or experiment.output.directory or config.OUTPUT_DIR)


async def record_run(result: RunResult) -> None:
    """Append to the run ledger; ledger problems never change the verdict."""
    if not config.RECORD_RUNS:
        return
    try:
        db = ResultsDatabase(Path(config.DB_PATH))
        await db.init_db()
        await db.save_run(result.record, result.paths.get("json"))
    except Exception as e:
        logger.warning(f"Could not record run in {config.DB_PATH}: {e}")


@click.group()
@click.option('--verbose', is_flag=True, help='Debug logging')
def cli(verbose):
    """Numerical lab for linear, linearizable and nonlinear Schroedinger dynamics."""
    setup_logging(verbose)


@cli.command()
@click.argument('config_path', type=click.Path(dir_okay=False))
@click.option('--out', default=None, help='Output directory (overrides the config)')
def run(config_path, out):
    """Run one experiment. Exit 0 pass, 1 fail, 2 config error, 3 blow-up."""
    async def run():
        experiment, raw = load_config(Path(config_path))
        output_dir = ensure_writable(resolve_output(experiment, out))
        result = await asyncio.to_thread(execute, experiment, raw, output_dir)
        await record_run(result)
        return result

    try:
        result = asyncio.run(run())
    except BlowupError as e:
        report_blowup(e)
    except LabError as e:
        report_config_error(e)

    console.print(create_run_table(result.record))
    for note in result.record.notes:
        console.print(f"[dim]- {note}[/dim]")
    console.print(f"Results: {result.paths['json']}")
    sys.exit(result.exit_code)


@cli.command()
@click.argument('config_path', type=click.Path(dir_okay=False))
@click.option('--param', 'parameter', required=True, help='Dotted path of a scalar field, e.g. coefficients.mu2')
@click.option('--values', 'values_text', required=True, help='Comma-separated values')
@click.option('--workers', default=None, type=int, help='Concurrent members (default LAB_WORKERS)')
@click.option('--out', default=None, help='Output directory (overrides the config)')
def sweep(config_path, parameter, values_text, workers, out):
    """Run one experiment per value of a scalar config field."""
    async def run():
        experiment, _ = load_config(Path(config_path))
        values = parse_values(values_text)
        result = await run_sweep(
            experiment,
            parameter,
            values,
            resolve_output(experiment, out),
            workers or config.WORKERS,
        )
        for member in result.runs:
            await record_run(member)
        return result

    try:
        result = asyncio.run(run())
    except BlowupError as e:
        report_blowup(e)
    except LabError as e:
        report_config_error(e)

    console.print(create_sweep_table(parameter, result.summary.to_dict("records")))
    console.print(f"Summary: {result.paths['summary']}")
    sys.exit(result.exit_code)


@cli.command()
@click.option('--out', default=None, help='Directory for the verification summary')
@click.option('--only', multiple=True, type=click.Choice(list(CRITERIA)), help='Run selected criteria only')
@click.option('--quick', is_flag=True, help='Reduced problem sizes for smoke runs')
def verify(out, only, quick):
    """Run the acceptance suite; exit 1 if any criterion fails."""
    try:
        report = run_verification(Path(out or config.OUTPUT_DIR), only=only, quick=quick)
    except ConfigurationError as e:
        report_config_error(e)

    console.print(create_criteria_table(report.results))
    if report.passed:
        console.print(format_verdict("pass"))
    else:
        console.print(f"[bold red]Failed criteria:[/bold red] {', '.join(report.failed)}")
    sys.exit(report.exit_code)


@cli.command()
@click.option('--kind', default=None, help='Filter by experiment kind')
@click.option('--limit', default=10, help='Number of runs to show')
def history(kind, limit):
    """View recent runs from the ledger."""
    async def run():
        db = ResultsDatabase(Path(config.DB_PATH))
        await db.init_db()
        runs = await db.get_recent_runs(kind, limit)

        if not runs:
            console.print("[yellow]No runs recorded[/yellow]")
            return

        console.print(create_history_table(runs, kind))

    asyncio.run(run())


@cli.command(name='show-config')
@click.argument('config_path', type=click.Path(dir_okay=False))
def show_config(config_path):
    """Print the canonical form of a config file."""
    try:
        experiment, _ = load_config(Path(config_path))
    except ConfigFileError as e:
        report_config_error(e)
    click.echo(to_toml(experiment), nl=False)


if __name__ == '__main__':
    cli()
