"""
coalsim CLI

One subcommand per scenario, plus `validate` for scenario files and
`goldens` for the checked-in oracle tables. Parameters come from built-in
defaults, then the --config file, then flags; nothing is read from the
environment.
"""

import csv
import io
import logging
import math
import os
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import click

from ..config.config import Config
from ..config.validator import ScenarioValidator
from ..core.exceptions import CoalsimError, ScenarioValidationError
from ..experiments.output import render_csv, render_summary
from ..experiments.registry import default_registry
from ..experiments.runner import execute
from ..experiments.scenario import Scenario, ScenarioConfig
from ..kingman.oracle import marginal_table, write_marginal_table
from ..spatial.oracle import two_site_table, write_two_site_table
from ..support.helpers import atomic_write

logger = logging.getLogger('coalsim.console')

GOLDEN_TOLERANCE = 1e-9
GOLDEN_SIZES = (1, 2, 3, 4)
GOLDEN_TIMES = (math.log(2.0), math.log(4.0))
GOLDEN_TORUS_TIMES = (0.5, 1.0, 2.0)

# flag -> configuration key
OVERRIDES = {
    't': 't', 'alpha': 'alpha', 'beta': 'beta', 'u': 'u', 'rho': 'rho', 'p': 'p',
    'gamma': 'gamma', 'delta': 'delta', 'initial': 'initial', 'replicates': 'replicates',
    'seed': 'seed', 'buffer': 'buffer', 'particles': 'particles', 'permutation': 'permutation',
    'block_cap': 'block_cap', 'truncation': 'truncation', 'limit_samples': 'limit_samples',
    'gate_samples': 'gate_samples', 'tail_epsilon': 'tail_epsilon',
}


def _grid(ctx: click.Context, param: click.Parameter, value: Optional[str]) -> Any:
    """A comma-separated grid; a single value stays a scalar."""
    if value is None:
        return None
    try:
        values = [float(v) for v in value.split(',') if v.strip()]
    except ValueError:
        raise click.BadParameter(f"expected a number or comma-separated numbers, got {value!r}")
    if not values:
        raise click.BadParameter("empty grid")
    return values[0] if len(values) == 1 else values


def _indices(ctx: click.Context, param: click.Parameter, value: Optional[str]) -> Any:
    if value is None:
        return None
    try:
        return [int(v) for v in value.split(',') if v.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got {value!r}")


def _gamma(ctx: click.Context, param: click.Parameter, value: Optional[str]) -> Any:
    if value is None:
        return None
    if value.strip().lower() in ('inf', 'infinity'):
        return 'inf'
    try:
        return float(value)
    except ValueError:
        raise click.BadParameter(f"expected a rate or 'inf', got {value!r}")


class EchoHandler(logging.Handler):
    """Logging handler writing through click.echo to the current stderr."""

    def emit(self, record: logging.LogRecord) -> None:
        try:
            click.echo(self.format(record), err=True)
        except Exception:
            self.handleError(record)


def _configure_logging(verbose: bool) -> None:
    """Install the single stderr handler of the coalsim logger."""
    root = logging.getLogger('coalsim')
    for handler in list(root.handlers):
        if isinstance(handler, EchoHandler):
            root.removeHandler(handler)
    handler = EchoHandler()
    handler.setFormatter(logging.Formatter('%(asctime)s %(levelname)s %(name)s: %(message)s'))
    root.addHandler(handler)
    root.setLevel(logging.DEBUG if verbose else logging.INFO)


def build_config(scenario: Scenario, config_path: Optional[str],
                 overrides: Dict[str, Any]) -> Config:
    """
    Merge built-in defaults, the scenario file and flag overrides.

    Raises:
        ScenarioValidationError: If the file cannot be read or declares
            another scenario
    """
    config = Config(ScenarioConfig.defaults(scenario))
    if config_path:
        loaded = Config()
        loaded.load_from_file(config_path)
        declared = loaded.get('scenario')
        if declared is not None and Scenario.parse(declared) is not scenario:
            raise ScenarioValidationError(
                f"config scenario matches the subcommand ({declared} != {scenario.value})")
        config.merge(loaded.all())
        config.set('scenario', scenario.value)
    config.merge({key: value for key, value in overrides.items() if value is not None})
    return config


def load_scenario(scenario: Scenario, config_path: Optional[str],
                  overrides: Dict[str, Any]) -> ScenarioConfig:
    """Build and validate the typed configuration of a run."""
    config = build_config(scenario, config_path, overrides)
    ScenarioValidator().validate_or_raise(config)
    return ScenarioConfig.from_config(config)


def _progress_logger(total: int) -> Callable[[int, int], None]:
    step = max(1, total // 10)

    def progress(done: int, total: int) -> None:
        if done % step == 0 or done == total:
            logger.info(f"replicate {done}/{total}")

    return progress


def _emit(content: str, out: Optional[str]) -> None:
    if out:
        atomic_write(out, content)
        click.echo(f"📄 wrote {out}", err=True)
    else:
        click.echo(content, nl=False)


SCENARIO_OPTIONS: List[Callable] = [
    click.option('--config', 'config_path', type=click.Path(dir_okay=False),
                 help='JSON scenario file'),
    click.option('--t', 't', type=float, help='Scaling time, e.g. 1e6'),
    click.option('--alpha', callback=_grid, help='Space exponent, or a comma-separated grid'),
    click.option('--beta', callback=_grid, help='Time exponent, or a comma-separated grid'),
    click.option('--u', 'u', callback=_grid, help='Checkpoint exponents, comma-separated'),
    click.option('--rho', type=float, help='Poisson intensity'),
    click.option('--p', 'p', type=float, help='Bernoulli success probability'),
    click.option('--gamma', callback=_gamma, help="Pair coalescence rate or 'inf'"),
    click.option('--delta', type=float, help='Thinning time or domination duration'),
    click.option('--initial', type=click.Choice(['poisson', 'bernoulli', 'thinned']),
                 help='Initial law'),
    click.option('--replicates', type=int, help='Number of replicates'),
    click.option('--seed', type=int, help='Master seed'),
    click.option('--buffer', type=float, help='Buffer factor of the simulation region'),
    click.option('--particles', type=int, help='Particle count of few-particle scenarios'),
    click.option('--permutation', callback=_indices, help='Permutation of starting sites'),
    click.option('--block-cap', 'block_cap', type=int,
                 help='Block cap N of the moment-bound tightness checks'),
    click.option('--truncation', type=int, help='Truncation of limit objects, 0 to derive it'),
    click.option('--limit-samples', 'limit_samples', type=int,
                 help='Limit-side samples, 0 for one per replicate'),
    click.option('--gate-samples', 'gate_samples', type=int,
                 help='Samples per side of a truncation-stability gate'),
    click.option('--tail-epsilon', 'tail_epsilon', type=float,
                 help='Truncation error of entrance-law samples'),
    click.option('--out', type=click.Path(dir_okay=False), help='Output file, stdout by default'),
    click.option('--format', 'output_format', type=click.Choice(['csv', 'json']), default='csv',
                 show_default=True, help='Records as CSV or the summary as JSON'),
    click.option('--threads', type=int, default=lambda: os.cpu_count() or 1,
                 help='Worker processes [default: available cores]'),
    click.option('--verbose', is_flag=True, help='Log per-event diagnostics'),
]


def _scenario_options(function: Callable) -> Callable:
    for option in reversed(SCENARIO_OPTIONS):
        function = option(function)
    return function


def scenario_command(scenario: Scenario) -> click.Command:
    """The subcommand that runs one scenario."""

    @click.command(name=scenario.command,
                   help=f"Run the {scenario.value} scenario and write its records or summary.")
    @_scenario_options
    def command(config_path: Optional[str], out: Optional[str], output_format: str,
                threads: int, verbose: bool, dump_snapshots: Optional[str] = None,
                **flags: Any) -> None:
        _configure_logging(verbose)
        overrides = {OVERRIDES[name]: value for name, value in flags.items()}
        config = load_scenario(scenario, config_path, overrides)

        click.echo(f"🚀 Running {scenario.value} ({config.replicates} replicates)", err=True)
        run = execute(config, threads=max(1, threads),
                      progress=_progress_logger(config.replicates))

        if output_format == 'json':
            _emit(render_summary(run.summary()), out)
        else:
            _emit(render_csv(run.records), out)
        if dump_snapshots:
            atomic_write(dump_snapshots, run.driver.snapshots(0))
            click.echo(f"📄 wrote {dump_snapshots}", err=True)
        if run.driver.failed_gates:
            click.echo(f"⚠️  truncation gates failed: {', '.join(run.driver.failed_gates)}", err=True)
        click.echo(f"✅ {len(run.records)} records", err=True)

    if scenario is Scenario.THEOREM5:
        command = click.option('--dump-snapshots', 'dump_snapshots', type=click.Path(dir_okay=False),
                               help='Write the checkpoint snapshots of replicate 0 as JSON')(command)
    return command


@click.group()
@click.version_option(version='0.1.0', prog_name='coalsim')
def cli():
    """
    coalsim - spatial delayed coalescents and their Kingman limits

    Runs Monte Carlo scenarios on Z², checks exact oracles and writes
    result records.
    """
    pass


for _scenario in Scenario:
    cli.add_command(scenario_command(_scenario))


@cli.command()
@click.option('--config', 'config_path', type=click.Path(dir_okay=False), required=True,
              help='JSON scenario file')
@click.option('--verbose', is_flag=True, help='Log per-event diagnostics')
def validate(config_path: str, verbose: bool):
    """Validate a scenario file without running it."""
    _configure_logging(verbose)
    loaded = Config()
    loaded.load_from_file(config_path)
    declared = loaded.get('scenario')
    if declared is None:
        raise ScenarioValidationError("scenario is given")
    scenario = Scenario.parse(declared)

    config = load_scenario(scenario, config_path, {})
    default_registry().make(config).validate()
    click.echo(f"✅ {config_path} is a valid {scenario.value} scenario", err=True)


def golden_tables() -> Dict[str, str]:
    """Oracle tables as CSV text, keyed by file name."""
    tables = {}
    kingman = io.StringIO()
    write_marginal_table(marginal_table(GOLDEN_SIZES, GOLDEN_TIMES), kingman)
    tables['kingman_marginals.csv'] = kingman.getvalue()

    torus = io.StringIO()
    write_two_site_table(two_site_table(GOLDEN_TORUS_TIMES), torus)
    tables['tiny_torus.csv'] = torus.getvalue()
    return tables


def _parse_table(text: str) -> Tuple[List[str], List[List[float]]]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        return [], []
    return rows[0], [[float(cell) for cell in row] for row in rows[1:]]


def golden_difference(expected: str, actual: str) -> float:
    """
    Largest absolute cell difference between two oracle tables.

    Tables with different headers or shapes differ by infinity.
    """
    header_a, rows_a = _parse_table(expected)
    header_b, rows_b = _parse_table(actual)
    if header_a != header_b or len(rows_a) != len(rows_b):
        return math.inf
    difference = 0.0
    for row_a, row_b in zip(rows_a, rows_b):
        if len(row_a) != len(row_b):
            return math.inf
        for a, b in zip(row_a, row_b):
            difference = max(difference, abs(a - b))
    return difference


@cli.command()
@click.option('--dir', 'directory', type=click.Path(file_okay=False), default='goldens',
              show_default=True, help='Directory of the checked-in tables')
@click.option('--update', is_flag=True, help='Rewrite the tables instead of diffing')
@click.option('--verbose', is_flag=True, help='Log per-event diagnostics')
def goldens(directory: str, update: bool, verbose: bool):
    """Regenerate the oracle tables and diff them against the checked-in CSVs."""
    _configure_logging(verbose)
    failures = []
    for name, content in golden_tables().items():
        path = Path(directory) / name
        if update or not path.exists():
            atomic_write(path, content)
            click.echo(f"📄 wrote {path}", err=True)
            continue

        difference = golden_difference(path.read_text(encoding='utf-8'), content)
        if difference <= GOLDEN_TOLERANCE:
            click.echo(f"✅ {name} matches (max difference {difference:.3g})", err=True)
        else:
            click.echo(f"❌ {name} differs (max difference {difference:.3g})", err=True)
            failures.append(name)

    if failures:
        raise CoalsimError(f"golden tables differ: {', '.join(failures)}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the CLI and return its exit code.

    Returns:
        0 on success, 2 on a configuration or usage error (with one line
        `error: <constraint>` on stderr), 1 on any other failure
    """
    try:
        result = cli.main(args=list(argv) if argv is not None else None,
                          prog_name='coalsim', standalone_mode=False)
    except ScenarioValidationError as e:
        click.echo(f"error: {e.constraint}", err=True)
        return 2
    except click.UsageError as e:
        click.echo(f"error: {e.format_message()}", err=True)
        return 2
    except click.ClickException as e:
        click.echo(f"❌ {e.format_message()}", err=True)
        return 1
    except click.Abort:
        return 1
    except CoalsimError as e:
        click.echo(f"❌ {e}", err=True)
        return 1
    except Exception as e:
        logger.exception("run failed")
        click.echo(f"❌ {type(e).__name__}: {e}", err=True)
        return 1
    return result if isinstance(result, int) else 0


if __name__ == '__main__':
    sys.exit(main())
