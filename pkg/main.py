#!/usr/bin/env python3
import functools
import json
import logging
import math
import sys
from datetime import datetime

import click

# --- Project Imports ---
from config.settings import Config
from distributions.fairness import beta_from_raw, fairness
from distributions.io import distribution_to_json, load_distribution, read_counts_csv
from distributions.pmf import Pmf
from utils.errors import UtilityError

# --- Component Imports ---
from pipeline.figures import FigureReproducer
from pipeline.sweeper import SweepRunner, parse_range
from pipeline.verifier import ClosedFormVerifier
from solver.constraint import ConstraintSpec, Mode
from solver.equality import solve_omega
from solver.problem import is_constraint_active, solve_problem_p
from tilting.table import parameter_table
from tilting.tilt import TiltResult, tilt

logger = logging.getLogger("Orchestrator")

CONSTRAINT_INACTIVE = "constraint inactive: beta >= sum p^2, so U* = P and omega = 0"


def setup_logging(verbose: bool = False):
    """Log to stderr (stdout carries results); optionally also to a dated file under LOGS_DIR."""
    handlers = [logging.StreamHandler(sys.stderr)]
    if Config.LOG_TO_FILE:
        Config.ensure_directories()
        handlers.append(logging.FileHandler(
            Config.LOGS_DIR / f'utility_{datetime.now().strftime("%Y%m%d")}.log'
        ))
    logging.basicConfig(
        level=logging.INFO if verbose else Config.LOG_LEVEL,
        format=Config.LOG_FORMAT,
        handlers=handlers,
        force=True,
    )


def handle_errors(func):
    """Map UtilityError subclasses onto their exit codes with a one-line message."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except UtilityError as e:
            logger.debug("Command failed", exc_info=True)
            click.echo(f"Error [{type(e).__name__}]: {e}", err=True)
            sys.exit(e.exit_code)
    return wrapper


def _json_safe(value):
    """Non-finite floats become "inf" / "-inf" / "nan" so the output stays valid JSON."""
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def _echo_result(P: Pmf, result: TiltResult, as_json: bool, note: str = ""):
    if as_json:
        payload = result.summary()
        if note:
            payload["note"] = note
        click.echo(json.dumps(_json_safe(payload), indent=2, allow_nan=False))
        return

    if note:
        click.echo(note)
    click.echo(f"omega     = {result.omega:.15g}")
    click.echo(f"lambda    = {result.lam:.15g}")
    click.echo(f"beta      = {result.beta:.15g}")
    click.echo(f"alpha     = {result.alpha:.15g}")
    if result.mim_overflow:
        click.echo(f"MIM total = overflow (ln Z = {result.log_mim_total:.15g})")
    else:
        click.echo(f"MIM total = {result.mim_total:.15g}")
    click.echo(f"D(U*||P)  = {result.kl_to_source:.15g} nats")

    report = fairness(P, result.utility)
    click.echo("U*:")
    for label, u in zip(result.utility.labels, result.utility.probs):
        ratio, usage_class = report.by_label()[label]
        click.echo(f"  {label}: {u:.15g}  (U*/P = {ratio:.6g}, {usage_class.value})")


# --- CLI COMMANDS ---

@click.group()
@click.option('-v', '--verbose', is_flag=True, help='Log progress at INFO level to stderr')
def cli(verbose):
    """Utility distributions: importance-tilted minimisers of D(U||P) under a usage budget"""
    setup_logging(verbose)


@cli.command()
@click.option('--dist', 'dist_file', required=True, type=click.Path(), help='Distribution JSON')
@click.option('--omega', required=True, type=float, help='Importance coefficient')
@click.option('--json', 'as_json', is_flag=True, help='Emit the result as JSON')
@handle_errors
def compute(dist_file, omega, as_json):
    """Tilt a distribution at a given importance coefficient"""
    P, _ = load_distribution(dist_file)
    _echo_result(P, tilt(P, omega), as_json)


@cli.command()
@click.option('--dist', 'dist_file', required=True, type=click.Path(), help='Distribution JSON')
@click.option('--beta', required=True, type=float, help='Usage budget sum P(a)U(a)')
@click.option('--mode', default='equality', type=click.Choice([m.value for m in Mode]),
              show_default=True)
@click.option('--json', 'as_json', is_flag=True, help='Emit the result as JSON')
@handle_errors
def solve(dist_file, beta, mode, as_json):
    """Find the utility distribution meeting a usage budget"""
    P, _ = load_distribution(dist_file)
    spec = ConstraintSpec(Mode.parse(mode), budget=beta)

    if spec.mode is Mode.EQUALITY:
        coefficient = solve_omega(P, spec)
        _echo_result(P, tilt(P, coefficient), as_json)
        return

    note = "" if is_constraint_active(P, beta) else CONSTRAINT_INACTIVE
    _echo_result(P, solve_problem_p(P, spec), as_json, note)


@cli.command()
@click.option('--dist', 'dist_file', required=True, type=click.Path(), help='Distribution JSON')
@click.option('--axis', required=True, type=click.Choice(['omega', 'beta']))
@click.option('--range', 'range_text', required=True, help='start:stop:step')
@click.option('--out', 'out_file', required=True, type=click.Path(), help='Output CSV')
@handle_errors
def sweep(dist_file, axis, range_text, out_file):
    """Tabulate omega, beta and U* along an axis"""
    P, _ = load_distribution(dist_file)
    points = parse_range(range_text)
    runner = SweepRunner(P, source_path=dist_file)
    table = runner.run(axis, points, range_text)
    path = SweepRunner.export_csv(table, out_file)
    click.echo(f"Wrote {len(table.rows)} rows to {path}")


@cli.command()
@click.option('--dist', 'dist_file', required=True, type=click.Path(), help='Distribution JSON')
@click.option('--beta', required=True, type=float, help='Usage budget')
@click.option('--grid-step', type=float, default=None, help='Lattice step (default 1e-2)')
@click.option('--n', 'n', type=int, default=None, help='Sequence length for type enumeration')
@click.option('--no-properties', is_flag=True, help='Skip the randomised property checks')
@handle_errors
def verify(dist_file, beta, grid_step, n, no_properties):
    """Check the closed form against the brute-force oracles"""
    P, _ = load_distribution(dist_file)
    verifier = ClosedFormVerifier(P, beta, grid_step=grid_step, n=n)
    report = verifier.run(properties=not no_properties)
    for line in report.lines():
        click.echo(line)

    failed = [c for c in report.checks if not c.passed]
    if failed:
        click.echo(f"{len(failed)} of {len(report.checks)} checks FAILED", err=True)
        sys.exit(4)
    click.echo(f"All {len(report.checks)} checks passed")


@cli.command()
@click.option('--counts', 'counts_file', required=True, type=click.Path(), help='label,count CSV')
@click.option('--usage', 'usage_file', type=click.Path(), default=None,
              help='Second label,count CSV of observed usage; adds beta and alpha')
@handle_errors
def ingest(counts_file, usage_file):
    """Normalise a counts CSV into the distribution JSON format"""
    P, _ = read_counts_csv(counts_file)
    if usage_file is None:
        click.echo(distribution_to_json(P))
        return
    _, usage = read_counts_csv(usage_file)
    budget = beta_from_raw(P, usage)
    click.echo(distribution_to_json(P, usage, budget))


@cli.command()
@click.option('--dist', 'dist_file', required=True, type=click.Path(), help='Distribution JSON')
@click.option('--out', 'out_file', type=click.Path(), default=None, help='Optional CSV output')
@handle_errors
def table(dist_file, out_file):
    """Print omega, lambda, alpha, beta and U* at -inf, 0 and +inf"""
    P, _ = load_distribution(dist_file)
    df = parameter_table(P)
    if out_file:
        df.to_csv(out_file, index=False, float_format=Config.CSV_FLOAT_FORMAT)
        logger.info(f" Table exported to: {out_file}")
    click.echo(df.to_string(index=False))


@cli.command()
@click.option('--out-dir', type=click.Path(), default=None,
              help='Directory for the CSVs (default DATA_DIR/figures)')
@handle_errors
def figures(out_dir):
    """Regenerate the reference figure tables and run their shape checks"""
    run = FigureReproducer(out_dir).run()
    for path in run.files:
        click.echo(f"Wrote {path}")
    for name, crossings in run.crossings.items():
        located = ", ".join(f"{w:.6g}" for w in crossings) or "none"
        click.echo(f"{name}: beta curves cross at omega = {located}")
    for line in run.report.lines():
        click.echo(line)
    if not run.report.all_passed:
        sys.exit(4)


if __name__ == '__main__':
    cli()
