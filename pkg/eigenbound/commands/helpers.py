"""
eigenbound/commands/helpers.py — Plumbing shared by the experiment commands

Every experiment command takes the same flags, loads an ExperimentConfig,
runs one function per trial in a thread pool, writes the records in seed
order and exits with:

  0  every enabled assertion passed
  2  at least one trial failed an assertion or raised
  1  the config, a flag, or an input file was unusable
"""

import functools
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import click
import numpy as np
from flask import current_app

from eigenbound.errors import ArgumentError, ConfigError, EigenboundError
from eigenbound.experiment_config import load_config
from eigenbound.matrix_io import read_symmetric
from eigenbound.noise import GroundSpec, NoiseSpec, low_rank_ground, make_noise
from eigenbound.records import TrialRecord, meta_path, summarize, write_meta, write_records
from eigenbound.spectral import SymmetricMatrix, spectral_decompose

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_ASSERTIONS = 2


class ExperimentCommand(click.Command):
    """click.Command whose usage errors exit with 1 instead of click's 2.

    Exit code 2 is reserved for failed assertions.
    """

    def parse_args(self, ctx, args):
        try:
            return super().parse_args(ctx, args)
        except click.UsageError as e:
            e.exit_code = EXIT_CONFIG
            raise


def experiment_options(f):
    """The flags every experiment command accepts."""
    options = [
        click.option('--config', 'config_path', type=click.Path(dir_okay=False), default=None,
                     help='JSON experiment config (must carry "version": 1)'),
        click.option('--seed-base', type=int, default=None, help='First trial seed'),
        click.option('--trials', type=int, default=None, help='Number of trials'),
        click.option('--out', type=click.Path(dir_okay=False), default=None,
                     help='Output file (default: print to stdout)'),
        click.option('--format', 'output_format', type=click.Choice(['csv', 'json']), default=None,
                     help='Output format'),
        click.option('--nodes', type=int, default=None, help='Quadrature nodes per contour segment'),
        click.option('--matrix', type=click.Path(dir_okay=False), default=None,
                     help='Ground matrix (MatrixMarket array file)'),
        click.option('--noise', 'noise_path', type=click.Path(dir_okay=False), default=None,
                     help='Noise matrix E (MatrixMarket array file)'),
        click.option('--workers', type=int, default=None, help='Trials run in parallel'),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def load_experiment(command, options):
    """ExperimentConfig from the flag values, with app config defaults."""
    overrides = {
        'trials': options.get('trials'),
        'seed_base': options.get('seed_base'),
        'out': options.get('out'),
        'format': options.get('output_format'),
        'nodes_per_segment': options.get('nodes'),
        'workers': options.get('workers'),
        'matrix': options.get('matrix'),
        'noise_path': options.get('noise_path'),
    }
    return load_config(command, options.get('config_path'), overrides, current_app.config)


# ---------------------------------------------------------------------------
# Instances
# ---------------------------------------------------------------------------

def ground_seed(cfg, seed):
    return cfg.ground.seed if cfg.ground.seed is not None else seed


def build_ground(cfg, seed, spectrum=None):
    """Symmetric ground matrix for a trial. Returns (A, SpectralData)."""
    ground = cfg.ground
    spectrum = ground.spectrum if spectrum is None else spectrum
    if ground.kind == 'file':
        A = read_symmetric(ground.path)
        return A, spectral_decompose(A)
    if ground.kind == 'diagonal':
        A = SymmetricMatrix(np.diag(spectrum))
        return A, spectral_decompose(A)
    if ground.kind == 'low-rank':
        spec = GroundSpec(n=ground.n, rank=len(spectrum), spectrum=spectrum,
                          seed=ground_seed(cfg, seed))
        return low_rank_ground(spec)
    raise ConfigError(f'{ground.kind} ground is only valid for rectangular trials')


def build_noise(cfg, A, seed):
    """(Ã, E) for a trial; the noise stream is keyed by the trial seed."""
    noise = cfg.noise
    if noise.kind == 'zero':
        return A, SymmetricMatrix(np.zeros((A.n, A.n)))
    spec = NoiseSpec(kind=noise.kind, n=A.n, seed=seed, rho=noise.rho,
                     subgaussian=noise.subgaussian, scale=noise.scale, path=noise.path)
    return make_noise(spec, A)


# ---------------------------------------------------------------------------
# Running
# ---------------------------------------------------------------------------

def _timed(trial):
    @functools.wraps(trial)
    def run(job):
        seed = job[-1] if isinstance(job, tuple) else job
        start = time.perf_counter()
        try:
            values, failures, skipped = trial(job)
            status = 'failed' if failures else ('skipped' if skipped else 'ok')
        except EigenboundError as e:
            logger.warning('trial %s raised %s: %s', job, type(e).__name__, e)
            values, failures, status = {}, (f'{type(e).__name__}: {e}',), 'error'
        elapsed = time.perf_counter() - start
        return TrialRecord(seed=seed, values=values, failures=tuple(failures),
                           status=status, wall_time=elapsed)
    return run


def run_trials(cfg, jobs, trial):
    """Run trial(job) for every job; records come back in job order.

    `trial` returns (values, failures, skipped): a dict keyed by column,
    a list of failed assertion names, and whether the hypotheses were unmet.
    """
    runner = _timed(trial)
    if cfg.workers <= 1:
        return [runner(job) for job in jobs]
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(runner, jobs))


def finish(cfg, columns, records, coverage_columns=()):
    """Write the records, echo the summary and exit with the right code."""
    summary = summarize(records, coverage_columns)
    digits = current_app.config.get('CSV_SIGNIFICANT_DIGITS', 17)
    try:
        text = write_records(cfg.out, cfg.output_format, cfg.command, columns,
                             records, summary, digits)
        if cfg.out is not None:
            write_meta(cfg.out, cfg.command, records, summary, cfg.source)
    except OSError as e:
        click.echo(f'ERROR: could not write {cfg.out}: {e}', err=True)
        sys.exit(EXIT_CONFIG)

    if cfg.out is None:
        click.echo(text, nl=False)
    else:
        click.echo(f'Wrote {len(records)} records to {cfg.out} (metadata in {meta_path(cfg.out)})',
                   err=True)
    click.echo(f'{cfg.command}: {summary["trials"]} trials, {summary["ok"]} ok, '
               f'{summary["skipped"]} skipped, {summary["failed"]} failed, '
               f'{summary["error"]} errors', err=True)
    for column, cover in summary['coverage'].items():
        click.echo(f'  {column}: applies in {cover["count"]}/{summary["trials"]} trials', err=True)
    if summary['failed'] or summary['error']:
        sys.exit(EXIT_ASSERTIONS)
    sys.exit(EXIT_OK)


def run_experiment(command, options, build_jobs, trial, columns, coverage_columns=()):
    """Load the config, run every trial, write the output and exit.

    `build_jobs(cfg)` lists the jobs in output order; `trial(cfg)` returns
    the per-job function.
    """
    try:
        cfg = load_experiment(command, options)
        jobs = build_jobs(cfg)
    except (ConfigError, ArgumentError, OSError) as e:
        click.echo(f'ERROR: {e}', err=True)
        sys.exit(EXIT_CONFIG)
    current_app.logger.info('%s: %d trials on %d worker(s)', command, len(jobs), cfg.workers)
    records = run_trials(cfg, jobs, trial(cfg))
    finish(cfg, columns, records, coverage_columns)


def check(failures, name, holds):
    """Append `name` to failures unless the assertion holds."""
    if not holds:
        failures.append(name)
