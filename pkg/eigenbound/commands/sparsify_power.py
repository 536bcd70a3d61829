"""
eigenbound/commands/sparsify_power.py — flask sparsify-power

For every density ρ in power.rho and every seed: sparsify A, run power
iteration on the sparse Ã, and compare the sign-aligned error of the
result against the certificate for the leading eigenvector. Trials whose
certificate hypotheses fail are recorded as skipped; a trial fails only
when an applicable certificate is exceeded.

A noise kind other than "sparsify" swaps the sparsification for Ã = A + E.
"""

import logging

from flask import Blueprint, current_app

from eigenbound.commands.helpers import (ExperimentCommand, build_ground, build_noise, check,
                                         experiment_options, run_experiment)
from eigenbound.errors import ArgumentError
from eigenbound.power import PowerConfig, geometric_decay_ratio, sparsified_leading_eigvec

logger = logging.getLogger(__name__)

sparsify_power_bp = Blueprint('sparsify_power', __name__, cli_group=None)

COLUMNS = (
    'rho', 'n', 'K', 'lambda_1', 'delta_1', 'halving_index_r', 'noise_norm', 'rho_advisory',
    'iterations', 'rayleigh', 'residual', 'error',
    'certificate', 'certificate_precondition', 'certificate_slack',
    'dk_comparison', 'failure_probability', 'decay_ratio',
    'nnz', 'sparse_multiply_cost', 'dense_multiply_cost', 'speed_ratio', 'stalled',
)
COVERAGE = ('certificate',)


def build_jobs(cfg):
    return [(rho, seed) for rho in cfg.power.rho for seed in cfg.trial_seeds]


def make_trial(cfg):
    slack = current_app.config['DOMINANCE_SLACK']

    def trial(job):
        rho, seed = job
        A, d = build_ground(cfg, seed)
        noise = None
        if cfg.noise.kind != 'sparsify':
            _, noise = build_noise(cfg, A, seed)
        power_cfg = PowerConfig(max_iterations=cfg.power.iterations, v0_seed=seed,
                                stop_tol=cfg.power.stop_tol, early_stop=cfg.power.early_stop)
        result, report = sparsified_leading_eigvec(A, rho, seed, power_cfg, noise=noise, spectral=d)
        try:
            decay = geometric_decay_ratio(result.alignment_history)
        except ArgumentError:
            decay = None

        values = {
            'rho': rho,
            'n': d.n,
            'K': report.K,
            'lambda_1': d.eigenvalue(1),
            'delta_1': d.eigenvalue(1) - d.eigenvalue(2),
            'halving_index_r': report.halving_index_r,
            'noise_norm': report.noise_norm,
            'rho_advisory': report.rho_advisory,
            'iterations': result.iterations_used,
            'rayleigh': result.rayleigh,
            'residual': result.residual,
            'error': report.error,
            'certificate': report.certificate.value,
            'certificate_precondition': report.certificate.failed_precondition,
            'certificate_slack': report.certificate.slack,
            'dk_comparison': report.davis_kahan.value,
            'failure_probability': report.failure_probability,
            'decay_ratio': decay,
            'nnz': result.multiply_nnz,
            'sparse_multiply_cost': result.sparse_cost,
            'dense_multiply_cost': result.dense_cost,
            'speed_ratio': result.sparse_cost / result.dense_cost,
            'stalled': result.stalled,
        }
        if not report.rho_advisory:
            logger.warning('rho = %g is below the advisory threshold log^4(n)/n for n = %d', rho, d.n)

        failures = []
        if report.certificate.applies:
            check(failures, 'error <= certificate', report.error <= report.certificate.value + slack)
        return values, failures, not report.certificate.applies

    return trial


@sparsify_power_bp.cli.command('sparsify-power', cls=ExperimentCommand)
@experiment_options
def sparsify_power(**options):
    """Power iteration on a sparsified matrix, checked against its certificate."""
    run_experiment('sparsify-power', options, build_jobs, make_trial, COLUMNS, COVERAGE)
