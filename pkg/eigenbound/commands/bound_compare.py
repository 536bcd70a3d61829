"""
eigenbound/commands/bound_compare.py — flask bound-compare

Per seed: build A and Ã = A + E, measure ‖Π̃_S − Π_S‖ and evaluate every
bound that applies. A trial fails when the measured distance exceeds an
applicable bound.

With "regime_ratios" in the config the ground spectrum is replaced by a
family member per ratio R: λ_p = scale, δ_p = scale/R, everything past
λ_{p+1} zero (so r = p + 1). For those trials the constant-free rate of
the moderate-gap bound must come out below the Davis–Kahan rate ‖E‖/δ_p.
"""

import logging

from flask import Blueprint, current_app

from eigenbound.bounds import (capture_outcome, evaluate_all, lowrank_rate, regime,
                               theorem_formula, weyl_gap)
from eigenbound.commands.helpers import (ExperimentCommand, build_ground, build_noise, check,
                                         experiment_options, run_experiment)
from eigenbound.spectral import leading_subset, spectral_decompose

logger = logging.getLogger(__name__)

bound_compare_bp = Blueprint('bound_compare', __name__, cli_group=None)

BOUND_NAMES = ('dk_classical', 'dk_corollary', 'new_bound', 'trivial_f1_bound')
COLUMNS = (
    'regime_ratio', 'n', 'p', 'subset', 'delta_p', 'delta_S', 'halving_index_r', 'sigma_1',
    'lambda_p', 'noise_norm', 'weyl_gap', 'cross_term_x', 'regime', 'measured',
    'dk_classical', 'dk_classical_precondition',
    'dk_corollary', 'dk_corollary_precondition',
    'new_bound', 'new_bound_precondition',
    'trivial_f1_bound', 'trivial_f1_bound_precondition',
    'new_rate', 'dk_rate', 'lowrank_rate',
)


def regime_spectrum(p, ratio, scale):
    """λ_i = scale·(1 + (p − i)/R) for i <= p, λ_{p+1} = scale·(1 − 1/R)."""
    step = scale / ratio
    return tuple(scale + (p - i) * step for i in range(1, p + 1)) + (scale - step,)


def build_jobs(cfg):
    seeds = cfg.trial_seeds
    if cfg.regime_ratios:
        return [(ratio, seed) for ratio in cfg.regime_ratios for seed in seeds]
    return list(seeds)


def make_trial(cfg):
    slack = current_app.config['DOMINANCE_SLACK']

    def trial(job):
        ratio, seed = job if isinstance(job, tuple) else (None, job)
        spectrum = regime_spectrum(cfg.p, ratio, cfg.ground.scale) if ratio else None
        A, d = build_ground(cfg, seed, spectrum)
        A_tilde, E = build_noise(cfg, A, seed)
        d_tilde = spectral_decompose(A_tilde)
        subset = cfg.subset or leading_subset(cfg.p)
        report = evaluate_all(d, d_tilde, E, subset)
        profile = report.profile
        weyl = weyl_gap(report.noise_norm, d.eigenvalues, d_tilde.eigenvalues)

        values = {
            'regime_ratio': ratio,
            'n': d.n,
            'p': profile.p,
            'subset': profile.subset,
            'delta_p': profile.delta_p,
            'delta_S': profile.delta_S,
            'halving_index_r': profile.halving_index_r,
            'sigma_1': profile.sigma_1,
            'lambda_p': profile.lambda_p,
            'noise_norm': report.noise_norm,
            'weyl_gap': weyl,
            'cross_term_x': report.cross_term_x,
            'regime': regime(profile.delta_p, report.noise_norm, profile.lambda_p),
            'measured': report.measured,
        }
        for outcome in report.outcomes:
            values[outcome.name] = outcome.value
            values[f'{outcome.name}_precondition'] = outcome.failed_precondition

        if profile.delta_p > 0:
            values['new_rate'] = theorem_formula(report.noise_norm, profile.lambda_p, profile.sigma_1,
                                                 profile.delta_p, profile.halving_index_r,
                                                 report.cross_term_x, constant=1.0)
            values['dk_rate'] = report.noise_norm / profile.delta_p
        values['lowrank_rate'] = capture_outcome('lowrank_rate', lowrank_rate, d.n, profile.lambda_p,
                                                 profile.delta_p, profile.halving_index_r).value

        failures = [f'measured > {name}' for name in report.violations(slack)]
        check(failures, 'weyl_gap <= |E|', weyl <= report.noise_norm + slack)
        if ratio is not None:
            check(failures, 'new_rate < dk_rate',
                  values.get('new_rate') is not None and values['new_rate'] < values['dk_rate'])
        logger.info('bound-compare seed %d: measured %.3g, %d violation(s)',
                    seed, report.measured, len(failures))
        return values, failures, False

    return trial


@bound_compare_bp.cli.command('bound-compare', cls=ExperimentCommand)
@experiment_options
def bound_compare(**options):
    """Measure eigenspace perturbation against Davis-Kahan and the moderate-gap bound."""
    run_experiment('bound-compare', options, build_jobs, make_trial, COLUMNS, BOUND_NAMES)
