"""
eigenbound/commands/singular_rect.py — flask singular-rect

Two modes, picked by "mode" in the config (default: rectangular when the
ground kind is rectangular, singular otherwise).

singular     A symmetric, S = the p largest |λ_i|, split as k leading plus
             p − k trailing indices. Measures ‖Π̃_S − Π_S‖ against the
             singular-subspace bound.
rectangular  A is m×n. Measures the top-p left and right singular projector
             distances against the rectangular bound, and checks that the
             symmetric dilation pairs its eigenvalues as ±σ_i.
"""

import logging

import numpy as np
from flask import Blueprint, current_app

from eigenbound.bounds import (capture_outcome, rectangular_bound, rectangular_halving_index,
                               singular_space_bound, singular_subset, two_sided_halving_index)
from eigenbound.commands.helpers import (ExperimentCommand, build_ground, build_noise, check,
                                         experiment_options, ground_seed, run_experiment)
from eigenbound.errors import ArgumentError
from eigenbound.matrix_io import read_matrix
from eigenbound.noise import gaussian_matrix, rectangular_ground
from eigenbound.spectral import (dilation_pairing_error, leading_singular_projectors, projector,
                                 sine_distance, singular_decompose, spectral_decompose,
                                 spectral_norm, symmetric_dilation)

logger = logging.getLogger(__name__)

singular_rect_bp = Blueprint('singular_rect', __name__, cli_group=None)

PAIRING_TOLERANCE = 1e-8

COLUMNS = (
    'mode', 'm', 'n', 'p', 'k', 'sigma_1', 'noise_norm',
    'measured', 'measured_left', 'measured_right',
    'bound', 'bound_precondition', 'bound_slack',
    'halving_index_r', 'padded', 'dilation_pairing_error',
)
COVERAGE = ('bound',)


def build_jobs(cfg):
    return list(cfg.trial_seeds)


def split_of_largest(d, p):
    """The k for which {1..k} ∪ {n−(p−k)+1..n} holds the p largest |λ_i|.

    Ties are broken toward the split whose smallest |λ| is largest.
    """
    n = d.n
    best_k, best = None, -1.0
    for k in range(p + 1):
        S = singular_subset(n, p, k)
        smallest = float(np.min(np.abs(d.eigenvalues[[i - 1 for i in S]])))
        if smallest > best:
            best_k, best = k, smallest
    return best_k


def _singular_trial(cfg, seed):
    A, d = build_ground(cfg, seed)
    A_tilde, E = build_noise(cfg, A, seed)
    d_tilde = spectral_decompose(A_tilde)
    p = cfg.p
    if not 1 <= p <= d.n:
        raise ArgumentError(f'p = {p} must lie in 1..{d.n}')
    k = cfg.k if cfg.k is not None else split_of_largest(d, p)
    if k > p:
        raise ArgumentError(f'k = {k} exceeds p = {p}')
    S = singular_subset(d.n, p, k)
    outcome = capture_outcome('bound', singular_space_bound, d, E, p, k)
    r, padded = two_sided_halving_index(d, p, k)
    values = {
        'mode': 'singular',
        'm': d.n,
        'n': d.n,
        'p': p,
        'k': k,
        'sigma_1': d.sigma_1,
        'noise_norm': spectral_norm(E.entries),
        'measured': sine_distance(projector(d, S), projector(d_tilde, S)),
        'bound': outcome.value,
        'bound_precondition': outcome.failed_precondition,
        'bound_slack': outcome.slack,
        'halving_index_r': r,
        'padded': padded,
    }
    return values, outcome


def _rectangular_instance(cfg, seed):
    ground = cfg.ground
    if ground.kind == 'file':
        A = read_matrix(ground.path)
    elif ground.kind == 'rectangular':
        A = rectangular_ground(ground.m, ground.n, ground.spectrum, ground_seed(cfg, seed))
    else:
        raise ArgumentError(f'rectangular mode needs a rectangular or file ground (got {ground.kind})')
    m, n = A.shape
    noise = cfg.noise
    if noise.kind == 'wigner':
        E = gaussian_matrix(m, n, seed, noise.scale)
    elif noise.kind == 'custom-file':
        E = noise.scale * read_matrix(noise.path)
    elif noise.kind == 'zero':
        E = np.zeros((m, n))
    else:
        raise ArgumentError(f'{noise.kind} noise is not defined for rectangular matrices')
    if E.shape != A.shape:
        raise ArgumentError(f'noise shape {E.shape} does not match {A.shape}')
    return A, E


def _rectangular_trial(cfg, seed):
    A, E = _rectangular_instance(cfg, seed)
    m, n = A.shape
    p = cfg.p
    sd = singular_decompose(A)
    sd_tilde = singular_decompose(A + E)
    left, right = leading_singular_projectors(sd, p)
    left_tilde, right_tilde = leading_singular_projectors(sd_tilde, p)
    measured_left = sine_distance(left, left_tilde)
    measured_right = sine_distance(right, right_tilde)
    outcome = capture_outcome('bound', rectangular_bound, A, E, p)
    values = {
        'mode': 'rectangular',
        'm': m,
        'n': n,
        'p': p,
        'sigma_1': sd.sigma_1,
        'noise_norm': spectral_norm(E),
        'measured': max(measured_left, measured_right),
        'measured_left': measured_left,
        'measured_right': measured_right,
        'bound': outcome.value,
        'bound_precondition': outcome.failed_precondition,
        'bound_slack': outcome.slack,
        'halving_index_r': rectangular_halving_index(sd, p),
        'dilation_pairing_error': dilation_pairing_error(A, spectral_decompose(symmetric_dilation(A))),
    }
    return values, outcome


def make_trial(cfg):
    slack = current_app.config['DOMINANCE_SLACK']

    def trial(seed):
        if cfg.mode == 'rectangular':
            values, outcome = _rectangular_trial(cfg, seed)
        else:
            values, outcome = _singular_trial(cfg, seed)

        failures = []
        if outcome.applies:
            check(failures, 'measured <= bound', values['measured'] <= outcome.value + slack)
        if values.get('dilation_pairing_error') is not None:
            check(failures, 'dilation eigenvalues pair as +-sigma',
                  values['dilation_pairing_error'] <= PAIRING_TOLERANCE * max(1.0, values['sigma_1']))
        logger.info('singular-rect seed %d (%s): measured %.3g, bound %s',
                    seed, values['mode'], values['measured'], outcome.value)
        return values, failures, not outcome.applies

    return trial


@singular_rect_bp.cli.command('singular-rect', cls=ExperimentCommand)
@experiment_options
def singular_rect(**options):
    """Singular-subspace and rectangular perturbation bounds."""
    run_experiment('singular-rect', options, build_jobs, make_trial, COLUMNS, COVERAGE)
