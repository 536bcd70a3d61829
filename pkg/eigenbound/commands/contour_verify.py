"""
eigenbound/commands/contour_verify.py — flask contour-verify

Runs the contour bootstrapping argument numerically on every trial with
δ_p >= 4‖E‖ (others are recorded as skipped):

  ‖Π̃_p − Π_p‖ <= F <= 2F₁,   2πF₁ = M₁ + M₂ + M₃ + M₄

and, inside the window 4‖E‖ <= δ_p <= |λ_p|/4, every per-segment estimate
together with the block split of M₁.
"""

import logging
import math

from flask import Blueprint, current_app

from eigenbound.bounds import cross_term_x, halving_index
from eigenbound.commands.helpers import (ExperimentCommand, build_ground, build_noise, check,
                                         experiment_options, run_experiment)
from eigenbound.contour import (F1_numeric, F_numeric, build_theorem_contour, cauchy_projector,
                                m1_split, resolvent_identity_residual, segment_integrals,
                                weyl_enclosure)
from eigenbound.errors import ArgumentError
from eigenbound.quadrature import QuadratureSettings
from eigenbound.spectral import (leading_subset, projector, sine_distance, spectral_decompose,
                                 spectral_norm)

logger = logging.getLogger(__name__)

contour_verify_bp = Blueprint('contour_verify', __name__, cli_group=None)

COLUMNS = (
    'n', 'p', 'delta_p', 'lambda_p', 'sigma_1', 'noise_norm', 'halving_index_r', 'cross_term_x',
    'window', 'x0', 'x1', 'T', 'margin', 'weyl_slack',
    'cauchy_deviation', 'measured', 'F', 'F1', 'M1', 'M2', 'M3', 'M4', 'M_error',
    'm1_bound', 'm1_crude_bound', 'horizontal_bound', 'm3_bound',
    'm1_lead', 'm1_tail', 'm1_cross', 'm1_lead_bound', 'm1_tail_bound', 'm1_cross_bound',
    'resolvent_residual', 'quadrature_nodes',
)
COVERAGE = ('F', 'm1_lead')


def build_jobs(cfg):
    return list(cfg.trial_seeds)


def make_trial(cfg):
    settings = QuadratureSettings.from_config(current_app.config)
    slack = current_app.config['QUADRATURE_SLACK']

    def trial(seed):
        A, d = build_ground(cfg, seed)
        A_tilde, E = build_noise(cfg, A, seed)
        d_tilde = spectral_decompose(A_tilde)
        p = cfg.p
        if not 1 <= p < d.n:
            raise ArgumentError(f'p = {p} must lie in 1..{d.n - 1}')
        noise_norm = spectral_norm(E.entries)
        lambda_p = d.eigenvalue(p)
        delta_p = lambda_p - d.eigenvalue(p + 1)
        r = halving_index(d, p)
        window = 4.0 * noise_norm <= delta_p <= abs(lambda_p) / 4.0
        values = {
            'n': d.n,
            'p': p,
            'delta_p': delta_p,
            'lambda_p': lambda_p,
            'sigma_1': d.sigma_1,
            'noise_norm': noise_norm,
            'halving_index_r': r,
            'cross_term_x': cross_term_x(d, E, r),
            'window': window,
        }
        if not (delta_p > 0 and 4.0 * noise_norm <= delta_p):
            logger.info('contour-verify seed %d skipped: delta_p = %.3g < 4|E| = %.3g',
                        seed, delta_p, 4.0 * noise_norm)
            return values, [], True

        c = build_theorem_contour(d, p, nodes_per_segment=cfg.nodes_per_segment)
        _, cauchy = cauchy_projector(A, c, settings, spectral=d)
        measured = sine_distance(projector(d, leading_subset(p)),
                                 projector(d_tilde, leading_subset(p)))
        F = F_numeric(A, A_tilde, c, settings, spectral=d, spectral_tilde=d_tilde)
        F1 = F1_numeric(A, E, c, settings, spectral=d)
        segments = segment_integrals(A, E, c, settings, spectral=d)
        m1, m2, m3, m4 = segments.values
        values.update({
            'x0': c.x0,
            'x1': c.x1,
            'T': c.T,
            'margin': c.margin,
            'weyl_slack': weyl_enclosure(d, c, noise_norm).slack,
            'cauchy_deviation': cauchy.value,
            'measured': measured,
            'F': float(F.value),
            'F1': float(F1.value),
            'M1': m1,
            'M2': m2,
            'M3': m3,
            'M4': m4,
            'M_error': segments.estimated_error,
            'm1_bound': segments.m1_bound,
            'm1_crude_bound': segments.m1_crude_bound,
            'horizontal_bound': segments.horizontal_bound,
            'm3_bound': segments.m3_bound,
            'resolvent_residual': resolvent_identity_residual(A, E, c, settings, spectral=d),
            'quadrature_nodes': cauchy.node_count,
        })

        failures = []
        check(failures, 'cauchy deviation <= slack', cauchy.value <= slack)
        check(failures, 'measured <= F', measured <= F.value + slack)
        check(failures, 'F <= 2 F1', F.value <= 2.0 * F1.value + slack)
        check(failures, '2 pi F1 = M1 + M2 + M3 + M4',
              abs(2.0 * math.pi * F1.value - segments.total)
              <= 2.0 * math.pi * F1.estimated_error + segments.estimated_error + slack)
        if window:
            split = m1_split(A, E, c, r, settings, spectral=d)
            values.update({
                'm1_lead': split.lead,
                'm1_tail': split.tail,
                'm1_cross': split.cross,
                'm1_lead_bound': split.lead_bound,
                'm1_tail_bound': split.tail_bound,
                'm1_cross_bound': split.cross_bound,
            })
            failures.extend(segments.violations(slack))
            check(failures, 'F1 <= 2|E|/delta_p', F1.value <= 2.0 * noise_norm / delta_p + slack)
            check(failures, 'M1 <= lead + tail + cross', m1 <= split.total + slack)
            check(failures, 'lead <= 8 r^2 x/delta_p', split.lead <= split.lead_bound + slack)
            check(failures, 'tail <= 16|E|/|lambda_p|', split.tail <= split.tail_bound + slack)
            check(failures, 'cross <= 64|E|/|lambda_p| log((2T+delta_p)/delta_p)',
                  split.cross <= split.cross_bound + slack)
        logger.info('contour-verify seed %d: F = %.3g, F1 = %.3g, %d failure(s)',
                    seed, F.value, F1.value, len(failures))
        return values, failures, False

    return trial


@contour_verify_bp.cli.command('contour-verify', cls=ExperimentCommand)
@experiment_options
def contour_verify(**options):
    """Check the contour bootstrapping inequalities by quadrature."""
    run_experiment('contour-verify', options, build_jobs, make_trial, COLUMNS, COVERAGE)
