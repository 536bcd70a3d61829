"""
eigenbound/quadrature.py — Composite Gauss–Legendre rules on straight contour segments

A Segment is an oriented straight piece of a contour in the complex plane.
Segments that cross the real axis near the spectrum get a sinh change of
variable centred on the crossing, τ = scale·sinh(u), so the 1/(t² + a²)
shaped peak of a resolvent norm is spread evenly over the panels; the other
segments use plain composite Gauss–Legendre in arc length.

`integrate` doubles the panel count until two successive estimates agree
(relative tolerance, with an absolute floor) and reports the last change as
the error estimate.
"""

import functools
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from eigenbound.errors import ArgumentError, QuadratureError

logger = logging.getLogger(__name__)

# Node evaluations are batched; each batch is reduced in a fixed order so the
# result does not depend on how batches are scheduled
BATCH_SIZE = 64


@dataclass(frozen=True, eq=False)
class QuadratureResult:
    value: object
    node_count: int
    refinement_steps: int
    estimated_error: float


@dataclass(frozen=True)
class QuadratureSettings:
    order: int = 16
    rtol: float = 1e-8
    atol: float = 1e-13
    max_refinements: int = 8

    @classmethod
    def from_config(cls, config):
        """Pick the QUADRATURE_* keys out of an app config mapping."""
        return cls(
            order=config.get('QUADRATURE_ORDER', cls.order),
            rtol=config.get('QUADRATURE_RTOL', cls.rtol),
            atol=config.get('QUADRATURE_ATOL', cls.atol),
            max_refinements=config.get('QUADRATURE_MAX_REFINEMENTS', cls.max_refinements),
        )


@functools.lru_cache(maxsize=None)
def _legendre(order):
    nodes, weights = special.roots_legendre(order)
    return nodes, weights


def gauss_legendre_panels(a, b, panels, order):
    """Composite Gauss–Legendre nodes/weights for [a, b] split into equal panels."""
    if panels < 1 or order < 1:
        raise ArgumentError('need at least one panel and one node per panel')
    x, w = _legendre(order)
    edges = np.linspace(a, b, panels + 1)
    half = (edges[1:] - edges[:-1]) / 2.0
    mid = (edges[1:] + edges[:-1]) / 2.0
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


@dataclass(frozen=True)
class Segment:
    """Straight oriented segment start → end.

    `focus` is the point on the segment closest to the spectrum (where a
    vertical side crosses the real axis) and `scale` the distance from it to
    the nearest eigenvalue; when both are set the sinh mapping is used.
    """
    start: complex
    end: complex
    focus: complex = None
    scale: float = None
    name: str = ''

    @property
    def length(self):
        return abs(self.end - self.start)

    @property
    def direction(self):
        return (self.end - self.start) / self.length

    def rule(self, panels, order):
        """Nodes z_k, oriented weights dz_k and arc-length weights |dz_k|."""
        direction = self.direction
        if self.focus is None or not self.scale:
            tau, w = gauss_legendre_panels(0.0, self.length, panels, order)
            z = self.start + direction * tau
            return z, direction * w, w
        # signed arc-length from the focus, mapped through τ = scale·sinh(u)
        tau_a = ((self.start - self.focus) / direction).real
        tau_b = ((self.end - self.focus) / direction).real
        u, w = gauss_legendre_panels(math.asinh(tau_a / self.scale),
                                     math.asinh(tau_b / self.scale), panels, order)
        z = self.focus + direction * (self.scale * np.sinh(u))
        jac = self.scale * np.cosh(u) * w
        return z, direction * jac, jac


def _apply_rule(integrand, z, weights):
    total = None
    for start in range(0, z.shape[0], BATCH_SIZE):
        values = np.asarray(integrand(z[start:start + BATCH_SIZE]))
        chunk = np.tensordot(weights[start:start + BATCH_SIZE], values, axes=(0, 0))
        total = chunk if total is None else total + chunk
    return total


def integrate(integrand, segment, nodes=256, order=16, rtol=1e-8, atol=1e-13,
              max_refinements=8, oriented=False):
    """∫_segment integrand(z) dz (oriented) or |dz| (arc length).

    `integrand` takes a 1-D array of complex nodes and returns one value per
    node: shape (k,) for scalars or (k, n, n) for matrices.

    Raises:
        QuadratureError: when `max_refinements` doublings do not converge.
    """
    panels = max(1, nodes // order)
    z, dz, ds = segment.rule(panels, order)
    previous = _apply_rule(integrand, z, dz if oriented else ds)
    change = math.inf
    for step in range(1, max_refinements + 1):
        panels *= 2
        z, dz, ds = segment.rule(panels, order)
        current = _apply_rule(integrand, z, dz if oriented else ds)
        change = float(np.linalg.norm(np.atleast_1d(current - previous)))
        size = float(np.linalg.norm(np.atleast_1d(current)))
        logger.debug('segment %s: %d nodes, change %.3g', segment.name, panels * order, change)
        if change <= max(rtol * size, atol):
            return QuadratureResult(current, panels * order, step, change)
        previous = current
    raise QuadratureError(
        f'quadrature on segment {segment.name or "?"} did not converge after '
        f'{max_refinements} refinements (last change {change:.3g})',
        estimate=previous,
        refinements=max_refinements,
    )
