"""
eigenbound/contour.py — Rectangle contours and resolvent integrals along them

A contour is the boundary of the rectangle [x0, x1] × [−T, T], traversed
counterclockwise as four segments:

  gamma1  left side   x0 + iT → x0 − iT   (downward)
  gamma4  bottom      x0 − iT → x1 − iT
  gamma3  right side  x1 − iT → x1 + iT   (upward)
  gamma2  top         x1 + iT → x0 + iT

`ContourSpec.segments` lists them as (gamma1, gamma2, gamma3, gamma4). The
norm integrals F, F₁ and M₁…M₄ do not depend on the orientation; the
matrix-valued Cauchy integral does, and counterclockwise gives +Π_S.

Public functions:
  build_theorem_contour(d, p)           — x0 = λ_p − δ_p/2, x1 = T = 2σ₁
  build_bisecting_contour(d, S, ‖E‖)    — vertical sides bisect the gaps around S
  rectangle_contour(x0, x1, T, d)       — any rectangle, enclosure recorded
  cauchy_projector(A, c)                — (1/2πi)∮(zI − A)⁻¹dz
  F_numeric / F1_numeric                — the two norm integrals of the bootstrapping argument
  segment_integrals(A, E, c)            — M₁…M₄ with their analytic bounds
  m1_split(A, E, c, r)                  — M₁ split into lead, tail and cross blocks
  arctan_integral / arctan_quadrature   — ∫_{−T}^{T} dt/(t² + a²), closed form and numeric
  cauchy_indicator(a, c)                — (1/2πi)∮dz/(z − a)
  resolvent_identity_residual(A, E, c)  — node-wise check of R_Ã − R_A = R_A E R_Ã
  node_contraction(A, E, c)             — max over nodes of ‖(zI − A)⁻¹E‖
  weyl_enclosure(d, c, ‖E‖)             — enclosure inferred from Weyl's inequality alone
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from eigenbound.bounds import (M1_BOUND_CONSTANT, cross_term_x, halving_index,
                               theorem_formula)
from eigenbound.errors import (ArgumentError, DegenerateGapError, EnclosureError,
                               PreconditionError)
from eigenbound.quadrature import (BATCH_SIZE, QuadratureResult, QuadratureSettings, Segment,
                                   integrate)
from eigenbound.spectral import (batched_spectral_norm, leading_subset, projector,
                                 spectral_decompose, spectral_norm, validate_subset)

logger = logging.getLogger(__name__)

MIN_NODES_PER_SEGMENT = 8
SEGMENT_NAMES = ('gamma1', 'gamma2', 'gamma3', 'gamma4')


@dataclass(frozen=True, eq=False)
class ContourSpec:
    """Rectangle contour plus the enclosure it was verified against.

    `subset` holds the 1-based indices of the eigenvalues inside, `margin`
    the smallest distance from any eigenvalue to the boundary.
    """
    x0: float
    x1: float
    T: float
    segments: tuple
    nodes_per_segment: int
    margin: float
    subset: tuple = ()
    kind: str = 'rectangle'

    def __post_init__(self):
        if not self.x0 < self.x1:
            raise ArgumentError(f'contour needs x0 < x1 (got {self.x0}, {self.x1})')
        if not self.T > 0:
            raise ArgumentError(f'contour needs T > 0 (got {self.T})')
        if self.nodes_per_segment < MIN_NODES_PER_SEGMENT:
            raise ArgumentError(f'need at least {MIN_NODES_PER_SEGMENT} nodes per segment')

    def segment(self, name):
        return self.segments[SEGMENT_NAMES.index(name)]


@dataclass(frozen=True, eq=False)
class SegmentIntegrals:
    """M₁…M₄ and the analytic estimates each is checked against."""
    values: tuple
    results: tuple
    m1_bound: float
    m1_crude_bound: float
    horizontal_bound: float
    m3_bound: float

    @property
    def total(self):
        return float(sum(self.values))

    @property
    def estimated_error(self):
        return float(sum(r.estimated_error for r in self.results))

    def violations(self, slack=1e-6):
        m1, m2, m3, m4 = self.values
        checks = (
            ('M1 <= 70(...)', m1, self.m1_bound),
            ('M1 <= 8|E|/delta_p', m1, self.m1_crude_bound),
            ('M2 <= |E||x1-x0|/T^2', m2, self.horizontal_bound),
            ('M4 <= |E||x1-x0|/T^2', m4, self.horizontal_bound),
            ('M3 <= 4|E|/|x1-lambda_1|', m3, self.m3_bound),
        )
        return [name for name, value, bound in checks if value > bound + slack]


@dataclass(frozen=True, eq=False)
class M1Split:
    lead: float
    tail: float
    cross: float
    lead_bound: float
    tail_bound: float
    cross_bound: float
    r: int

    @property
    def total(self):
        return self.lead + self.tail + self.cross


@dataclass(frozen=True, eq=False)
class WeylEnclosure:
    holds: bool
    slack: float


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def _signed_distance(lam, x0, x1, T, expect_inside):
    """Distance from real λ to the rectangle boundary, negative if on the wrong side."""
    inside = x0 < lam < x1
    if inside:
        distance = min(lam - x0, x1 - lam, T)
    else:
        distance = max(x0 - lam, lam - x1, 0.0)
    return distance if inside == expect_inside else -distance


def _classify(eigenvalues, x0, x1, T):
    """(1-based indices inside, distance of every eigenvalue to the boundary)."""
    inside = tuple(i + 1 for i, lam in enumerate(eigenvalues) if x0 < lam < x1)
    distances = np.array([abs(_signed_distance(lam, x0, x1, T, True)) for lam in eigenvalues])
    return inside, distances


def _enclosure_slack(eigenvalues, c, subset):
    members = set(subset)
    return min(_signed_distance(lam, c.x0, c.x1, c.T, (i + 1) in members)
               for i, lam in enumerate(eigenvalues))


def _segments(x0, x1, T, eigenvalues):
    def scale_at(x):
        return float(np.min(np.abs(eigenvalues - x))) if eigenvalues.size else None
    a, b, c, d = complex(x0, T), complex(x0, -T), complex(x1, -T), complex(x1, T)
    return (
        Segment(a, b, focus=complex(x0, 0.0), scale=scale_at(x0), name='gamma1'),
        Segment(d, a, name='gamma2'),
        Segment(c, d, focus=complex(x1, 0.0), scale=scale_at(x1), name='gamma3'),
        Segment(b, c, name='gamma4'),
    )


def rectangle_contour(x0, x1, T, d, subset=None, nodes_per_segment=256, kind='rectangle'):
    """Rectangle [x0, x1] × [−T, T] around part of d's spectrum.

    With `subset` given, the eigenvalues with those indices must lie strictly
    inside and all others strictly outside.

    Raises:
        EnclosureError: if the rectangle does not separate `subset`, or an
            eigenvalue sits on the boundary.
    """
    eigenvalues = np.asarray(d.eigenvalues, dtype=float)
    inside, distances = _classify(eigenvalues, x0, x1, T)
    if subset is not None and tuple(subset) != inside:
        raise EnclosureError(
            f'rectangle [{x0:.6g}, {x1:.6g}] x [-{T:.6g}, {T:.6g}] encloses {inside}, expected {tuple(subset)}')
    nearest = int(np.argmin(distances))
    margin = float(distances[nearest])
    if margin <= 0:
        lam = float(eigenvalues[nearest])
        raise EnclosureError(f'eigenvalue {lam:.17g} lies on the contour', eigenvalue=lam)
    return ContourSpec(
        x0=float(x0),
        x1=float(x1),
        T=float(T),
        segments=_segments(x0, x1, T, eigenvalues),
        nodes_per_segment=int(nodes_per_segment),
        margin=margin,
        subset=inside,
        kind=kind,
    )


def build_theorem_contour(d, p, nodes_per_segment=256):
    """x0 = λ_p − δ_p/2, x1 = 2σ₁, T = 2σ₁, enclosing λ₁…λ_p.

    Raises:
        DegenerateGapError: if δ_p = λ_p − λ_{p+1} is not positive.
        EnclosureError: if the rectangle fails to separate {1..p}.
    """
    if not 1 <= p <= d.n:
        raise ArgumentError(f'p = {p} outside 1..{d.n}')
    delta_p = d.eigenvalue(p) - d.eigenvalue(p + 1)
    if not delta_p > 0:
        raise DegenerateGapError(p, bound='theorem-contour')
    x0 = d.eigenvalue(p) - delta_p / 2.0
    x1 = 2.0 * d.sigma_1
    return rectangle_contour(x0, x1, x1, d, subset=leading_subset(p),
                             nodes_per_segment=nodes_per_segment, kind='theorem')


def build_bisecting_contour(d, subset, noise_norm, nodes_per_segment=256):
    """Vertical sides at the midpoints between S and its nearest outside neighbours.

    S must be a run of consecutive indices. A side with no neighbour beyond it
    sits one half-gap past the end of the run. The margin is the smallest
    half-gap, which is at least 2‖E‖ once the gaps are at least 4‖E‖.

    Raises:
        ArgumentError: if S is not contiguous or covers the whole spectrum.
        DegenerateGapError: if S touches an eigenvalue outside it.
        PreconditionError: if a gap around S is below 4‖E‖.
    """
    S = validate_subset(subset, d.n, allow_full=False)
    if S != tuple(range(S[0], S[-1] + 1)):
        raise ArgumentError(f'index set {S} is not contiguous')
    first, last = S[0], S[-1]
    gaps = []
    if first > 1:
        gaps.append(d.eigenvalue(first - 1) - d.eigenvalue(first))
    if last < d.n:
        gaps.append(d.eigenvalue(last) - d.eigenvalue(last + 1))
    gap = min(gaps)
    if not gap > 0:
        raise DegenerateGapError(last if last < d.n else first - 1, bound='bisecting-contour')
    if 4.0 * noise_norm > gap:
        raise PreconditionError('4|E| <= gap(S)', gap - 4.0 * noise_norm, bound='bisecting-contour')
    half = gap / 2.0
    x1 = (d.eigenvalue(first - 1) + d.eigenvalue(first)) / 2.0 if first > 1 else d.eigenvalue(first) + half
    x0 = (d.eigenvalue(last) + d.eigenvalue(last + 1)) / 2.0 if last < d.n else d.eigenvalue(last) - half
    T = max(half, (x1 - x0) / 2.0)
    c = rectangle_contour(x0, x1, T, d, subset=S, nodes_per_segment=nodes_per_segment, kind='bisecting')
    logger.debug('bisecting contour for %s: [%g, %g], T = %g, margin %g', S, x0, x1, T, c.margin)
    return c


# ---------------------------------------------------------------------------
# Integrands
# ---------------------------------------------------------------------------

def _resolvents(d, zs):
    D = 1.0 / (zs[:, None] - d.eigenvalues[None, :])
    U = d.eigenvectors
    return (U[None, :, :] * D[:, None, :]) @ U.T


def _eigenbasis_noise(d, E):
    entries = E.entries if hasattr(E, 'entries') else np.asarray(E, dtype=float)
    if entries.shape != (d.n, d.n):
        raise ArgumentError(f'noise shape {entries.shape} does not match dimension {d.n}')
    U = d.eigenvectors
    return U.T @ entries @ U


def _sandwich(d, E_hat):
    """z ↦ ‖(zI − A)⁻¹E(zI − A)⁻¹‖, evaluated in A's eigenbasis."""
    def integrand(zs):
        D = 1.0 / (zs[:, None] - d.eigenvalues[None, :])
        return batched_spectral_norm(D[:, :, None] * E_hat[None, :, :] * D[:, None, :])
    return integrand


def _run(integrand, c, settings, segments=None, oriented=False):
    settings = settings or QuadratureSettings()
    return [integrate(integrand, seg, nodes=c.nodes_per_segment, order=settings.order,
                      rtol=settings.rtol, atol=settings.atol,
                      max_refinements=settings.max_refinements, oriented=oriented)
            for seg in (segments or c.segments)]


def _combine(results, factor=1.0):
    value = results[0].value
    for r in results[1:]:
        value = value + r.value
    return QuadratureResult(
        value=value * factor,
        node_count=sum(r.node_count for r in results),
        refinement_steps=max(r.refinement_steps for r in results),
        estimated_error=abs(factor) * sum(r.estimated_error for r in results),
    )


def _check_contour_for(d, c, label):
    slack = _enclosure_slack(d.eigenvalues, c, c.subset)
    if not slack > 0:
        raise PreconditionError(f'{label} eigenvalues inside Gamma iff index in S', slack,
                                bound='contour')


# ---------------------------------------------------------------------------
# Integrals
# ---------------------------------------------------------------------------

def cauchy_projector(A, c, settings=None, spectral=None):
    """(1/2πi)∮(zI − A)⁻¹dz, integrated entrywise.

    Returns (matrix, QuadratureResult); the result's value is the Frobenius
    distance from the matrix to the exact projector onto c.subset.

    Raises:
        PreconditionError: if A's spectrum does not match the contour.
        QuadratureError: if a segment fails to converge.
    """
    d = spectral or spectral_decompose(A)
    _check_contour_for(d, c, 'A')
    results = _run(lambda zs: _resolvents(d, zs), c, settings, oriented=True)
    combined = _combine(results, 1.0 / (2j * math.pi))
    matrix = np.real(combined.value)
    exact = projector(d, c.subset).matrix if c.subset else np.zeros((d.n, d.n))
    deviation = float(np.linalg.norm(matrix - exact))
    logger.debug('cauchy projector for %s: deviation %.3g', c.subset, deviation)
    return matrix, QuadratureResult(deviation, combined.node_count,
                                    combined.refinement_steps, combined.estimated_error)


def F_numeric(A, A_tilde, c, settings=None, spectral=None, spectral_tilde=None):
    """F = (1/2π)∮‖(zI − Ã)⁻¹ − (zI − A)⁻¹‖|dz|.

    Raises:
        PreconditionError: if either spectrum is not separated by c as c.subset says.
    """
    d = spectral or spectral_decompose(A)
    dt = spectral_tilde or spectral_decompose(A_tilde)
    _check_contour_for(d, c, 'A')
    _check_contour_for(dt, c, 'A_tilde')

    def integrand(zs):
        return batched_spectral_norm(_resolvents(dt, zs) - _resolvents(d, zs))

    return _combine(_run(integrand, c, settings), 1.0 / (2.0 * math.pi))


def _segment_results(A, E, c, settings, spectral):
    d = spectral or spectral_decompose(A)
    _check_contour_for(d, c, 'A')
    return d, _run(_sandwich(d, _eigenbasis_noise(d, E)), c, settings)


def F1_numeric(A, E, c, settings=None, spectral=None):
    """F₁ = (1/2π)∮‖(zI − A)⁻¹E(zI − A)⁻¹‖|dz|, summed over the four segments."""
    _, results = _segment_results(A, E, c, settings, spectral)
    return _combine(results, 1.0 / (2.0 * math.pi))


def segment_integrals(A, E, c, settings=None, spectral=None):
    """M_k = ∫_{Γ_k}‖(zI − A)⁻¹E(zI − A)⁻¹‖|dz| on the theorem contour.

    Alongside the four values this reports the estimates they obey inside
    the moderate-gap window: M₁ ≤ 70(‖E‖/|λ_p|·log(6σ₁/δ_p) + r²x/δ_p),
    M₁ ≤ 8‖E‖/δ_p, M₂, M₄ ≤ ‖E‖|x₁ − x₀|/T² and M₃ ≤ 4‖E‖/|x₁ − λ₁|.
    """
    if c.kind != 'theorem':
        raise ArgumentError('segment integrals are defined on the theorem contour')
    d, results = _segment_results(A, E, c, settings, spectral)
    entries = E.entries if hasattr(E, 'entries') else np.asarray(E, dtype=float)
    noise_norm = spectral_norm(entries)
    p = len(c.subset)
    lambda_p = d.eigenvalue(p)
    delta_p = lambda_p - d.eigenvalue(p + 1)
    r = halving_index(d, p)
    x = cross_term_x(d, entries, r)
    return SegmentIntegrals(
        values=tuple(float(res.value) for res in results),
        results=tuple(results),
        m1_bound=theorem_formula(noise_norm, lambda_p, d.sigma_1, delta_p, r, x,
                                 constant=M1_BOUND_CONSTANT),
        m1_crude_bound=8.0 * noise_norm / delta_p,
        horizontal_bound=noise_norm * abs(c.x1 - c.x0) / c.T ** 2,
        m3_bound=4.0 * noise_norm / abs(c.x1 - d.eigenvalue(1)),
    )


def m1_split(A, E, c, r=None, settings=None, spectral=None):
    """Split the gamma1 integrand by blocks of A's eigenbasis at index r.

    lead   ∫‖D_r Ê_rr D_r‖        ≤ 8r²x/δ_p
    tail   ∫‖D_t Ê_tt D_t‖        ≤ 16‖E‖/|λ_p|
    cross  2∫‖D_r Ê_rt D_t‖       ≤ 64‖E‖/|λ_p|·log((2T + δ_p)/δ_p)

    where Ê = UᵀEU and D = diag(1/(z − λ_i)). M₁ ≤ lead + tail + cross.
    r defaults to the halving index of p = |S|.
    """
    if c.kind != 'theorem':
        raise ArgumentError('m1_split is defined on the theorem contour')
    d = spectral or spectral_decompose(A)
    _check_contour_for(d, c, 'A')
    p = len(c.subset)
    r = halving_index(d, p) if r is None else int(r)
    if not p <= r <= d.n:
        raise ArgumentError(f'r = {r} outside {p}..{d.n}')
    E_hat = _eigenbasis_noise(d, E)
    lam = d.eigenvalues

    def block(rows, cols, factor=1.0):
        sub = E_hat[np.ix_(rows, cols)]
        if sub.size == 0:
            return lambda zs: np.zeros(zs.shape[0])

        def integrand(zs):
            Dr = 1.0 / (zs[:, None] - lam[None, rows])
            Dc = 1.0 / (zs[:, None] - lam[None, cols])
            return factor * batched_spectral_norm(Dr[:, :, None] * sub[None, :, :] * Dc[:, None, :])
        return integrand

    lead_idx, tail_idx = np.arange(r), np.arange(r, d.n)
    gamma1 = [c.segment('gamma1')]
    lead = _run(block(lead_idx, lead_idx), c, settings, segments=gamma1)[0]
    tail = _run(block(tail_idx, tail_idx), c, settings, segments=gamma1)[0]
    cross = _run(block(lead_idx, tail_idx, 2.0), c, settings, segments=gamma1)[0]

    entries = E.entries if hasattr(E, 'entries') else np.asarray(E, dtype=float)
    noise_norm = spectral_norm(entries)
    lambda_p = abs(d.eigenvalue(p))
    delta_p = d.eigenvalue(p) - d.eigenvalue(p + 1)
    x = cross_term_x(d, entries, r)
    return M1Split(
        lead=float(lead.value),
        tail=float(tail.value),
        cross=float(cross.value),
        lead_bound=8.0 * r * r * x / delta_p,
        tail_bound=16.0 * noise_norm / lambda_p,
        cross_bound=64.0 * noise_norm / lambda_p * math.log((2.0 * c.T + delta_p) / delta_p),
        r=r,
    )


def arctan_integral(a, T):
    """∫_{−T}^{T} dt/(t² + a²) = (2/a)·arctan(T/a), and the estimate 4/a.

    Returns (closed_form, bound).

    Raises:
        ArgumentError: unless 0 < a <= T.
    """
    if not 0 < a <= T:
        raise ArgumentError(f'need 0 < a <= T (got a={a}, T={T})')
    return 2.0 / a * math.atan(T / a), 4.0 / a


def arctan_quadrature(a, T, nodes=256, settings=None):
    """The same integral by the contour engine's mapped Gauss–Legendre rule."""
    if not (a > 0 and T > 0):
        raise ArgumentError(f'need a > 0 and T > 0 (got a={a}, T={T})')
    settings = settings or QuadratureSettings()
    segment = Segment(complex(-T, 0.0), complex(T, 0.0), focus=0j, scale=float(a), name='arctan')
    result = integrate(lambda ts: np.real(1.0 / (ts * ts + a * a)), segment, nodes=nodes,
                       order=settings.order, rtol=settings.rtol, atol=settings.atol,
                       max_refinements=settings.max_refinements)
    return QuadratureResult(float(result.value), result.node_count,
                            result.refinement_steps, result.estimated_error)


def cauchy_indicator(a, c, settings=None):
    """(1/2πi)∮dz/(z − a): 1 for a inside the rectangle, 0 outside."""
    results = _run(lambda zs: 1.0 / (zs - a), c, settings, oriented=True)
    return _combine(results, 1.0 / (2j * math.pi))


def _contour_nodes(c, settings):
    settings = settings or QuadratureSettings()
    panels = max(1, c.nodes_per_segment // settings.order)
    return np.concatenate([seg.rule(panels, settings.order)[0] for seg in c.segments])


def resolvent_identity_residual(A, E, c, settings=None, spectral=None):
    """max over nodes of ‖(zI − Ã)⁻¹ − (zI − A)⁻¹ − (zI − A)⁻¹E(zI − Ã)⁻¹‖_F, Ã = A + E."""
    d = spectral or spectral_decompose(A)
    dt = spectral_decompose(A + E)
    worst = 0.0
    zs = _contour_nodes(c, settings)
    for start in range(0, zs.shape[0], BATCH_SIZE):
        batch = zs[start:start + BATCH_SIZE]
        R, Rt = _resolvents(d, batch), _resolvents(dt, batch)
        residual = Rt - R - R @ E.entries @ Rt
        worst = max(worst, float(np.max(np.linalg.norm(residual, axis=(1, 2)))))
    return worst


def node_contraction(A, E, c, settings=None, spectral=None):
    """max over nodes of ‖(zI − A)⁻¹E‖; at most 1/2 when the margin is at least 2‖E‖."""
    d = spectral or spectral_decompose(A)
    E_hat = _eigenbasis_noise(d, E)
    zs = _contour_nodes(c, settings)
    D = 1.0 / (zs[:, None] - d.eigenvalues[None, :])
    return float(np.max(batched_spectral_norm(D[:, :, None] * E_hat[None, :, :])))


def weyl_enclosure(d, c, noise_norm):
    """Enclosure of Ã's spectrum as Weyl's inequality guarantees it.

    Every λ̃_i is within ‖E‖ of λ_i, so the classification survives when the
    contour margin exceeds ‖E‖. slack = margin − ‖E‖.
    """
    slack = _enclosure_slack(d.eigenvalues, c, c.subset) - noise_norm
    return WeylEnclosure(holds=slack > 0, slack=float(slack))
