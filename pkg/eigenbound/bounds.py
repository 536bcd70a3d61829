"""
eigenbound/bounds.py — Gap statistics and every analytic eigenspace bound

Each bound checks its own hypotheses and raises PreconditionError (with the
failing inequality and its slack) instead of returning a number it has no
right to return. `evaluate_all` runs the whole menu against one trial and
turns those errors into BoundOutcome entries so a report can show which
bounds applied.

Bounds implemented:
  davis_kahan_bound       π‖E‖/(2δ) with δ = dist(Λ_S, Λ̃_{S^c}), or π‖E‖/δ_S
  new_bound               24(‖E‖/|λ_p|·log(6σ₁/δ_p) + r²x/δ_p)
  trivial_f1_bound        4‖E‖/δ_p (bootstrapping + the crude F₁ estimate)
  singular_space_bound    48(…) for S = {1..k} ∪ {n−(p−k)+1..n}
  rectangular_bound       24√2(…) for left/right singular subspaces
  lowrank_rate            √n/|λ_p| + r² log n/δ_p (reported rate, no constant)
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from eigenbound.errors import ArgumentError, PreconditionError
from eigenbound.spectral import (leading_subset, projector, sine_distance,
                                 singular_decompose, spectral_norm, validate_subset)

logger = logging.getLogger(__name__)

THEOREM_CONSTANT = 24.0
SINGULAR_CONSTANT = 48.0
RECTANGULAR_CONSTANT = 24.0 * math.sqrt(2.0)
M1_BOUND_CONSTANT = 70.0


@dataclass(frozen=True, eq=False)
class GapProfile:
    p: int
    delta_p: float
    delta_S: float
    halving_index_r: int
    sigma_1: float
    lambda_p: float
    subset: tuple = ()


@dataclass(frozen=True, eq=False)
class Precondition:
    name: str
    satisfied: bool
    slack: float


@dataclass(frozen=True, eq=False)
class BoundOutcome:
    """A bound value, or the precondition that kept it from applying."""
    name: str
    value: float = None
    failed_precondition: str = None
    slack: float = None

    @classmethod
    def failed(cls, name, error):
        return cls(name, None, error.name, error.slack)

    @property
    def applies(self):
        return self.value is not None


@dataclass(frozen=True, eq=False)
class BoundReport:
    measured: float
    dk_classical: BoundOutcome
    dk_corollary: BoundOutcome
    new_bound: BoundOutcome
    trivial_f1_bound: BoundOutcome
    cross_term_x: float
    noise_norm: float
    profile: GapProfile
    preconditions: tuple = field(default_factory=tuple)

    @property
    def outcomes(self):
        return (self.dk_classical, self.dk_corollary, self.new_bound, self.trivial_f1_bound)

    def violations(self, slack=1e-9):
        """Names of applicable bounds that the measured perturbation exceeds."""
        return [o.name for o in self.outcomes
                if o.applies and self.measured > o.value + slack]


def _require(name, lhs, rhs, bound):
    """Raise PreconditionError unless lhs <= rhs; slack is rhs - lhs."""
    if not lhs <= rhs:
        raise PreconditionError(name, rhs - lhs, bound=bound)


def _require_positive(name, value, bound):
    if not value > 0:
        raise PreconditionError(name, value, bound=bound)


def _noise_norm(E):
    entries = E.entries if hasattr(E, 'entries') else np.asarray(E)
    return spectral_norm(entries)


# ---------------------------------------------------------------------------
# Gap statistics
# ---------------------------------------------------------------------------

def halving_index(d, p):
    """Smallest r >= p with |λ_p|/2 <= |λ_p − λ_{r+1}|, taking λ_{n+1} = 0.

    r = n always qualifies under that convention, so the result is total.
    """
    if not 1 <= p <= d.n:
        raise ArgumentError(f'p = {p} outside 1..{d.n}')
    lam_p = d.eigenvalue(p)
    for r in range(p, d.n + 1):
        if abs(lam_p) / 2.0 <= abs(lam_p - d.eigenvalue(r + 1)):
            return r
    return d.n


def gap_profile(d, subset):
    """GapProfile for S; p is |S| and δ_p, r refer to the leading block {1..p}.

    Raises:
        ArgumentError: if S is empty or the whole index range.
    """
    S = validate_subset(subset, d.n, allow_full=False)
    inside = d.eigenvalues[[i - 1 for i in S]]
    outside = np.delete(d.eigenvalues, [i - 1 for i in S])
    delta_S = float(np.min(np.abs(inside[:, None] - outside[None, :])))
    p = len(S)
    return GapProfile(
        p=p,
        delta_p=d.eigenvalue(p) - d.eigenvalue(p + 1),
        delta_S=delta_S,
        halving_index_r=halving_index(d, p),
        sigma_1=d.sigma_1,
        lambda_p=d.eigenvalue(p),
        subset=S,
    )


def cross_term_x(d, E, r):
    """x = max_{i,j <= r} |u_iᵀ E u_j|."""
    entries = E.entries if hasattr(E, 'entries') else np.asarray(E)
    if entries.shape != (d.n, d.n):
        raise ArgumentError(f'noise shape {entries.shape} does not match dimension {d.n}')
    if not 1 <= r <= d.n:
        raise ArgumentError(f'r = {r} outside 1..{d.n}')
    U = d.eigenvectors[:, :r]
    return float(np.max(np.abs(U.T @ entries @ U)))


def separation(values, others):
    """min |a − b| over a in `values`, b in `others` (inf when `others` is empty)."""
    values, others = np.asarray(values), np.asarray(others)
    if others.size == 0 or values.size == 0:
        return math.inf
    return float(np.min(np.abs(values[:, None] - others[None, :])))


def weyl_gap(noise_norm, eigs_A, eigs_At):
    """max_i |λ_i − λ̃_i|; Weyl's inequality says this is at most ‖E‖."""
    a, b = np.asarray(eigs_A, dtype=float), np.asarray(eigs_At, dtype=float)
    if a.shape != b.shape:
        raise ArgumentError(f'spectra have different lengths ({a.size} vs {b.size})')
    if np.any(np.diff(a) > 0) or np.any(np.diff(b) > 0):
        raise ArgumentError('spectra must be sorted descending')
    gap = float(np.max(np.abs(a - b))) if a.size else 0.0
    if gap > noise_norm + 1e-9:
        logger.warning('Weyl shift %.6g exceeds |E| = %.6g', gap, noise_norm)
    return gap


def stable_rank(singular_values):
    """Σσ_i / σ₁ (the linear form)."""
    s = np.asarray(singular_values, dtype=float)
    if s.size == 0 or np.any(s < 0):
        raise ArgumentError('singular values must be a non-empty nonnegative vector')
    if np.any(np.diff(s) > 0):
        raise ArgumentError('singular values must be sorted descending')
    if s[0] <= 0:
        raise ArgumentError('stable rank is undefined for an all-zero spectrum')
    return float(np.sum(s) / s[0])


def regime(delta_p, noise_norm, lambda_p):
    """Where the instance sits relative to the moderate-gap window."""
    if delta_p < 4.0 * noise_norm:
        return 'gap-too-small'
    if delta_p > abs(lambda_p) / 4.0:
        return 'large-gap'
    return 'moderate-gap'


# ---------------------------------------------------------------------------
# Bounds
# ---------------------------------------------------------------------------

def davis_kahan_bound(noise_norm, delta, variant='general'):
    """Davis–Kahan: π‖E‖/(2δ) ('general') or π‖E‖/δ_S ('corollary').

    The corollary trades dist(Λ_S, Λ̃_{S^c}) for δ_S through Weyl's
    inequality, which needs δ_S − ‖E‖ >= δ_S/2, i.e. δ_S >= 2‖E‖.
    """
    if variant not in ('general', 'corollary'):
        raise ArgumentError(f'unknown Davis-Kahan variant {variant!r}')
    bound = f'davis-kahan-{variant}'
    _require_positive('delta > 0', delta, bound)
    if variant == 'general':
        return math.pi * noise_norm / (2.0 * delta)
    _require('2|E| <= delta_S (Weyl slack)', 2.0 * noise_norm, delta, bound)
    return math.pi * noise_norm / delta


def theorem_formula(noise_norm, lambda_p, sigma_1, delta_p, r, x, constant=THEOREM_CONSTANT):
    """constant · (‖E‖/|λ_p| · log(6σ₁/δ_p) + r²x/δ_p), no hypothesis checks."""
    if noise_norm == 0 and x == 0:
        return 0.0
    return constant * (noise_norm / abs(lambda_p) * math.log(6.0 * sigma_1 / delta_p)
                       + r * r * x / delta_p)


def _check_moderate_window(noise_norm, delta_p, lambda_p, bound):
    _require_positive('delta_p > 0', delta_p, bound)
    _require('4|E| <= delta_p', 4.0 * noise_norm, delta_p, bound)
    _require('delta_p <= |lambda_p|/4', delta_p, abs(lambda_p) / 4.0, bound)


def new_bound(d, E, p):
    """The moderate-gap bound on ‖Π̃_p − Π_p‖. Returns (value, GapProfile).

    Raises:
        PreconditionError: unless 4‖E‖ <= δ_p <= |λ_p|/4.
    """
    if not 1 <= p < d.n:
        raise ArgumentError(f'p = {p} must lie in 1..{d.n - 1}')
    profile = gap_profile(d, leading_subset(p))
    noise_norm = _noise_norm(E)
    _check_moderate_window(noise_norm, profile.delta_p, profile.lambda_p, 'new-bound')
    x = cross_term_x(d, E, profile.halving_index_r)
    value = theorem_formula(noise_norm, profile.lambda_p, profile.sigma_1,
                            profile.delta_p, profile.halving_index_r, x)
    return value, profile


def trivial_f1_bound(noise_norm, delta_p):
    """4‖E‖/δ_p: the bootstrapping identity fed with the crude estimate F₁ < 2‖E‖/δ_p."""
    _require_positive('delta_p > 0', delta_p, 'trivial-f1')
    _require('4|E| <= delta_p', 4.0 * noise_norm, delta_p, 'trivial-f1')
    return 4.0 * noise_norm / delta_p


def lowrank_rate(n, lambda_p, delta_p, r):
    """√n/|λ_p| + r² log n/δ_p, valid when |λ_p|/4 >= δ_p >= 8.01√n.

    This is a rate (the O(·) hides a constant), reported next to the
    Wigner-noise experiments rather than asserted.
    """
    _require('8.01 sqrt(n) <= delta_p', 8.01 * math.sqrt(n), delta_p, 'lowrank-rate')
    _require('delta_p <= |lambda_p|/4', delta_p, abs(lambda_p) / 4.0, 'lowrank-rate')
    return math.sqrt(n) / abs(lambda_p) + r * r * math.log(n) / delta_p


# ---------------------------------------------------------------------------
# Singular-space and rectangular variants
# ---------------------------------------------------------------------------

def singular_subset(n, p, k):
    """S = {1..k} ∪ {n−(p−k)+1..n}."""
    if not (1 <= p <= n and 0 <= k <= p):
        raise ArgumentError(f'need 1 <= p <= n and 0 <= k <= p (got n={n}, p={p}, k={k})')
    return tuple(range(1, k + 1)) + tuple(range(n - (p - k) + 1, n + 1))


def two_sided_halving_index(d, p, k):
    """The halving distance for the split (p, k). Returns (r, padded).

    r is the smallest positive integer with
        λ_k/2 <= λ_k − λ_{r+1}                 (leading branch, when k >= 1)
        |λ_q+1|/2 <= λ_{n−r+1} − λ_{q+1}        (trailing branch, q = n−(p−k))
    using λ_{n+1} = 0. If no r <= n qualifies, r = n and padded is True.
    """
    n = d.n
    q = n - (p - k)
    for r in range(1, n + 1):
        lead_ok = k == 0 or d.eigenvalue(k) / 2.0 <= d.eigenvalue(k) - d.eigenvalue(r + 1)
        tail_ok = (p - k == 0
                   or abs(d.eigenvalue(q + 1)) / 2.0 <= d.eigenvalue(n - r + 1) - d.eigenvalue(q + 1))
        if lead_ok and tail_ok:
            return r, False
    logger.warning('no halving distance within 1..%d for (p=%d, k=%d); using r = n', n, p, k)
    return n, True


def singular_space_bound(d, E, p, k):
    """48(‖E‖/σ_p · log(6σ₁/√(δ_kδ_q)) + r²x̄/min(δ_k, δ_q)), q = n−(p−k).

    x̄ is the larger of the two cross terms, over the leading r eigenvectors
    and the trailing ones with indices n−r..n. With k = 0 or k = p only one
    branch exists and its gap stands in for both.

    Raises:
        PreconditionError: naming whichever hypothesis fails.
    """
    n = d.n
    S = singular_subset(n, p, k)
    q = n - (p - k)
    noise_norm = _noise_norm(E)
    bound = 'singular-space'
    sigma = d.singular_values

    inside = np.abs(d.eigenvalues[[i - 1 for i in S]])
    outside = np.abs(np.delete(d.eigenvalues, [i - 1 for i in S]))
    if outside.size:
        _require('S holds the p largest |lambda|', float(outside.max()), float(inside.min()), bound)

    gaps = []
    if k >= 1:
        delta_k = d.eigenvalue(k) - d.eigenvalue(k + 1)
        _require_positive('delta_k > 0', delta_k, bound)
        _require('4|E| <= delta_k', 4.0 * noise_norm, delta_k, bound)
        _require('delta_k <= lambda_k/4', delta_k, d.eigenvalue(k) / 4.0, bound)
        gaps.append(delta_k)
    if p - k >= 1:
        delta_q = d.eigenvalue(q) - d.eigenvalue(q + 1)
        _require_positive('delta_{n-(p-k)} > 0', delta_q, bound)
        _require('4|E| <= delta_{n-(p-k)}', 4.0 * noise_norm, delta_q, bound)
        _require('delta_{n-(p-k)} <= |lambda_{n-(p-k)+1}|/4',
                 delta_q, abs(d.eigenvalue(q + 1)) / 4.0, bound)
        gaps.append(delta_q)
    sigma_p = float(sigma[p - 1])
    sigma_next = float(sigma[p]) if p < n else 0.0
    _require('2|E| <= sigma_p - sigma_{p+1}', 2.0 * noise_norm, sigma_p - sigma_next, bound)

    r, padded = two_sided_halving_index(d, p, k)
    entries = E.entries if hasattr(E, 'entries') else np.asarray(E)
    lead = d.eigenvectors[:, :r]
    tail = d.eigenvectors[:, max(n - r - 1, 0):]
    x_bar = max(float(np.max(np.abs(lead.T @ entries @ lead))),
                float(np.max(np.abs(tail.T @ entries @ tail))))
    if noise_norm == 0 and x_bar == 0:
        return 0.0
    geometric = math.sqrt(gaps[0] * gaps[-1])
    return SINGULAR_CONSTANT * (noise_norm / sigma_p * math.log(6.0 * d.sigma_1 / geometric)
                                + r * r * x_bar / min(gaps))


def rectangular_halving_index(sd, p):
    """Smallest r >= p with σ_p/2 <= |σ_p − σ_{r+1}|, σ past the stored values = 0."""
    sigma_p = sd.sigma(p)
    count = sd.singular_values.shape[0]
    for r in range(p, count + 1):
        if sigma_p / 2.0 <= abs(sigma_p - sd.sigma(r + 1)):
            return r
    return count


def rectangular_bound(A, E, p):
    """24√2(‖E‖/σ_p · log(6σ₁/δ_p) + r²x̄/δ_p), x̄ = max_{i,j<=r} |u_iᵀ E v_j|.

    Bounds both ‖Π̃_p^left − Π_p^left‖ and ‖Π̃_p^right − Π_p^right‖.

    Raises:
        PreconditionError: unless 4‖E‖ <= σ_p − σ_{p+1} <= σ_p/4.
    """
    A = np.asarray(A, dtype=float)
    E = np.asarray(E, dtype=float)
    if A.shape != E.shape:
        raise ArgumentError(f'noise shape {E.shape} does not match {A.shape}')
    sd = singular_decompose(A)
    if not 1 <= p <= sd.singular_values.shape[0]:
        raise ArgumentError(f'p = {p} outside 1..{sd.singular_values.shape[0]}')
    noise_norm = spectral_norm(E)
    sigma_p = sd.sigma(p)
    delta_p = sigma_p - sd.sigma(p + 1)
    bound = 'rectangular'
    _require_positive('delta_p > 0', delta_p, bound)
    _require('4|E| <= delta_p', 4.0 * noise_norm, delta_p, bound)
    _require('delta_p <= sigma_p/4', delta_p, sigma_p / 4.0, bound)

    r = rectangular_halving_index(sd, p)
    x_bar = float(np.max(np.abs(sd.left[:, :r].T @ E @ sd.right[:, :r])))
    return theorem_formula(noise_norm, sigma_p, sd.sigma_1, delta_p, r, x_bar,
                           constant=RECTANGULAR_CONSTANT)


# ---------------------------------------------------------------------------
# One-trial evaluation
# ---------------------------------------------------------------------------

def capture_outcome(name, fn, *args):
    try:
        value = fn(*args)
    except PreconditionError as e:
        logger.debug('%s skipped: %s', name, e)
        return BoundOutcome.failed(name, e)
    if isinstance(value, tuple):
        value = value[0]
    return BoundOutcome(name, float(value))


def evaluate_all(d, d_tilde, E, subset):
    """Measured ‖Π̃_S − Π_S‖ plus every bound that applies to S.

    The moderate-gap bounds (new_bound, trivial_f1_bound) are only defined
    for leading blocks; for any other S they are reported as failing the
    'S = {1..p}' precondition.
    """
    S = validate_subset(subset, d.n, allow_full=False)
    profile = gap_profile(d, S)
    noise_norm = _noise_norm(E)
    measured = sine_distance(projector(d, S), projector(d_tilde, S))

    inside = d.eigenvalues[[i - 1 for i in S]]
    outside_tilde = np.delete(d_tilde.eigenvalues, [i - 1 for i in S])
    dist = separation(inside, outside_tilde)

    dk_classical = capture_outcome('dk_classical', davis_kahan_bound, noise_norm, dist, 'general')
    dk_corollary = capture_outcome('dk_corollary', davis_kahan_bound, noise_norm, profile.delta_S, 'corollary')
    if S == leading_subset(len(S)):
        new = capture_outcome('new_bound', new_bound, d, E, profile.p)
        trivial = capture_outcome('trivial_f1_bound', trivial_f1_bound, noise_norm, profile.delta_p)
    else:
        not_leading = PreconditionError('S = {1..p}', -1.0)
        new = BoundOutcome.failed('new_bound', not_leading)
        trivial = BoundOutcome.failed('trivial_f1_bound', not_leading)

    x = cross_term_x(d, E, profile.halving_index_r)
    # (name, slack, strict)
    slacks = (
        ('dist(Lambda_S, tilde Lambda_Sc) > 0', dist, True),
        ('2|E| <= delta_S', profile.delta_S - 2.0 * noise_norm, False),
        ('4|E| <= delta_p', profile.delta_p - 4.0 * noise_norm, False),
        ('delta_p <= |lambda_p|/4', abs(profile.lambda_p) / 4.0 - profile.delta_p, False),
    )
    preconditions = tuple(
        Precondition(name, slack > 0 if strict else slack >= 0, float(slack))
        for name, slack, strict in slacks
    )
    return BoundReport(
        measured=measured,
        dk_classical=dk_classical,
        dk_corollary=dk_corollary,
        new_bound=new,
        trivial_f1_bound=trivial,
        cross_term_x=x,
        noise_norm=noise_norm,
        profile=profile,
        preconditions=preconditions,
    )
