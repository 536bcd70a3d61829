"""
eigenbound/power.py — Power iteration, plain and on a sparsified matrix

power_iteration runs v_k = M v_{k−1}/‖M v_{k−1}‖ for a fixed number of steps
(or until the eigen-residual drops below a threshold). The sparsified
variant keeps each symmetric pair of A with probability ρ, iterates on the
rescaled sparse matrix stored as CSR, and reports the certified error bound
for the leading eigenvector next to the Davis–Kahan comparison value.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse

from eigenbound.bounds import BoundOutcome, capture_outcome, halving_index, new_bound
from eigenbound.errors import ArgumentError, BreakdownError, PreconditionError
from eigenbound.noise import (STREAM_START_VECTOR, entry_bound, rho_advisory, sparsify,
                              stream)
from eigenbound.spectral import SymmetricMatrix, spectral_decompose, spectral_norm

logger = logging.getLogger(__name__)

CERTIFICATE_CONSTANT = 72.0
# Alignment with u₁ below this after the last step means v₀ had no u₁ component
STALL_ALIGNMENT = 1e-6


@dataclass(frozen=True, eq=False)
class PowerConfig:
    max_iterations: int = 100
    v0_seed: int = 0
    v0: np.ndarray = None
    stop_tol: float = 1e-12
    early_stop: bool = True

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ArgumentError(f'max_iterations must be at least 1 (got {self.max_iterations})')
        if not self.stop_tol > 0:
            raise ArgumentError(f'stop_tol must be positive (got {self.stop_tol})')

    def start_vector(self, n):
        """v₀: the explicit vector normalized, or a seeded uniform draw on the sphere."""
        if self.v0 is not None:
            v = np.asarray(self.v0, dtype=float)
            if v.shape != (n,):
                raise ArgumentError(f'v0 has shape {v.shape}, expected ({n},)')
        else:
            v = stream(self.v0_seed, STREAM_START_VECTOR).standard_normal(n)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise ArgumentError('v0 must be nonzero')
        return v / norm


@dataclass(frozen=True, eq=False)
class EigvecResult:
    vector: np.ndarray
    iterations_used: int
    rayleigh: float
    alignment_history: tuple = ()
    rayleigh_history: tuple = ()
    residual: float = None
    multiplies: int = 0
    multiply_nnz: int = 0
    stalled: bool = False

    @property
    def dense_cost(self):
        n = self.vector.shape[0]
        return self.multiplies * n * n

    @property
    def sparse_cost(self):
        return self.multiplies * self.multiply_nnz


@dataclass(frozen=True, eq=False)
class CertificateReport:
    """What a sparsified run measured next to what the bounds promise."""
    error: float
    certificate: BoundOutcome
    davis_kahan: BoundOutcome
    noise_norm: float
    K: float
    rho: float
    rho_advisory: bool
    failure_probability: float
    halving_index_r: int

    @property
    def dominated(self):
        """None when the certificate does not apply, else error <= certificate."""
        if not self.certificate.applies:
            return None
        return self.error <= self.certificate.value


def _operator(M):
    if isinstance(M, SymmetricMatrix):
        return M.entries, M.n, M.n * M.n
    if scipy.sparse.issparse(M):
        M = scipy.sparse.csr_matrix(M)
        return M, M.shape[0], int(M.nnz)
    M = np.asarray(M, dtype=float)
    return M, M.shape[0], M.size


def power_iteration(M, cfg, reference=None):
    """Run power iteration on M (SymmetricMatrix, dense array or scipy sparse).

    `reference` is a unit vector (normally u₁); when given, |⟨v_k, reference⟩|
    is recorded after every step.

    Raises:
        BreakdownError: when M v_{k−1} = 0.
    """
    op, n, nnz = _operator(M)
    v = cfg.start_vector(n)
    w = op @ v
    multiplies = 1
    alignment, rayleighs = [], []
    rayleigh = float(v @ w)
    residual = None
    k = 0
    for k in range(1, cfg.max_iterations + 1):
        norm = float(np.linalg.norm(w))
        if norm == 0:
            raise BreakdownError(k)
        v = w / norm
        w = op @ v
        multiplies += 1
        rayleigh = float(v @ w)
        rayleighs.append(rayleigh)
        if reference is not None:
            alignment.append(abs(float(v @ reference)))
        residual = float(np.linalg.norm(w - rayleigh * v))
        if cfg.early_stop and residual <= cfg.stop_tol:
            break

    stalled = bool(alignment) and alignment[-1] < STALL_ALIGNMENT
    if stalled:
        logger.warning('power iteration stalled: alignment with the reference is %.3g after %d steps',
                       alignment[-1], k)
    return EigvecResult(
        vector=v,
        iterations_used=k,
        rayleigh=rayleigh,
        alignment_history=tuple(alignment),
        rayleigh_history=tuple(rayleighs),
        residual=residual,
        multiplies=multiplies,
        multiply_nnz=nnz,
        stalled=stalled,
    )


def sign_aligned_error(u, v):
    """min(‖u − v‖, ‖u + v‖)."""
    u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    return float(min(np.linalg.norm(u - v), np.linalg.norm(u + v)))


def geometric_decay_ratio(alignment_history, floor=1e-12):
    """Median ratio of successive errors 1 − |⟨v_k, u₁⟩|, ignoring errors below `floor`.

    For a gap λ₁ > |λ₂| this settles near (λ₂/λ₁)².
    """
    errors = 1.0 - np.asarray(alignment_history, dtype=float)
    ratios = [b / a for a, b in zip(errors[:-1], errors[1:]) if a > floor and b > floor]
    if not ratios:
        raise ArgumentError('need at least two alignment errors above the floor')
    return float(np.median(ratios))


def sparsification_certificate(d, K, rho):
    """72K/√ρ · (√n/|λ₁|·log(6σ₁/δ₁) + r² log n/δ₁), with its hypotheses checked.

    Valid under 8K√(n/ρ) <= δ₁ <= |λ₁|/4, with probability at least 1 − r²n⁻².
    """
    n = d.n
    lambda_1 = d.eigenvalue(1)
    delta_1 = lambda_1 - d.eigenvalue(2) if n > 1 else lambda_1
    r = halving_index(d, 1)
    bound = 'sparsified-certificate'
    if not delta_1 > 0:
        raise PreconditionError('delta_1 > 0', delta_1, bound=bound)
    floor = 8.0 * K * math.sqrt(n / rho)
    if floor > delta_1:
        raise PreconditionError('8K sqrt(n/rho) <= delta_1', delta_1 - floor, bound=bound)
    if delta_1 > abs(lambda_1) / 4.0:
        raise PreconditionError('delta_1 <= |lambda_1|/4', abs(lambda_1) / 4.0 - delta_1, bound=bound)
    return (CERTIFICATE_CONSTANT * K / math.sqrt(rho)
            * (math.sqrt(n) / abs(lambda_1) * math.log(6.0 * d.sigma_1 / delta_1)
               + r * r * math.log(n) / delta_1))


def dk_comparison_value(d, noise_norm):
    """π‖E‖/δ₁, the Davis–Kahan rate the certificate is compared against.

    Reported without the Weyl-slack hypothesis, as a rate comparison.
    """
    delta_1 = d.eigenvalue(1) - d.eigenvalue(2)
    if not delta_1 > 0:
        raise PreconditionError('delta_1 > 0', delta_1, bound='dk-comparison')
    return math.pi * noise_norm / delta_1


def sparsified_leading_eigvec(A, rho, seed, cfg, noise=None, spectral=None):
    """Sparsify A, power-iterate on Ã, and certify the leading eigenvector.

    Passing `noise` (a SymmetricMatrix E) replaces the sparsification with
    Ã = A + E; the certificate then comes from the moderate-gap bound with
    the actual ‖E‖ instead of the entrywise-bound estimate.

    Returns (EigvecResult, CertificateReport).
    """
    if not 0 < rho <= 1:
        raise ArgumentError(f'rho must lie in (0, 1] (got {rho})')
    d = spectral or spectral_decompose(A)
    K = entry_bound(A)
    if noise is None:
        A_tilde, E = sparsify(A, rho, seed)
    else:
        A_tilde, E = A + noise, noise
    u1 = d.eigenvectors[:, 0]
    result = power_iteration(scipy.sparse.csr_matrix(A_tilde.entries), cfg, reference=u1)
    error = sign_aligned_error(result.vector, u1)
    noise_norm = spectral_norm(E.entries)

    if noise is None:
        certificate = capture_outcome('certificate', sparsification_certificate, d, K, rho)
        dk = capture_outcome('dk_comparison', dk_comparison_value, d, 2.0 * K * math.sqrt(d.n / rho))
    else:
        certificate = capture_outcome('certificate', new_bound, d, E, 1)
        dk = capture_outcome('dk_comparison', dk_comparison_value, d, noise_norm)
    r = halving_index(d, 1)
    report = CertificateReport(
        error=error,
        certificate=certificate,
        davis_kahan=dk,
        noise_norm=noise_norm,
        K=K,
        rho=rho,
        rho_advisory=rho_advisory(d.n, rho),
        failure_probability=min(1.0, r * r / d.n ** 2),
        halving_index_r=r,
    )
    logger.debug('sparsified run n=%d rho=%g seed=%d: error %.3g, certificate %s',
                 d.n, rho, seed, error, certificate.value)
    return result, report
