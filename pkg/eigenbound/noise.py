"""
eigenbound/noise.py — Seeded ground matrices and noise models

All randomness comes from numpy's Philox counter-based generator. The key
is (seed, purpose), so the Wigner draw, the sparsification mask, the ground
truth basis and the power-iteration start vector of one trial never share a
stream. Row i of a matrix is filled from the key's stream jumped i times,
which makes any row computable on its own: filling rows in parallel or in a
different order gives the same matrix.

Public functions:
  wigner(spec)            — symmetric matrix with i.i.d. unit-variance upper triangle
  sparsify(A, rho, seed)  — keep each symmetric pair with probability ρ, rescale by 1/ρ
  low_rank_ground(spec)   — Q diag(s) Qᵀ with Q from a seeded Gaussian
  rectangular_ground      — P diag(s) Qᵀ, the m×n analogue
  gaussian_matrix         — m×n i.i.d. Gaussian noise for rectangular trials
  make_noise(spec, A)     — (Ã, E) for any NoiseSpec kind
  entry_bound(A)          — ‖A‖_∞ = max |A_ij|
  rho_advisory(n, rho)    — ρ·n/log⁴n >= 1
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from eigenbound.errors import ArgumentError, NumericalFailureError
from eigenbound.matrix_io import read_symmetric
from eigenbound.spectral import SymmetricMatrix, spectral_decompose

logger = logging.getLogger(__name__)

NOISE_KINDS = ('wigner', 'sparsify', 'custom-file')
SUBGAUSSIAN_LAWS = ('gaussian', 'rademacher')
MAX_SEED = 2 ** 64 - 1
GROUND_RTOL = 1e-8

# Second key word of every Philox stream
STREAM_WIGNER = 1
STREAM_SPARSIFY = 2
STREAM_GROUND = 3
STREAM_START_VECTOR = 4


def _check_seed(seed):
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ArgumentError(f'seed {seed} is not a 64-bit unsigned integer')
    return seed


def stream(seed, purpose, jump=0):
    """Generator for (seed, purpose), advanced by `jump` blocks of 2^128 draws."""
    key = np.array([_check_seed(seed), purpose], dtype=np.uint64)
    bit_generator = np.random.Philox(key=key)
    if jump:
        bit_generator = bit_generator.jumped(jump)
    return np.random.Generator(bit_generator)


@dataclass(frozen=True)
class NoiseSpec:
    kind: str
    n: int
    seed: int = 0
    rho: float = 1.0
    entry_bound_K: float = None
    subgaussian: str = 'gaussian'
    scale: float = 1.0
    path: str = None

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ArgumentError(f'unknown noise kind {self.kind!r}; expected one of {NOISE_KINDS}')
        if self.n < 1:
            raise ArgumentError(f'n must be at least 1 (got {self.n})')
        if not 0 < self.rho <= 1:
            raise ArgumentError(f'rho must lie in (0, 1] (got {self.rho})')
        if self.subgaussian not in SUBGAUSSIAN_LAWS:
            raise ArgumentError(f'unknown sub-Gaussian law {self.subgaussian!r}')
        if self.kind == 'custom-file' and not self.path:
            raise ArgumentError('custom-file noise needs a path')
        _check_seed(self.seed)


@dataclass(frozen=True)
class GroundSpec:
    n: int
    rank: int
    spectrum: tuple
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'spectrum', tuple(float(s) for s in self.spectrum))
        if self.n < 1:
            raise ArgumentError(f'n must be at least 1 (got {self.n})')
        if not 0 <= self.rank <= self.n:
            raise ArgumentError(f'rank {self.rank} must lie in 0..{self.n}')
        if len(self.spectrum) != self.rank:
            raise ArgumentError(f'spectrum has {len(self.spectrum)} values for rank {self.rank}')
        if any(s == 0 or not math.isfinite(s) for s in self.spectrum):
            raise ArgumentError('prescribed eigenvalues must be finite and nonzero')
        _check_seed(self.seed)


def _fill_upper(n, seed, purpose, draw):
    """n×n array whose row i, columns i..n−1, come from draw(generator_i, n − i)."""
    out = np.zeros((n, n))
    for i in range(n):
        out[i, i:] = draw(stream(seed, purpose, jump=i), n - i)
    return out


def _mirror(upper):
    return np.triu(upper) + np.triu(upper, 1).T


def wigner(spec):
    """Symmetric n×n matrix, upper triangle (diagonal included) i.i.d. mean 0 variance 1.

    The result is multiplied by spec.scale.
    """
    if spec.subgaussian == 'gaussian':
        def draw(rng, size):
            return rng.standard_normal(size)
    else:
        def draw(rng, size):
            return 2.0 * rng.integers(0, 2, size=size) - 1.0
    upper = _fill_upper(spec.n, spec.seed, STREAM_WIGNER, draw)
    entries = _mirror(upper)
    if spec.scale != 1.0:
        entries = spec.scale * entries
    return SymmetricMatrix(entries)


def sparsify(A, rho, seed):
    """Keep each unordered pair {i, j} (and each diagonal entry) with probability ρ.

    Kept entries become A_ij/ρ, dropped ones 0. Returns (Ã, E) with E = Ã − A.

    Raises:
        ArgumentError: if ρ is outside (0, 1].
    """
    if not 0 < rho <= 1:
        raise ArgumentError(f'rho must lie in (0, 1] (got {rho})')
    n = A.n
    keep = _fill_upper(n, seed, STREAM_SPARSIFY, lambda rng, size: rng.random(size)) < rho
    keep = np.triu(keep)
    keep = keep | keep.T
    tilde = np.where(keep, A.entries / rho, 0.0)
    A_tilde = SymmetricMatrix(tilde)
    logger.debug('sparsified n=%d at rho=%g: kept %d of %d entries', n, rho, int(keep.sum()), n * n)
    return A_tilde, SymmetricMatrix(A_tilde.entries - A.entries)


def low_rank_ground(spec):
    """A = Σ s_i q_i q_iᵀ with Q the orthonormal factor of a seeded n×rank Gaussian.

    Returns (A, SpectralData).

    Raises:
        NumericalFailureError: if the decomposition misses the prescription by
            more than 1e−8 (relative to max |s_i|).
    """
    n, rank = spec.n, spec.rank
    if rank == 0:
        A = SymmetricMatrix(np.zeros((n, n)))
        return A, spectral_decompose(A)
    gaussian = stream(spec.seed, STREAM_GROUND).standard_normal((n, rank))
    Q, _ = np.linalg.qr(gaussian)
    s = np.asarray(spec.spectrum)
    A = SymmetricMatrix.from_array((Q * s) @ Q.T)
    d = spectral_decompose(A)
    expected = np.sort(np.concatenate([s, np.zeros(n - rank)]))[::-1]
    miss = float(np.max(np.abs(d.eigenvalues - expected)))
    if miss > GROUND_RTOL * max(1.0, float(np.max(np.abs(s)))):
        raise NumericalFailureError(f'ground matrix misses its prescribed spectrum by {miss:.3g}')
    return A, d


def rectangular_ground(m, n, singular_values, seed):
    """m×n matrix P diag(s) Qᵀ with P, Q orthonormal factors of seeded Gaussians.

    `singular_values` must be positive; they are placed in descending order.
    """
    s = np.sort(np.asarray(singular_values, dtype=float))[::-1]
    if m < 1 or n < 1:
        raise ArgumentError(f'need m, n >= 1 (got {m}x{n})')
    if not 1 <= s.size <= min(m, n):
        raise ArgumentError(f'{s.size} singular values do not fit a {m}x{n} matrix')
    if np.any(s <= 0) or not np.all(np.isfinite(s)):
        raise ArgumentError('singular values must be finite and positive')
    gaussian = stream(seed, STREAM_GROUND).standard_normal((m + n, s.size))
    P, _ = np.linalg.qr(gaussian[:m])
    Q, _ = np.linalg.qr(gaussian[m:])
    return (P * s) @ Q.T


def gaussian_matrix(m, n, seed, scale=1.0):
    """m×n matrix of i.i.d. N(0, scale²) entries; row i has its own stream."""
    rows = [stream(seed, STREAM_WIGNER, jump=i).standard_normal(n) for i in range(m)]
    return scale * np.vstack(rows)


def make_noise(spec, A):
    """Perturb A according to spec. Returns (Ã, E).

    Raises:
        ArgumentError: if the noise dimension does not match A.
        FileNotFoundError: for a missing custom-file path.
    """
    if spec.n != A.n:
        raise ArgumentError(f'noise dimension {spec.n} does not match matrix dimension {A.n}')
    if spec.kind == 'sparsify':
        return sparsify(A, spec.rho, spec.seed)
    if spec.kind == 'wigner':
        E = wigner(spec)
    else:
        E = read_symmetric(spec.path)
        if E.n != A.n:
            raise ArgumentError(f'{spec.path}: noise is {E.n}x{E.n}, matrix is {A.n}x{A.n}')
        if spec.scale != 1.0:
            E = SymmetricMatrix(spec.scale * E.entries)
    return A + E, E


def entry_bound(A):
    """‖A‖_∞ in the entrywise sense: max |A_ij|."""
    entries = A.entries if hasattr(A, 'entries') else np.asarray(A, dtype=float)
    return float(np.max(np.abs(entries)))


def rho_advisory(n, rho):
    """True when ρ·n/log⁴n >= 1, the working reading of "ρ ≫ log⁴n/n"."""
    if n < 3:
        return True
    return rho * n / math.log(n) ** 4 >= 1.0
