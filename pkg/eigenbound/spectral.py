"""
eigenbound/spectral.py — Dense symmetric eigendecomposition and projector algebra

Everything downstream (gaps, bounds, contours, power iteration) consumes the
objects built here:

  SymmetricMatrix   — a validated, exactly symmetric n×n real matrix
  SpectralData      — eigenvalues (descending) + orthonormal eigenvectors
  Projector         — Π_S = Σ_{i∈S} u_i u_iᵀ for a 1-based index set S
  SingularData      — singular triplets of a rectangular matrix

Public functions:
  spectral_decompose(A)         — SpectralData for a SymmetricMatrix
  projector(d, S)               — spectral projector onto eigenvectors in S
  spectral_norm(M)              — largest singular value, real or complex
  sine_distance(P, Q)           — ‖P − Q‖
  resolvent(A, z)               — (zI − A)⁻¹ through the spectral data
  symmetric_dilation(M)         — [[0, M], [Mᵀ, 0]]
  singular_decompose(M)         — SingularData for an m×n matrix
  leading_singular_projectors   — left/right projectors onto the top p singular vectors

Indices that name eigenvalues (members of S, p) are 1-based, like λ₁ ≥ … ≥ λₙ.
All arrays stored on the dataclasses are read-only.
"""

import logging
import re
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from eigenbound.errors import ArgumentError, NumericalFailureError, SingularityError

logger = logging.getLogger(__name__)

# Input whose asymmetry ‖M − Mᵀ‖_F exceeds this fraction of ‖M‖_F is refused
SYMMETRY_RTOL = 1e-6
RECONSTRUCTION_RTOL = 1e-8
ORTHONORMALITY_TOL = 1e-10
# z closer than this fraction of σ₁ to an eigenvalue counts as "on the spectrum"
SINGULARITY_RTOL = 1e-12


def _frozen(array, dtype=float):
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class SymmetricMatrix:
    """Dense real symmetric matrix. entries[i, j] == entries[j, i] exactly.

    Build one from arbitrary data with `SymmetricMatrix.from_array`, which
    symmetrizes by averaging and records how asymmetric the input was.
    """
    entries: np.ndarray
    asymmetry: float = 0.0

    def __post_init__(self):
        entries = _frozen(self.entries)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ArgumentError(f'expected a square matrix, got shape {entries.shape}')
        if entries.shape[0] < 1:
            raise ArgumentError('matrix dimension must be at least 1')
        if not np.all(np.isfinite(entries)):
            raise ArgumentError('matrix has non-finite entries')
        if not np.array_equal(entries, entries.T):
            raise ArgumentError('entries are not exactly symmetric; use SymmetricMatrix.from_array')
        object.__setattr__(self, 'entries', entries)

    @classmethod
    def from_array(cls, data, rtol=SYMMETRY_RTOL):
        """Symmetrize `data` as (M + Mᵀ)/2, refusing clearly non-symmetric input."""
        m = np.asarray(data, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ArgumentError(f'expected a square matrix, got shape {m.shape}')
        asymmetry = float(np.linalg.norm(m - m.T))
        scale = float(np.linalg.norm(m))
        if asymmetry > rtol * scale:
            raise ArgumentError(
                f'matrix is not symmetric: |M - M^T|_F = {asymmetry:.3g} '
                f'exceeds {rtol:g} * |M|_F = {rtol * scale:.3g}'
            )
        return cls((m + m.T) / 2.0, asymmetry=asymmetry)

    @property
    def n(self):
        return self.entries.shape[0]

    def __add__(self, other):
        return SymmetricMatrix(self.entries + other.entries)

    def __sub__(self, other):
        return SymmetricMatrix(self.entries - other.entries)


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Eigenvalues λ₁ ≥ … ≥ λₙ and the matching eigenvector columns u_i."""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    source_norm: float

    @property
    def n(self):
        return self.eigenvalues.shape[0]

    @property
    def sigma_1(self):
        return self.source_norm

    def eigenvalue(self, i):
        """λ_i with the convention λ_{n+1} = 0 used by the halving index."""
        if i == self.n + 1:
            return 0.0
        return float(self.eigenvalues[i - 1])

    def vectors(self, subset):
        """Eigenvector columns for a 1-based index set, as an n×|S| array."""
        return self.eigenvectors[:, [i - 1 for i in subset]]

    @property
    def singular_values(self):
        return np.sort(np.abs(self.eigenvalues))[::-1]


@dataclass(frozen=True, eq=False)
class Projector:
    """Orthogonal projector onto span{u_i : i ∈ subset}."""
    matrix: np.ndarray
    subset: tuple

    @property
    def n(self):
        return self.matrix.shape[0]

    @property
    def rank(self):
        return len(self.subset)


@dataclass(frozen=True, eq=False)
class SingularData:
    """Thin SVD M = U diag(σ) Vᵀ with σ₁ ≥ σ₂ ≥ … ≥ 0."""
    singular_values: np.ndarray
    left: np.ndarray
    right: np.ndarray

    @property
    def sigma_1(self):
        return float(self.singular_values[0]) if self.singular_values.size else 0.0

    def sigma(self, i):
        """σ_i, or 0 once i runs past the stored singular values."""
        if i > self.singular_values.shape[0]:
            return 0.0
        return float(self.singular_values[i - 1])


def leading_subset(p):
    """The index set {1, …, p}."""
    return tuple(range(1, p + 1))


def validate_subset(subset, n, allow_full=True):
    """Return `subset` as a sorted tuple of distinct 1-based indices."""
    indices = tuple(sorted(set(int(i) for i in subset)))
    if not indices:
        raise ArgumentError('index set is empty')
    if indices[0] < 1 or indices[-1] > n:
        raise ArgumentError(f'index set {indices} is not inside 1..{n}')
    if not allow_full and len(indices) == n:
        raise ArgumentError('index set must be a proper subset')
    return indices


def _iterations_from(error):
    # LAPACK reports how many off-diagonal elements failed to converge
    match = re.search(r'(\d+)', str(error))
    return int(match.group(1)) if match else None


def spectral_decompose(A):
    """Decompose A = U diag(λ) Uᵀ with λ sorted descending.

    Eigenvector signs are fixed so the entry of largest magnitude is
    positive. Exactly equal eigenvalues keep a deterministic order (secondary
    key: sign of the first nonzero coordinate); consumers only rely on
    projectors onto whole degenerate blocks, which do not depend on it.

    Raises:
        NumericalFailureError: if LAPACK does not converge, or the result
            misses the reconstruction / orthonormality tolerances.
    """
    try:
        w, U = scipy.linalg.eigh(A.entries, check_finite=False)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NumericalFailureError(f'eigendecomposition failed: {e}', iterations=_iterations_from(e))

    pivots = np.argmax(np.abs(U), axis=0)
    signs = np.sign(U[pivots, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    U = U * signs

    first_nonzero = np.argmax(U != 0, axis=0)
    first_sign = np.sign(U[first_nonzero, np.arange(U.shape[1])])
    order = np.lexsort((-first_sign, -w))
    w, U = w[order], U[:, order]

    n = A.n
    orth = float(np.linalg.norm(U.T @ U - np.eye(n)))
    if orth > ORTHONORMALITY_TOL * n:
        raise NumericalFailureError(f'eigenvectors lost orthonormality ({orth:.3g})')
    scale = max(1.0, float(np.linalg.norm(A.entries)))
    residual = float(np.linalg.norm(A.entries - (U * w) @ U.T))
    if residual > RECONSTRUCTION_RTOL * scale:
        raise NumericalFailureError(f'reconstruction residual {residual:.3g} too large')

    source_norm = float(np.max(np.abs(w)))
    return SpectralData(_frozen(w), _frozen(U), source_norm)


def projector(d, subset):
    """Π_S = Σ_{i∈S} u_i u_iᵀ.

    Raises:
        ArgumentError: for an empty set or an index outside 1..n.
    """
    indices = validate_subset(subset, d.n)
    V = d.vectors(indices)
    P = V @ V.T
    return Projector(_frozen((P + P.T) / 2.0), indices)


def spectral_norm(M):
    """Largest singular value of a real or complex matrix.

    Computed as sqrt(λ_max(MᴴM)) so complex resolvent products go through
    the same Hermitian eigensolver as everything else.
    """
    M = np.asarray(M)
    if M.ndim != 2:
        raise ArgumentError(f'expected a matrix, got shape {M.shape}')
    if M.size == 0:
        return 0.0
    if M.shape[0] < M.shape[1]:
        M = M.conj().T
    gram = M.conj().T @ M
    gram = (gram + gram.conj().T) / 2.0
    k = gram.shape[0]
    top = scipy.linalg.eigvalsh(gram, subset_by_index=[k - 1, k - 1], check_finite=False)[0]
    return float(np.sqrt(max(float(top), 0.0)))


def batched_spectral_norm(stack):
    """spectral_norm over a (k, m, n) stack of matrices, one value per matrix."""
    stack = np.asarray(stack)
    if stack.ndim != 3:
        raise ArgumentError(f'expected a stack of matrices, got shape {stack.shape}')
    if stack.shape[1] < stack.shape[2]:
        stack = np.conj(np.swapaxes(stack, 1, 2))
    gram = np.conj(np.swapaxes(stack, 1, 2)) @ stack
    gram = (gram + np.conj(np.swapaxes(gram, 1, 2))) / 2.0
    top = np.linalg.eigvalsh(gram)[:, -1]
    return np.sqrt(np.maximum(top, 0.0))


def sine_distance(P, Q):
    """‖P − Q‖, the sine of the largest principal angle for equal ranks."""
    if P.n != Q.n:
        raise ArgumentError(f'projectors act on different dimensions ({P.n} vs {Q.n})')
    return spectral_norm(P.matrix - Q.matrix)


def resolvent(A, z, spectral=None):
    """(zI − A)⁻¹ = Σ u_i u_iᵀ / (z − λ_i) as a complex n×n array.

    Pass `spectral` to reuse an existing decomposition of A (the contour
    code evaluates thousands of nodes against one A).

    Raises:
        SingularityError: if z is within 1e−12·σ₁ of an eigenvalue.
    """
    d = spectral if spectral is not None else spectral_decompose(A)
    z = complex(z)
    gaps = np.abs(z - d.eigenvalues)
    nearest = int(np.argmin(gaps))
    if gaps[nearest] == 0 or gaps[nearest] <= SINGULARITY_RTOL * d.sigma_1:
        raise SingularityError(
            f'z = {z} sits on the spectrum (eigenvalue {d.eigenvalues[nearest]:.17g})',
            eigenvalue=float(d.eigenvalues[nearest]),
            distance=float(gaps[nearest]),
        )
    return resolvent_from_spectral(d, z)


def resolvent_from_spectral(d, z):
    """Resolvent without the singularity check; callers guarantee the margin."""
    U = d.eigenvectors
    return (U * (1.0 / (z - d.eigenvalues))) @ U.T


def symmetric_dilation(M):
    """[[0, M], [Mᵀ, 0]]. Its eigenvalues are ±σ_i(M) plus zeros."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or min(M.shape) < 1:
        raise ArgumentError(f'expected a non-empty m×n matrix, got shape {M.shape}')
    m, n = M.shape
    out = np.zeros((m + n, m + n))
    out[:m, m:] = M
    out[m:, :m] = M.T
    return SymmetricMatrix(out)


def dilation_pairing_error(M, dilation_spectrum):
    """Largest mismatch between the dilation spectrum and {±σ_i(M)} ∪ {0}.

    `dilation_spectrum` is the SpectralData of symmetric_dilation(M).
    """
    sigma = scipy.linalg.svdvals(np.asarray(M, dtype=float))
    m_plus_n = dilation_spectrum.n
    expected = np.concatenate([sigma, -sigma, np.zeros(m_plus_n - 2 * sigma.size)])
    expected = np.sort(expected)[::-1]
    return float(np.max(np.abs(expected - dilation_spectrum.eigenvalues)))


def singular_decompose(M):
    """Thin SVD with singular values descending."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or min(M.shape) < 1:
        raise ArgumentError(f'expected a non-empty m×n matrix, got shape {M.shape}')
    try:
        U, s, Vt = scipy.linalg.svd(M, full_matrices=False, check_finite=False)
    except np.linalg.LinAlgError as e:
        raise NumericalFailureError(f'SVD failed: {e}', iterations=_iterations_from(e))
    return SingularData(_frozen(s), _frozen(U), _frozen(Vt.T))


def leading_singular_projectors(sd, p):
    """(Π_p^left, Π_p^right) onto the top p left / right singular vectors."""
    if not 1 <= p <= sd.singular_values.shape[0]:
        raise ArgumentError(f'p = {p} outside 1..{sd.singular_values.shape[0]}')
    subset = leading_subset(p)
    left = sd.left[:, :p] @ sd.left[:, :p].T
    right = sd.right[:, :p] @ sd.right[:, :p].T
    return (Projector(_frozen((left + left.T) / 2.0), subset),
            Projector(_frozen((right + right.T) / 2.0), subset))
