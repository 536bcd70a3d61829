import numpy as np
import pytest

from eigenbound.errors import ArgumentError, SingularityError
from eigenbound.spectral import (SymmetricMatrix, batched_spectral_norm, dilation_pairing_error,
                                 leading_singular_projectors, leading_subset, projector,
                                 resolvent, sine_distance, singular_decompose,
                                 spectral_decompose, spectral_norm, symmetric_dilation)

TOL = 1e-12
TOL_DECOMP = 1e-10
SEEDS = range(4)


def random_symmetric(n, seed):
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((n, n))
    return SymmetricMatrix.from_array((M + M.T) / 2.0)


def test_symmetric_matrix_rejects_asymmetric_entries():
    with pytest.raises(ArgumentError):
        SymmetricMatrix(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ArgumentError):
        SymmetricMatrix.from_array(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_symmetric_matrix_rejects_non_square_and_non_finite():
    with pytest.raises(ArgumentError):
        SymmetricMatrix(np.zeros((2, 3)))
    with pytest.raises(ArgumentError):
        SymmetricMatrix(np.array([[np.nan]]))


def test_from_array_averages_tiny_asymmetry():
    M = np.array([[2.0, 1.0], [1.0 + 1e-12, 3.0]])
    A = SymmetricMatrix.from_array(M)
    assert A.entries[0, 1] == A.entries[1, 0]
    assert A.asymmetry > 0


def test_entries_are_read_only():
    A = SymmetricMatrix(np.eye(3))
    with pytest.raises(ValueError):
        A.entries[0, 0] = 5.0


def test_decompose_diagonal_sorts_descending():
    A = SymmetricMatrix(np.diag([1.0, 5.0, -7.0, 3.0]))
    d = spectral_decompose(A)
    np.testing.assert_allclose(d.eigenvalues, [5.0, 3.0, 1.0, -7.0], rtol=0, atol=TOL)
    assert d.sigma_1 == pytest.approx(7.0)
    assert d.eigenvalue(5) == 0.0
    np.testing.assert_allclose(d.singular_values, [7.0, 5.0, 3.0, 1.0], rtol=0, atol=TOL)


def test_decompose_reconstructs_and_is_orthonormal():
    A = random_symmetric(30, seed=1)
    d = spectral_decompose(A)
    U, w = d.eigenvectors, d.eigenvalues
    np.testing.assert_allclose(U.T @ U, np.eye(30), rtol=0, atol=TOL_DECOMP)
    np.testing.assert_allclose((U * w) @ U.T, A.entries, rtol=0, atol=TOL_DECOMP)
    assert np.all(np.diff(w) <= 0)


def test_decompose_is_deterministic():
    A = random_symmetric(20, seed=4)
    first, second = spectral_decompose(A), spectral_decompose(A)
    np.testing.assert_array_equal(first.eigenvalues, second.eigenvalues)
    np.testing.assert_array_equal(first.eigenvectors, second.eigenvectors)


def test_projector_is_idempotent_with_trace_equal_to_rank():
    d = spectral_decompose(random_symmetric(12, seed=2))
    P = projector(d, (1, 3, 4))
    np.testing.assert_allclose(P.matrix @ P.matrix, P.matrix, rtol=0, atol=TOL_DECOMP)
    np.testing.assert_allclose(np.trace(P.matrix), 3.0, rtol=0, atol=TOL_DECOMP)
    assert P.rank == 3


def test_projector_rejects_bad_subsets():
    d = spectral_decompose(random_symmetric(4, seed=3))
    with pytest.raises(ArgumentError):
        projector(d, ())
    with pytest.raises(ArgumentError):
        projector(d, (0, 1))
    with pytest.raises(ArgumentError):
        projector(d, (5,))


def test_spectral_norm_matches_largest_singular_value():
    rng = np.random.default_rng(7)
    M = rng.standard_normal((6, 9)) + 1j * rng.standard_normal((6, 9))
    np.testing.assert_allclose(spectral_norm(M), np.linalg.norm(M, 2), rtol=1e-10)
    assert spectral_norm(np.zeros((3, 3))) == 0.0


def test_batched_spectral_norm_matches_single():
    rng = np.random.default_rng(8)
    stack = rng.standard_normal((5, 4, 4)) + 1j * rng.standard_normal((5, 4, 4))
    expected = [spectral_norm(M) for M in stack]
    np.testing.assert_allclose(batched_spectral_norm(stack), expected, rtol=1e-10)


def test_sine_distance_of_orthogonal_lines_is_one():
    d = spectral_decompose(SymmetricMatrix(np.diag([2.0, 1.0])))
    assert sine_distance(projector(d, (1,)), projector(d, (2,))) == pytest.approx(1.0)
    assert sine_distance(projector(d, (1,)), projector(d, (1,))) == 0.0


def test_resolvent_inverts_shifted_matrix():
    A = random_symmetric(8, seed=5)
    z = 0.3 + 2.0j
    R = resolvent(A, z)
    np.testing.assert_allclose(R @ (z * np.eye(8) - A.entries), np.eye(8), rtol=0, atol=1e-10)


def test_resolvent_on_the_spectrum_raises():
    A = SymmetricMatrix(np.diag([2.0, 1.0]))
    with pytest.raises(SingularityError) as info:
        resolvent(A, 2.0)
    assert info.value.eigenvalue == pytest.approx(2.0)


def test_dilation_pairs_eigenvalues_with_singular_values():
    rng = np.random.default_rng(9)
    M = rng.standard_normal((5, 3))
    dilation = symmetric_dilation(M)
    assert dilation.n == 8
    assert dilation_pairing_error(M, spectral_decompose(dilation)) <= 1e-10


def test_singular_projectors_match_numpy_svd():
    rng = np.random.default_rng(10)
    M = rng.standard_normal((7, 4))
    sd = singular_decompose(M)
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    np.testing.assert_allclose(sd.singular_values, s, rtol=1e-10)
    left, right = leading_singular_projectors(sd, 2)
    np.testing.assert_allclose(left.matrix, U[:, :2] @ U[:, :2].T, rtol=0, atol=TOL_DECOMP)
    np.testing.assert_allclose(right.matrix, Vt[:2].T @ Vt[:2], rtol=0, atol=TOL_DECOMP)
    assert sd.sigma(5) == 0.0


def test_leading_subset():
    assert leading_subset(3) == (1, 2, 3)


# ### Invariants on random instances

@pytest.mark.parametrize('seed', SEEDS)
def test_disjoint_projectors_annihilate_and_complements_sum_to_identity(seed):
    d = spectral_decompose(random_symmetric(10, seed))
    S, T = (1, 4, 7), (2, 3, 9)
    complement = tuple(i for i in range(1, 11) if i not in S)
    P_S, P_T = projector(d, S).matrix, projector(d, T).matrix
    np.testing.assert_allclose(P_S @ P_T, np.zeros((10, 10)), rtol=0, atol=TOL_DECOMP)
    np.testing.assert_allclose(P_S + projector(d, complement).matrix, np.eye(10),
                               rtol=0, atol=TOL_DECOMP)


@pytest.mark.parametrize('seed', SEEDS)
def test_resolvent_norm_is_bounded_by_the_distance_to_the_spectrum(seed):
    A = random_symmetric(8, seed)
    d = spectral_decompose(A)
    rng = np.random.default_rng(100 + seed)
    for _ in range(5):
        z = complex(rng.uniform(-4.0, 4.0), rng.uniform(-1.0, 1.0))
        v = rng.standard_normal(8)
        v /= np.linalg.norm(v)
        distance = np.min(np.abs(z - d.eigenvalues))
        assert np.linalg.norm(resolvent(A, z, spectral=d) @ v) <= 1.0 / distance + 1e-8


@pytest.mark.parametrize('seed', SEEDS)
def test_sine_distance_is_a_metric_on_random_triples(seed):
    P, Q, R = (projector(spectral_decompose(random_symmetric(9, 10 * seed + k)), (1, 2))
               for k in range(3))
    assert sine_distance(P, Q) == sine_distance(Q, P)
    assert sine_distance(P, R) <= sine_distance(P, Q) + sine_distance(Q, R) + TOL


def test_sine_distance_of_lines_at_thirty_degrees():
    theta = np.pi / 6.0
    v = np.array([np.cos(theta), np.sin(theta)])
    w = np.array([-np.sin(theta), np.cos(theta)])
    rotated = SymmetricMatrix.from_array(2.0 * np.outer(v, v) + np.outer(w, w))
    P = projector(spectral_decompose(SymmetricMatrix(np.diag([2.0, 1.0]))), (1,))
    Q = projector(spectral_decompose(rotated), (1,))
    assert sine_distance(P, Q) == pytest.approx(0.5, abs=TOL_DECOMP)
