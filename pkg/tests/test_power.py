import logging
import math

import numpy as np
import pytest

from eigenbound.errors import ArgumentError, BreakdownError, PreconditionError
from eigenbound.noise import GroundSpec, low_rank_ground
from eigenbound.power import (CERTIFICATE_CONSTANT, PowerConfig, dk_comparison_value,
                              geometric_decay_ratio, power_iteration, sign_aligned_error,
                              sparsification_certificate, sparsified_leading_eigvec)
from eigenbound.spectral import SymmetricMatrix

TOL = 1e-12


def diag(*values):
    return SymmetricMatrix(np.diag(np.asarray(values, dtype=float)))


def start(*values):
    return PowerConfig(max_iterations=1, v0=np.asarray(values, dtype=float), early_stop=False)


def test_one_step_on_a_diagonal_matrix():
    result = power_iteration(diag(3.0, 1.0), start(1.0, 1.0))
    np.testing.assert_allclose(result.vector, np.array([3.0, 1.0]) / math.sqrt(10.0), rtol=0, atol=TOL)
    assert result.iterations_used == 1


def test_converges_to_the_dominant_eigenvector():
    cfg = PowerConfig(max_iterations=200, v0=np.array([1.0, 1.0]))
    result = power_iteration(diag(3.0, 1.0), cfg, reference=np.array([1.0, 0.0]))
    assert result.alignment_history[-1] >= 1.0 - 1e-10
    assert result.rayleigh == pytest.approx(3.0)
    assert abs(np.linalg.norm(result.vector) - 1.0) <= TOL


def test_alignment_error_decays_with_squared_eigenvalue_ratio():
    cfg = PowerConfig(max_iterations=10, v0=np.array([1.0, 1.0]), early_stop=False)
    result = power_iteration(diag(3.0, 1.0), cfg, reference=np.array([1.0, 0.0]))
    assert len(result.alignment_history) == 10
    assert geometric_decay_ratio(result.alignment_history) == pytest.approx(1.0 / 9.0, rel=1e-2)


def test_decay_ratio_needs_two_errors():
    with pytest.raises(ArgumentError):
        geometric_decay_ratio((1.0, 1.0, 1.0))


def test_rayleigh_quotient_is_monotone_on_psd_matrices():
    rng = np.random.default_rng(0)
    B = rng.standard_normal((30, 30))
    M = SymmetricMatrix.from_array(B @ B.T)
    result = power_iteration(M, PowerConfig(max_iterations=50, v0_seed=3, early_stop=False))
    history = np.asarray(result.rayleigh_history)
    assert np.all(np.diff(history) >= -1e-10 * history[-1])


def test_breakdown_in_the_kernel():
    with pytest.raises(BreakdownError) as info:
        power_iteration(diag(1.0, 0.0), start(0.0, 1.0))
    assert info.value.iteration == 1


def test_orthogonal_start_is_reported_as_stalled(caplog):
    cfg = PowerConfig(max_iterations=20, v0=np.array([0.0, 1.0]), early_stop=False)
    with caplog.at_level(logging.WARNING, logger='eigenbound.power'):
        result = power_iteration(diag(3.0, 1.0), cfg, reference=np.array([1.0, 0.0]))
    assert result.stalled
    assert 'stalled' in caplog.text


def test_seeded_start_is_deterministic():
    A, _ = low_rank_ground(GroundSpec(n=20, rank=2, spectrum=(5.0, 1.0), seed=1))
    cfg = PowerConfig(max_iterations=30, v0_seed=7, early_stop=False)
    first, second = power_iteration(A, cfg), power_iteration(A, cfg)
    np.testing.assert_array_equal(first.vector, second.vector)
    assert first.rayleigh_history == second.rayleigh_history


def test_power_config_validation():
    with pytest.raises(ArgumentError):
        PowerConfig(max_iterations=0)
    with pytest.raises(ArgumentError):
        PowerConfig(stop_tol=0.0)
    with pytest.raises(ArgumentError):
        PowerConfig(v0=np.ones(3)).start_vector(4)
    with pytest.raises(ArgumentError):
        PowerConfig(v0=np.zeros(2)).start_vector(2)


def test_sign_aligned_error():
    u = np.array([0.6, 0.8])
    assert sign_aligned_error(u, -u) == 0.0
    assert sign_aligned_error(u, np.array([0.8, -0.6])) == pytest.approx(math.sqrt(2.0))


# ### Certificates

def test_certificate_by_hand(diagonal):
    _, d = diagonal(100.0, 80.0, 0.0, 0.0)
    K, rho = 0.1, 1.0
    expected = CERTIFICATE_CONSTANT * K * (2.0 / 100.0 * math.log(6.0 * 100.0 / 20.0)
                                           + 4.0 * math.log(4.0) / 20.0)
    assert sparsification_certificate(d, K, rho) == pytest.approx(expected)


def test_certificate_preconditions(diagonal):
    _, d = diagonal(100.0, 80.0, 0.0, 0.0)
    with pytest.raises(PreconditionError) as info:
        sparsification_certificate(d, 10.0, 0.5)
    assert info.value.name == '8K sqrt(n/rho) <= delta_1'
    _, wide = diagonal(100.0, 10.0, 0.0, 0.0)
    with pytest.raises(PreconditionError) as info:
        sparsification_certificate(wide, 0.01, 1.0)
    assert info.value.name == 'delta_1 <= |lambda_1|/4'


def test_dk_comparison_value(diagonal):
    _, d = diagonal(100.0, 80.0, 0.0)
    assert dk_comparison_value(d, 2.0) == pytest.approx(math.pi / 10.0)
    _, flat = diagonal(1.0, 1.0)
    with pytest.raises(PreconditionError):
        dk_comparison_value(flat, 1.0)


def test_no_sparsification_recovers_u1():
    A, d = low_rank_ground(GroundSpec(n=50, rank=3, spectrum=(100.0, 10.0, 5.0), seed=0))
    cfg = PowerConfig(max_iterations=100, v0_seed=0, early_stop=False)
    result, report = sparsified_leading_eigvec(A, 1.0, seed=0, cfg=cfg, spectral=d)
    assert report.noise_norm == 0.0
    assert report.error <= 1e-8
    assert result.multiply_nnz == 50 * 50


def test_zero_injected_noise_gives_zero_certificate():
    A, d = low_rank_ground(GroundSpec(n=50, rank=3, spectrum=(100.0, 90.0, 40.0), seed=0))
    cfg = PowerConfig(max_iterations=500, v0_seed=0, early_stop=False)
    zero = SymmetricMatrix(np.zeros((50, 50)))
    _, report = sparsified_leading_eigvec(A, 1.0, seed=0, cfg=cfg, noise=zero, spectral=d)
    assert report.certificate.value == 0.0
    assert report.error <= 1e-8


@pytest.mark.parametrize('seed', range(3))
def test_injected_noise_is_dominated_by_its_certificate(moderate_instance, seed):
    A, d, E = moderate_instance(seed)
    cfg = PowerConfig(max_iterations=500, v0_seed=seed, early_stop=False)
    _, report = sparsified_leading_eigvec(A, 1.0, seed=seed, cfg=cfg, noise=E, spectral=d)
    assert report.certificate.applies
    assert report.dominated
    assert report.davis_kahan.applies


def test_sparsified_report_fields():
    A, d = low_rank_ground(GroundSpec(n=60, rank=2, spectrum=(50.0, 20.0), seed=2))
    cfg = PowerConfig(max_iterations=40, v0_seed=1, early_stop=False)
    result, report = sparsified_leading_eigvec(A, 0.5, seed=5, cfg=cfg, spectral=d)
    assert report.K == pytest.approx(float(np.max(np.abs(A.entries))))
    assert report.rho == 0.5
    assert report.failure_probability == pytest.approx(report.halving_index_r ** 2 / 60 ** 2)
    assert not report.certificate.applies
    assert report.certificate.failed_precondition == '8K sqrt(n/rho) <= delta_1'
    assert report.davis_kahan.applies
    assert 0 < result.multiply_nnz < 60 * 60
    assert result.sparse_cost < result.dense_cost
    assert result.multiplies == 41


def test_sparsified_rejects_bad_rho():
    A, d = low_rank_ground(GroundSpec(n=5, rank=1, spectrum=(1.0,), seed=0))
    with pytest.raises(ArgumentError):
        sparsified_leading_eigvec(A, 0.0, seed=0, cfg=PowerConfig(), spectral=d)

