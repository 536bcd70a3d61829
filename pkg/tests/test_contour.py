import math

import numpy as np
import pytest

from eigenbound.bounds import halving_index
from eigenbound.contour import (ContourSpec, F1_numeric, F_numeric, arctan_integral,
                                arctan_quadrature, build_bisecting_contour, build_theorem_contour,
                                cauchy_indicator, cauchy_projector, m1_split, node_contraction,
                                rectangle_contour, resolvent_identity_residual, segment_integrals,
                                weyl_enclosure)
from eigenbound.errors import ArgumentError, DegenerateGapError, EnclosureError, PreconditionError
from eigenbound.quadrature import QuadratureSettings
from eigenbound.spectral import (SymmetricMatrix, leading_subset, projector, sine_distance,
                                 spectral_decompose, spectral_norm)

TOL_CAUCHY = 1e-8
TOL_QUAD = 1e-6
SEEDS = range(3)


# ### Construction

def test_theorem_contour_geometry(diagonal):
    _, d = diagonal(3.0, 2.0, 1.0)
    c = build_theorem_contour(d, 1)
    assert (c.x0, c.x1, c.T) == pytest.approx((2.5, 6.0, 6.0))
    assert c.subset == (1,)
    assert c.margin == pytest.approx(0.5)
    assert [s.name for s in c.segments] == ['gamma1', 'gamma2', 'gamma3', 'gamma4']
    assert c.segment('gamma1').start == pytest.approx(complex(2.5, 6.0))
    assert c.segment('gamma1').end == pytest.approx(complex(2.5, -6.0))


def test_theorem_contour_needs_a_gap(diagonal):
    _, d = diagonal(1.0, 1.0, 0.5)
    with pytest.raises(DegenerateGapError) as info:
        build_theorem_contour(d, 1)
    assert info.value.index == 1


def test_rectangle_rejects_wrong_enclosure(diagonal):
    _, d = diagonal(5.0, 1.0)
    with pytest.raises(EnclosureError):
        rectangle_contour(0.0, 2.0, 1.0, d, subset=(1,))
    with pytest.raises(EnclosureError) as info:
        rectangle_contour(1.0, 3.0, 1.0, d)
    assert info.value.eigenvalue == pytest.approx(1.0)


def test_contour_spec_validation():
    with pytest.raises(ArgumentError):
        ContourSpec(x0=1.0, x1=0.0, T=1.0, segments=(), nodes_per_segment=256, margin=1.0)
    with pytest.raises(ArgumentError):
        ContourSpec(x0=0.0, x1=1.0, T=1.0, segments=(), nodes_per_segment=4, margin=1.0)


def test_bisecting_contour_around_an_interior_block(diagonal):
    _, d = diagonal(10.0, 8.0, 3.0, 1.0)
    c = build_bisecting_contour(d, (2, 3), noise_norm=0.4)
    assert (c.x0, c.x1) == pytest.approx((2.0, 9.0))
    assert c.T == pytest.approx(3.5)
    assert c.subset == (2, 3)
    assert c.margin == pytest.approx(1.0)
    with pytest.raises(PreconditionError):
        build_bisecting_contour(d, (2, 3), noise_norm=0.6)
    with pytest.raises(ArgumentError):
        build_bisecting_contour(d, (1, 3), noise_norm=0.0)


# ### Scalar oracles

def test_arctan_closed_form_matches_quadrature():
    settings = QuadratureSettings(rtol=1e-12)
    for a in np.logspace(-2, 1, 10):
        for factor in np.logspace(0, 3, 10):
            T = a * factor
            closed, bound = arctan_integral(a, T)
            numeric = arctan_quadrature(a, T, settings=settings).value
            np.testing.assert_allclose(numeric, closed, rtol=1e-10)
            assert closed <= bound


def test_arctan_integral_domain():
    with pytest.raises(ArgumentError):
        arctan_integral(2.0, 1.0)
    with pytest.raises(ArgumentError):
        arctan_integral(0.0, 1.0)


def test_cauchy_indicator(diagonal):
    _, d = diagonal(5.0, 1.0)
    c = rectangle_contour(0.0, 2.0, 1.0, d)
    assert abs(cauchy_indicator(1.0, c).value - 1.0) <= TOL_CAUCHY
    assert abs(cauchy_indicator(5.0, c).value) <= TOL_CAUCHY


# ### Cauchy projector

def test_cauchy_projector_on_a_diagonal_matrix(diagonal):
    A, d = diagonal(3.0, 2.0, 1.0)
    matrix, result = cauchy_projector(A, build_theorem_contour(d, 1))
    assert result.value <= TOL_CAUCHY
    np.testing.assert_allclose(matrix, np.diag([1.0, 0.0, 0.0]), rtol=0, atol=TOL_CAUCHY)


def test_cauchy_projector_on_an_interior_block(diagonal):
    A, d = diagonal(10.0, 8.0, 3.0, 1.0)
    _, result = cauchy_projector(A, build_bisecting_contour(d, (2, 3), noise_norm=0.0))
    assert result.value <= TOL_CAUCHY


@pytest.mark.parametrize('seed', SEEDS)
def test_cauchy_projector_on_random_instances(moderate_instance, seed):
    A, d, _ = moderate_instance(seed)
    _, result = cauchy_projector(A, build_theorem_contour(d, 2), spectral=d)
    assert result.value <= TOL_QUAD


# ### Bootstrapping chain

@pytest.mark.parametrize('seed', SEEDS)
def test_bootstrapping_chain(moderate_instance, seed):
    A, d, E = moderate_instance(seed)
    A_tilde = A + E
    d_tilde = spectral_decompose(A_tilde)
    c = build_theorem_contour(d, 1)
    measured = sine_distance(projector(d, leading_subset(1)), projector(d_tilde, leading_subset(1)))

    F = F_numeric(A, A_tilde, c, spectral=d, spectral_tilde=d_tilde).value
    F1 = F1_numeric(A, E, c, spectral=d)
    assert measured <= F + TOL_QUAD
    assert F <= 2.0 * F1.value + TOL_QUAD

    segments = segment_integrals(A, E, c, spectral=d)
    allowed = 2.0 * math.pi * F1.estimated_error + segments.estimated_error + TOL_QUAD
    assert abs(2.0 * math.pi * F1.value - segments.total) <= allowed


@pytest.mark.parametrize('seed', SEEDS)
def test_segment_estimates_inside_the_window(moderate_instance, seed):
    A, d, E = moderate_instance(seed)
    c = build_theorem_contour(d, 1)
    segments = segment_integrals(A, E, c, spectral=d)
    assert segments.violations(TOL_QUAD) == []
    noise_norm = spectral_norm(E.entries)
    assert F1_numeric(A, E, c, spectral=d).value <= 2.0 * noise_norm / 10.0 + TOL_QUAD


def test_m1_split_dominates_gamma1(moderate_instance):
    A, d, E = moderate_instance(0)
    c = build_theorem_contour(d, 1)
    split = m1_split(A, E, c, spectral=d)
    assert split.r == halving_index(d, 1) == 2
    m1 = segment_integrals(A, E, c, spectral=d).values[0]
    assert m1 <= split.total + TOL_QUAD
    assert split.lead <= split.lead_bound + TOL_QUAD
    assert split.tail <= split.tail_bound + TOL_QUAD
    assert split.cross <= split.cross_bound + TOL_QUAD


def test_segment_integrals_need_the_theorem_contour(diagonal):
    A, d = diagonal(10.0, 8.0, 3.0, 1.0)
    c = build_bisecting_contour(d, (2, 3), noise_norm=0.0)
    E = SymmetricMatrix(np.zeros((4, 4)))
    with pytest.raises(ArgumentError):
        segment_integrals(A, E, c, spectral=d)
    with pytest.raises(ArgumentError):
        m1_split(A, E, c, spectral=d)


def test_zero_noise_gives_zero_integrals(diagonal):
    A, d = diagonal(3.0, 2.0, 1.0)
    E = SymmetricMatrix(np.zeros((3, 3)))
    c = build_theorem_contour(d, 1)
    assert F1_numeric(A, E, c, spectral=d).value == 0.0
    assert F_numeric(A, A, c, spectral=d, spectral_tilde=d).value == 0.0


def test_perturbed_spectrum_must_match_the_contour(diagonal):
    A, d = diagonal(3.0, 2.0, 1.0)
    c = build_theorem_contour(d, 1)
    shifted = SymmetricMatrix(np.diag([3.0, 2.7, 1.0]))
    with pytest.raises(PreconditionError):
        F_numeric(A, shifted, c, spectral=d)


# ### Node-wise properties

def test_resolvent_identity_holds_at_every_node(moderate_instance):
    A, d, E = moderate_instance(1)
    c = build_theorem_contour(d, 1)
    assert resolvent_identity_residual(A, E, c, spectral=d) <= 1e-10


def test_contraction_and_weyl_enclosure(moderate_instance):
    A, d, E = moderate_instance(2)
    c = build_theorem_contour(d, 1)
    noise_norm = spectral_norm(E.entries)
    assert c.margin >= 2.0 * noise_norm
    assert node_contraction(A, E, c, spectral=d) <= 0.5
    enclosure = weyl_enclosure(d, c, noise_norm)
    assert enclosure.holds
    assert enclosure.slack == pytest.approx(c.margin - noise_norm)


@pytest.mark.parametrize('seed', SEEDS)
@pytest.mark.parametrize('subset', [(2,), (2, 3)])
def test_contraction_on_a_bisecting_contour(moderate_instance, seed, subset):
    A, d, E = moderate_instance(seed)
    noise_norm = spectral_norm(E.entries)
    c = build_bisecting_contour(d, subset, noise_norm)
    assert c.margin >= 2.0 * noise_norm
    assert node_contraction(A, E, c, spectral=d) <= 0.5
