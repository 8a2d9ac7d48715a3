import math

import numpy as np
import pytest

from heckelab.errors import (
    DegenerateInputError,
    InsufficientDataError,
    InvalidKTypeError,
    UnderResolvedError,
)
from heckelab.hecke_so3 import joint_eigenbasis
from heckelab.quaternion_core import axis_rotation
from heckelab.supnorm import (
    FormCoefficients,
    SupNormSample,
    convex_sup_norm,
    evaluate_form,
    evaluate_sphere,
    exponent_fit,
    family_maxima,
    hecke_family_supnorms,
    hecke_form,
    icosahedral_grid,
    sup_norm_estimate,
    zonal_form,
    zonal_supnorms,
)

NORTH = (0.0, 0.0, 1.0)


def _random_form(k, seed):
    c = np.random.default_rng(seed).normal(size=2 * k + 1)
    return FormCoefficients(k=k, l=0, c=c / np.linalg.norm(c))


@pytest.mark.parametrize("frequency", [1, 2, 5])
def test_icosahedral_grid(frequency):
    grid = icosahedral_grid(frequency)
    assert grid.shape == (10 * frequency**2 + 2, 3)
    assert np.allclose(np.linalg.norm(grid, axis=1), 1.0)
    assert np.any(np.all(np.isclose(grid, NORTH), axis=1))
    assert np.any(np.all(np.isclose(grid, (0.0, 0.0, -1.0)), axis=1))


def test_icosahedral_grid_frequency_is_validated():
    with pytest.raises(DegenerateInputError):
        icosahedral_grid(0)


@pytest.mark.parametrize("k", [0, 1, 6, 25])
def test_zonal_form_peaks_at_the_pole(k):
    f = zonal_form(k)
    assert evaluate_form(f, NORTH).real == pytest.approx(convex_sup_norm(k))
    result = sup_norm_estimate(f)
    assert result.value == pytest.approx(convex_sup_norm(k), rel=1e-12)
    if k > 0:
        assert abs(result.point[2]) == pytest.approx(1.0)


def test_convex_sup_norm():
    assert convex_sup_norm(0) == pytest.approx(1.0 / math.sqrt(4.0 * math.pi))
    assert convex_sup_norm(10) == pytest.approx(math.sqrt(21.0 / (4.0 * math.pi)))


def test_grid_resolution_is_checked():
    with pytest.raises(UnderResolvedError):
        sup_norm_estimate(zonal_form(5), grid_resolution=19)
    sup_norm_estimate(zonal_form(5), grid_resolution=20)


def test_polish_never_decreases_the_estimate():
    f = _random_form(9, seed=2)
    previous = 0.0
    for steps in (0, 5, 20, 60):
        result = sup_norm_estimate(f, polish_steps=steps)
        assert result.value >= result.grid_value
        assert result.value >= previous
        assert result.value <= convex_sup_norm(9) + 1e-12
        assert abs(evaluate_form(f, result.point)) == pytest.approx(result.value, rel=1e-9)
        previous = result.value


def test_sphere_evaluation_is_vectorized(sample_points):
    f = _random_form(4, seed=8)
    values = evaluate_sphere(f, sample_points)
    assert values.shape == (len(sample_points),)
    for x, value in zip(sample_points, values):
        assert evaluate_form(f, x).real == pytest.approx(value)


def test_form_validation():
    with pytest.raises(InvalidKTypeError):
        FormCoefficients(k=2, l=3, c=np.eye(5)[0], normalization="group")
    with pytest.raises(InvalidKTypeError):
        FormCoefficients(k=2, l=1, c=np.eye(5)[0])
    with pytest.raises(DegenerateInputError):
        FormCoefficients(k=2, l=0, c=np.ones(5))
    with pytest.raises(DegenerateInputError):
        FormCoefficients(k=2, l=0, c=np.eye(4)[0])
    with pytest.raises(DegenerateInputError):
        FormCoefficients(k=2, l=0, c=np.eye(5)[0], normalization="torus")


def test_group_form_restricts_to_sphere_form():
    basis = joint_eigenbasis(5, (5, 13))
    sphere = hecke_form(basis, 3)
    group = hecke_form(basis, 3, l=0, normalization="group")
    for alpha, beta, gamma in ((0.3, 1.1, 2.0), (2.5, 0.2, -1.0), (-1.0, 2.9, 0.0)):
        moved = (math.sin(beta) * math.cos(alpha), math.sin(beta) * math.sin(alpha), math.cos(beta))
        expected = math.sqrt(4.0 * math.pi) * evaluate_form(sphere, moved).real
        value = evaluate_form(group, (alpha, beta, gamma))
        assert value.real == pytest.approx(expected, abs=1e-10)
        assert abs(value.imag) < 1e-10


@pytest.mark.parametrize("l", [-2, 1, 3])
def test_ktype_modulus_ignores_the_last_angle(l):
    basis = joint_eigenbasis(4, (5, 13))
    f = hecke_form(basis, 1, l=l)
    assert f.normalization == "group"
    first = evaluate_form(f, (0.7, 1.3, 0.0))
    second = evaluate_form(f, (0.7, 1.3, 1.9))
    assert abs(second) == pytest.approx(abs(first), rel=1e-12)
    assert second == pytest.approx(first * np.exp(-1j * l * 1.9))


def test_group_points_accept_rotations():
    f = hecke_form(joint_eigenbasis(3, (5,)), 2, l=2)
    rotation = axis_rotation("z", 0.4) @ axis_rotation("y", 1.0) @ axis_rotation("z", -0.6)
    assert evaluate_form(f, rotation) == pytest.approx(evaluate_form(f, (0.4, 1.0, -0.6)), abs=1e-10)


def test_group_sup_norm_estimate():
    f = hecke_form(joint_eigenbasis(6, (5, 13)), 0, l=2)
    result = sup_norm_estimate(f, grid_resolution=24, polish_steps=30)
    assert result.grid_value <= result.value <= math.sqrt(13.0) + 1e-9
    assert result.point[2] == 0.0
    assert abs(evaluate_form(f, result.point)) == pytest.approx(result.value, rel=1e-9)
    with pytest.raises(UnderResolvedError):
        sup_norm_estimate(f, grid_resolution=20)


def test_hecke_family_stays_below_convex_bound():
    bases = [joint_eigenbasis(k, (5, 13)) for k in range(1, 9)]
    samples = hecke_family_supnorms(bases)
    assert len(samples) == sum(2 * k + 1 for k in range(1, 9))
    for sample in samples:
        assert sample.laplace_eigenvalue == sample.k * (sample.k + 1)
        assert 0.0 < sample.sup_norm <= convex_sup_norm(sample.k) + 1e-12
        assert np.linalg.norm(sample.argmax) == pytest.approx(1.0)


def test_zonal_family_and_exponent():
    samples = zonal_supnorms(range(4, 30, 3))
    for sample in samples:
        assert sample.sup_norm == pytest.approx(convex_sup_norm(sample.k), rel=1e-12)
    fit = exponent_fit(family_maxima(samples))
    # sqrt(2k+1) against k(k+1) climbs towards slope 1/4
    assert 0.2 < fit.slope < 0.3


def test_family_maxima():
    samples = [
        SupNormSample(1, 2, 0, 0.3, NORTH),
        SupNormSample(1, 2, 1, 0.5, NORTH),
        SupNormSample(2, 6, 0, 0.4, NORTH),
    ]
    assert family_maxima(samples) == [(2, 0.5), (6, 0.4)]


def test_exponent_fit():
    eigenvalues = [2.0, 6.0, 12.0, 20.0, 30.0, 42.0]
    fit = exponent_fit([(lam, 3.0 * lam**0.25) for lam in eigenvalues])
    assert fit.slope == pytest.approx(0.25)
    assert fit.intercept == pytest.approx(math.log(3.0))
    assert fit.stderr == pytest.approx(0.0, abs=1e-9)

    with pytest.raises(InsufficientDataError):
        exponent_fit([(2.0, 1.0), (6.0, 1.0)])
    with pytest.raises(DegenerateInputError):
        exponent_fit([(2.0, 1.0)] * 5)
    with pytest.raises(DegenerateInputError):
        exponent_fit([(lam, -1.0) for lam in eigenvalues])


WIDE_DEGREES = range(10, 61)


@pytest.mark.slow
def test_zonal_exponent_over_wide_degrees():
    fit = exponent_fit(family_maxima(zonal_supnorms(WIDE_DEGREES)))
    assert fit.slope == pytest.approx(0.25, abs=0.02)


@pytest.mark.slow
def test_hecke_exponent_sits_below_zonal():
    bases = [joint_eigenbasis(k, (5, 13)) for k in WIDE_DEGREES]
    fit = exponent_fit(family_maxima(hecke_family_supnorms(bases)))
    assert fit.slope <= 0.225
