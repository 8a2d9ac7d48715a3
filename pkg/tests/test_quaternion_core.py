import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sympy import divisor_sigma

from heckelab.errors import ArithmeticOverflowError, DegenerateInputError, InvalidRotationError
from heckelab.quaternion_core import (
    IndefAlgebra,
    Quaternion,
    RotationMatrix,
    Rn_array,
    axis_rotation,
    enumerate_Rn,
    multiply,
    rotation_matrices,
    rotation_of,
    theta_embed,
)

coefficient = st.integers(min_value=-1000, max_value=1000)
quaternions = st.builds(Quaternion, coefficient, coefficient, coefficient, coefficient)
nonzero_quaternions = quaternions.filter(lambda q: q.norm() > 0)


def _box_counts(limit):
    """|R(n)| for every n <= limit, by counting a full coordinate box."""
    bound = math.isqrt(limit)
    odd = np.arange(-bound, bound + 1)
    odd = odd[odd % 2 == 1]
    even = np.arange(-bound, bound + 1)
    even = even[even % 2 == 0]
    a0, a1, a2, a3 = np.meshgrid(odd, even, even, even, indexing="ij")
    norms = (a0**2 + a1**2 + a2**2 + a3**2).ravel()
    return np.bincount(norms[norms <= limit], minlength=limit + 1)


def test_multiply_examples():
    i, j, k = Quaternion(0, 1, 0, 0), Quaternion(0, 0, 1, 0), Quaternion(0, 0, 0, 1)
    assert i * j == k
    assert j * i == -k
    assert i * i == Quaternion(-1, 0, 0, 0)

    product = multiply(Quaternion(1, 1, 1, 1), Quaternion(2, 0, 1, 0))
    assert product == Quaternion(1, 1, 3, 3)
    assert product.norm() == 20


@given(quaternions, quaternions)
def test_norm_is_multiplicative(q, r):
    assert (q * r).norm() == q.norm() * r.norm()


@given(quaternions, quaternions, quaternions)
def test_multiplication_is_associative(q, r, s):
    assert (q * r) * s == q * (r * s)


@given(quaternions)
def test_conjugate_gives_norm(q):
    assert q * q.conjugate() == Quaternion(q.norm(), 0, 0, 0)


def test_overflow_is_reported():
    big = Quaternion(2**62, 0, 0, 0)
    with pytest.raises(ArithmeticOverflowError):
        big * big
    with pytest.raises(ArithmeticOverflowError):
        Quaternion(2**63, 0, 0, 0)


def test_small_levels():
    assert [q.as_tuple() for q in enumerate_Rn(1)] == [(-1, 0, 0, 0), (1, 0, 0, 0)]
    assert enumerate_Rn(3) == []
    assert len(enumerate_Rn(5)) == 12
    assert enumerate_Rn(5)[0] == Quaternion(-1, -2, 0, 0)
    assert len(enumerate_Rn(9)) == 26


def test_level_must_be_positive():
    with pytest.raises(DegenerateInputError):
        enumerate_Rn(0)
    with pytest.raises(DegenerateInputError):
        Rn_array(-3)


def test_sizes_match_divisor_formula():
    counts = _box_counts(500)
    for n in range(1, 501):
        elements = enumerate_Rn(n)
        expected = 2 * int(divisor_sigma(n)) if n % 4 == 1 else 0
        assert len(elements) == expected == counts[n], n


@pytest.mark.parametrize("n", [1, 5, 9, 13, 25, 65, 85, 325])
def test_elements_are_sorted_unique_and_closed(n):
    elements = enumerate_Rn(n)
    assert elements == sorted(set(elements))
    members = set(elements)
    for q in elements:
        assert q.norm() == n
        assert q.a0 % 2 == 1 and q.a1 % 2 == q.a2 % 2 == q.a3 % 2 == 0
        assert q.conjugate() in members
        assert -q in members


@pytest.mark.parametrize("n", [1, 3, 5, 21, 45, 221, 1105])
def test_array_matches_iterator(n):
    array = Rn_array(n)
    assert array.dtype == np.int64
    assert array.shape == (len(enumerate_Rn(n)), 4)
    assert [tuple(row) for row in array.tolist()] == [q.as_tuple() for q in enumerate_Rn(n)]


def test_products_of_levels_land_in_product_level():
    target = set(enumerate_Rn(65))
    assert all(p * q in target for p in enumerate_Rn(5) for q in enumerate_Rn(13))


def test_rotation_examples():
    assert np.allclose(rotation_of(Quaternion(1, 0, 0, 0)).matrix, np.eye(3))
    assert np.allclose(rotation_of(Quaternion(0, 1, 0, 0)).matrix, np.diag([1.0, -1.0, -1.0]))
    # 1 + k turns by pi/2 about the z-axis
    assert np.allclose(rotation_of(Quaternion(1, 0, 0, 1)).matrix, axis_rotation("z", math.pi / 2).matrix)
    with pytest.raises(DegenerateInputError):
        rotation_of(Quaternion(0, 0, 0, 0))


@given(nonzero_quaternions, nonzero_quaternions)
def test_rotation_is_a_homomorphism(q, r):
    expected = rotation_of(q).matrix @ rotation_of(r).matrix
    assert np.allclose(rotation_of(q * r).matrix, expected, atol=1e-9)
    assert np.allclose(rotation_of(-q).matrix, rotation_of(q).matrix, atol=1e-12)


def test_batched_rotations_match_single():
    elements = Rn_array(65)
    batch = rotation_matrices(elements)
    for row, matrix in zip(elements, batch):
        assert np.allclose(matrix, rotation_of(Quaternion.from_tuple(row)).matrix, atol=1e-12)


def test_rotation_validation():
    with pytest.raises(InvalidRotationError):
        RotationMatrix(np.diag([1.0, 1.0, -1.0]))
    with pytest.raises(InvalidRotationError):
        RotationMatrix(2.0 * np.eye(3))
    with pytest.raises(InvalidRotationError):
        RotationMatrix(np.eye(2))


def test_euler_angles_reconstruct_rotation(sample_points):
    for x in sample_points:
        q = Quaternion(3, int(10 * x[0]), int(10 * x[1]), int(10 * x[2]))
        rotation = rotation_of(q)
        alpha, beta, gamma = rotation.euler_zyz()
        rebuilt = axis_rotation("z", alpha) @ axis_rotation("y", beta) @ axis_rotation("z", gamma)
        assert np.allclose(rebuilt.matrix, rotation.matrix, atol=1e-10)
        assert 0.0 <= rotation.angle() <= math.pi


def test_theta_examples():
    algebra = IndefAlgebra(2, 3)
    assert np.allclose(theta_embed(algebra.element(0, 1, 0, 0)), [[-math.sqrt(2), 0.0], [0.0, math.sqrt(2)]])
    x = algebra.element(1, 1, 1, 0)
    assert x.norm() == -4
    assert np.linalg.det(theta_embed(x)) == pytest.approx(-4.0)


def test_algebra_validation():
    for a, b in ((0, 3), (-2, 3), (2, 0), (4, 3), (2, 12)):
        with pytest.raises(DegenerateInputError):
            IndefAlgebra(a, b)


small = st.integers(min_value=-30, max_value=30)


@given(st.tuples(small, small, small, small), st.tuples(small, small, small, small))
def test_theta_is_a_ring_homomorphism(first, second):
    algebra = IndefAlgebra(2, 3)
    x, y = algebra.element(*first), algebra.element(*second)
    assert np.allclose(theta_embed(x * y), theta_embed(x) @ theta_embed(y), rtol=1e-12, atol=1e-8)
    assert np.linalg.det(theta_embed(x)) == pytest.approx(x.norm(), rel=1e-9, abs=1e-6)
    matrix = theta_embed(x)
    adjugate = np.array([[matrix[1, 1], -matrix[0, 1]], [-matrix[1, 0], matrix[0, 0]]])
    assert np.allclose(theta_embed(x.conjugate()), adjugate, atol=1e-9)
    assert x.trace() == pytest.approx(np.trace(matrix))
