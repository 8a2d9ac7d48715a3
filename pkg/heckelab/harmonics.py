"""
Real spherical harmonics of a single degree k.

Basis order for H_k: column 0 is the zonal harmonic (m = 0); then for
m = 1..k the pair cos(m phi), sin(m phi) at columns 2m-1, 2m. Every column
is orthonormal in L^2(S^2) for surface measure (total mass 4 pi). The
associated Legendre factors come from the fully normalized three-term
recursion, stable well past degree 100.
"""

from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy.special import roots_legendre

from heckelab.errors import InvalidPointError

FOUR_PI = 4.0 * np.pi


def basis_size(k: int) -> int:
    return 2 * k + 1


def column_orders(k: int) -> np.ndarray:
    """|m| carried by each column of the degree-k basis."""
    orders = np.zeros(2 * k + 1, dtype=np.int64)
    orders[1::2] = np.arange(1, k + 1)
    orders[2::2] = np.arange(1, k + 1)
    return orders


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[None, :]
    return pts


def real_harmonics(k: int, points) -> np.ndarray:
    """Evaluate the degree-k real basis at unit vectors.

    Args:
        k: Degree.
        points: (N, 3) array of unit vectors (or a single 3-vector).

    Returns:
        (N, 2k+1) array of basis values.
    """
    pts = _as_points(points)
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    s = np.hypot(x, y)[:, None]
    z = z[:, None]
    phi = np.arctan2(y, x)
    count = pts.shape[0]

    # current[:, m] holds the normalized P_{l,m}(z) for m <= l, previous the l-1 row
    current = np.zeros((count, k + 1))
    previous = np.zeros((count, k + 1))
    current[:, 0] = np.sqrt(1.0 / FOUR_PI)
    for l in range(k):
        upper = l + 1
        advanced = np.zeros_like(current)
        if l >= 1:
            m = np.arange(l, dtype=np.float64)
            a = np.sqrt((4.0 * upper * upper - 1.0) / (upper * upper - m * m))
            b = np.sqrt((l * l - m * m) / (4.0 * l * l - 1.0))
            advanced[:, :l] = a * (z * current[:, :l] - b * previous[:, :l])
        advanced[:, l] = np.sqrt(2.0 * l + 3.0) * z[:, 0] * current[:, l]
        advanced[:, upper] = np.sqrt((2.0 * l + 3.0) / (2.0 * l + 2.0)) * s[:, 0] * current[:, l]
        previous, current = current, advanced

    out = np.empty((count, 2 * k + 1))
    out[:, 0] = current[:, 0]
    if k > 0:
        angles = np.outer(phi, np.arange(1, k + 1))
        out[:, 1::2] = np.sqrt(2.0) * current[:, 1:] * np.cos(angles)
        out[:, 2::2] = np.sqrt(2.0) * current[:, 1:] * np.sin(angles)
    return out


def legendre_table(k_max: int, cosines) -> np.ndarray:
    """P_0..P_kmax at each cosine by the upward recurrence.

    Returns:
        (k_max+1, N) array.
    """
    t = np.atleast_1d(np.asarray(cosines, dtype=np.float64))
    table = np.empty((k_max + 1, t.size))
    table[0] = 1.0
    if k_max >= 1:
        table[1] = t
    for l in range(1, k_max):
        table[l + 1] = ((2 * l + 1) * t * table[l] - l * table[l - 1]) / (l + 1)
    return table


@lru_cache(maxsize=256)
def sphere_quadrature(k: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre x trapezoid rule exact for products of two degree-k harmonics.

    Returns:
        (points, weights) with points (P, 3) unit vectors and weights summing to 4 pi.
    """
    cos_nodes, cos_weights = roots_legendre(k + 1)
    n_phi = 2 * k + 1
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    sin_nodes = np.sqrt(1.0 - cos_nodes**2)

    points = np.stack(
        [
            np.outer(sin_nodes, np.cos(phi)).ravel(),
            np.outer(sin_nodes, np.sin(phi)).ravel(),
            np.repeat(cos_nodes, n_phi),
        ],
        axis=1,
    )
    weights = np.repeat(cos_weights, n_phi) * (2.0 * np.pi / n_phi)
    points.setflags(write=False)
    weights.setflags(write=False)
    return points, weights


def _z_rotation_factors(k: int, angle: float):
    orders = column_orders(k)
    cos_vec = np.cos(orders * angle)
    sin_vec = np.sin(orders * angle)
    # C_m rows pick up -sin, S_m rows +sin; the m = 0 row has sin = 0
    sign = np.zeros(2 * k + 1)
    sign[1::2] = -1.0
    sign[2::2] = 1.0
    partner = np.arange(2 * k + 1)
    partner[1::2] += 1
    partner[2::2] -= 1
    return cos_vec, sign * sin_vec, partner


def z_rotate_rows(matrix: np.ndarray, angle: float) -> np.ndarray:
    """Z(angle) @ matrix, where Z is the rotation about the z-axis on H_k."""
    k = (matrix.shape[0] - 1) // 2
    cos_vec, signed_sin, partner = _z_rotation_factors(k, angle)
    return cos_vec[:, None] * matrix + signed_sin[:, None] * matrix[partner]


def z_rotate_columns(matrix: np.ndarray, angle: float) -> np.ndarray:
    """matrix @ Z(angle)."""
    k = (matrix.shape[1] - 1) // 2
    cos_vec, signed_sin, partner = _z_rotation_factors(k, angle)
    return matrix * cos_vec[None, :] - matrix[:, partner] * signed_sin[None, :]


def z_rotate_vectors(vector: np.ndarray, angles) -> np.ndarray:
    """Rows Z(angle) @ vector, one per angle."""
    k = (vector.shape[0] - 1) // 2
    _, _, partner = _z_rotation_factors(k, 0.0)
    orders = column_orders(k)
    sign = np.zeros(2 * k + 1)
    sign[1::2] = -1.0
    sign[2::2] = 1.0
    phase = np.outer(np.asarray(angles, dtype=np.float64), orders)
    return np.cos(phase) * vector[None, :] + sign * np.sin(phase) * vector[partner][None, :]


def z_rotation_matrix(k: int, angle: float) -> np.ndarray:
    """Matrix of f -> f(Rz(angle)^-1 x) on H_k: cos/sin blocks [[c, -s], [s, c]]."""
    return z_rotate_rows(np.eye(2 * k + 1), angle)


def weight_vector(k: int, l: int) -> np.ndarray:
    """Coordinates of the complex harmonic of z-weight l in the real basis.

    Under rotation by t about the z-axis it is multiplied by exp(-i l t).
    """
    vector = np.zeros(2 * k + 1, dtype=np.complex128)
    if l == 0:
        vector[0] = 1.0
    else:
        m = abs(l)
        vector[2 * m - 1] = 1.0 / np.sqrt(2.0)
        vector[2 * m] = (1j if l > 0 else -1j) / np.sqrt(2.0)
    return vector


def unit_vector(x) -> np.ndarray:
    """Validate a point of S^2 and return it renormalized.

    Raises:
        InvalidPointError: If x is not a finite 3-vector of norm 1 (within 1e-9).
    """
    point = np.asarray(x, dtype=np.float64).reshape(-1)
    norm = np.linalg.norm(point) if point.size == 3 else float("nan")
    if not np.isfinite(norm) or abs(norm - 1.0) > 1e-9:
        raise InvalidPointError(f"Expected a unit 3-vector, got {point.tolist()}")
    return point / norm
