"""
Exact lattice-point counts near a point, on the sphere and on the upper half plane.

Sphere: elements alpha of R(n) whose rotation moves x by a geodesic angle < delta.
Upper half plane: elements x of the natural order of an indefinite algebra
with N(x) = n and u(z, theta(x)/sqrt(n) . z) < delta, where
u(z, w) = |z - w|^2 / (Im z Im w).

Both count raw elements; on the sphere alpha and -alpha are counted
separately, so every sphere count is even.
"""

import math
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple, Union

import numpy as np

from heckelab.errors import (
    DegenerateProfileError,
    EnumerationBoundOverflowError,
    InsufficientDataError,
    InvalidPointError,
)
from heckelab.harmonics import unit_vector
from heckelab.quaternion_core import IndefAlgebra, Rn_array, rotation_matrices
from heckelab_config import TOLERANCES
from log_service import get_logger

logger = get_logger("Counting")

DEFAULT_EPSILON = 0.05


@dataclass(frozen=True)
class HyperbolicPoint:
    """Point x + iy of the upper half plane."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)) or self.y <= 0:
            raise InvalidPointError(f"Point must have finite coordinates and Im > 0, got {self.x}+{self.y}i")

    @classmethod
    def from_complex(cls, z: complex) -> "HyperbolicPoint":
        return cls(float(z.real), float(z.imag))

    def as_complex(self) -> complex:
        return complex(self.x, self.y)

    def __str__(self) -> str:
        return f"{self.x!r},{self.y!r}"


def mobius(g, z: HyperbolicPoint) -> HyperbolicPoint:
    """(a z + b) / (c z + d) for a real 2x2 matrix with positive determinant."""
    (a, b), (c, d) = np.asarray(g, dtype=np.float64)
    if a * d - b * c <= 0:
        raise InvalidPointError("Mobius action needs a matrix with positive determinant")
    w = z.as_complex()
    return HyperbolicPoint.from_complex((a * w + b) / (c * w + d))


def u_invariant(z: HyperbolicPoint, w: HyperbolicPoint) -> float:
    """|z - w|^2 / (Im z Im w); symmetric, SL(2, R)-invariant, zero iff z = w."""
    return ((z.x - w.x) ** 2 + (z.y - w.y) ** 2) / (z.y * w.y)


def hyperbolic_distance(z: HyperbolicPoint, w: HyperbolicPoint) -> float:
    return math.acosh(1.0 + u_invariant(z, w) / 2.0)


def metric_equivalence_constants(points: Sequence[HyperbolicPoint]) -> Tuple[float, float]:
    """(c1, c2) with c1 u <= dist^2 <= c2 u over all distinct pairs of points."""
    ratios = []
    for i, z in enumerate(points):
        for w in points[i + 1:]:
            u = u_invariant(z, w)
            if u > 0:
                ratios.append(hyperbolic_distance(z, w) ** 2 / u)
    if not ratios:
        raise InsufficientDataError("Need at least two distinct points")
    return min(ratios), max(ratios)


def sphere_displacements(n: int, x) -> np.ndarray:
    """Geodesic angle between x and R_alpha x for every alpha in R(n)."""
    point = unit_vector(x)
    elements = Rn_array(n)
    if len(elements) == 0:
        return np.zeros(0)
    moved = rotation_matrices(elements) @ point
    cross = np.linalg.norm(np.cross(moved, point), axis=1)
    return np.arctan2(cross, moved @ point)


def count_sphere(n: int, x, delta: float) -> int:
    """Number of alpha in R(n) with angle(x, R_alpha x) < delta."""
    return int(np.count_nonzero(sphere_displacements(n, x) < delta))


def _conjugator(z: HyperbolicPoint) -> np.ndarray:
    root = math.sqrt(z.y)
    return np.array([[root, z.x / root], [0.0, 1.0 / root]])


def _entry_map(algebra: IndefAlgebra, z: HyperbolicPoint) -> np.ndarray:
    """4x4 matrix taking (x0..x3) to the entries of h^-1 theta(x) h, h . i = z."""
    h = _conjugator(z)
    h_inv = np.linalg.inv(h)
    return np.stack([(h_inv @ basis @ h).ravel() for basis in algebra.theta_basis()], axis=1)


def coordinate_bounds(algebra: IndefAlgebra, n: int, z: HyperbolicPoint, delta: float) -> np.ndarray:
    """Per-coordinate box containing every x with ||h^-1 theta(x) h||_F^2 < n(delta + 2).

    Raises:
        EnumerationBoundOverflowError: If the map is numerically singular or the
            box is too large to scan.
    """
    linear = _entry_map(algebra, z)
    gram = linear.T @ linear
    if np.linalg.cond(gram) > 1e12:
        raise EnumerationBoundOverflowError(f"Box bound is ill-conditioned at z = {z}")
    radius = n * (delta + 2.0)
    margin = 1.0 + TOLERANCES["enumeration_margin"]
    bounds = np.floor(np.sqrt(radius * np.diag(np.linalg.inv(gram))) * margin).astype(np.int64) + 1
    cells = float(np.prod(2 * bounds[1:] + 1))
    if cells > TOLERANCES["max_box_points"]:
        raise EnumerationBoundOverflowError(f"Box of {cells:.3g} cells at z = {z} is too large")
    return bounds


def _u_values(
    algebra: IndefAlgebra, n: int, z: HyperbolicPoint, coords: np.ndarray
) -> np.ndarray:
    entries = coords.astype(np.float64) @ _entry_map(algebra, z).T
    return np.sum(entries * entries, axis=1) / n - 2.0


def hyperbolic_elements(
    algebra: IndefAlgebra, n: int, z: HyperbolicPoint, delta: float
) -> Tuple[np.ndarray, np.ndarray]:
    """Order elements of norm n with u(z, theta(x)/sqrt(n) . z) < delta.

    Returns:
        (coordinates (M, 4) int64, u values (M,)).
    """
    if delta <= 0:
        return np.zeros((0, 4), dtype=np.int64), np.zeros(0)
    bounds = coordinate_bounds(algebra, n, z, delta)
    a, b = algebra.a, algebra.b
    ranges = [np.arange(-bound, bound + 1, dtype=np.int64) for bound in bounds[1:]]
    x1, x2, x3 = (axis.ravel() for axis in np.meshgrid(*ranges, indexing="ij"))

    square = n + a * x1 * x1 + b * x2 * x2 - a * b * x3 * x3
    keep = square >= 0
    x1, x2, x3, square = x1[keep], x2[keep], x3[keep], square[keep]
    x0 = np.floor(np.sqrt(square.astype(np.float64))).astype(np.int64)
    x0 = np.where((x0 + 1) ** 2 <= square, x0 + 1, x0)
    x0 = np.where(x0 * x0 > square, x0 - 1, x0)
    exact = x0 * x0 == square
    x0, x1, x2, x3 = x0[exact], x1[exact], x2[exact], x3[exact]
    nonzero = x0 > 0
    coords = np.concatenate(
        [
            np.stack([x0, x1, x2, x3], axis=1),
            np.stack([-x0[nonzero], x1[nonzero], x2[nonzero], x3[nonzero]], axis=1),
        ]
    )

    u = _u_values(algebra, n, z, coords)
    hits = u < delta
    coords, u = coords[hits], u[hits]
    if len(coords) and np.any(np.abs(coords) >= bounds[None, :]):
        raise EnumerationBoundOverflowError(f"Hit on the enumeration box boundary at z = {z}")
    order = np.lexsort(coords.T[::-1])
    return coords[order], u[order]


def count_hyperbolic(
    algebra: IndefAlgebra, n: int, z: HyperbolicPoint, delta: float
) -> int:
    """Number of order elements x with N(x) = n and u(z, theta(x)/sqrt(n) . z) < delta.

    Args:
        algebra: Indefinite algebra (a, b).
        n: Norm, n >= 1.
        z: Base point.
        delta: Threshold on u (not on hyperbolic distance).

    Raises:
        EnumerationBoundOverflowError: If the enumeration box cannot be derived
            or a hit lands on its boundary.
    """
    coords, _ = hyperbolic_elements(algebra, n, z, delta)
    logger.debug("count_hyperbolic(n=%d, z=%s, delta=%g) = %d", n, z, delta, len(coords))
    return len(coords)


def count_hyperbolic_naive(
    algebra: IndefAlgebra, n: int, z: HyperbolicPoint, delta: float, box: int
) -> int:
    """Brute force over |x_i| <= box; reference for count_hyperbolic."""
    axis = np.arange(-box, box + 1, dtype=np.int64)
    x1, x2, x3 = (grid.ravel() for grid in np.meshgrid(axis, axis, axis, indexing="ij"))
    total = 0
    for x0 in range(-box, box + 1):
        norms = algebra.norm_form(x0, x1, x2, x3)
        hit = norms == n
        if not np.any(hit):
            continue
        coords = np.stack([np.full(int(hit.sum()), x0), x1[hit], x2[hit], x3[hit]], axis=1)
        total += int(np.count_nonzero(_u_values(algebra, n, z, coords) < delta))
    return total


@dataclass
class CountingProfile:
    """Counts M(delta) at one level and base point.

    Attributes:
        setting: "sphere" or "hyperbolic".
        n: Level.
        point: Unit 3-vector or HyperbolicPoint.
        rows: (delta, M) pairs sorted by delta.
    """

    setting: str
    n: int
    point: Union[Tuple[float, float, float], HyperbolicPoint]
    rows: List[Tuple[float, int]] = field(default_factory=list)

    @property
    def deltas(self) -> np.ndarray:
        return np.array([row[0] for row in self.rows], dtype=np.float64)

    @property
    def counts(self) -> np.ndarray:
        return np.array([row[1] for row in self.rows], dtype=np.float64)


def sphere_profile(n: int, x, deltas: Sequence[float]) -> CountingProfile:
    angles = np.sort(sphere_displacements(n, x))
    grid = sorted(float(d) for d in deltas)
    counts = np.searchsorted(angles, grid, side="left")
    point = tuple(float(c) for c in unit_vector(x))
    return CountingProfile("sphere", n, point, [(d, int(m)) for d, m in zip(grid, counts)])


def hyperbolic_profile(
    algebra: IndefAlgebra, n: int, z: HyperbolicPoint, deltas: Sequence[float]
) -> CountingProfile:
    grid = sorted(float(d) for d in deltas)
    if not grid:
        return CountingProfile("hyperbolic", n, z)
    _, u = hyperbolic_elements(algebra, n, z, grid[-1])
    u = np.sort(u)
    counts = np.searchsorted(u, grid, side="left")
    return CountingProfile("hyperbolic", n, z, [(d, int(m)) for d, m in zip(grid, counts)])


def bound_model(model: str, n, delta, epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    """Shape f(n, delta) of a counting bound.

    Models:
        constant: 1.
        sphere: delta^(1/2) n^(1+eps) + n^eps.
        hyperbolic: (delta + delta^(1/4)) n^(1+eps) + n^eps.
    """
    n = np.asarray(n, dtype=np.float64)
    delta = np.asarray(delta, dtype=np.float64)
    if model == "constant":
        return np.ones(np.broadcast(n, delta).shape)
    if model == "sphere":
        return np.sqrt(delta) * n ** (1.0 + epsilon) + n**epsilon
    if model == "hyperbolic":
        return (delta + delta**0.25) * n ** (1.0 + epsilon) + n**epsilon
    raise ValueError(f"Unknown bound model {model!r}. Available: constant, sphere, hyperbolic")


@dataclass(frozen=True, eq=False)
class BoundFit:
    """Least-squares constant C for M ~ C f and the worst ratio M / f."""

    model: str
    epsilon: float
    constant: float
    max_ratio: float
    residuals: np.ndarray
    rows: int


def fit_bound(
    profile: Union[CountingProfile, Sequence[CountingProfile]],
    model: str,
    epsilon: float = DEFAULT_EPSILON,
    min_rows: int = 10,
) -> BoundFit:
    """Fit one constant to one profile or a family of profiles.

    Raises:
        InsufficientDataError: With fewer than min_rows rows in total.
        DegenerateProfileError: If every M is equal and the model has a shape.
    """
    profiles = [profile] if isinstance(profile, CountingProfile) else list(profile)
    ns = np.concatenate([np.full(len(p.rows), p.n, dtype=np.float64) for p in profiles]) if profiles else np.zeros(0)
    deltas = np.concatenate([p.deltas for p in profiles]) if profiles else np.zeros(0)
    counts = np.concatenate([p.counts for p in profiles]) if profiles else np.zeros(0)
    if counts.size < min_rows:
        raise InsufficientDataError(f"Need at least {min_rows} rows, got {counts.size}")

    shape = bound_model(model, ns, deltas, epsilon)
    if model != "constant" and np.all(counts == counts[0]):
        raise DegenerateProfileError("Every count is equal; the profile has no shape to fit")

    constant = float(np.dot(counts, shape) / np.dot(shape, shape))
    ratios = counts / shape
    return BoundFit(
        model=model,
        epsilon=epsilon,
        constant=constant,
        max_ratio=float(np.max(ratios)),
        residuals=counts - constant * shape,
        rows=int(counts.size),
    )
