"""
Pointwise evaluation and sup norms of Hecke eigenforms.

Sphere forms are F(x) = sum_m c_m Y_m(x), unit norm for surface measure.
Group forms of K-type l live on SO(3): f(g) = sqrt(2k+1) c^T D(g) v_l,
unit norm for Haar probability measure, where v_l is the weight-l vector
of heckelab.harmonics.weight_vector. For l = 0, F(g e_z) = f(g)/sqrt(4 pi).

Eigenvalues are reported as Laplace eigenvalues lambda = k(k+1). Every
function in the degree-k block on SO(3) is a Casimir eigenfunction with the
same eigenvalue up to sign, so exponents fitted against lambda are exponents
in the Casimir eigenvalue as well.

Sup norms are lower bounds: the maximum over a grid (icosahedral mesh on
the sphere, Euler-angle lattice on the group) followed by a deterministic
coordinate-ascent polish with step halving.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.stats import linregress

from heckelab.errors import (
    DegenerateInputError,
    InsufficientDataError,
    InvalidKTypeError,
    UnderResolvedError,
)
from heckelab.harmonics import FOUR_PI, real_harmonics, unit_vector, weight_vector, z_rotate_vectors
from heckelab.hecke_so3 import HeckeMaassBasis, y_axis_conjugator
from heckelab.quaternion_core import RotationMatrix
from heckelab_config import SCANS
from log_service import get_logger

logger = get_logger("SupNorm")

SPHERE = "sphere"
GROUP = "group"

GroupPoint = Union[RotationMatrix, Tuple[float, float, float]]


@dataclass(frozen=True, eq=False)
class FormCoefficients:
    """Coefficients of a degree-k form in the real harmonic basis.

    Attributes:
        k: Degree.
        l: K-type weight; 0 for sphere forms.
        c: 2k+1 coefficients with unit Euclidean norm.
        normalization: "sphere" (surface measure) or "group" (Haar probability).
    """

    k: int
    l: int
    c: np.ndarray
    normalization: str = SPHERE

    def __post_init__(self):
        if abs(self.l) > self.k:
            raise InvalidKTypeError(f"K-type {self.l} is outside |l| <= k = {self.k}")
        if self.normalization not in (SPHERE, GROUP):
            raise DegenerateInputError(f"Unknown normalization {self.normalization!r}")
        if self.normalization == SPHERE and self.l != 0:
            raise InvalidKTypeError("Sphere forms have K-type 0; use the group normalization")
        if self.c.shape != (2 * self.k + 1,):
            raise DegenerateInputError(f"Expected {2 * self.k + 1} coefficients, got {self.c.shape}")
        if abs(np.linalg.norm(self.c) - 1.0) > 1e-9:
            raise DegenerateInputError("Coefficients must have unit norm")


def zonal_form(k: int) -> FormCoefficients:
    c = np.zeros(2 * k + 1)
    c[0] = 1.0
    return FormCoefficients(k=k, l=0, c=c)


def hecke_form(
    basis: HeckeMaassBasis, j: int, l: int = 0, normalization: Optional[str] = None
) -> FormCoefficients:
    """Form j of a joint eigenbasis; every K-type l shares the same coefficients."""
    normalization = normalization or (SPHERE if l == 0 else GROUP)
    return FormCoefficients(k=basis.k, l=l, c=np.array(basis.vectors[:, j]), normalization=normalization)


def _euler_of(point: GroupPoint) -> Tuple[float, float, float]:
    if isinstance(point, RotationMatrix):
        return point.euler_zyz()
    alpha, beta, gamma = point
    return float(alpha), float(beta), float(gamma)


def _group_values(f: FormCoefficients, alphas, betas, gammas=None) -> np.ndarray:
    """f at Euler angles, elementwise over equal-length arrays."""
    conjugator = y_axis_conjugator(f.k)
    lifted = conjugator.T @ weight_vector(f.k, f.l)
    left = z_rotate_vectors(np.asarray(f.c, dtype=np.complex128), -np.asarray(alphas))
    right = z_rotate_vectors(lifted, betas) @ conjugator.T
    values = math.sqrt(2 * f.k + 1) * np.sum(left * right, axis=1)
    if gammas is not None:
        values = values * np.exp(-1j * f.l * np.asarray(gammas))
    return values


def _group_lattice(f: FormCoefficients, alphas: np.ndarray, betas: np.ndarray) -> np.ndarray:
    """|f| on the product lattice alphas x betas (gamma drops out of |f|)."""
    conjugator = y_axis_conjugator(f.k)
    lifted = conjugator.T @ weight_vector(f.k, f.l)
    left = z_rotate_vectors(np.asarray(f.c, dtype=np.complex128), -alphas)
    right = z_rotate_vectors(lifted, betas) @ conjugator.T
    return math.sqrt(2 * f.k + 1) * np.abs(left @ right.T)


def evaluate_form(f: FormCoefficients, point) -> complex:
    """Value of f at a unit vector (sphere forms) or rotation (group forms).

    Group points are RotationMatrix instances or ZYZ Euler triples.

    Raises:
        InvalidPointError: If a sphere point is not a unit vector.
    """
    if f.normalization == SPHERE:
        return complex(real_harmonics(f.k, unit_vector(point))[0] @ f.c)
    alpha, beta, gamma = _euler_of(point)
    return complex(_group_values(f, [alpha], [beta], [gamma])[0])


def evaluate_sphere(f: FormCoefficients, points: np.ndarray) -> np.ndarray:
    """Vectorized sphere evaluation at an (N, 3) array."""
    return real_harmonics(f.k, points) @ f.c


_BASE_ICOSAHEDRON_FACES = (
    [(0, 1 + i, 1 + (i + 1) % 5) for i in range(5)]
    + [(1 + i, 6 + i, 1 + (i + 1) % 5) for i in range(5)]
    + [(1 + (i + 1) % 5, 6 + i, 6 + (i + 1) % 5) for i in range(5)]
    + [(11, 6 + (i + 1) % 5, 6 + i) for i in range(5)]
)


def _icosahedron_vertices() -> np.ndarray:
    ring_z = 1.0 / math.sqrt(5.0)
    ring_r = 2.0 / math.sqrt(5.0)
    upper = [(ring_r * math.cos(2 * math.pi * i / 5), ring_r * math.sin(2 * math.pi * i / 5), ring_z) for i in range(5)]
    lower = [
        (ring_r * math.cos(2 * math.pi * i / 5 + math.pi / 5), ring_r * math.sin(2 * math.pi * i / 5 + math.pi / 5), -ring_z)
        for i in range(5)
    ]
    return np.array([(0.0, 0.0, 1.0)] + upper + lower + [(0.0, 0.0, -1.0)])


@lru_cache(maxsize=32)
def icosahedral_grid(frequency: int) -> np.ndarray:
    """Vertices of the frequency-nu geodesic subdivision, with a vertex at each pole.

    Returns:
        (10 nu^2 + 2, 3) array of unit vectors in lexicographic order.
    """
    if frequency < 1:
        raise DegenerateInputError(f"Grid frequency must be >= 1, got {frequency}")
    vertices = _icosahedron_vertices()
    i, j = np.meshgrid(np.arange(frequency + 1), np.arange(frequency + 1), indexing="ij")
    keep = (i + j) <= frequency
    bary = np.stack([i[keep], j[keep], frequency - i[keep] - j[keep]], axis=1) / frequency
    points = np.concatenate([bary @ vertices[list(face)] for face in _BASE_ICOSAHEDRON_FACES])
    points /= np.linalg.norm(points, axis=1, keepdims=True)
    grid = np.unique(np.round(points, 12), axis=0)
    grid /= np.linalg.norm(grid, axis=1, keepdims=True)
    grid.setflags(write=False)
    return grid


def grid_frequency(resolution: int) -> int:
    return max(1, math.ceil(resolution / 5))


@dataclass(frozen=True)
class SupNormResult:
    """Sup-norm estimate of one form.

    Attributes:
        value: Largest |f| found (a lower bound on the sup norm).
        point: Unit vector (sphere) or ZYZ Euler angles with gamma = 0 (group).
        grid_value: Largest |f| on the raw grid before polishing.
    """

    value: float
    point: Tuple[float, ...]
    grid_value: float


def _check_resolution(k: int, resolution: int) -> None:
    if resolution < 4 * k:
        raise UnderResolvedError(f"Grid resolution {resolution} is below 4k = {4 * k}")


def _tangent_frames(points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    reference = np.where(np.abs(points[:, 2:3]) < 0.9, [[0.0, 0.0, 1.0]], [[1.0, 0.0, 0.0]])
    first = np.cross(points, reference)
    first /= np.linalg.norm(first, axis=1, keepdims=True)
    second = np.cross(points, first)
    return first, second


def _polish_sphere(
    k: int,
    coefficients: np.ndarray,
    starts: np.ndarray,
    start_values: np.ndarray,
    step: float,
    polish_steps: int,
) -> Tuple[np.ndarray, np.ndarray]:
    """Coordinate ascent from many starts at once; row i uses coefficients[i]."""
    points = starts.copy()
    values = start_values.copy()
    steps = np.full(len(points), step)
    for _ in range(polish_steps):
        first, second = _tangent_frames(points)
        cos_s, sin_s = np.cos(steps)[:, None], np.sin(steps)[:, None]
        trial = np.stack(
            [
                cos_s * points + sin_s * first,
                cos_s * points - sin_s * first,
                cos_s * points + sin_s * second,
                cos_s * points - sin_s * second,
            ],
            axis=1,
        )
        trial /= np.linalg.norm(trial, axis=2, keepdims=True)
        harmonics = real_harmonics(k, trial.reshape(-1, 3)).reshape(len(points), 4, -1)
        trial_values = np.abs(np.einsum("pqi,pi->pq", harmonics, coefficients))
        best = np.argmax(trial_values, axis=1)
        best_values = trial_values[np.arange(len(points)), best]
        improved = best_values > values
        points[improved] = trial[np.arange(len(points)), best][improved]
        values[improved] = best_values[improved]
        steps[~improved] *= 0.5
    return points, values


def sup_norm_batch(
    k: int,
    coefficients: np.ndarray,
    grid_resolution: Optional[int] = None,
    polish_steps: Optional[int] = None,
    candidates: Optional[int] = None,
) -> List[SupNormResult]:
    """Sphere sup norms of several forms of degree k sharing one grid.

    Args:
        k: Degree.
        coefficients: (2k+1, F) matrix, one form per column.
        grid_resolution: Samples per great circle (>= 4k).
        polish_steps: Coordinate-ascent iterations per start.
        candidates: Number of best grid points polished per form.

    Raises:
        UnderResolvedError: If grid_resolution < 4k.
    """
    grid_resolution = SCANS["grid_res_per_degree"] * max(k, 1) if grid_resolution is None else grid_resolution
    polish_steps = SCANS["polish_steps"] if polish_steps is None else polish_steps
    candidates = SCANS["polish_candidates"] if candidates is None else candidates
    _check_resolution(k, grid_resolution)

    coefficients = np.asarray(coefficients, dtype=np.float64).reshape(2 * k + 1, -1)
    forms = coefficients.shape[1]
    frequency = grid_frequency(grid_resolution)
    grid = icosahedral_grid(frequency)
    values = np.abs(real_harmonics(k, grid) @ coefficients)

    top = min(candidates, len(grid))
    order = np.argsort(-values, axis=0, kind="stable")[:top]
    starts = grid[order.T.ravel()]
    start_values = values[order.T.ravel(), np.repeat(np.arange(forms), top)]
    rows = np.repeat(coefficients.T, top, axis=0)
    step = 1.2 / frequency

    if k > 0 and polish_steps > 0:
        points, polished = _polish_sphere(k, rows, starts, start_values, step, polish_steps)
    else:
        points, polished = starts, start_values

    results = []
    for form in range(forms):
        block = slice(form * top, (form + 1) * top)
        winner = int(np.argmax(polished[block]))
        results.append(
            SupNormResult(
                value=float(polished[block][winner]),
                point=tuple(float(c) for c in points[block][winner]),
                grid_value=float(np.max(values[:, form])),
            )
        )
    return results


def _polish_group(
    f: FormCoefficients, starts: np.ndarray, start_values: np.ndarray, step: float, polish_steps: int
) -> Tuple[np.ndarray, np.ndarray]:
    angles = starts.copy()
    values = start_values.copy()
    steps = np.full(len(angles), step)
    moves = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    for _ in range(polish_steps):
        trial = angles[:, None, :] + steps[:, None, None] * moves[None, :, :]
        trial[:, :, 1] = np.clip(trial[:, :, 1], 0.0, math.pi)
        flat = trial.reshape(-1, 2)
        trial_values = np.abs(_group_values(f, flat[:, 0], flat[:, 1])).reshape(len(angles), 4)
        best = np.argmax(trial_values, axis=1)
        best_values = trial_values[np.arange(len(angles)), best]
        improved = best_values > values
        angles[improved] = trial[np.arange(len(angles)), best][improved]
        values[improved] = best_values[improved]
        steps[~improved] *= 0.5
    return angles, values


def sup_norm_estimate(
    f: FormCoefficients,
    grid_resolution: Optional[int] = None,
    polish_steps: Optional[int] = None,
    candidates: Optional[int] = None,
) -> SupNormResult:
    """Lower bound on max |f| by grid search and local polish.

    The reported value is at least the raw grid maximum and never decreases
    as polish_steps grows.

    Raises:
        UnderResolvedError: If grid_resolution < 4k.
    """
    grid_resolution = SCANS["grid_res_per_degree"] * max(f.k, 1) if grid_resolution is None else grid_resolution
    polish_steps = SCANS["polish_steps"] if polish_steps is None else polish_steps
    candidates = SCANS["polish_candidates"] if candidates is None else candidates

    if f.normalization == SPHERE:
        return sup_norm_batch(f.k, f.c.real[:, None], grid_resolution, polish_steps, candidates)[0]

    _check_resolution(f.k, grid_resolution)
    grid_resolution = max(grid_resolution, 4)
    alphas = 2.0 * math.pi * np.arange(grid_resolution) / grid_resolution
    betas = math.pi * np.arange(grid_resolution // 2 + 1) / (grid_resolution // 2)
    lattice = _group_lattice(f, alphas, betas)
    flat = np.argsort(-lattice, axis=None, kind="stable")[: max(1, candidates)]
    ai, bi = np.unravel_index(flat, lattice.shape)
    starts = np.stack([alphas[ai], betas[bi]], axis=1)
    start_values = lattice[ai, bi]
    if f.k > 0 and polish_steps > 0:
        angles, values = _polish_group(f, starts, start_values, 2.0 * math.pi / grid_resolution, polish_steps)
    else:
        angles, values = starts, start_values
    winner = int(np.argmax(values))
    return SupNormResult(
        value=float(values[winner]),
        point=(float(angles[winner, 0]), float(angles[winner, 1]), 0.0),
        grid_value=float(np.max(lattice)),
    )


@dataclass(frozen=True)
class SupNormSample:
    k: int
    laplace_eigenvalue: int
    j: int
    sup_norm: float
    argmax: Tuple[float, ...]


def hecke_family_supnorms(
    bases: Sequence[HeckeMaassBasis],
    grid_res_per_degree: Optional[int] = None,
    polish_steps: Optional[int] = None,
) -> List[SupNormSample]:
    """Sphere sup norms of every joint eigenform in the given bases."""
    per_degree = SCANS["grid_res_per_degree"] if grid_res_per_degree is None else grid_res_per_degree
    samples = []
    for basis in bases:
        results = sup_norm_batch(basis.k, basis.vectors, per_degree * max(basis.k, 1), polish_steps)
        for j, result in enumerate(results):
            samples.append(SupNormSample(basis.k, basis.laplace_eigenvalue, j, result.value, result.point))
        logger.debug("Sup norms on H_%d: max %.6f", basis.k, max(r.value for r in results))
    return samples


def zonal_supnorms(
    k_values: Sequence[int], grid_res_per_degree: Optional[int] = None, polish_steps: Optional[int] = None
) -> List[SupNormSample]:
    per_degree = SCANS["grid_res_per_degree"] if grid_res_per_degree is None else grid_res_per_degree
    samples = []
    for k in k_values:
        result = sup_norm_estimate(zonal_form(k), per_degree * max(k, 1), polish_steps)
        samples.append(SupNormSample(k, k * (k + 1), 0, result.value, result.point))
    return samples


def family_maxima(samples: Sequence[SupNormSample]) -> List[Tuple[int, float]]:
    """(laplace_eigenvalue, largest sup norm over j) per degree, ascending."""
    best = {}
    for sample in samples:
        best[sample.laplace_eigenvalue] = max(best.get(sample.laplace_eigenvalue, 0.0), sample.sup_norm)
    return sorted(best.items())


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    stderr: float


def exponent_fit(samples: Sequence[Tuple[float, float]]) -> ExponentFit:
    """Least-squares slope of log(sup norm) against log(eigenvalue).

    Raises:
        InsufficientDataError: With fewer than 5 samples.
        DegenerateInputError: If the eigenvalues are not distinct.
    """
    if len(samples) < 5:
        raise InsufficientDataError(f"Exponent fit needs at least 5 samples, got {len(samples)}")
    eigenvalues = np.array([s[0] for s in samples], dtype=np.float64)
    norms = np.array([s[1] for s in samples], dtype=np.float64)
    if len(np.unique(eigenvalues)) != len(eigenvalues):
        raise DegenerateInputError("Exponent fit needs distinct eigenvalues")
    if np.any(eigenvalues <= 0) or np.any(norms <= 0):
        raise DegenerateInputError("Exponent fit needs positive eigenvalues and sup norms")
    fit = linregress(np.log(eigenvalues), np.log(norms))
    return ExponentFit(slope=float(fit.slope), intercept=float(fit.intercept), stderr=float(fit.stderr))


def convex_sup_norm(k: int) -> float:
    """sqrt((2k+1)/(4 pi)), the zonal value at the poles."""
    return math.sqrt((2 * k + 1) / FOUR_PI)
