"""
Hecke operators on spherical harmonics of degree k.

T_n f(x) = 1/2 sum over alpha in R(n) of f(alpha . x), as a (2k+1)x(2k+1)
matrix in the real basis of heckelab.harmonics. Representation matrices
are assembled as D(R) = Z(alpha) J Z(beta) J^T Z(gamma) from ZYZ Euler
angles, where Z acts by exact cos/sin blocks and J is the matrix of the
fixed rotation taking the z-axis to the y-axis.

The same matrices describe T_n on every K-type of the degree-k part of
L^2(SO(3)), so the joint eigenvectors below also give the K-type forms
used by heckelab.supnorm.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from heckelab.errors import (
    DegeneracyUnresolvedError,
    DegenerateInputError,
    EigensolverConvergenceError,
    EmptyLevelError,
    NonSymmetricMatrixError,
)
from heckelab.harmonics import (
    real_harmonics,
    sphere_quadrature,
    z_rotate_columns,
    z_rotate_rows,
)
from heckelab.quaternion_core import (
    RotationMatrix,
    Rn_array,
    axis_rotation,
    rotation_matrices,
)
from heckelab_config import RUNTIME, TOLERANCES
from log_service import get_logger

logger = get_logger("HeckeSO3")


@dataclass(frozen=True, eq=False)
class HeckeMatrix:
    """Matrix of T_n on H_k in the real harmonic basis."""

    n: int
    k: int
    entries: np.ndarray

    def eta_scaled(self) -> np.ndarray:
        """T_n / sqrt(n)."""
        return self.entries / math.sqrt(self.n)


@dataclass(frozen=True, eq=False)
class HeckeMaassBasis:
    """Joint eigenbasis of a set of Hecke operators on H_k.

    Attributes:
        k: Degree.
        laplace_eigenvalue: k(k+1).
        levels: Levels the basis diagonalizes.
        eigenvalues: level n -> array of lambda_j(n), indexed by basis vector j.
        vectors: (2k+1, 2k+1) orthogonal matrix, one eigenvector per column.
        clusters: Sizes of the joint eigenspaces left after refinement.
        residual: max over n, j of |T_n v_j - lambda_j(n) v_j|.
    """

    k: int
    laplace_eigenvalue: int
    levels: Tuple[int, ...]
    eigenvalues: Dict[int, np.ndarray]
    vectors: np.ndarray
    clusters: Tuple[int, ...] = field(default=())
    residual: float = 0.0

    @property
    def size(self) -> int:
        return self.vectors.shape[1]

    def eigenvalue(self, n: int, j: int) -> float:
        return float(self.eigenvalues[n][j])

    def eta(self, n: int) -> np.ndarray:
        """Normalized eigenvalues lambda_j(n) / sqrt(n) for every j."""
        return self.eigenvalues[n] / math.sqrt(n)

    def eigenvalue_map(self, j: int) -> Dict[int, float]:
        return {n: float(values[j]) for n, values in self.eigenvalues.items()}


def _as_rotation(R: Union[RotationMatrix, np.ndarray]) -> RotationMatrix:
    if isinstance(R, RotationMatrix):
        return R
    return RotationMatrix(R)


@lru_cache(maxsize=256)
def y_axis_conjugator(k: int) -> np.ndarray:
    """D(Q) for Q = Rx(-pi/2), the rotation taking e_z to e_y.

    Exact: the quadrature integrates products of two degree-k harmonics
    without error.
    """
    points, weights = sphere_quadrature(k)
    q = axis_rotation("x", -math.pi / 2).matrix
    original = real_harmonics(k, points)
    moved = real_harmonics(k, points @ q)
    conjugator = (original * weights[:, None]).T @ moved
    conjugator.setflags(write=False)
    return conjugator


def _euler_zyz_batch(mats: np.ndarray) -> np.ndarray:
    """Vectorized RotationMatrix.euler_zyz for an (N, 3, 3) stack."""
    sin_beta = np.hypot(mats[:, 0, 2], mats[:, 1, 2])
    beta = np.arctan2(sin_beta, mats[:, 2, 2])
    regular = sin_beta > 1e-12
    alpha = np.where(
        regular,
        np.arctan2(mats[:, 1, 2], mats[:, 0, 2]),
        np.where(
            mats[:, 2, 2] > 0,
            np.arctan2(mats[:, 1, 0], mats[:, 0, 0]),
            np.arctan2(-mats[:, 1, 0], mats[:, 1, 1]),
        ),
    )
    gamma = np.where(regular, np.arctan2(mats[:, 2, 1], -mats[:, 2, 0]), 0.0)
    return np.stack([alpha, beta, gamma], axis=1)


def _rep_from_euler(k: int, alpha: float, beta: float, gamma: float) -> np.ndarray:
    conjugator = y_axis_conjugator(k)
    inner = z_rotate_columns(conjugator.T, gamma)
    inner = z_rotate_rows(inner, beta)
    return z_rotate_rows(conjugator @ inner, alpha)


def rotation_rep_matrix(k: int, R: Union[RotationMatrix, np.ndarray]) -> np.ndarray:
    """Matrix of F -> F(R^-1 x) on H_k.

    Orthogonal and multiplicative in R. For k = 1 the basis (z, x, y)
    makes this a permuted copy of R itself.

    Args:
        k: Degree, k >= 0.
        R: Rotation (validated if given as an array).

    Raises:
        InvalidRotationError: If R is not orthogonal with determinant +1.
    """
    if k < 0:
        raise DegenerateInputError(f"Degree must be >= 0, got {k}")
    rotation = _as_rotation(R)
    if k == 0:
        return np.ones((1, 1))
    return _rep_from_euler(k, *rotation.euler_zyz())


def _hecke_rotations(n: int) -> np.ndarray:
    """Rotations of R(n) with a0 > 0, one per pair +-alpha, in lexicographic order."""
    elements = Rn_array(n)
    return rotation_matrices(elements[elements[:, 0] > 0])


@lru_cache(maxsize=512)
def hecke_matrix(n: int, k: int) -> HeckeMatrix:
    """Matrix of T_n on H_k.

    Args:
        n: Level, n = 1 mod 4.
        k: Degree.

    Returns:
        The HeckeMatrix; entries are read-only.

    Raises:
        EmptyLevelError: If n is not 1 mod 4 (R(n) is empty).
    """
    if n < 1 or n % 4 != 1:
        raise EmptyLevelError(f"R({n}) is empty: levels must be 1 mod 4")
    if k < 0:
        raise DegenerateInputError(f"Degree must be >= 0, got {k}")

    rotations = _hecke_rotations(n)
    if k == 0:
        entries = np.full((1, 1), float(len(rotations)))
    else:
        entries = np.zeros((2 * k + 1, 2 * k + 1))
        for alpha, beta, gamma in _euler_zyz_batch(rotations):
            entries += _rep_from_euler(k, alpha, beta, gamma)
    entries.setflags(write=False)
    logger.debug("Built T_%d on H_%d from %d rotations", n, k, len(rotations))
    return HeckeMatrix(n=n, k=k, entries=entries)


def character(k: int, angle) -> np.ndarray:
    """sin((2k+1) t/2) / sin(t/2), the trace of a rotation by t on H_k."""
    t = np.asarray(angle, dtype=np.float64)
    half = np.sin(t / 2.0)
    safe = np.where(np.abs(half) < 1e-12, 1.0, half)
    return np.where(np.abs(half) < 1e-12, 2.0 * k + 1.0, np.sin((2 * k + 1) * t / 2.0) / safe)


def hecke_trace_formula(n: int, k: int) -> float:
    """trace(T_n on H_k) from rotation angles alone."""
    if n < 1 or n % 4 != 1:
        raise EmptyLevelError(f"R({n}) is empty: levels must be 1 mod 4")
    elements = Rn_array(n)
    positive = elements[elements[:, 0] > 0]
    angles = 2.0 * np.arccos(np.clip(positive[:, 0] / math.sqrt(n), -1.0, 1.0))
    return float(np.sum(character(k, angles)))


def _offdiag_norm(a: np.ndarray) -> float:
    # summed directly: ||A||^2 - ||diag A||^2 bottoms out near sqrt(eps) ||A||
    return float(math.sqrt(2.0) * np.linalg.norm(np.triu(a, 1)))


def symmetric_eigen(
    M,
    tol: Optional[float] = None,
    max_sweeps: Optional[int] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigensolver for real symmetric matrices.

    Args:
        M: Square symmetric matrix.
        tol: Stop once the off-diagonal Frobenius norm is <= tol * ||M||_F.
        max_sweeps: Upper bound on full sweeps.

    Returns:
        (eigenvalues ascending, eigenvectors as columns).

    Raises:
        NonSymmetricMatrixError: If M is not square or not symmetric within
            TOLERANCES["symmetry"].
        EigensolverConvergenceError: If the off-diagonal norm is still above
            tol * ||M||_F after max_sweeps sweeps.
    """
    tol = TOLERANCES["jacobi_offdiag"] if tol is None else tol
    max_sweeps = TOLERANCES["jacobi_max_sweeps"] if max_sweeps is None else max_sweeps

    a = np.array(M, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonSymmetricMatrixError(f"Expected a square matrix, got shape {a.shape}")
    scale_max = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    asymmetry = float(np.max(np.abs(a - a.T))) if a.size else 0.0
    if asymmetry > TOLERANCES["symmetry"] * scale_max:
        raise NonSymmetricMatrixError(f"Matrix asymmetry {asymmetry:.3e} exceeds tolerance")

    a = 0.5 * (a + a.T)
    size = a.shape[0]
    v = np.eye(size)
    scale = float(np.linalg.norm(a))
    if size < 2 or scale == 0.0:
        return np.diag(a).copy(), v

    skip = 1e-18 * scale
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        if _offdiag_norm(a) <= tol * scale:
            sweeps -= 1
            break
        for p in range(size - 1):
            for q in range(p + 1, size):
                apq = a[p, q]
                if abs(apq) <= skip:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 1.0 / (2.0 * theta)
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0

                vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
    else:
        remaining = _offdiag_norm(a)
        if remaining > tol * scale:
            logger.error(
                "Jacobi stopped after %d sweeps with off-diagonal norm %.3e", max_sweeps, remaining
            )
            raise EigensolverConvergenceError(
                f"Jacobi did not converge in {max_sweeps} sweeps: off-diagonal norm {remaining:.3e} "
                f"exceeds {tol:.1e} * {scale:.3e}",
                {"size": size, "sweeps": max_sweeps, "offdiag_norm": remaining, "target": tol * scale},
            )

    logger.debug("Jacobi converged on a %dx%d matrix in %d sweeps", size, size, sweeps)
    eigenvalues = np.diag(a).copy()
    order = np.argsort(eigenvalues, kind="stable")
    return eigenvalues[order], v[:, order]


def split_clusters(values: np.ndarray, gap: Optional[float] = None) -> List[np.ndarray]:
    """Group sorted eigenvalues whose successive gaps are below gap * max(1, max|value|)."""
    gap = TOLERANCES["cluster_gap"] if gap is None else gap
    if values.size == 0:
        return []
    threshold = gap * max(1.0, float(np.max(np.abs(values))))
    breaks = np.nonzero(np.diff(values) >= threshold)[0] + 1
    return np.split(np.arange(values.size), breaks)


def _refine(
    block: np.ndarray, operators: Sequence[np.ndarray], depth: int
) -> Tuple[List[np.ndarray], List[int]]:
    """Split a cluster basis by the operators from depth onward."""
    if block.shape[1] == 1 or depth == len(operators):
        return [block], [block.shape[1]]
    restricted = block.T @ operators[depth] @ block
    values, rotation = symmetric_eigen(0.5 * (restricted + restricted.T))
    rotated = block @ rotation
    columns: List[np.ndarray] = []
    sizes: List[int] = []
    for members in split_clusters(values):
        sub_columns, sub_sizes = _refine(rotated[:, members], operators, depth + 1)
        columns.extend(sub_columns)
        sizes.extend(sub_sizes)
    return columns, sizes


def _combination_weights(count: int, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).uniform(0.5, 1.5, size=count)


@lru_cache(maxsize=128)
def _joint_eigenbasis_cached(
    k: int, levels: Tuple[int, ...], seed: int, tolerances: Tuple[Tuple[str, float], ...]
) -> HeckeMaassBasis:
    # tolerances is only part of the cache key; the body reads the live TOLERANCES it mirrors
    operators = [hecke_matrix(n, k).eta_scaled() for n in levels]
    weights = _combination_weights(len(levels), seed)
    combination = sum(w * op for w, op in zip(weights, operators))

    values, vectors = symmetric_eigen(combination)
    columns: List[np.ndarray] = []
    sizes: List[int] = []
    for members in split_clusters(values):
        sub_columns, sub_sizes = _refine(vectors[:, members], operators, 0)
        columns.extend(sub_columns)
        sizes.extend(sub_sizes)
    basis = np.concatenate(columns, axis=1)

    eigenvalues: Dict[int, np.ndarray] = {}
    residual = 0.0
    for n in levels:
        image = hecke_matrix(n, k).entries @ basis
        lambdas = np.einsum("ij,ij->j", basis, image)
        residual = max(residual, float(np.max(np.linalg.norm(image - basis * lambdas, axis=0))))
        lambdas.setflags(write=False)
        eigenvalues[n] = lambdas

    degenerate = tuple(size for size in sizes if size > 1)
    if residual > TOLERANCES["joint_residual"]:
        diagnostics = {
            "k": k,
            "levels": list(levels),
            "residual": residual,
            "cluster_sizes": list(sizes),
        }
        raise DegeneracyUnresolvedError(
            f"Joint residual {residual:.3e} on H_{k} exceeds {TOLERANCES['joint_residual']:.1e}",
            diagnostics,
        )
    if degenerate:
        logger.debug("H_%d keeps joint eigenspaces of sizes %s", k, degenerate)

    basis.setflags(write=False)
    return HeckeMaassBasis(
        k=k,
        laplace_eigenvalue=k * (k + 1),
        levels=levels,
        eigenvalues=eigenvalues,
        vectors=basis,
        clusters=tuple(sizes),
        residual=residual,
    )


def joint_eigenbasis(
    k: int, levels: Sequence[int], seed: Optional[int] = None
) -> HeckeMaassBasis:
    """Orthonormal basis of H_k diagonalizing every T_n, n in levels.

    A seeded random combination of the normalized operators is diagonalized
    first; every eigenvalue cluster is then split by the next operator in
    turn. Clusters that survive all operators are joint eigenspaces and are
    kept (reported in ``clusters``).

    Args:
        k: Degree.
        levels: Levels, each 1 mod 4.
        seed: Seed for the combination weights (default RUNTIME["seed"]).

    Raises:
        EmptyLevelError: If a level is not 1 mod 4.
        DegeneracyUnresolvedError: If the joint residual stays above
            TOLERANCES["joint_residual"].
        EigensolverConvergenceError: If a Jacobi solve hits its sweep cap.
    """
    unique = tuple(dict.fromkeys(int(n) for n in levels))
    if not unique:
        raise EmptyLevelError("joint_eigenbasis needs at least one level")
    for n in unique:
        if n < 1 or n % 4 != 1:
            raise EmptyLevelError(f"R({n}) is empty: levels must be 1 mod 4")
    seed = RUNTIME["seed"] if seed is None else int(seed)
    return _joint_eigenbasis_cached(k, unique, seed, tuple(sorted(TOLERANCES.items())))


def composition_residual(r: int, s: int, k: int) -> float:
    """max |T_r T_s - sum_{d | (r, s)} d T_{rs/d^2}| on H_k."""
    product = hecke_matrix(r, k).entries @ hecke_matrix(s, k).entries
    g = math.gcd(r, s)
    expected = sum(
        d * hecke_matrix(r * s // (d * d), k).entries
        for d in range(1, g + 1)
        if g % d == 0
    )
    return float(np.max(np.abs(product - expected)))


def commutator_norm(r: int, s: int, k: int) -> float:
    """||T_r T_s - T_s T_r||_F / (||T_r||_F ||T_s||_F)."""
    a = hecke_matrix(r, k).entries
    b = hecke_matrix(s, k).entries
    return float(np.linalg.norm(a @ b - b @ a) / (np.linalg.norm(a) * np.linalg.norm(b)))
