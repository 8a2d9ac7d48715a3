"""
Exact quaternion arithmetic.

Two families of integral quaternions are handled here:

* Lipschitz quaternions a0 + a1 i + a2 j + a3 k of the definite Hamilton
  algebra, with the norm-n strata R(n) that drive the Hecke operators on
  the sphere, and their images in SU(2) and SO(3).
* Elements of the natural order Z + Zw + ZW + ZwW of an indefinite algebra
  (a, b) over Q (w^2 = a, W^2 = b, wW = -Ww), with the embedding theta into
  2x2 real matrices that acts on the upper half plane.
"""

import math
from dataclasses import dataclass
from math import isqrt
from typing import Iterator, List, Tuple

import numpy as np
from sympy import factorint

from heckelab.errors import (
    ArithmeticOverflowError,
    DegenerateInputError,
    InvalidRotationError,
)
from heckelab_config import TOLERANCES
from log_service import get_logger

logger = get_logger("QuaternionCore")

INT64_MAX = 2**63 - 1


def _checked(value: int) -> int:
    """Return value unchanged, or raise if it leaves the signed 64-bit range."""
    if value > INT64_MAX or value < -INT64_MAX - 1:
        raise ArithmeticOverflowError(f"Exact integer {value} overflows int64")
    return value


@dataclass(frozen=True, order=True)
class Quaternion:
    """Lipschitz quaternion with exact integer coefficients of 1, i, j, k."""

    a0: int
    a1: int
    a2: int
    a3: int

    def __post_init__(self):
        for value in (self.a0, self.a1, self.a2, self.a3):
            _checked(int(value))

    @classmethod
    def from_tuple(cls, coefficients) -> "Quaternion":
        a0, a1, a2, a3 = (int(c) for c in coefficients)
        return cls(a0, a1, a2, a3)

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return (self.a0, self.a1, self.a2, self.a3)

    def norm(self) -> int:
        """N(q) = q * conj(q) = a0^2 + a1^2 + a2^2 + a3^2."""
        return _checked(self.a0**2 + self.a1**2 + self.a2**2 + self.a3**2)

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.a0, -self.a1, -self.a2, -self.a3)

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.a0, -self.a1, -self.a2, -self.a3)

    def __mul__(self, other: "Quaternion") -> "Quaternion":
        return multiply(self, other)

    def __str__(self) -> str:
        return f"{self.a0},{self.a1},{self.a2},{self.a3}"


def multiply(q: Quaternion, r: Quaternion) -> Quaternion:
    """Exact Hamilton product q*r with i^2 = j^2 = -1 and ij = -ji = k.

    Raises:
        ArithmeticOverflowError: If a coefficient leaves the int64 range.
    """
    w = q.a0 * r.a0 - q.a1 * r.a1 - q.a2 * r.a2 - q.a3 * r.a3
    x = q.a0 * r.a1 + q.a1 * r.a0 + q.a2 * r.a3 - q.a3 * r.a2
    y = q.a0 * r.a2 - q.a1 * r.a3 + q.a2 * r.a0 + q.a3 * r.a1
    z = q.a0 * r.a3 + q.a1 * r.a2 - q.a2 * r.a1 + q.a3 * r.a0
    return Quaternion(_checked(w), _checked(x), _checked(y), _checked(z))


def _even_range(bound: int) -> range:
    """Even integers e with |e| <= bound."""
    start = -(bound - (bound % 2))
    return range(start, bound + 1, 2)


def iter_Rn(n: int) -> Iterator[Quaternion]:
    """Yield R(n) in lexicographic order of (a0, a1, a2, a3).

    R(n) = {a in H(Z): N(a) = n, a0 odd, a1, a2, a3 even}.
    """
    if n < 1:
        raise DegenerateInputError(f"R(n) needs n >= 1, got {n}")

    root = isqrt(n)
    start = -root if root % 2 == 1 else -(root - 1)
    for a0 in range(start, root + 1, 2):
        rest0 = n - a0 * a0
        for a1 in _even_range(isqrt(rest0)):
            rest1 = rest0 - a1 * a1
            for a2 in _even_range(isqrt(rest1)):
                rest2 = rest1 - a2 * a2
                a3 = isqrt(rest2)
                if a3 * a3 != rest2 or a3 % 2:
                    continue
                if a3 == 0:
                    yield Quaternion(a0, a1, a2, 0)
                else:
                    yield Quaternion(a0, a1, a2, -a3)
                    yield Quaternion(a0, a1, a2, a3)


def enumerate_Rn(n: int) -> List[Quaternion]:
    """All elements of R(n), sorted lexicographically.

    The list is empty unless n = 1 mod 4 and is closed under conjugation
    and negation.

    Args:
        n: Norm, n >= 1.

    Returns:
        The elements of R(n).
    """
    elements = list(iter_Rn(n))
    logger.debug("R(%d) has %d elements", n, len(elements))
    return elements


def Rn_array(n: int) -> np.ndarray:
    """R(n) as an (|R(n)|, 4) int64 array, vectorized over a0 and a1.

    Same set and order as enumerate_Rn; used where |R(n)| runs to tens of
    thousands (composite levels of amplified sums).
    """
    if n < 1:
        raise DegenerateInputError(f"R(n) needs n >= 1, got {n}")
    if n % 4 != 1:
        return np.zeros((0, 4), dtype=np.int64)

    root = isqrt(n)
    evens = np.arange(-(root - root % 2), root + 1, 2, dtype=np.int64)
    a1, a2 = np.meshgrid(evens, evens, indexing="ij")
    a1, a2 = a1.ravel(), a2.ravel()

    blocks = []
    start = -root if root % 2 == 1 else -(root - 1)
    for a0 in range(start, root + 1, 2):
        rest = n - a0 * a0 - a1 * a1 - a2 * a2
        keep = rest >= 0
        rest_k, a1_k, a2_k = rest[keep], a1[keep], a2[keep]
        a3 = np.floor(np.sqrt(rest_k.astype(np.float64))).astype(np.int64)
        # correct the float square root by one step either way
        a3 = np.where((a3 + 1) ** 2 <= rest_k, a3 + 1, a3)
        a3 = np.where(a3**2 > rest_k, a3 - 1, a3)
        hit = (a3 * a3 == rest_k) & (a3 % 2 == 0)
        a1_h, a2_h, a3_h = a1_k[hit], a2_k[hit], a3[hit]
        for sign, mask in ((-1, a3_h > 0), (1, np.ones(a3_h.shape, dtype=bool))):
            blocks.append(
                np.stack(
                    [
                        np.full(int(mask.sum()), a0, dtype=np.int64),
                        a1_h[mask],
                        a2_h[mask],
                        sign * a3_h[mask],
                    ],
                    axis=1,
                )
            )

    if not blocks:
        return np.zeros((0, 4), dtype=np.int64)
    stacked = np.concatenate(blocks, axis=0)
    order = np.lexsort(stacked.T[::-1])
    return stacked[order]


@dataclass(frozen=True)
class SU2Element:
    """Unit quaternion u = q / sqrt(N(q)) with floating coordinates."""

    w: float
    x: float
    y: float
    z: float

    def __post_init__(self):
        total = self.w**2 + self.x**2 + self.y**2 + self.z**2
        if abs(total - 1.0) > 1e-12:
            raise DegenerateInputError(
                f"SU(2) coordinates must have unit square sum, got {total!r}"
            )

    @classmethod
    def from_quaternion(cls, q: Quaternion) -> "SU2Element":
        """u_q = q / sqrt(N(q))."""
        norm = q.norm()
        if norm == 0:
            raise DegenerateInputError("The zero quaternion has no unit image")
        coords = np.array(q.as_tuple(), dtype=np.float64)
        coords /= np.linalg.norm(coords)
        return cls(*(float(c) for c in coords))

    def rotation(self) -> "RotationMatrix":
        """Image in SO(3) of v -> u v conj(u) on pure quaternions."""
        w, x, y, z = self.w, self.x, self.y, self.z
        matrix = np.array(
            [
                [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
                [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
                [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
            ]
        )
        return RotationMatrix(matrix)


class RotationMatrix:
    """A proper rotation of R^3, validated at construction."""

    def __init__(self, matrix, tol: float = None):
        tol = TOLERANCES["rotation"] if tol is None else tol
        matrix = np.array(matrix, dtype=np.float64)
        if matrix.shape != (3, 3):
            raise InvalidRotationError(f"Expected a 3x3 matrix, got {matrix.shape}")
        if np.max(np.abs(matrix.T @ matrix - np.eye(3))) > tol:
            raise InvalidRotationError("Matrix is not orthogonal")
        if abs(np.linalg.det(matrix) - 1.0) > tol:
            raise InvalidRotationError("Matrix does not have determinant +1")
        matrix.setflags(write=False)
        self.matrix = matrix

    def __matmul__(self, other: "RotationMatrix") -> "RotationMatrix":
        product = self.matrix @ other.matrix
        # re-orthonormalize so long products stay inside the validator's tolerance
        u, _, vt = np.linalg.svd(product)
        return RotationMatrix(u @ vt)

    def transpose(self) -> "RotationMatrix":
        return RotationMatrix(self.matrix.T)

    def angle(self) -> float:
        """Rotation angle in [0, pi]."""
        cosine = (np.trace(self.matrix) - 1.0) / 2.0
        return float(np.arccos(np.clip(cosine, -1.0, 1.0)))

    def euler_zyz(self) -> Tuple[float, float, float]:
        """Angles (alpha, beta, gamma) with R = Rz(alpha) Ry(beta) Rz(gamma)."""
        m = self.matrix
        sin_beta = math.hypot(m[0, 2], m[1, 2])
        beta = math.atan2(sin_beta, m[2, 2])
        if sin_beta > 1e-12:
            alpha = math.atan2(m[1, 2], m[0, 2])
            gamma = math.atan2(m[2, 1], -m[2, 0])
        elif m[2, 2] > 0:
            alpha, gamma = math.atan2(m[1, 0], m[0, 0]), 0.0
        else:
            alpha, gamma = math.atan2(-m[1, 0], m[1, 1]), 0.0
        return alpha, beta, gamma

    def __repr__(self) -> str:
        return f"RotationMatrix({self.matrix.tolist()!r})"


def axis_rotation(axis: str, angle: float) -> RotationMatrix:
    """Rotation by angle about the x, y or z coordinate axis."""
    c, s = math.cos(angle), math.sin(angle)
    if axis == "x":
        matrix = [[1, 0, 0], [0, c, -s], [0, s, c]]
    elif axis == "y":
        matrix = [[c, 0, s], [0, 1, 0], [-s, 0, c]]
    elif axis == "z":
        matrix = [[c, -s, 0], [s, c, 0], [0, 0, 1]]
    else:
        raise ValueError(f"Unknown axis {axis!r}")
    return RotationMatrix(matrix)


def rotation_of(q: Quaternion) -> RotationMatrix:
    """SO(3) image of q / sqrt(N(q)) under the adjoint covering.

    Raises:
        DegenerateInputError: For the zero quaternion.
    """
    return SU2Element.from_quaternion(q).rotation()


def rotation_matrices(coefficients: np.ndarray) -> np.ndarray:
    """Batched rotation_of for an (N, 4) array of nonzero quaternions.

    Returns:
        (N, 3, 3) float array; no per-element validation.
    """
    unit = np.asarray(coefficients, dtype=np.float64)
    unit = unit / np.linalg.norm(unit, axis=1, keepdims=True)
    w, x, y, z = unit.T
    return np.stack(
        [
            np.stack([1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)], axis=-1),
            np.stack([2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)], axis=-1),
            np.stack([2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)], axis=-1),
        ],
        axis=1,
    )


def _is_squarefree(value: int) -> bool:
    if value in (1, -1):
        return True
    return all(exponent == 1 for exponent in factorint(abs(value)).values())


@dataclass(frozen=True)
class IndefAlgebra:
    """Quaternion algebra (a, b) over Q with w^2 = a, W^2 = b, wW = -Ww."""

    a: int
    b: int

    def __post_init__(self):
        if self.a <= 0:
            raise DegenerateInputError(f"Structure constant a must be > 0, got {self.a}")
        if self.b == 0:
            raise DegenerateInputError("Structure constant b must be nonzero")
        if not _is_squarefree(self.a) or not _is_squarefree(self.b):
            raise DegenerateInputError(
                f"Structure constants must be squarefree, got ({self.a}, {self.b})"
            )

    def element(self, x0: int, x1: int, x2: int, x3: int) -> "OrderElement":
        return OrderElement(self, int(x0), int(x1), int(x2), int(x3))

    def norm_form(self, x0, x1, x2, x3):
        """Reduced norm x0^2 - a x1^2 - b x2^2 + ab x3^2 (works on arrays)."""
        return x0 * x0 - self.a * x1 * x1 - self.b * x2 * x2 + self.a * self.b * x3 * x3

    def theta_basis(self) -> np.ndarray:
        """theta(1), theta(w), theta(W), theta(wW) stacked as a (4, 2, 2) array."""
        root = math.sqrt(self.a)
        return np.array(
            [
                [[1.0, 0.0], [0.0, 1.0]],
                [[-root, 0.0], [0.0, root]],
                [[0.0, 1.0], [float(self.b), 0.0]],
                [[0.0, -root], [self.b * root, 0.0]],
            ]
        )


@dataclass(frozen=True)
class OrderElement:
    """x0 + x1 w + x2 W + x3 wW in the natural order of an IndefAlgebra."""

    algebra: IndefAlgebra
    x0: int
    x1: int
    x2: int
    x3: int

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return (self.x0, self.x1, self.x2, self.x3)

    def norm(self) -> int:
        return _checked(self.algebra.norm_form(self.x0, self.x1, self.x2, self.x3))

    def trace(self) -> int:
        return 2 * self.x0

    def conjugate(self) -> "OrderElement":
        return OrderElement(self.algebra, self.x0, -self.x1, -self.x2, -self.x3)

    def __mul__(self, other: "OrderElement") -> "OrderElement":
        if other.algebra != self.algebra:
            raise DegenerateInputError("Cannot multiply elements of different algebras")
        a, b = self.algebra.a, self.algebra.b
        x0, x1, x2, x3 = self.as_tuple()
        y0, y1, y2, y3 = other.as_tuple()
        z0 = x0 * y0 + a * x1 * y1 + b * x2 * y2 - a * b * x3 * y3
        z1 = x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2
        z2 = x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1
        z3 = x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1
        return OrderElement(
            self.algebra, _checked(z0), _checked(z1), _checked(z2), _checked(z3)
        )


def theta_embed(x: OrderElement) -> np.ndarray:
    """Embedding of the algebra into M(2, R).

    theta(x) = [[x0 - x1 sqrt(a), x2 - x3 sqrt(a)],
                [b (x2 + x3 sqrt(a)), x0 + x1 sqrt(a)]]

    theta is a ring homomorphism with det(theta(x)) = N(x) and
    theta(conj(x)) = adj(theta(x)).
    """
    coefficients = np.array(x.as_tuple(), dtype=np.float64)
    return np.tensordot(coefficients, x.algebra.theta_basis(), axes=1)
