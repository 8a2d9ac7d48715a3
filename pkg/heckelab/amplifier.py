"""
Amplification of a single Hecke eigenform.

For a target form j0 the amplifier puts z_p = eta_j0(p) on admissible primes
p <= sqrt(N) (p = 1 mod 4) and z_{p^2} = -1 on their squares. The amplified
sum

    sum_k sum_j rho(mu - mu_k) |phi_j(x)|^2 |sum_n z_n eta_j(n)|^2

is computed twice: from eigendata, and from Hecke kernels after expanding
eta_j(n) eta_j(m) = sum_{d | (n, m)} d/sqrt(nm) lambda_j(nm/d^2).
"""

import math
from dataclasses import dataclass, field
from math import gcd, isqrt
from typing import Dict, List, Optional, Tuple

import numpy as np
from sympy import divisors, primerange

from heckelab.errors import (
    EnumerationBoundOverflowError,
    InsufficientCoverageError,
    InsufficientDataError,
    MissingLevelError,
)
from heckelab.harmonics import real_harmonics, unit_vector
from heckelab.hecke_so3 import HeckeMaassBasis
from heckelab.spectral_kernel import (
    EigendataProvider,
    SpectralWindow,
    degree_weights,
    hecke_moments,
    laplace_root,
)
from log_service import get_logger

logger = get_logger("Amplifier")


# R(n) for the largest geometric level must still fit in memory
MAX_GEOMETRIC_LEVEL = 10**7


class TrivialCharacter:
    """The trivial character: 1 on divisors and on quaternions."""

    def __call__(self, d: int) -> complex:
        return 1.0

    def on_elements(self, elements: np.ndarray) -> np.ndarray:
        return np.ones(len(elements))


def admissible_primes(limit: int) -> List[int]:
    """Primes p = 1 mod 4 with p <= limit."""
    return [int(p) for p in primerange(5, int(limit) + 1) if p % 4 == 1]


def admissible_prime_count(x: float) -> Tuple[int, float]:
    """Exact count of admissible primes <= x next to x / (2 log x)."""
    return len(admissible_primes(int(x))), x / (2.0 * math.log(x))


def amplifier_levels(N: int) -> Tuple[int, ...]:
    """Levels an amplifier of length N reads: admissible p <= sqrt(N), then their squares."""
    primes = admissible_primes(isqrt(N))
    return tuple(primes) + tuple(p * p for p in primes)


@dataclass(frozen=True, eq=False)
class AmplifierVector:
    """Sparse coefficients z_n, n <= N.

    Attributes:
        N: Length cap.
        entries: n -> z_n, keys ascending.
        source: (k, j0) of the form the amplifier was built from, if any.
    """

    N: int
    entries: Dict[int, complex] = field(default_factory=dict)
    source: Optional[Tuple[int, int]] = None

    @property
    def support(self) -> List[int]:
        return sorted(self.entries)


def _eta(basis: HeckeMaassBasis, n: int) -> np.ndarray:
    if n == 1:
        return np.ones(basis.size)
    if n not in basis.eigenvalues:
        raise MissingLevelError(f"Eigendata for k={basis.k} has no level {n}")
    return basis.eta(n)


def build_amplifier(eigendata: HeckeMaassBasis, j0: int, N: int) -> AmplifierVector:
    """Amplifier targeting basis vector j0.

    Raises:
        InsufficientDataError: If no admissible prime is <= sqrt(N).
        MissingLevelError: If eigendata lacks an admissible prime level.
    """
    primes = admissible_primes(isqrt(N))
    if not primes:
        raise InsufficientDataError(f"No admissible prime p <= sqrt({N})")
    entries: Dict[int, complex] = {}
    for p in primes:
        entries[p] = complex(_eta(eigendata, p)[j0])
    for p in primes:
        entries[p * p] = -1.0 + 0.0j
    return AmplifierVector(N=N, entries=dict(sorted(entries.items())), source=(eigendata.k, j0))


def amplifier_value(z: AmplifierVector, eigendata: HeckeMaassBasis) -> np.ndarray:
    """sum_n z_n eta_j(n) for every basis vector j."""
    total = np.zeros(eigendata.size, dtype=np.complex128)
    for n, coefficient in z.entries.items():
        total += coefficient * _eta(eigendata, n)
    return total


def relation_residual(eigendata: HeckeMaassBasis, p: int) -> float:
    """max over j of |eta_j(p)^2 - eta_j(p^2) - 1|.

    Raises:
        MissingLevelError: If p or p^2 is absent from the eigendata.
    """
    eta_p = _eta(eigendata, p)
    eta_p2 = _eta(eigendata, p * p)
    return float(np.max(np.abs(eta_p**2 - eta_p2 - 1.0)))


def rankin_selberg_ratio(eigendata: HeckeMaassBasis, limit: int) -> np.ndarray:
    """sum over admissible primes p <= limit of eta_j(p)^2, divided by their number."""
    primes = [p for p in admissible_primes(limit) if p in eigendata.eigenvalues]
    if not primes:
        raise MissingLevelError(f"Eigendata for k={eigendata.k} has no admissible prime <= {limit}")
    return sum(eigendata.eta(p) ** 2 for p in primes) / len(primes)


def _check_coverage(z: AmplifierVector, basis: HeckeMaassBasis) -> None:
    missing = [n for n in z.entries if n != 1 and n not in basis.eigenvalues]
    if missing:
        raise InsufficientCoverageError(
            f"Eigendata for k={basis.k} lacks levels {missing} of the amplifier support"
        )


def amplified_sum_spectral(
    x,
    mu: float,
    z: AmplifierVector,
    w: SpectralWindow,
    eigendata: EigendataProvider,
    k_max: int,
) -> float:
    """sum over k <= k_max and j of rho(mu - mu_k) |phi_j(x)|^2 |sum_n z_n eta_j(n)|^2.

    Raises:
        InsufficientCoverageError: If some degree's eigendata lacks a support level.
    """
    point = unit_vector(x)
    terms = []
    for k in range(int(k_max) + 1):
        weight = float(w.rho(mu - laplace_root(k)))
        basis = eigendata(k)
        _check_coverage(z, basis)
        phi = real_harmonics(k, point)[0] @ basis.vectors
        amplified = np.abs(amplifier_value(z, basis)) ** 2
        terms.append(weight * math.fsum(phi * phi * amplified))
    return math.fsum(terms)


@dataclass(frozen=True)
class GeometricTerm:
    """Contribution of one Hecke level to the geometric amplified sum."""

    level: int
    coefficient: complex
    kernel: float


@dataclass(frozen=True, eq=False)
class GeometricAmplifiedSum:
    value: float
    imaginary_part: float
    terms: List[GeometricTerm]


def level_coefficients(
    z: AmplifierVector, character: Optional[TrivialCharacter] = None
) -> Dict[int, complex]:
    """Level L -> sum over n, m, d | (n, m) with nm/d^2 = L of d chi(d)/sqrt(nm) z_n conj(z_m)."""
    character = TrivialCharacter() if character is None else character
    coefficients: Dict[int, complex] = {}
    support = z.support
    for n in support:
        for m in support:
            weight = z.entries[n] * np.conj(z.entries[m]) / math.sqrt(n * m)
            for d in divisors(gcd(n, m)):
                level = n * m // (d * d)
                coefficients[level] = coefficients.get(level, 0.0) + d * character(d) * weight
    return dict(sorted(coefficients.items()))


def amplified_sum_geometric(
    x,
    mu: float,
    z: AmplifierVector,
    w: SpectralWindow,
    k_max: Optional[int] = None,
    character: Optional[TrivialCharacter] = None,
) -> GeometricAmplifiedSum:
    """Amplified sum from Hecke kernels at the composed levels nm/d^2.

    Raises:
        EnumerationBoundOverflowError: If a composed level is too large to enumerate.
    """
    character = TrivialCharacter() if character is None else character
    weights = degree_weights(mu, w, k_max)
    top = len(weights) - 1
    terms: List[GeometricTerm] = []
    total = 0.0 + 0.0j
    for level, coefficient in level_coefficients(z, character).items():
        if level > MAX_GEOMETRIC_LEVEL:
            raise EnumerationBoundOverflowError(f"Level {level} exceeds {MAX_GEOMETRIC_LEVEL}")
        kernel = math.fsum(weights * hecke_moments(level, x, top, character.on_elements))
        terms.append(GeometricTerm(level=level, coefficient=complex(coefficient), kernel=kernel))
        total += coefficient * kernel

    scale = max(1.0, sum(abs(t.coefficient * t.kernel) for t in terms))
    if abs(total.imag) > 1e-9 * scale:
        logger.warning("Geometric amplified sum has imaginary part %.3e", total.imag)
    logger.debug("Geometric amplified sum over %d levels at mu=%g", len(terms), mu)
    return GeometricAmplifiedSum(value=float(total.real), imaginary_part=float(total.imag), terms=terms)


def self_amplification_floor(
    x, mu: float, z: AmplifierVector, w: SpectralWindow, basis: HeckeMaassBasis
) -> float:
    """rho(mu - mu_k0) |phi_j0(x)|^2 (number of admissible p <= sqrt(N))^2 for the source form."""
    if z.source is None:
        raise InsufficientDataError("Amplifier has no source form")
    k, j0 = z.source
    phi = float(real_harmonics(k, unit_vector(x))[0] @ basis.vectors[:, j0])
    count = len(admissible_primes(isqrt(z.N)))
    return float(w.rho(mu - laplace_root(k))) * phi * phi * count * count
