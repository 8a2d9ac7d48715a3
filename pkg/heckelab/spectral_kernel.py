"""
Smoothed spectral projector on the sphere and its kernels.

The window rho = c |eta_check|^2 is built from the standard bump eta
supported in (-delta_s/4, delta_s/4). Its Fourier transform is then
supported in (-delta_s/2, delta_s/2), it is nonnegative everywhere and
positive on [-1, 1]. With mu_k = sqrt(k(k+1)) the projector kernel is

    K(x, y) = sum_k rho(mu - mu_k) (2k+1)/(4 pi) P_k(x . y),

and the Hecke-twisted diagonal is 1/2 sum over alpha in R(n) of K(R_alpha x, x).

Every k-sum here takes an optional degree cap ``k_max``. Without it the sum
runs to the truncation degree, the first k with mu_k - mu beyond the window
grid, where rho has dropped below WINDOW["truncation_rel_tol"] of its peak.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, Optional, Sequence, Union

import numpy as np
from scipy.integrate import quad, simpson
from scipy.interpolate import CubicSpline

from heckelab.errors import (
    DegenerateInputError,
    EmptyLevelError,
    InvalidKTypeError,
    InvalidPointError,
    InvalidWindowError,
)
from heckelab.harmonics import FOUR_PI, legendre_table, real_harmonics, unit_vector
from heckelab.hecke_so3 import HeckeMaassBasis, joint_eigenbasis
from heckelab.quaternion_core import Rn_array, rotation_matrices
from heckelab_config import WINDOW
from log_service import get_logger

logger = get_logger("SpectralKernel")

ArrayLike = Union[float, np.ndarray]
EigendataProvider = Callable[[int], HeckeMaassBasis]


def _bump(x: float, half: float) -> float:
    u = x / half
    if abs(u) >= 1.0:
        return 0.0
    return math.exp(-1.0 / (1.0 - u * u))


def _bump_transform(t: float, half: float, epsabs: float = 1e-18) -> float:
    """eta_check(t) = 2 int_0^half eta(x) cos(x t) dx."""
    if t == 0.0:
        value, _ = quad(_bump, 0.0, half, args=(half,), epsabs=1e-18, epsrel=1e-12, limit=400)
    else:
        value, _ = quad(
            _bump,
            0.0,
            half,
            args=(half,),
            weight="cos",
            wvar=t,
            epsabs=epsabs,
            epsrel=1e-10,
            limit=400,
        )
    return 2.0 * value


@dataclass(frozen=True, eq=False)
class SpectralWindow:
    """Positive window rho with compactly supported Fourier transform.

    Attributes:
        support_half_width: delta_s; supp rho_hat lies in (-delta_s/2, delta_s/2).
        normalization: c in rho = c |eta_check|^2, fixing int rho = 1.
        grid: Sample points t >= 0 of the cached grid.
        transform_values: eta_check on the grid.
        span: Last grid point; rho is treated as zero beyond it.
    """

    support_half_width: float
    normalization: float
    grid: np.ndarray
    transform_values: np.ndarray
    span: float
    _spline: CubicSpline = field(repr=False)

    @property
    def bump_half_width(self) -> float:
        return self.support_half_width / 4.0

    @property
    def peak(self) -> float:
        return float(self.normalization * self.transform_values[0] ** 2)

    def rho(self, t: ArrayLike) -> np.ndarray:
        """Evaluate rho; even, nonnegative, zero past the grid span."""
        t = np.abs(np.asarray(t, dtype=np.float64))
        inside = t <= self.span
        values = self._spline(np.where(inside, t, 0.0))
        return np.where(inside, self.normalization * values * values, 0.0)

    def __call__(self, t: ArrayLike) -> np.ndarray:
        return self.rho(t)

    def rho_hat(self, xi: float) -> float:
        """Fourier transform int rho(t) exp(-i t xi) dt = 2 pi c (eta * eta)(xi)."""
        half = self.bump_half_width
        if abs(xi) >= 2.0 * half:
            return 0.0
        lo, hi = max(-half, xi - half), min(half, xi + half)
        value, _ = quad(lambda x: _bump(x, half) * _bump(x - xi, half), lo, hi, limit=200)
        return 2.0 * math.pi * self.normalization * value

    def integral(self) -> float:
        """int rho over R from the grid samples."""
        samples = self.normalization * self.transform_values**2
        return float(2.0 * simpson(samples, x=self.grid))


def build_window(
    support_half_width: float,
    rel_tol: Optional[float] = None,
    samples_per_period: Optional[int] = None,
    max_periods: Optional[int] = None,
) -> SpectralWindow:
    """Construct the window for a given Fourier support.

    The grid on t >= 0 grows one oscillation period (2 pi / (delta_s/4)) at a
    time until rho stays below rel_tol * rho(0) over a whole period.

    Args:
        support_half_width: delta_s, with 0 < delta_s <= 1.

    Raises:
        InvalidWindowError: If delta_s is out of range or rho is not positive
            on [-1, 1].
    """
    delta = float(support_half_width)
    if not (0.0 < delta <= 1.0):
        raise InvalidWindowError(f"Window support half-width must lie in (0, 1], got {delta}")
    # defaults resolved before the cache so WINDOW changes give a new key
    return _build_window_cached(
        delta,
        float(WINDOW["truncation_rel_tol"] if rel_tol is None else rel_tol),
        int(WINDOW["samples_per_period"] if samples_per_period is None else samples_per_period),
        int(WINDOW["max_periods"] if max_periods is None else max_periods),
    )


@lru_cache(maxsize=16)
def _build_window_cached(
    delta: float, rel_tol: float, samples_per_period: int, max_periods: int
) -> SpectralWindow:
    half = delta / 4.0
    period = 2.0 * math.pi / half
    step = period / samples_per_period

    energy, _ = quad(lambda x: _bump(x, half) ** 2, 0.0, half, epsabs=1e-18, epsrel=1e-12)
    normalization = 1.0 / (2.0 * math.pi * 2.0 * energy)

    values = [_bump_transform(0.0, half)]
    floor = 1e-15 * values[0]
    peak = normalization * values[0] ** 2
    periods = 0
    while periods < max_periods:
        base = len(values)
        values.extend(_bump_transform((base + i) * step, half, floor) for i in range(samples_per_period))
        periods += 1
        tail = normalization * max(v * v for v in values[base:])
        if tail < rel_tol * peak and base * step >= 1.0:
            break
    else:
        logger.warning(
            "Window grid for delta_s=%g stopped at the %d-period cap", delta, max_periods
        )

    grid = step * np.arange(len(values))
    transform_values = np.array(values)
    grid.setflags(write=False)
    transform_values.setflags(write=False)
    spline = CubicSpline(grid, transform_values, bc_type=((1, 0.0), "not-a-knot"))

    window = SpectralWindow(
        support_half_width=delta,
        normalization=normalization,
        grid=grid,
        transform_values=transform_values,
        span=float(grid[-1]),
        _spline=spline,
    )
    near = window.rho(grid[grid <= 1.0])
    if np.min(near) <= 0.0:
        raise InvalidWindowError("Window is not positive on [-1, 1]")
    logger.debug(
        "Window delta_s=%g: %d samples, span %.1f, integral %.12f",
        delta,
        len(values),
        window.span,
        window.integral(),
    )
    return window


def laplace_root(k) -> np.ndarray:
    """mu_k = sqrt(k(k+1))."""
    k = np.asarray(k, dtype=np.float64)
    return np.sqrt(k * (k + 1.0))


def truncation_degree(mu: float, w: SpectralWindow) -> int:
    """Smallest k with mu_k > mu + span; rho(mu - mu_k) vanishes past it."""
    reach = mu + w.span
    k = max(int(math.floor(reach)), 0)
    while k * (k + 1) <= reach * reach:
        k += 1
    return k


def degree_weights(mu: float, w: SpectralWindow, k_max: Optional[int]) -> np.ndarray:
    """rho(mu - mu_k) (2k+1)/(4 pi) for k = 0..k_max."""
    if mu < 0:
        raise DegenerateInputError(f"Spectral parameter must be >= 0, got {mu}")
    top = truncation_degree(mu, w) if k_max is None else int(k_max)
    degrees = np.arange(top + 1)
    return w.rho(mu - laplace_root(degrees)) * (2 * degrees + 1) / FOUR_PI


def kernel_diag(mu: float, w: SpectralWindow, k_max: Optional[int] = None) -> float:
    """K(x, x) = sum_k rho(mu - mu_k)(2k+1)/(4 pi); independent of x."""
    return math.fsum(degree_weights(mu, w, k_max))


def kernel_offdiag(
    mu: float, theta: float, w: SpectralWindow, k_max: Optional[int] = None
) -> float:
    """K(x, y) for points at angle theta.

    Raises:
        InvalidPointError: If theta is not in (0, pi].
    """
    if not (0.0 < theta <= math.pi):
        raise InvalidPointError(f"Angle must lie in (0, pi], got {theta}; use kernel_diag at 0")
    weights = degree_weights(mu, w, k_max)
    legendre = legendre_table(len(weights) - 1, math.cos(theta))[:, 0]
    return math.fsum(weights * legendre)


def _legendre_moments(top: int, cosines: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """S_k = sum_i weights_i P_k(cosines_i) for k = 0..top, one row at a time."""
    moments = np.empty(top + 1)
    before = np.ones_like(cosines)
    moments[0] = math.fsum(weights)
    if top == 0:
        return moments
    current = cosines.copy()
    moments[1] = math.fsum(weights * current)
    for l in range(1, top):
        before, current = current, ((2 * l + 1) * cosines * current - l * before) / (l + 1)
        moments[l + 1] = math.fsum(weights * current)
    return moments


def translate_cosines(n: int, x) -> np.ndarray:
    """(R_alpha x) . x for every alpha in R(n), in lexicographic order."""
    point = unit_vector(x)
    elements = Rn_array(n)
    if len(elements) == 0:
        raise EmptyLevelError(f"R({n}) is empty: levels must be 1 mod 4")
    moved = rotation_matrices(elements) @ point
    return np.clip(moved @ point, -1.0, 1.0)


def trivial_character(elements: np.ndarray) -> np.ndarray:
    return np.ones(len(elements))


def hecke_moments(
    n: int,
    x,
    top: int,
    character: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> np.ndarray:
    """1/2 sum_alpha chi(alpha) P_k((R_alpha x) . x) for k = 0..top."""
    if n < 1 or n % 4 != 1:
        raise EmptyLevelError(f"R({n}) is empty: levels must be 1 mod 4")
    character = trivial_character if character is None else character
    cosines = translate_cosines(n, x)
    weights = 0.5 * np.asarray(character(Rn_array(n)), dtype=np.float64)
    return _legendre_moments(top, cosines, weights)


def hecke_kernel_diag(
    n: int,
    mu: float,
    x,
    w: SpectralWindow,
    k_max: Optional[int] = None,
    character: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> float:
    """Geometric side: 1/2 sum over alpha in R(n) of K(R_alpha x, x).

    Args:
        n: Level, n = 1 mod 4.
        mu: Spectral parameter.
        x: Unit 3-vector.
        w: Window.
        k_max: Optional degree cap.
        character: Optional weight chi(alpha) on the rows of Rn_array(n);
            trivial by default.

    Raises:
        EmptyLevelError: If n is not 1 mod 4.
        InvalidPointError: If x is not a unit vector.
    """
    weights = degree_weights(mu, w, k_max)
    moments = hecke_moments(n, x, len(weights) - 1, character)
    logger.debug("Hecke kernel n=%d mu=%g over %d degrees", n, mu, len(weights))
    return math.fsum(weights * moments)


def _default_provider(n: int) -> EigendataProvider:
    return lambda k: joint_eigenbasis(k, (n,))


def hecke_kernel_diag_spectral(
    n: int,
    mu: float,
    x,
    w: SpectralWindow,
    k_max: int,
    eigendata: Optional[EigendataProvider] = None,
) -> float:
    """Spectral side: sum over k <= k_max, j of rho(mu - mu_k) lambda_j(n) |phi_j(x)|^2.

    Args:
        eigendata: Callable k -> HeckeMaassBasis whose levels include n
            (defaults to joint_eigenbasis(k, (n,))).
    """
    if n < 1 or n % 4 != 1:
        raise EmptyLevelError(f"R({n}) is empty: levels must be 1 mod 4")
    point = unit_vector(x)
    provider = _default_provider(n) if eigendata is None else eigendata
    terms = []
    for k in range(int(k_max) + 1):
        basis = provider(k)
        values = real_harmonics(k, point)[0] @ basis.vectors
        terms.append(
            float(w.rho(mu - laplace_root(k))) * math.fsum(basis.eigenvalues[n] * values * values)
        )
    return math.fsum(terms)


def hecke_kernel_bound_shape(n: int, mu: float) -> float:
    """mu + n sqrt(mu) log(mu), the growth shape for the Hecke-twisted diagonal."""
    return mu + n * math.sqrt(mu) * math.log(mu)


def fit_hecke_kernel_constant(samples: Sequence[Dict[str, float]]) -> float:
    """Smallest C with |value| <= C (mu + n sqrt(mu) log mu) over the samples.

    Each sample is a dict with keys n, mu and value.
    """
    ratios = [abs(s["value"]) / hecke_kernel_bound_shape(int(s["n"]), s["mu"]) for s in samples]
    return max(ratios)


def weyl_count(mu: float) -> int:
    """sum over mu_k <= mu of (2k+1) = (K+1)^2."""
    if mu < 0:
        return 0
    top = int(math.floor(mu))
    while top * (top + 1) > mu * mu:
        top -= 1
    return (top + 1) ** 2


def sharp_window_count(mu: float) -> int:
    """Number of eigenfunctions with mu < mu_k <= mu + 1."""
    return weyl_count(mu + 1.0) - weyl_count(mu)


def sharp_kernel_diag(mu: float) -> float:
    """Diagonal of the sharp projector onto (mu, mu + 1]."""
    return sharp_window_count(mu) / FOUR_PI


def ktype_kernel_diag(
    mu: float, l: int, w: SpectralWindow, k_max: Optional[int] = None
) -> float:
    """Diagonal of the smoothed projector on the K-type l part of L^2(SO(3)).

    Haar probability normalization: sum over k >= |l| of rho(mu - mu_k)(2k+1).

    Raises:
        InvalidKTypeError: If the degree cap excludes every degree k >= |l|.
    """
    top = truncation_degree(mu, w) if k_max is None else int(k_max)
    if top < abs(l):
        raise InvalidKTypeError(f"K-type {l} needs degrees >= {abs(l)}, cap is {top}")
    degrees = np.arange(abs(l), top + 1)
    return math.fsum(w.rho(mu - laplace_root(degrees)) * (2 * degrees + 1))


@dataclass(frozen=True, eq=False)
class KernelScan:
    """Kernel values over a grid of mu (and angles for the off-diagonal mode).

    values has shape (len(mu_grid),) or (len(mu_grid), len(angle_grid)).
    """

    mode: str
    mu_grid: np.ndarray
    values: np.ndarray
    angle_grid: Optional[np.ndarray] = None
    level: Optional[int] = None
    k_max: Optional[int] = None


def kernel_scan(
    mode: str,
    mu_grid: Sequence[float],
    w: SpectralWindow,
    angle_grid: Optional[Sequence[float]] = None,
    level: Optional[int] = None,
    point=None,
    k_max: Optional[int] = None,
) -> KernelScan:
    """Evaluate one kernel mode over a grid.

    Args:
        mode: "diag", "offdiag" or "hecke".
        angle_grid: Angles for "offdiag".
        level: n for "hecke".
        point: x for "hecke" (default north pole).
    """
    mus = np.asarray(mu_grid, dtype=np.float64)
    if mode == "diag":
        values = np.array([kernel_diag(mu, w, k_max) for mu in mus])
    elif mode == "offdiag":
        if angle_grid is None:
            raise DegenerateInputError("Off-diagonal scans need an angle grid")
        angles = np.asarray(angle_grid, dtype=np.float64)
        values = np.array([[kernel_offdiag(mu, t, w, k_max) for t in angles] for mu in mus])
        return KernelScan(mode, mus, values, angle_grid=angles, k_max=k_max)
    elif mode == "hecke":
        if level is None:
            raise DegenerateInputError("Hecke scans need a level")
        x = (0.0, 0.0, 1.0) if point is None else point
        values = np.array([hecke_kernel_diag(level, mu, x, w, k_max) for mu in mus])
    else:
        raise ValueError(f"Unknown kernel mode {mode!r}. Available: diag, offdiag, hecke")
    return KernelScan(mode, mus, values, level=level, k_max=k_max)
