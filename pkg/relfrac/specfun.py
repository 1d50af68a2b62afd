# -*- coding: utf-8 -*-

"""Scalar special functions and the constants of the relativistic operator.

The functions accept scalars or numpy arrays for the radial argument and
return the same shape. Orders are scalars.
"""

from dataclasses import dataclass
import functools
import logging
import math

import numpy as np
from scipy import special

from .errors import ConfigurationError, DomainError

logger = logging.getLogger(__name__)

#: Radius above which K_nu is evaluated from its asymptotic series.
SWITCH_RADIUS = 25.0

#: Number of trapezoid panels for the integral representation of K_nu.
QUADRATURE_PANELS = 400

# The integrand is cut where it has dropped by exp(-40) from its peak.
_CUTOFF = 40.0
_LOG_MAX = math.log(np.finfo(float).max)


@dataclass(frozen=True)
class OperatorConstants:
    """The constants attached to one choice of (N, s, m).

    Attributes
    ----------
    N : int
        The spatial dimension.
    s : float
        The fractional order, 0 < s < 1.
    m : float
        The mass, m > 0.
    sigma_s : float
        The trace constant 2^{1-2s} Γ(1-s)/Γ(s).
    c_ns : float
        The constant C(N, s) of the singular-integral representation.
    two_star_s : float
        The critical exponent 2N/(N - 2s).
    gamma_embed : float
        The exponent 1 + 2/(N - 2s) of the weighted embedding of the
        extension space.
    """

    N: int
    s: float
    m: float
    sigma_s: float
    c_ns: float
    two_star_s: float
    gamma_embed: float

    @property
    def nu(self):
        """The Bessel order (N + 2s)/2 of the jump and Poisson kernels."""
        return 0.5 * (self.N + 2 * self.s)

    @property
    def m2s(self):
        """m^{2s}, the bottom of the symbol."""
        return self.m ** (2 * self.s)


def gamma_fn(x):
    """Γ(x) for x > 0.

    Parameters
    ----------
    x : float or numpy.ndarray
        The argument(s), all positive.

    Returns
    -------
    float or numpy.ndarray
    """
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError(f"gamma_fn requires x > 0, got {x.min()}")
    result = special.gamma(x)
    return float(result) if result.ndim == 0 else result


def _is_half_integer(nu):
    twice = 2.0 * nu
    n = round(twice)
    return abs(twice - n) < 1.0e-14 and n % 2 == 1


def _k_half_integer(nu, r):
    """Closed form K_{n+1/2}(r) = sqrt(pi/2r) e^{-r} Σ (n+k)!/(k!(n-k)!) (2r)^{-k}."""
    n = int(round(nu - 0.5))
    x = 1.0 / (2.0 * r)
    total = np.zeros_like(r)
    for k in range(n, -1, -1):
        coefficient = math.factorial(n + k) / math.factorial(n - k)
        total = total * x + coefficient / math.factorial(k)
    return np.sqrt(np.pi / (2.0 * r)) * np.exp(-r) * total


def _k_quadrature(nu, r):
    """K_nu(r) = ∫_0^∞ exp(-r cosh t) cosh(nu t) dt by the trapezoid rule.

    The integrand is handled in log space relative to its peak so that
    neither large orders nor tiny radii overflow before the final scaling.
    """
    t_peak = np.arcsinh(nu / r)
    g_peak = nu * t_peak - r * np.cosh(t_peak)
    target = g_peak - _CUTOFF

    def g(t):
        return nu * t - r * np.cosh(t)

    lo = t_peak.copy()
    hi = t_peak + 1.0
    for _ in range(64):
        short = g(hi) > target
        if not np.any(short):
            break
        hi = np.where(short, hi + 2.0 * (hi - lo), hi)
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        above = g(mid) > target
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    end = hi

    steps = np.linspace(0.0, 1.0, QUADRATURE_PANELS + 1)
    t = end[:, None] * steps[None, :]
    log_f = nu * t - r[:, None] * np.cosh(t) - g_peak[:, None]
    f = np.exp(log_f) * 0.5 * (1.0 + np.exp(-2.0 * nu * t))
    f[:, 0] *= 0.5
    f[:, -1] *= 0.5
    total = f.sum(axis=1) * end / QUADRATURE_PANELS

    log_k = g_peak + np.log(total)
    saturated = log_k > _LOG_MAX
    if np.any(saturated):
        logger.warning(
            f"K_{nu}(r) overflows for {saturated.sum()} radii down to "
            f"r = {r[saturated].min():.3e}; saturating at the largest float"
        )
    return np.where(saturated, np.finfo(float).max, np.exp(np.minimum(log_k, _LOG_MAX)))


def _k_asymptotic(nu, r):
    """Large-r series, truncated at its smallest term."""
    mu4 = 4.0 * nu * nu
    total = np.ones_like(r)
    term = np.ones_like(r)
    active = np.ones(r.shape, dtype=bool)
    for k in range(1, 120):
        new = term * (mu4 - (2 * k - 1) ** 2) / (8.0 * k * r)
        active &= np.abs(new) < np.abs(term)
        total += np.where(active, new, 0.0)
        term = new
        if not np.any(active & (np.abs(new) > 1.0e-17 * np.abs(total))):
            break
    return np.sqrt(np.pi / (2.0 * r)) * np.exp(-r) * total


def bessel_k(nu, r):
    """The modified Bessel function of the third kind K_nu(r).

    Half-integer orders use the closed form. Other orders use the integral
    representation for r <= SWITCH_RADIUS and the asymptotic series beyond.

    Parameters
    ----------
    nu : float
        The order; K is even in nu so the absolute value is used.
    r : float or numpy.ndarray
        The radii, all positive.

    Returns
    -------
    float or numpy.ndarray
    """
    nu = abs(float(nu))
    r = np.asarray(r, dtype=float)
    if np.any(~(r > 0)):
        raise DomainError("bessel_k requires r > 0")
    shape = r.shape
    flat = r.reshape(-1)
    out = np.empty_like(flat)

    if _is_half_integer(nu):
        out[:] = _k_half_integer(nu, flat)
    else:
        near = flat <= SWITCH_RADIUS
        idx = np.flatnonzero(near)
        for start in range(0, idx.size, 2048):
            chunk = idx[start : start + 2048]
            out[chunk] = _k_quadrature(nu, flat[chunk])
        if np.any(~near):
            out[~near] = _k_asymptotic(nu, flat[~near])

    if len(shape) == 0:
        return float(out[0])
    return out.reshape(shape)


def theta_profile(s, r):
    """The extension profile θ(r) = (2/Γ(s)) (r/2)^s K_s(r), with θ(0) = 1.

    θ solves θ'' + ((1 - 2s)/r) θ' - θ = 0 with θ(0) = 1 and θ(∞) = 0.
    """
    if not 0.0 < s < 1.0:
        raise DomainError(f"theta_profile requires 0 < s < 1, got s = {s}")
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("theta_profile requires r >= 0")
    out = np.ones_like(r, dtype=float)
    positive = r > 0
    if np.any(positive):
        rp = r[positive]
        out[positive] = 2.0 / special.gamma(s) * (0.5 * rp) ** s * bessel_k(s, rp)
    out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def sigma_s(s):
    """The trace constant 2^{1-2s} Γ(1-s)/Γ(s)."""
    return 2.0 ** (1.0 - 2.0 * s) * special.gamma(1.0 - s) / special.gamma(s)


def c_ns(N, s):
    """The constant C(N, s) of the singular-integral representation."""
    return (
        2.0 ** (-(N + 2.0 * s) / 2.0 + 1.0)
        * np.pi ** (-N / 2.0)
        * 2.0 ** (2.0 * s)
        * s
        * (1.0 - s)
        / special.gamma(2.0 - s)
    )


def operator_constants(N, s, m):
    """Build the OperatorConstants for (N, s, m).

    Raises
    ------
    ConfigurationError
        If N <= 2s, s is outside (0, 1) or m <= 0.
    """
    if not 0.0 < s < 1.0:
        raise ConfigurationError(f"s = {s} is not in (0, 1)", inequality="0 < s < 1")
    if m <= 0:
        raise ConfigurationError(f"m = {m} is not positive", inequality="m > 0")
    if N <= 2 * s:
        raise ConfigurationError(f"N = {N} <= 2s = {2 * s}", inequality="N <= 2s")
    return OperatorConstants(
        N=int(N),
        s=float(s),
        m=float(m),
        sigma_s=float(sigma_s(s)),
        c_ns=float(c_ns(N, s)),
        two_star_s=2.0 * N / (N - 2.0 * s),
        gamma_embed=1.0 + 2.0 / (N - 2.0 * s),
    )


def norm_equivalence(mu, m, s):
    """The constants A, B with A|u|_{H^s}^2 <= |u|_{Y_mu}^2 <= B|u|_{H^s}^2.

    Raises
    ------
    ConfigurationError
        If mu <= -m^{2s}, where A vanishes.
    """
    m2s = m ** (2.0 * s)
    if mu <= -m2s:
        raise ConfigurationError(
            f"mu = {mu} <= -m^(2s) = {-m2s}", inequality="mu <= -m^{2s}"
        )
    low = min(mu + m2s, m2s) / m2s
    high = max(mu + m2s, m2s) / m2s
    return low, high


def _epstein_sum(N, a):
    """The regularized lattice sum Σ'_{j in Z^N} |j|^a."""
    if N == 1:
        if abs(a + 1.0) < 1.0e-12:
            raise DomainError("the one-dimensional lattice sum has a pole at a = -1")
        return 2.0 * (special.zetac(-a) + 1.0)

    widths = (8.0, 16.0, 32.0) if N <= 2 else (6.0, 12.0)
    estimates = []
    for sigma in widths:
        reach = int(math.ceil(6.0 * sigma))
        axis = np.arange(-reach, reach + 1, dtype=float) ** 2
        squares = axis
        for _ in range(N - 1):
            squares = np.add.outer(squares, axis).reshape(-1)
        squares = squares.astype(np.int64)
        counts = np.bincount(squares)
        r2 = np.flatnonzero(counts)
        r2 = r2[r2 > 0]
        radii = np.sqrt(r2.astype(float))
        lattice = np.sum(counts[r2] * radii**a * np.exp(-(radii**2) / sigma**2))
        sphere = 2.0 * np.pi ** (N / 2.0) / special.gamma(N / 2.0)
        integral = sphere * sigma ** (a + N) * special.gamma((a + N) / 2.0) / 2.0
        estimates.append(lattice - integral)

    # The error expansion runs in powers of sigma^-2
    level = 1
    while len(estimates) > 1:
        factor = 4.0**level
        estimates = [
            (factor * fine - coarse) / (factor - 1.0)
            for coarse, fine in zip(estimates[:-1], estimates[1:])
        ]
        level += 1
    return estimates[0]


@functools.lru_cache(maxsize=256)
def _lattice_defect_cached(N, a, rho):
    defect = -_epstein_sum(N, a)
    if rho > 1.0:
        reach = int(math.ceil(rho))
        axis = np.arange(-reach, reach + 1, dtype=float) ** 2
        squares = axis
        for _ in range(N - 1):
            squares = np.add.outer(squares, axis).reshape(-1)
        radii = np.sqrt(squares)
        inside = (radii > 0) & (radii < rho)
        defect += np.sum(radii[inside] ** a)
    return float(defect)


def lattice_defect(N, a, rho=0.5):
    """The defect D = ∫|y|^a dy - Σ_{j in Z^N, |j| >= rho} |j|^a, regularized.

    Adding c h^{N+a} D to a trapezoid sum over the lattice points with
    |j| >= rho corrects it for a singular term c|y|^a of the integrand.

    Parameters
    ----------
    N : int
        The dimension.
    a : float
        The exponent, a > -N.
    rho : float
        Lattice points with 0 < |j| < rho are excluded from the sum.

    Returns
    -------
    float
    """
    if a <= -N:
        raise DomainError(f"lattice_defect requires a > -N, got a = {a}")
    return _lattice_defect_cached(int(N), round(float(a), 14), round(float(rho), 14))
