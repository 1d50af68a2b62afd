# -*- coding: utf-8 -*-

"""Radial kernels of the relativistic operator.

The Poisson kernel of the extension, the Bessel potential kernels G_α, the
relativistic stable density and its Lévy measure, and the comparison kernel
B = F^{-1}[((|k|²+m²)^s - (V1+δ))^{-1}] used to bound solutions.
"""

from dataclasses import dataclass, field
import functools
import logging
import math

import numpy as np
import pandas
from scipy import integrate, optimize, special
import scipy.fft

from .errors import ConfigurationError, DomainError, ResolutionError
from . import grid as grid_module
from .grid import GridField, GridSpec, next_power_of_two
from .specfun import bessel_k, c_ns, lattice_defect, theta_profile

logger = logging.getLogger(__name__)

#: A density whose characteristic function exceeds this at the Nyquist
#: frequency is not resolved by the grid.
NYQUIST_TOLERANCE = 1.0e-8

#: Log-spaced nodes of the subordination integral.
TIME_NODES = 200
TIME_START = 1.0e-4


def _sphere_area(N):
    return 2.0 * np.pi ** (N / 2.0) / special.gamma(N / 2.0)


@dataclass(frozen=True)
class PowerLaw:
    """c r^a, or -c log r when logarithmic."""

    exponent: float
    coefficient: float
    logarithmic: bool = False

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.logarithmic:
            return -self.coefficient * np.log(r)
        return self.coefficient * r**self.exponent


@dataclass(frozen=True)
class TailLaw:
    """C r^a e^{-c r}."""

    rate: float
    exponent: float
    coefficient: float

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return self.coefficient * r**self.exponent * np.exp(-self.rate * r)


@dataclass(frozen=True)
class KernelCheck:
    """Outcome of RadialKernelTable.check()."""

    name: str
    positive: bool
    monotone: bool
    small_r_error: float
    large_r_error: float
    tolerance: float

    @property
    def passed(self):
        return (
            self.positive
            and self.monotone
            and self.small_r_error <= self.tolerance
            and self.large_r_error <= self.tolerance
        )


@dataclass(eq=False)
class RadialKernelTable:
    """A radial kernel with its tabulation and asymptotic laws.

    Evaluation at r > 0 always uses the exact function; the table (radii,
    values) is what gets checked and written out.

    Attributes
    ----------
    name : str
    dim : int
    function : callable
        The kernel as a function of r > 0 (vectorized).
    radii, values : numpy.ndarray
        The tabulation, radii increasing.
    small_r_law : PowerLaw
        Leading behaviour as r -> 0.
    large_r_law : TailLaw or None
        Leading behaviour as r -> ∞.
    origin_value : float or None
        The value at r = 0 for bounded kernels; None for singular ones.
    point_mass : float
        An extra weight placed at the origin when sampling.
    """

    name: str
    dim: int
    function: object
    radii: np.ndarray
    values: np.ndarray
    small_r_law: PowerLaw
    large_r_law: object = None
    origin_value: object = None
    point_mass: float = 0.0
    notes: tuple = field(default=())

    @classmethod
    def build(cls, name, dim, function, r_min, r_max, count=200, **kwargs):
        """Tabulate function on log-spaced radii in [r_min, r_max]."""
        radii = np.geomspace(r_min, r_max, count)
        values = np.asarray(function(radii), dtype=float)
        return cls(name, dim, function, radii, values, **kwargs)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0):
            raise DomainError(f"kernel '{self.name}' is evaluated at r > 0 only")
        return self.function(r)

    def tail_value(self, r):
        """|kernel(r)|, used for truncation estimates."""
        return float(abs(self.function(np.array([r]))[0]))

    def _regular_part(self):
        """R0 = lim_{r->0} (kernel(r) - small_r_law(r))."""
        law = self.small_r_law
        r = np.array([1.0e-6])
        return float(self.function(r)[0] - law(r)[0])

    def origin_weight(self, spec):
        """The quadrature weight of the origin sample on the grid.

        Bounded kernels get h^N times their value. Singular kernels get the
        corrected-trapezoid weight c h^{N+a} D_N(a) + h^N R0 for a leading term
        c r^a, or its logarithmic analogue.
        """
        h = spec.spacing
        N = self.dim
        hN = spec.cell_volume
        law = self.small_r_law
        if self.origin_value is not None:
            return hN * self.origin_value + self.point_mass
        if law.logarithmic:
            step = 1.0e-3
            slope = (lattice_defect(N, step) - lattice_defect(N, -step)) / (2.0 * step)
            weight = -law.coefficient * hN * (math.log(h) + slope)
        else:
            if law.exponent <= -N:
                raise DomainError(f"kernel '{self.name}' is not integrable at 0")
            weight = law.coefficient * h ** (N + law.exponent) * lattice_defect(
                N, law.exponent
            )
        return weight + hN * self._regular_part() + self.point_mass

    def sample_on(self, spec):
        """Quadrature weights h^N k(|d|) at every grid displacement, offset order."""
        offsets = spec.offsets()
        squares = np.sum((offsets / spec.spacing) ** 2, axis=0)
        squares = np.rint(squares).astype(np.int64)
        unique, inverse = np.unique(squares, return_inverse=True)
        radii = spec.spacing * np.sqrt(unique.astype(float))
        values = np.zeros_like(radii)
        positive = unique > 0
        values[positive] = self.function(radii[positive])
        weights = spec.cell_volume * values[inverse.reshape(squares.shape)]
        weights.flat[0] = self.origin_weight(spec)
        return weights

    def check(self, tolerance=0.05):
        """Positivity, monotonicity and agreement of the laws at the table ends."""
        values = self.values
        small = abs(self.small_r_law(self.radii[0]) / values[0] - 1.0)
        if self.large_r_law is None:
            large = 0.0
        else:
            large = abs(self.large_r_law(self.radii[-1]) / values[-1] - 1.0)
        return KernelCheck(
            name=self.name,
            positive=bool(np.all(values > 0)),
            monotone=bool(np.all(np.diff(values) <= 0)),
            small_r_error=float(small),
            large_r_error=float(large),
            tolerance=tolerance,
        )

    def fit_tail(self, r_lo, r_hi):
        """Least-squares fit of log k = log C + a log r - c r on [r_lo, r_hi]."""
        mask = (self.radii >= r_lo) & (self.radii <= r_hi)
        r = self.radii[mask]
        if r.size < 3:
            raise DomainError(f"fewer than 3 table radii in [{r_lo}, {r_hi}]")
        design = np.column_stack([np.ones_like(r), np.log(r), -r])
        solution, *_ = np.linalg.lstsq(design, np.log(self.values[mask]), rcond=None)
        return TailLaw(
            rate=solution[2], exponent=solution[1], coefficient=math.exp(solution[0])
        )

    def to_frame(self):
        data = {
            "r": self.radii,
            "value": self.values,
            "small_r_law": self.small_r_law(self.radii),
        }
        if self.large_r_law is not None:
            data["large_r_law"] = self.large_r_law(self.radii)
        return pandas.DataFrame(data)


def delta_kernel(dim):
    """The discrete delta: unit weight at the origin, zero elsewhere."""

    def zero(r):
        return np.zeros_like(np.asarray(r, dtype=float))

    return RadialKernelTable(
        "delta",
        dim,
        zero,
        radii=np.array([1.0]),
        values=np.array([0.0]),
        small_r_law=PowerLaw(0.0, 0.0),
        origin_value=0.0,
        point_mass=1.0,
    )


def gaussian_kernel_table(variance, dim):
    """The normalized Gaussian (2π v)^{-N/2} exp(-r²/2v)."""
    norm = (2.0 * np.pi * variance) ** (-dim / 2.0)

    def gaussian(r):
        return norm * np.exp(-np.asarray(r) ** 2 / (2.0 * variance))

    sd = math.sqrt(variance)
    return RadialKernelTable.build(
        "gaussian",
        dim,
        gaussian,
        1.0e-3 * sd,
        8.0 * sd,
        small_r_law=PowerLaw(0.0, norm),
        origin_value=norm,
    )


# ---------------------------------------------------------------- jump kernel
def jump_kernel(r, m, s, N):
    """J_m(r) = C(N,s) m^ν r^{-ν} K_ν(m r), ν = (N+2s)/2."""
    r = np.asarray(r, dtype=float)
    nu = 0.5 * (N + 2.0 * s)
    return c_ns(N, s) * m**nu * r ** (-nu) * bessel_k(nu, m * r)


def levy_measure(r, m, s, N):
    """The Lévy measure of the relativistic process.

    (2s 2^{(2s-N)/2} / (π^{N/2} Γ(1-s))) (m/r)^{(N+2s)/2} K_{(N+2s)/2}(m r).
    It coincides with the jump kernel J_m.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("levy_measure requires r > 0")
    nu = 0.5 * (N + 2.0 * s)
    constant = 2.0 * s * 2.0 ** ((2.0 * s - N) / 2.0)
    constant /= np.pi ** (N / 2.0) * special.gamma(1.0 - s)
    result = constant * (m / r) ** nu * bessel_k(nu, m * r)
    return float(result) if result.ndim == 0 else result


def jump_kernel_table(m, s, N):
    """RadialKernelTable of J_m with its Watson-type laws."""
    nu = 0.5 * (N + 2.0 * s)
    C = c_ns(N, s)
    small = PowerLaw(-(N + 2.0 * s), C * special.gamma(nu) * 2.0 ** (nu - 1.0))
    large = TailLaw(m, -(nu + 0.5), C * m ** (nu - 0.5) * math.sqrt(np.pi / 2.0))
    r_max = max(40.0, 6.25 * (4.0 * nu * nu - 1.0)) / m
    return RadialKernelTable.build(
        "jump",
        N,
        functools.partial(jump_kernel, m=m, s=s, N=N),
        1.0e-4 / m,
        r_max,
        small_r_law=small,
        large_r_law=large,
    )


# ------------------------------------------------------------ Bessel potential
def _bessel_potential_constant(alpha, N):
    power = 2.0 ** ((N + alpha - 2.0) / 2.0)
    return 1.0 / (power * np.pi ** (N / 2.0) * special.gamma(alpha / 2.0))


def bessel_potential_kernel(alpha, r, N):
    """G_α(r), the kernel of (1 - Δ)^{-α/2}.

    Raises
    ------
    DomainError
        If alpha <= 0 or r <= 0.
    """
    if alpha <= 0:
        raise DomainError(f"Bessel potential order must be positive, got {alpha}")
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("bessel_potential_kernel requires r > 0")
    result = (
        _bessel_potential_constant(alpha, N)
        * bessel_k((N - alpha) / 2.0, r)
        * r ** ((alpha - N) / 2.0)
    )
    return float(result) if result.ndim == 0 else result


def bessel_potential_origin(alpha, N):
    """G_α(0) for alpha > N."""
    if alpha <= N:
        raise DomainError(f"G_α is unbounded at 0 for alpha = {alpha} <= N = {N}")
    return special.gamma((alpha - N) / 2.0) / (
        2.0**N * np.pi ** (N / 2.0) * special.gamma(alpha / 2.0)
    )


def bessel_potential_table(alpha, N):
    """RadialKernelTable of G_α with the small- and large-r laws."""
    origin = None
    if alpha < N:
        small = PowerLaw(
            alpha - N,
            special.gamma((N - alpha) / 2.0)
            / (2.0**alpha * np.pi ** (N / 2.0) * special.gamma(alpha / 2.0)),
        )
    elif alpha == N:
        small = PowerLaw(0.0, _bessel_potential_constant(alpha, N), logarithmic=True)
    else:
        origin = bessel_potential_origin(alpha, N)
        small = PowerLaw(0.0, origin)
    coefficient = _bessel_potential_constant(alpha, N) * math.sqrt(np.pi / 2.0)
    large = TailLaw(1.0, (alpha - N - 1.0) / 2.0, coefficient)
    nu = abs(N - alpha) / 2.0
    r_max = max(40.0, 6.25 * (4.0 * nu * nu - 1.0))
    r_min = 1.0e-8 if alpha < N + 2 else 1.0e-3
    return RadialKernelTable.build(
        f"bessel_potential_{alpha:g}",
        N,
        lambda r: bessel_potential_kernel(alpha, r, N),
        r_min,
        r_max,
        small_r_law=small,
        large_r_law=large,
        origin_value=origin,
    )


# -------------------------------------------------------------- Poisson kernel
def _poisson_shape(r, y, m, s, N):
    nu = 0.5 * (N + 2.0 * s)
    rho = np.sqrt(np.asarray(r, dtype=float) ** 2 + y * y)
    return y ** (2.0 * s) * m**nu * rho ** (-nu) * bessel_k(nu, m * rho)


def poisson_constant_closed_form(N, s):
    """c'_{N,s} = 2^{1-ν} / (π^{N/2} Γ(s)), ν = (N+2s)/2."""
    nu = 0.5 * (N + 2.0 * s)
    return 2.0 ** (1.0 - nu) / (np.pi ** (N / 2.0) * special.gamma(s))


@functools.lru_cache(maxsize=64)
def calibrate_poisson_constant(N, s, m, y0=1.0):
    """c'_{N,s} such that ∫ P_{s,m}(x, y0) dx = θ(m y0).

    The integral is done radially with adaptive quadrature.
    """
    area = _sphere_area(N)

    def integrand(r):
        return area * r ** (N - 1) * float(_poisson_shape(r, y0, m, s, N))

    scale = max(y0, 1.0 / m)
    options = {"epsabs": 0.0, "epsrel": 1.0e-12, "limit": 200}
    head, _ = integrate.quad(integrand, 0.0, scale, **options)
    tail, _ = integrate.quad(integrand, scale, np.inf, **options)
    constant = theta_profile(s, m * y0) / (head + tail)
    logger.debug(f"Poisson constant for N={N}, s={s}, m={m}: {constant:.12e}")
    return constant


def poisson_kernel(r, y, m, s, N=1):
    """P_{s,m}(x, y) at |x| = r with the calibrated constant.

    Raises
    ------
    DomainError
        If y <= 0.
    """
    if y <= 0:
        raise DomainError(f"Poisson kernel height must be positive, got y = {y}")
    result = calibrate_poisson_constant(N, s, m) * _poisson_shape(r, y, m, s, N)
    return float(result) if np.ndim(result) == 0 else result


def poisson_kernel_table(y, m, s, N=1):
    """RadialKernelTable of P_{s,m}(·, y)."""
    if y <= 0:
        raise DomainError(f"Poisson kernel height must be positive, got y = {y}")
    nu = 0.5 * (N + 2.0 * s)
    constant = calibrate_poisson_constant(N, s, m)
    origin = float(poisson_kernel(0.0, y, m, s, N))
    coefficient = constant * y ** (2.0 * s) * m ** (nu - 0.5) * math.sqrt(np.pi / 2.0)
    large = TailLaw(m, -(nu + 0.5), coefficient)
    r_max = max(40.0, 25.0 * m * y * y, 6.25 * (4.0 * nu * nu - 1.0)) / m
    return RadialKernelTable.build(
        f"poisson_{y:g}",
        N,
        lambda r: poisson_kernel(r, y, m, s, N),
        1.0e-4 * min(y, 1.0 / m),
        r_max,
        small_r_law=PowerLaw(0.0, origin),
        large_r_law=large,
        origin_value=origin,
    )


# ------------------------------------------------- relativistic stable density
def characteristic_exponent(k_squared, m, s):
    """(|k|²+m²)^s - m^{2s}."""
    return (k_squared + m * m) ** s - m ** (2.0 * s)


def relativistic_density(spec, t, m, s):
    """The 2s-stable relativistic density p_{s,m}(·, t) sampled on the grid.

    Obtained by inverse transform of exp(-t[(|k|²+m²)^s - m^{2s}]); the grid
    sum times h^N is exactly one.

    Raises
    ------
    DomainError
        If t <= 0.
    ResolutionError
        If the characteristic function is not negligible at the Nyquist
        frequency.
    """
    if t <= 0:
        raise DomainError(f"density time must be positive, got t = {t}")
    nyquist = math.exp(-t * characteristic_exponent(spec.k_max**2, m, s))
    if nyquist > NYQUIST_TOLERANCE:
        raise ResolutionError(
            f"density at t = {t} is unresolved at spacing h = {spec.spacing:g}: "
            f"characteristic function {nyquist:.2e} at the Nyquist frequency"
        )
    phi = np.exp(-t * characteristic_exponent(spec.k_squared(), m, s))
    values = scipy.fft.ifftn(phi, workers=grid_module.FFT_WORKERS).real
    values /= spec.cell_volume
    return GridField(spec, scipy.fft.fftshift(values))


def relativistic_density_half(r, t, m, N=1):
    """The closed form of p_{1/2,m}(x, t) at |x| = r."""
    r = np.asarray(r, dtype=float)
    rho = np.sqrt(r * r + t * t)
    order = 0.5 * (N + 1.0)
    return (
        2.0
        * (m / (2.0 * np.pi)) ** order
        * t
        * np.exp(m * t)
        * rho ** (-order)
        * bessel_k(order, m * rho)
    )


def gaussian_heat_kernel(r, t, N=1):
    """g_t(x) = (4πt)^{-N/2} exp(-|x|²/4t)."""
    r = np.asarray(r, dtype=float)
    return (4.0 * np.pi * t) ** (-N / 2.0) * np.exp(-r * r / (4.0 * t))


def density_bound_constant(m, s, radii, times, spec=None):
    """The smallest C bounding the transition density by its two-part majorant.

    p_{s,m}(x,t) <= C m (g_{m^{2s}t}(mx/√2) + m^{2s}t ν¹(mx/√2)).

    One-dimensional; the density is sampled on a fine grid and read at the
    grid points nearest to the requested radii.

    Returns
    -------
    (float, pandas.DataFrame)
        The constant and the table of ratios.
    """
    if spec is None:
        spec = GridSpec(1, 20.0, 2**17)
    axis = spec.axis()
    rows = []
    for t in times:
        density = relativistic_density(spec, t, m, s).values
        for r in radii:
            index = int(np.argmin(np.abs(axis - r)))
            x = axis[index]
            z = m * x / math.sqrt(2.0)
            bound = m * (
                gaussian_heat_kernel(z, m ** (2.0 * s) * t)
                + m ** (2.0 * s) * t * levy_measure(z, 1.0, s, 1)
            )
            rows.append({"r": x, "t": t, "density": density[index], "bound": bound})
    table = pandas.DataFrame(rows)
    table["ratio"] = table["density"] / table["bound"]
    return float(table["ratio"].max()), table


# ---------------------------------------------------------- comparison kernel
@dataclass(frozen=True)
class ComparisonKernelSpec:
    """Parameters of B_{2s,m}.

    Attributes
    ----------
    m, s : float
    V1 : float
        The potential bound, 0 < V1 < m^{2s}.
    delta : float
        The margin, V1 + delta < m^{2s}.
    dim : int
    """

    m: float
    s: float
    V1: float
    delta: float
    dim: int = 1

    def __post_init__(self):
        m2s = self.m ** (2.0 * self.s)
        if not 0.0 < self.s < 1.0:
            raise ConfigurationError(
                f"s = {self.s} is not in (0, 1)", inequality="0 < s < 1"
            )
        if self.delta <= 0:
            raise ConfigurationError(
                f"delta = {self.delta} is not positive", inequality="delta <= 0"
            )
        if self.V1 >= m2s:
            raise ConfigurationError(
                f"V1 = {self.V1} >= m^(2s) = {m2s}", inequality="V1 >= m^{2s}"
            )
        if self.gamma <= 0:
            raise ConfigurationError(
                f"gamma = m^(2s) - (V1 + delta) = {self.gamma} is not positive",
                inequality="V1 + delta >= m^{2s}",
            )

    @property
    def lam(self):
        """V1 + delta."""
        return self.V1 + self.delta

    @property
    def gamma(self):
        """m^{2s} - (V1 + delta)."""
        return self.m ** (2.0 * self.s) - self.lam

    @property
    def pole_rate(self):
        """sqrt(m² - (V1+δ)^{1/s}), the exponential rate of the tail."""
        lam = max(self.lam, 0.0)
        return math.sqrt(self.m**2 - lam ** (1.0 / self.s))

    def time_nodes(self, count=TIME_NODES):
        """Log-spaced nodes on [1e-4, T] and their trapezoid-in-log weights.

        T is where e^{-γT} = 1e-12.
        """
        end = max(math.log(1.0e12) / self.gamma, 2.0 * TIME_START)
        t = np.geomspace(TIME_START, end, count)
        step = math.log(end / TIME_START) / (count - 1)
        weights = step * t
        weights[0] *= 0.5
        weights[-1] *= 0.5
        return t, weights


def default_comparison_grid(spec):
    """A grid wide enough for the tail and fine enough for the core."""
    rate = spec.pole_rate
    if spec.dim == 1:
        half_width = max(40.0, 30.0 / rate)
        points = next_power_of_two(2.0 * half_width / 0.02)
        return GridSpec(1, half_width, min(points, 2**16))
    if spec.dim == 2:
        return GridSpec(2, max(25.0, 20.0 / rate), 512)
    return GridSpec(3, max(16.0, 14.0 / rate), 128)


class ComparisonKernel:
    """B_{2s,m} on a grid.

    B is split as Σ_{j<J} λ^j m^{N-2s(j+1)} G_{2s(j+1)}(m r), which carries the
    singularity and is evaluated in closed form, plus a smooth remainder whose
    spectrum is B̂ minus the same series. B̂ comes from the subordination
    integral ∫ e^{-γt} φ(k, t) dt, done exactly on [0, 1e-4] and by the
    trapezoid rule in log-time beyond. The origin sample carries the exact
    total mass 1/γ.

    Parameters
    ----------
    spec : ComparisonKernelSpec
    grid : GridSpec, optional
    """

    def __init__(self, spec, grid=None):
        self.spec = spec
        self.grid = default_comparison_grid(spec) if grid is None else grid
        if self.grid.dim != spec.dim:
            raise DomainError("comparison kernel grid has the wrong dimension")
        m, s, lam = spec.m, spec.s, spec.lam
        N = spec.dim
        g = self.grid

        self.terms = int(math.ceil((N + 4.0) / (2.0 * s)))
        omega2s = (g.k_squared() + m * m) ** s
        self.symbol = omega2s - lam
        self.spectrum = self.subordination_spectrum(omega2s)

        series = np.zeros_like(omega2s)
        for j in range(self.terms):
            series += lam**j * omega2s ** (-(j + 1))
        self.remainder_spectrum = self.spectrum - series
        remainder = scipy.fft.ifftn(
            self.remainder_spectrum, workers=grid_module.FFT_WORKERS
        )
        remainder = remainder.real / g.cell_volume

        offsets = g.offsets()
        squares = np.rint(np.sum((offsets / g.spacing) ** 2, axis=0)).astype(np.int64)
        unique, inverse = np.unique(squares, return_inverse=True)
        radii = g.spacing * np.sqrt(unique.astype(float))
        singular = np.zeros_like(radii)
        singular[1:] = self.singular_part(radii[1:])
        samples = remainder + singular[inverse.reshape(squares.shape)]

        off_origin = g.cell_volume * (np.sum(samples) - samples.flat[0])
        samples.flat[0] = (1.0 / spec.gamma - off_origin) / g.cell_volume
        self.samples = samples
        self.notes = ()
        logger.debug(
            f"Comparison kernel m={m}, s={s}, lambda={lam}: {self.terms} series terms "
            f"on {g}"
        )

    def subordination_spectrum(self, omega2s):
        """∫_0^∞ e^{-γt} exp(-t[ω^{2s} - m^{2s}]) dt by log-time quadrature."""
        a = omega2s - self.spec.lam
        t, weights = self.spec.time_nodes()
        head = -np.expm1(-a * TIME_START) / a
        total = head.copy()
        for ti, wi in zip(t, weights):
            total += wi * np.exp(-a * ti)
        return total

    def singular_part(self, r):
        """Σ_{j<J} λ^j m^{N-2s(j+1)} G_{2s(j+1)}(m r) for r > 0."""
        m, s, lam, N = self.spec.m, self.spec.s, self.spec.lam, self.spec.dim
        r = np.asarray(r, dtype=float)
        total = np.zeros_like(r)
        for j in range(self.terms):
            alpha = 2.0 * s * (j + 1)
            term = m ** (N - alpha) * bessel_potential_kernel(alpha, m * r, N)
            total += lam**j * term
        return total

    def remainder(self, r):
        """The smooth remainder at distance r along the first axis."""
        r = np.asarray(r, dtype=float)
        g = self.grid
        marginal = self.remainder_spectrum
        while marginal.ndim > 1:
            marginal = marginal.sum(axis=-1)
        k = 2.0 * np.pi * scipy.fft.fftfreq(g.points, g.spacing)
        values = np.cos(np.multiply.outer(r.reshape(-1), k)) @ marginal
        return (values / (2.0 * g.half_width) ** g.dim).reshape(r.shape)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0):
            raise DomainError("the comparison kernel is evaluated at r > 0 only")
        result = self.singular_part(r) + self.remainder(r)
        return float(result) if result.ndim == 0 else result

    def origin_value(self):
        """B(0) when 2s > N, where B is bounded."""
        m, s, lam, N = self.spec.m, self.spec.s, self.spec.lam, self.spec.dim
        total = float(self.remainder(np.array([0.0]))[0])
        for j in range(self.terms):
            alpha = 2.0 * s * (j + 1)
            total += lam**j * m ** (N - alpha) * bessel_potential_origin(alpha, N)
        return total

    def field(self):
        """The sampled kernel as a GridField centred on the box."""
        return GridField(self.grid, scipy.fft.fftshift(self.samples), notes=self.notes)

    def spectral_error(self, k_limit=4.0):
        """Max relative deviation of h^N DFT(B) from 1/(ω^{2s} - λ).

        Taken over the frequencies 0 < |k| <= k_limit; the k = 0 coefficient
        is 1/γ by construction of the origin sample.
        """
        transformed = (
            scipy.fft.fftn(self.samples, workers=grid_module.FFT_WORKERS).real
            * self.grid.cell_volume
        )
        exact = 1.0 / self.symbol
        k2 = self.grid.k_squared()
        mask = (k2 > 0) & (k2 <= k_limit**2)
        return float(np.max(np.abs(transformed[mask] / exact[mask] - 1.0)))

    def mass_error(self):
        """Relative deviation of the independently corrected mass from 1/γ.

        The samples off the origin are summed and the origin cell gets the
        corrected-trapezoid weight of the small-r law instead of the sample
        that closes the mass.
        """
        g = self.grid
        off_origin = g.cell_volume * (np.sum(self.samples) - self.samples.flat[0])
        mass = off_origin + self.table().origin_weight(g)
        return abs(mass * self.spec.gamma - 1.0)

    def small_r_law(self):
        m, s, N = self.spec.m, self.spec.s, self.spec.dim
        if 2.0 * s < N:
            return PowerLaw(
                2.0 * s - N,
                special.gamma((N - 2.0 * s) / 2.0)
                / (2.0 ** (2.0 * s) * np.pi ** (N / 2.0) * special.gamma(s)),
            )
        if 2.0 * s == N:
            constant = _bessel_potential_constant(2.0 * s, N)
            return PowerLaw(0.0, constant, logarithmic=True)
        return PowerLaw(0.0, self.origin_value())

    def large_r_law(self):
        """The pole contribution C r^{-(N-1)/2} e^{-κ r}."""
        s, lam, N = self.spec.s, self.spec.lam, self.spec.dim
        kappa = self.spec.pole_rate
        coefficient = (
            (2.0 * np.pi) ** (-N / 2.0)
            * kappa ** ((N - 3.0) / 2.0)
            * math.sqrt(np.pi / 2.0)
            / (s * lam ** ((s - 1.0) / s))
        )
        return TailLaw(kappa, -(N - 1.0) / 2.0, coefficient)

    def table(self, r_min=1.0e-6, r_max=None, count=200):
        """RadialKernelTable of B with its laws."""
        if r_max is None:
            r_max = min(0.4 * self.grid.half_width, 10.0 / self.spec.pole_rate)
        law = self.small_r_law()
        origin = None if law.exponent < 0 or law.logarithmic else law.coefficient
        return RadialKernelTable.build(
            "comparison",
            self.spec.dim,
            self.__call__,
            r_min,
            r_max,
            count=count,
            small_r_law=law,
            large_r_law=self.large_r_law(),
            origin_value=origin,
        )


@functools.lru_cache(maxsize=8)
def comparison_kernel_on(spec, grid=None):
    """A cached ComparisonKernel for spec on grid (default grid if None)."""
    return ComparisonKernel(spec, grid)


def comparison_kernel(spec, r, grid=None):
    """B_{2s,m}(r) for r > 0.

    Raises
    ------
    ConfigurationError
        If γ <= 0 (raised by ComparisonKernelSpec).
    """
    return comparison_kernel_on(spec, grid)(r)


def comparison_kernel_half(spec, r):
    """B at s = 1/2 by log-time quadrature of the closed-form density."""
    if spec.s != 0.5:
        raise DomainError("the closed-form density exists for s = 1/2 only")
    r = np.asarray(r, dtype=float)
    t, weights = spec.time_nodes()
    total = 0.5 * TIME_START**2 * levy_measure(r, spec.m, 0.5, spec.dim)
    for ti, wi in zip(t, weights):
        total = total + wi * math.exp(-spec.gamma * ti) * relativistic_density_half(
            r, ti, spec.m, spec.dim
        )
    return total


@dataclass(frozen=True)
class SplitBound:
    """Fitted C1 e^{-C2 r} + C3 e^{-C4 r} r^{-(N+2s+1)/2}."""

    c1: float
    c2: float
    c3: float
    c4: float
    exponent: float
    misfit: float
    bound_factor: float

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        pole = self.c1 * np.exp(-self.c2 * r)
        return pole + self.c3 * np.exp(-self.c4 * r) * r**self.exponent


def split_bound_fit(kernel, radii):
    """Fit the two-term decay bound to a comparison kernel.

    ``misfit`` is the largest |log(B/fit)|; ``bound_factor`` the largest B/fit,
    so bound_factor times the fit dominates B on the radii.
    """
    radii = np.asarray(radii, dtype=float)
    values = kernel(radii)
    spec = kernel.spec
    exponent = -(spec.dim + 2.0 * spec.s + 1.0) / 2.0

    def model(p, r):
        return np.exp(p[0] - p[1] * r) + np.exp(p[2] - p[3] * r) * r**exponent

    def residual(p):
        return np.log(model(p, radii)) - np.log(values)

    log_start = math.log(values[0])
    start = np.array([log_start, spec.pole_rate, log_start - 2.0, spec.m])
    result = optimize.least_squares(residual, start, method="lm")
    p = result.x
    fitted = model(p, radii)
    return SplitBound(
        c1=math.exp(p[0]),
        c2=p[1],
        c3=math.exp(p[2]),
        c4=p[3],
        exponent=exponent,
        misfit=float(np.max(np.abs(np.log(values / fitted)))),
        bound_factor=float(np.max(values / fitted)),
    )


def kernel_table(name, m=1.0, s=0.5, dim=1, alpha=None, y=1.0, V1=None, delta=None):
    """A named kernel table: jump, levy, bessel, poisson or comparison."""
    if name in ("jump", "levy"):
        table = jump_kernel_table(m, s, dim)
        table.name = name
        return table
    if name == "bessel":
        if alpha is None:
            raise ConfigurationError("the bessel kernel needs 'alpha'", key="alpha")
        return bessel_potential_table(alpha, dim)
    if name == "poisson":
        return poisson_kernel_table(y, m, s, dim)
    if name == "comparison":
        if V1 is None or delta is None:
            key = "V1" if V1 is None else "delta"
            raise ConfigurationError(f"the comparison kernel needs '{key}'", key=key)
        return ComparisonKernel(ComparisonKernelSpec(m, s, V1, delta, dim)).table()
    raise ConfigurationError(f"unknown kernel '{name}'", key="kernel")
