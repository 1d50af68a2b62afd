# -*- coding: utf-8 -*-

"""Energies, Nehari projection and ground states of the trace problem.

The functionals act on the boundary trace u with the multiplier realization
of A = (-Δ+m²)^s:

    L_μ(u) = ½ (⟨Au, u⟩ + μ |u|²) - ∫ F(u)
    J_ε(u) = ½ (⟨Au, u⟩ + ∫ V(εx) u²) - ∫ G(εx, u)

where G is the primitive of the penalized nonlinearity g, equal to f on
Λ_ε = Λ/ε and capped linearly above the height a outside it. Critical
points are computed by preconditioned gradient descent constrained to the
Nehari manifold.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import functools
import logging

import numpy as np
import scipy.fft

from .errors import (
    ConfigurationError,
    NonConvergenceError,
    NumericalError,
    PositivityError,
    ProjectionError,
)
from . import grid as grid_module
from .grid import GridField
from .operator import dual_norm
from .specfun import operator_constants

logger = logging.getLogger(__name__)

#: Largest power of two tried when bracketing the Nehari scaling.
MAX_DOUBLINGS = 60

#: Bisection steps in log t once the Nehari scaling is bracketed.
BISECTION_STEPS = 60


@dataclass(frozen=True)
class PowerNonlinearity:
    """f(t) = (t⁺)^p and F(t) = (t⁺)^{p+1}/(p+1)."""

    p: float = 3.0

    def __post_init__(self):
        if not self.p > 1.0:
            raise ConfigurationError(
                f"p = {self.p} is not above 1", inequality="p <= 1"
            )

    @property
    def theta_ar(self):
        """The Ambrosetti-Rabinowitz exponent p + 1."""
        return self.p + 1.0

    def f(self, t):
        return np.maximum(t, 0.0) ** self.p

    def F(self, t):
        return np.maximum(t, 0.0) ** (self.p + 1.0) / (self.p + 1.0)

    def switch_height(self, slope):
        """The height a > 0 with f(a)/a = slope."""
        return slope ** (1.0 / (self.p - 1.0))

    def validate(self, two_star_s):
        """Check 1 < p < 2*_s - 1."""
        if self.p >= two_star_s - 1.0:
            raise ConfigurationError(
                f"p = {self.p} is not below 2*_s - 1 = {two_star_s - 1.0:g}",
                inequality="p >= 2*_s - 1",
            )


@dataclass(frozen=True)
class Region:
    """An open box or ball in R^N.

    Attributes
    ----------
    kind : str
        "box" or "ball".
    center : tuple of float
    size : tuple of float
        The half widths of a box, or the 1-tuple (radius,) of a ball.
    """

    kind: str
    center: tuple
    size: tuple

    def __post_init__(self):
        if self.kind not in ("box", "ball"):
            raise ConfigurationError(
                f"region kind '{self.kind}' is not 'box' or 'ball'"
            )
        if any(w <= 0 for w in self.size):
            raise ConfigurationError("region sizes must be positive")

    @classmethod
    def box(cls, half_widths, center=None):
        half_widths = tuple(float(w) for w in np.atleast_1d(half_widths))
        center = (0.0,) * len(half_widths) if center is None else tuple(center)
        return cls("box", center, half_widths)

    @classmethod
    def ball(cls, radius, dim=1, center=None):
        center = (0.0,) * dim if center is None else tuple(center)
        return cls("ball", center, (float(radius),))

    @property
    def dim(self):
        return len(self.center)

    @property
    def diameter(self):
        if self.kind == "box":
            return 2.0 * float(np.linalg.norm(self.size))
        return 2.0 * self.size[0]

    @property
    def extent(self):
        """The largest |x_i| over the region, i.e. the half width of a box
        centred at 0 that contains it."""
        c = np.abs(np.asarray(self.center))
        if self.kind == "box":
            return float(np.max(c + np.asarray(self.size)))
        return float(np.max(c) + self.size[0])

    def _relative(self, points):
        points = np.asarray(points, dtype=float)
        center = np.asarray(self.center).reshape((-1,) + (1,) * (points.ndim - 1))
        return points - center

    def contains(self, points):
        """Membership of points of shape (N, ...)."""
        d = self._relative(points)
        if self.kind == "box":
            widths = np.asarray(self.size).reshape((-1,) + (1,) * (d.ndim - 1))
            return np.all(np.abs(d) < widths, axis=0)
        return np.sqrt(np.sum(d**2, axis=0)) < self.size[0]

    def contains_ball(self, center, radius):
        """Whether the closed ball B(center, radius) lies in the region."""
        center = np.asarray(center, dtype=float) - np.asarray(self.center)
        if self.kind == "box":
            return bool(np.all(np.abs(center) + radius < np.asarray(self.size)))
        return float(np.linalg.norm(center)) + radius < self.size[0]

    def boundary_samples(self, count=64):
        """Deterministic points on the boundary, shape (N, count)."""
        rng = np.random.default_rng(0)
        N = self.dim
        center = np.asarray(self.center)[:, None]
        if self.kind == "ball":
            directions = rng.standard_normal((N, count))
            directions /= np.linalg.norm(directions, axis=0)
            return center + self.size[0] * directions
        if N == 1:
            return center + np.array([[-self.size[0], self.size[0]]])
        widths = np.asarray(self.size)[:, None]
        points = rng.uniform(-1.0, 1.0, (N, count))
        axis = np.arange(count) % N
        sign = np.where(np.arange(count) % (2 * N) < N, -1.0, 1.0)
        points[axis, np.arange(count)] = sign
        return center + widths * points


@dataclass(frozen=True)
class WellSet:
    """The set M where V attains -V0: a point (radius 0) or a closed ball."""

    center: tuple
    radius: float = 0.0

    def distance(self, points):
        """dist(x, M) for points of shape (N, ...)."""
        points = np.asarray(points, dtype=float)
        center = np.asarray(self.center).reshape((-1,) + (1,) * (points.ndim - 1))
        r = np.sqrt(np.sum((points - center) ** 2, axis=0))
        return np.maximum(r - self.radius, 0.0)

    def samples(self, count=5):
        """count points of M along the first axis, shape (count, N)."""
        center = np.asarray(self.center, dtype=float)
        points = np.tile(center, (count, 1))
        if self.radius > 0:
            points[:, 0] += np.linspace(-self.radius, self.radius, count)
        return points


@dataclass(frozen=True, eq=False)
class PotentialSpec:
    """The potential V, the well region Λ and the constants V0, V1.

    Attributes
    ----------
    name : str
    function : callable
        V evaluated on points of shape (N, ...).
    region : Region
        Λ.
    V0 : float
        -V0 = inf over Λ of V.
    V1 : float
        -V1 = inf of V.
    well : WellSet
        M = {x in Λ : V(x) = -V0}.
    strict_well : bool
        Whether inf_Λ V < min_∂Λ V is required; a constant potential has
        no strict well.
    """

    name: str
    function: object
    region: Region
    V0: float
    V1: float
    well: WellSet
    strict_well: bool = True

    @property
    def dim(self):
        return self.region.dim

    def __call__(self, points):
        return np.asarray(self.function(np.asarray(points, dtype=float)), dtype=float)

    def check_well(self, samples=64):
        """Verify inf_Λ V < min_∂Λ V on boundary samples.

        Raises
        ------
        ConfigurationError
        """
        if not self.strict_well:
            return
        boundary = float(np.min(self(self.region.boundary_samples(samples))))
        if not -self.V0 < boundary:
            raise ConfigurationError(
                f"inf over Lambda of V = {-self.V0:g} is not below the boundary "
                f"minimum {boundary:g}",
                inequality="inf_Lambda V >= min_boundary V",
            )

    def distance_to_well(self, points):
        return self.well.distance(points)


def gaussian_well(dim=1, depth=0.5, half_width=2.0):
    """V(x) = -V0 exp(-|x|²) on Λ = (-w, w)^N with M = {0}."""

    def function(x):
        return -depth * np.exp(-np.sum(x**2, axis=0))

    return PotentialSpec(
        name="gaussian",
        function=function,
        region=Region.box((half_width,) * dim),
        V0=float(depth),
        V1=float(depth),
        well=WellSet((0.0,) * dim),
    )


def plateau_well(dim=1, depth=0.5, radius=0.5, margin=2.0):
    """V = -V0 exp(-max(|x| - r0, 0)²), flat on the ball of radius r0.

    Λ = (-(r0 + margin), r0 + margin)^N and M is the closed ball.
    """

    def function(x):
        r = np.sqrt(np.sum(x**2, axis=0))
        return -depth * np.exp(-np.maximum(r - radius, 0.0) ** 2)

    return PotentialSpec(
        name="plateau",
        function=function,
        region=Region.box((radius + margin,) * dim),
        V0=float(depth),
        V1=float(depth),
        well=WellSet((0.0,) * dim, float(radius)),
    )


def constant_potential(dim=1, depth=0.5, half_width=2.0):
    """V ≡ -V0, with Λ = (-w, w)^N and M = {0} as the reference well point."""

    def function(x):
        return np.full(x.shape[1:], -depth)

    return PotentialSpec(
        name="constant",
        function=function,
        region=Region.box((half_width,) * dim),
        V0=float(depth),
        V1=float(depth),
        well=WellSet((0.0,) * dim),
        strict_well=False,
    )


POTENTIALS = {
    "gaussian": gaussian_well,
    "plateau": plateau_well,
    "constant": constant_potential,
}


def _kappa_inequality(multiplicity):
    if multiplicity:
        return "kappa <= 2 V0/(m^{2s}-V0)"
    return "kappa <= max{V1/(m^{2s}-V1), theta/(theta-2)}"


@dataclass(frozen=True)
class PenalizationParams:
    """The penalization constants.

    κ, the cap slope ℓ = V1/κ (V0/κ in multiplicity mode) and a with f(a)/a = ℓ.
    """

    kappa: float
    slope: float
    a: float
    theta_ar: float
    multiplicity: bool = False

    @staticmethod
    def kappa_bound(potential, nonlinearity, m, s, multiplicity=False):
        """The lower bound κ must exceed."""
        m2s = m ** (2.0 * s)
        theta = nonlinearity.theta_ar
        bound = max(potential.V1 / (m2s - potential.V1), theta / (theta - 2.0))
        if multiplicity:
            bound = max(bound, 2.0 * potential.V0 / (m2s - potential.V0))
        return bound

    @classmethod
    def for_problem(cls, potential, nonlinearity, m, s, kappa=None, multiplicity=False):
        """The default κ = 2 max{V1/(m^{2s}-V1), θ/(θ-2)} (and ≥ 4V0/(m^{2s}-V0)
        in multiplicity mode), or a given κ after validation."""
        m2s = m ** (2.0 * s)
        if not 0.0 < potential.V1 < m2s:
            raise ConfigurationError(
                f"V1 = {potential.V1} is not in (0, m^(2s) = {m2s:g})",
                inequality="V1 >= m^{2s}" if potential.V1 >= m2s else "V1 <= 0",
            )
        if kappa is None:
            theta = nonlinearity.theta_ar
            kappa = 2.0 * max(
                potential.V1 / (m2s - potential.V1), theta / (theta - 2.0)
            )
            if multiplicity:
                kappa = max(kappa, 2.0 * 2.0 * potential.V0 / (m2s - potential.V0))
        bound = cls.kappa_bound(potential, nonlinearity, m, s, multiplicity)
        if not kappa > bound:
            raise ConfigurationError(
                f"kappa = {kappa} does not exceed {bound:g}",
                inequality=_kappa_inequality(multiplicity),
            )
        level = potential.V0 if multiplicity else potential.V1
        slope = level / kappa
        return cls(
            kappa=float(kappa),
            slope=float(slope),
            a=float(nonlinearity.switch_height(slope)),
            theta_ar=float(nonlinearity.theta_ar),
            multiplicity=bool(multiplicity),
        )


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """One instance of the penalized problem."""

    dim: int
    s: float
    m: float
    potential: PotentialSpec
    nonlinearity: PowerNonlinearity
    penalization: PenalizationParams

    def __post_init__(self):
        self.validate()

    @functools.cached_property
    def constants(self):
        return operator_constants(self.dim, self.s, self.m)

    @property
    def m2s(self):
        return self.m ** (2.0 * self.s)

    def validate(self):
        """Re-check every inequality the problem relies on.

        Raises
        ------
        ConfigurationError
            Naming the violated inequality.
        """
        constants = self.constants
        if self.potential.dim != self.dim:
            raise ConfigurationError(
                f"the potential is {self.potential.dim}-dimensional, the problem "
                f"{self.dim}-dimensional"
            )
        if not 0.0 < self.potential.V1 < self.m2s:
            raise ConfigurationError(
                f"V1 = {self.potential.V1} is not in (0, m^(2s) = {self.m2s:g})",
                inequality="V1 >= m^{2s}",
            )
        if self.potential.V0 > self.potential.V1:
            raise ConfigurationError(
                f"V0 = {self.potential.V0} exceeds V1 = {self.potential.V1}",
                inequality="V0 > V1",
            )
        self.nonlinearity.validate(constants.two_star_s)
        self.potential.check_well()
        multiplicity = self.penalization.multiplicity
        bound = PenalizationParams.kappa_bound(
            self.potential, self.nonlinearity, self.m, self.s, multiplicity
        )
        if not self.penalization.kappa > bound:
            raise ConfigurationError(
                f"kappa = {self.penalization.kappa} does not exceed {bound:g}",
                inequality=_kappa_inequality(multiplicity),
            )

    @classmethod
    def build(cls, dim, s, m, potential, p=3.0, kappa=None, multiplicity=False):
        nonlinearity = PowerNonlinearity(p)
        penalization = PenalizationParams.for_problem(
            potential, nonlinearity, m, s, kappa=kappa, multiplicity=multiplicity
        )
        return cls(dim, s, m, potential, nonlinearity, penalization)

    @classmethod
    def benchmark(cls, multiplicity=False):
        """N=1, s=0.3, m=1, p=3, V = -0.5 exp(-x²), Λ = (-2, 2)."""
        return cls.build(
            1, 0.3, 1.0, gaussian_well(1, 0.5, 2.0), 3.0, multiplicity=multiplicity
        )

    @classmethod
    def plateau(cls, multiplicity=False):
        """The benchmark with V flat at -0.5 on |x| <= 1/2, Λ = (-2.5, 2.5)."""
        return cls.build(
            1,
            0.3,
            1.0,
            plateau_well(1, 0.5, 0.5, 2.0),
            3.0,
            multiplicity=multiplicity,
        )

    @property
    def decay_rate(self):
        """sqrt(m² - V0^{1/s}), the decay rate of the limiting ground state."""
        return float(np.sqrt(self.m**2 - self.potential.V0 ** (1.0 / self.s)))


def _inside(x, t, pot):
    points = np.reshape(np.asarray(x, dtype=float), (pot.dim,) + t.shape)
    return pot.region.contains(points)


def penalized_g(x, t, pot, pen, nl):
    """g(x, t): f(t) in Λ; outside, f(t) below a and ℓ t above.

    x holds the coordinates, shape (N,) + t.shape.
    """
    t = np.asarray(t, dtype=float)
    return _penalized_reaction(t, _inside(x, t, pot), pen, nl)


def penalized_G(x, t, pot, pen, nl):
    """The primitive of penalized_g in t."""
    t = np.asarray(t, dtype=float)
    return _penalized_primitive(t, _inside(x, t, pot), pen, nl)


def _penalized_reaction(t, inside, pen, nl):
    capped = ~np.asarray(inside) & (t >= pen.a)
    result = np.where(capped, pen.slope * t, nl.f(t))
    return float(result) if np.ndim(result) == 0 else result


def _penalized_primitive(t, inside, pen, nl):
    capped = ~np.asarray(inside) & (t >= pen.a)
    cap = nl.F(pen.a) + 0.5 * pen.slope * (t * t - pen.a * pen.a)
    result = np.where(capped, cap, nl.F(t))
    return float(result) if np.ndim(result) == 0 else result


@functools.lru_cache(maxsize=32)
def _symbol_values(spec, m, s):
    values = (spec.k_squared() + m * m) ** s
    values.setflags(write=False)
    return values


class EnergyFunctional:
    """Common machinery of the trace functionals.

    Subclasses supply the potential term, the reaction g and its primitive,
    and the shift of the preconditioner.
    """

    def potential_values(self, spec):
        raise NotImplementedError()

    def reaction(self, values, spec):
        raise NotImplementedError()

    def primitive(self, values, spec):
        raise NotImplementedError()

    def preconditioner_shift(self):
        return 1.0

    def closed_form_scaling(self, u):
        """The Nehari scaling in closed form, or None."""
        return None

    def _spectrum(self, u):
        return scipy.fft.fftn(u.values, norm="ortho", workers=grid_module.FFT_WORKERS)

    def quadratic(self, u):
        """⟨Au, u⟩ + ∫ V u²."""
        spec = u.spec
        symbol = _symbol_values(spec, self.m, self.s)
        kinetic = spec.cell_volume * np.sum(symbol * np.abs(self._spectrum(u)) ** 2)
        potential = spec.cell_volume * np.sum(self.potential_values(spec) * u.values**2)
        return float(kinetic + potential)

    def energy(self, u):
        G = self.primitive(u.values, u.spec)
        value = 0.5 * self.quadratic(u) - u.spec.cell_volume * float(np.sum(G))
        if not np.isfinite(value):
            raise NumericalError("the energy is not finite")
        return value

    def apply_linear(self, u):
        """Au + V u."""
        spec = u.spec
        symbol = _symbol_values(spec, self.m, self.s)
        values = scipy.fft.ifftn(
            symbol * self._spectrum(u), norm="ortho", workers=grid_module.FFT_WORKERS
        ).real
        return values + self.potential_values(spec) * u.values

    def gradient(self, u):
        """The L² gradient Au + V u - g(u)."""
        values = self.apply_linear(u) - self.reaction(u.values, u.spec)
        if not np.all(np.isfinite(values)):
            raise NumericalError("the gradient is not finite")
        return GridField(u.spec, values)

    def nehari_ratio(self, u, t, quadratic=None):
        """(⟨J'(tu), u⟩)/t = Q(u) - ∫ g(tu) u / t, decreasing in t."""
        q = self.quadratic(u) if quadratic is None else quadratic
        g = self.reaction(t * u.values, u.spec)
        return q - u.spec.cell_volume * float(np.sum(g * u.values)) / t

    def preconditioner(self, spec):
        """The symbol 1/((|k|²+m²)^s + shift) in offset order."""
        symbol = _symbol_values(spec, self.m, self.s)
        return 1.0 / (symbol + self.preconditioner_shift())

    def residual(self, u):
        """The Euler-Lagrange residual in the discrete H^{-s} norm."""
        return dual_norm(self.gradient(u), self.m, self.s)


@dataclass(frozen=True, eq=False)
class AutonomousEnergy(EnergyFunctional):
    """L_μ with a constant potential μ > -m^{2s} and the unpenalized F."""

    mu: float
    nonlinearity: PowerNonlinearity
    m: float = 1.0
    s: float = 0.5

    def __post_init__(self):
        m2s = self.m ** (2.0 * self.s)
        if not self.mu > -m2s:
            raise ConfigurationError(
                f"mu = {self.mu} <= -m^(2s) = {-m2s:g}", inequality="mu <= -m^{2s}"
            )

    def potential_values(self, spec):
        return self.mu

    def reaction(self, values, spec):
        return self.nonlinearity.f(values)

    def primitive(self, values, spec):
        return self.nonlinearity.F(values)

    def preconditioner_shift(self):
        return max(self.mu, 0.0) + 1.0

    def closed_form_scaling(self, u):
        p = self.nonlinearity.p
        positive = np.maximum(u.values, 0.0)
        moment = u.spec.cell_volume * float(np.sum(positive ** (p + 1.0)))
        if moment <= 0:
            raise ProjectionError("the field has no positive part")
        return (self.quadratic(u) / moment) ** (1.0 / (p - 1.0))


@functools.lru_cache(maxsize=32)
def _scaled_fields(problem, epsilon, spec):
    """V(εx) and the indicator of Λ_ε on the grid."""
    points = epsilon * np.asarray(spec.coordinates())
    values = problem.potential(points)
    inside = problem.potential.region.contains(points)
    values.setflags(write=False)
    inside.setflags(write=False)
    return values, inside


@dataclass(frozen=True, eq=False)
class PenalizedEnergy(EnergyFunctional):
    """J_ε for a ProblemSpec."""

    problem: ProblemSpec
    epsilon: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ConfigurationError(
                f"epsilon = {self.epsilon} is not positive", inequality="epsilon <= 0"
            )

    @property
    def m(self):
        return self.problem.m

    @property
    def s(self):
        return self.problem.s

    def potential_values(self, spec):
        return _scaled_fields(self.problem, self.epsilon, spec)[0]

    def inside(self, spec):
        """The indicator of Λ_ε on the grid."""
        return _scaled_fields(self.problem, self.epsilon, spec)[1]

    def reaction(self, values, spec):
        problem = self.problem
        return _penalized_reaction(
            values, self.inside(spec), problem.penalization, problem.nonlinearity
        )

    def primitive(self, values, spec):
        problem = self.problem
        return _penalized_primitive(
            values, self.inside(spec), problem.penalization, problem.nonlinearity
        )

    def unpenalized_residual(self, u):
        """The residual of Au + V(εx)u - f(u) in the discrete H^{-s} norm."""
        values = self.apply_linear(u) - self.problem.nonlinearity.f(u.values)
        return dual_norm(GridField(u.spec, values), self.m, self.s)


def energy_J(u, epsilon, pot, pen, nl, m, s):
    """J_ε(u) for the potential, penalization and nonlinearity given."""
    problem = ProblemSpec(u.spec.dim, s, m, pot, nl, pen)
    return PenalizedEnergy(problem, epsilon).energy(u)


def gradient_J(u, epsilon, pot, pen, nl, m, s):
    problem = ProblemSpec(u.spec.dim, s, m, pot, nl, pen)
    return PenalizedEnergy(problem, epsilon).gradient(u)


def energy_L(u, mu, nl, m, s):
    """L_μ(u); raises ConfigurationError for μ <= -m^{2s}."""
    return AutonomousEnergy(mu, nl, m, s).energy(u)


def gradient_L(u, mu, nl, m, s):
    return AutonomousEnergy(mu, nl, m, s).gradient(u)


@dataclass(frozen=True, eq=False)
class NehariPoint:
    """A field on the Nehari manifold.

    Attributes
    ----------
    u : GridField
        The projected field t_u times the input.
    t_u : float
        The scaling that was applied.
    energy : float
    residual : float
        The Euler-Lagrange residual in the discrete H^{-s} norm, or nan if
        it was not evaluated.
    iterations : int
        Descent iterations that produced the point (0 for a projection).
    history : tuple of float
        The preconditioned residual at each iteration.
    flags : tuple of str
    """

    u: GridField
    t_u: float
    energy: float
    residual: float = float("nan")
    iterations: int = 0
    history: tuple = ()
    flags: tuple = field(default=())


def nehari_project(u, functional, evaluate_residual=True):
    """Scale u onto the Nehari manifold of the functional.

    The scaling t solves ⟨J'(tu), u⟩ = 0. The pure-power autonomous case is
    solved in closed form; otherwise t is bracketed by doubling or halving
    from 1 and refined by bisection in log t.

    Parameters
    ----------
    u : GridField
    functional : EnergyFunctional
    evaluate_residual : bool
        Whether to compute the Euler-Lagrange residual of the result.

    Returns
    -------
    NehariPoint

    Raises
    ------
    ProjectionError
        If the positive part of u is empty or no sign change is found.
    """
    if not np.any(u.values > 0.0):
        raise ProjectionError("the field has no positive part")

    t = functional.closed_form_scaling(u)
    if t is None:
        t = _bracket_scaling(u, functional)

    scaled = u.with_values(t * u.values)
    residual = functional.residual(scaled) if evaluate_residual else float("nan")
    return NehariPoint(
        u=scaled,
        t_u=float(t),
        energy=functional.energy(scaled),
        residual=residual,
    )


def _bracket_scaling(u, functional):
    q = functional.quadratic(u)

    def ratio(t):
        return functional.nehari_ratio(u, t, quadratic=q)

    lo = hi = 1.0
    if ratio(1.0) > 0:
        for _ in range(MAX_DOUBLINGS):
            hi *= 2.0
            if ratio(hi) <= 0:
                break
        else:
            raise ProjectionError(
                f"no Nehari scaling below 2^{MAX_DOUBLINGS}: the positive part "
                "does not reach the well region"
            )
        lo = 0.5 * hi
    else:
        for _ in range(MAX_DOUBLINGS):
            lo *= 0.5
            if ratio(lo) > 0:
                break
        else:
            raise ProjectionError(f"no Nehari scaling above 2^-{MAX_DOUBLINGS}")
        hi = 2.0 * lo

    for _ in range(BISECTION_STEPS):
        mid = np.sqrt(lo * hi)
        if ratio(mid) > 0:
            lo = mid
        else:
            hi = mid
    return float(np.sqrt(lo * hi))


def ray_profile(u, functional, ts):
    """The energy along the ray t -> t u at the given t."""
    return np.array([functional.energy(u.with_values(t * u.values)) for t in ts])


@dataclass(frozen=True)
class SolverConfig:
    """Controls of the Nehari-constrained descent.

    Attributes
    ----------
    max_iterations : int
    tolerance : float
        Stop when the preconditioned residual sqrt(⟨r, P r⟩) is below this.
    initial_step : float
        The step tried first at every iteration; halved on rejection.
    max_halvings : int
    positivity_tolerance : float
        Negative overshoot below this is zeroed at the end.
    energy_slack : float
        Relative energy increase still accepted (round-off).
    """

    max_iterations: int = 5000
    tolerance: float = 1.0e-8
    initial_step: float = 1.0
    max_halvings: int = 40
    positivity_tolerance: float = 1.0e-12
    energy_slack: float = 1.0e-14

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ConfigurationError("max_iterations must be at least 1")
        if not 0.0 < self.initial_step <= 1.0:
            raise ConfigurationError(
                f"initial step {self.initial_step} is not in (0, 1]",
                inequality="0 < step <= 1",
            )
        if not self.tolerance > 0:
            raise ConfigurationError("the tolerance must be positive")


def minimize_on_nehari(functional, initial, config=None):
    """Preconditioned descent of the functional on its Nehari manifold.

    Each step is u <- nehari_project(u - η P ∇J(u)) with
    P = ((|k|²+m²)^s + shift)^{-1}, halving η from config.initial_step until
    the energy does not increase.

    Returns
    -------
    NehariPoint
        With iterations, history and the final H^{-s} residual.

    Raises
    ------
    NonConvergenceError
        At the iteration cap or when no step decreases the energy; carries
        the residual history.
    PositivityError
        If the result has a negative part below -positivity_tolerance.
    """
    config = SolverConfig() if config is None else config
    point = nehari_project(initial, functional, evaluate_residual=False)
    u, energy = point.u, point.energy
    precondition = functional.preconditioner(u.spec)
    history = []

    converged = False
    for iteration in range(1, config.max_iterations + 1):
        gradient = functional.gradient(u)
        direction = scipy.fft.ifftn(
            precondition
            * scipy.fft.fftn(gradient.values, workers=grid_module.FFT_WORKERS),
            workers=grid_module.FFT_WORKERS,
        ).real
        residual = float(
            np.sqrt(max(u.spec.cell_volume * np.sum(gradient.values * direction), 0.0))
        )
        history.append(residual)
        if residual < config.tolerance:
            converged = True
            break

        step = config.initial_step
        accepted = None
        for _ in range(config.max_halvings):
            try:
                trial = nehari_project(
                    u.with_values(u.values - step * direction),
                    functional,
                    evaluate_residual=False,
                )
            except ProjectionError:
                step *= 0.5
                continue
            if trial.energy <= energy + config.energy_slack * abs(energy):
                accepted = trial
                break
            step *= 0.5
        if accepted is None:
            raise NonConvergenceError(
                f"no descent step found at iteration {iteration} "
                f"(residual {residual:.3e})",
                history,
            )
        u, energy = accepted.u, accepted.energy
        if iteration % 100 == 0:
            logger.debug(
                f"iteration {iteration}: energy {energy:.12g}, "
                f"residual {residual:.3e}"
            )

    if not converged:
        raise NonConvergenceError(
            f"no convergence in {config.max_iterations} iterations "
            f"(residual {history[-1]:.3e})",
            history,
        )

    flags = ()
    lowest = float(np.min(u.values))
    if lowest < -config.positivity_tolerance:
        raise PositivityError(f"the solution has a negative part {lowest:.3e}")
    if lowest < 0.0:
        logger.warning(f"zeroing a negative overshoot of {lowest:.3e}")
        u = u.with_values(np.maximum(u.values, 0.0))
        flags = ("positivity-cleanup",)

    return NehariPoint(
        u=u,
        t_u=1.0,
        energy=functional.energy(u),
        residual=functional.residual(u),
        iterations=len(history),
        history=tuple(history),
        flags=flags,
    )


def gaussian_start(grid, center=None, width=1.0, amplitude=1.0):
    """A positive Gaussian bump."""
    r = grid.radius(center)
    return GridField(grid, amplitude * np.exp(-0.5 * (r / width) ** 2))


def random_start(grid, rng):
    """A Gaussian bump with random centre, width and amplitude."""
    L = grid.half_width
    center = rng.uniform(-0.25 * L, 0.25 * L, grid.dim)
    return gaussian_start(
        grid, center, width=rng.uniform(0.5, 2.0), amplitude=rng.uniform(0.5, 2.0)
    )


def ground_state(mu, nl, m, s, grid, config=None, initial=None):
    """The positive ground state of (-Δ+m²)^s w + μ w = f(w) and d_μ.

    Parameters
    ----------
    mu : float
        The constant potential, μ > -m^{2s}.
    nl : PowerNonlinearity
    m, s : float
    grid : GridSpec
    config : SolverConfig, optional
    initial : GridField, optional
        Defaults to a unit Gaussian at the origin.

    Returns
    -------
    (NehariPoint, float)
        The ground state and its energy d_μ.
    """
    functional = AutonomousEnergy(mu, nl, m, s)
    initial = gaussian_start(grid) if initial is None else initial
    point = minimize_on_nehari(functional, initial, config)
    logger.info(
        f"ground state mu = {mu:g}: d = {point.energy:.12g} after {point.iterations} "
        f"iterations, residual {point.residual:.2e}"
    )
    return point, point.energy


def ground_state_multistart(
    mu, nl, m, s, grid, count=10, seed=0, config=None, workers=None
):
    """ground_state from count random starts, optionally in a thread pool.

    Returns
    -------
    [NehariPoint]
        In the order of the spawned seeds.
    """
    seeds = np.random.SeedSequence(seed).spawn(count)
    starts = [random_start(grid, np.random.default_rng(sq)) for sq in seeds]

    def solve(start):
        return ground_state(mu, nl, m, s, grid, config, initial=start)[0]

    if workers is None or workers <= 1:
        return [solve(start) for start in starts]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(solve, starts))
