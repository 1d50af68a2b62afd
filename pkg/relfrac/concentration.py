# -*- coding: utf-8 -*-

"""Penalized solves, test functions, barycenters and the ε-sweep.

The penalized problem on R^N is solved in a periodic box that holds Λ/ε
with a margin of several decay lengths. Every box shares the spacing of the
reference grid on which the limiting ground state w is computed, so energies
from different boxes compare without a discretization offset.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import functools
import logging
import math

import numpy as np
import pandas

from .errors import (
    ConfigurationError,
    DomainError,
    InfeasibleEpsilonError,
    RelFracError,
    WindowError,
)
from .grid import GridSpec, next_power_of_two, resample
from .variational import (
    AutonomousEnergy,
    PenalizedEnergy,
    SolverConfig,
    gaussian_start,
    minimize_on_nehari,
    nehari_project,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridPolicy:
    """How boxes are sized for the reference and the penalized problems.

    Attributes
    ----------
    spacing : float
        The common grid spacing h.
    max_points : int
        The cap on points per axis.
    decay_lengths : float
        Minimum half width in units of 1/ĉ, ĉ the decay rate of w.
    scale : float
        Minimum half width in units of diam(Λ)/ε.
    """

    spacing: float = 0.0390625
    max_points: int = 4096
    decay_lengths: float = 16.0
    scale: float = 2.0

    def __post_init__(self):
        if not self.spacing > 0:
            raise ConfigurationError(
                f"grid spacing {self.spacing} is not positive", inequality="h <= 0"
            )

    def _grid(self, dim, half_width, epsilon=None):
        points = max(next_power_of_two(2.0 * half_width / self.spacing), 16)
        if points > self.max_points:
            if epsilon is None:
                what = "the reference problem"
            else:
                what = f"epsilon = {epsilon:g}"
            raise InfeasibleEpsilonError(
                f"{what} needs {points} points per axis, more than {self.max_points}",
                inequality="n > max-points",
            )
        return GridSpec(dim, 0.5 * points * self.spacing, points)

    def reference(self, problem):
        """The grid of the limiting ground state w."""
        return self.autonomous(problem.dim, problem.decay_rate)

    def autonomous(self, dim, rate):
        """A grid holding decay_lengths decay lengths 1/rate."""
        return self._grid(dim, self.decay_lengths / rate)

    def penalized(self, problem, epsilon):
        """The grid of the penalized problem at ε.

        Raises
        ------
        InfeasibleEpsilonError
            If the box exceeds max_points per axis.
        """
        region = problem.potential.region
        half_width = max(
            self.decay_lengths / problem.decay_rate,
            self.scale * region.diameter / epsilon,
        )
        return self._grid(problem.dim, half_width, epsilon)


def check_box(grid, problem, epsilon):
    """Raise InfeasibleEpsilonError unless Λ/ε lies inside the box."""
    extent = problem.potential.region.extent / epsilon
    if not extent < grid.half_width:
        raise InfeasibleEpsilonError(
            f"Lambda/epsilon reaches {extent:g}, beyond the box half width "
            f"{grid.half_width:g}",
            inequality="Lambda/epsilon not inside the box",
        )


@functools.lru_cache(maxsize=8)
def reference_ground_state(problem, policy=None, config=None):
    """The ground state w of the limiting problem at μ = V(0) = -V0, and d."""
    policy = GridPolicy() if policy is None else policy
    grid = policy.reference(problem)
    functional = AutonomousEnergy(
        -problem.potential.V0, problem.nonlinearity, problem.m, problem.s
    )
    point = minimize_on_nehari(functional, gaussian_start(grid), config)
    logger.info(f"reference energy d = {point.energy:.12g} on {grid}")
    return point, point.energy


def cutoff(r, delta):
    """The C¹ ramp η: 1 below δ/2, 0 above δ, 1 - 3τ² + 2τ³ between."""
    tau = np.clip((np.asarray(r, dtype=float) - 0.5 * delta) / (0.5 * delta), 0.0, 1.0)
    return 1.0 - tau * tau * (3.0 - 2.0 * tau)


def make_phi(
    z, epsilon, problem, w=None, delta=1.5, grid=None, policy=None, config=None
):
    """The test function Φ_ε(z): the cut-off ground state at z/ε, projected.

    Parameters
    ----------
    z : array-like
        A point of the well set M.
    epsilon : float
    problem : ProblemSpec
    w : GridField, optional
        The limiting ground state, centred at the origin of its grid.
        Computed with reference_ground_state when omitted.
    delta : float
        The cutoff radius; B(z, δ) must lie inside Λ.
    grid : GridSpec, optional
        The grid of the result; policy.penalized(problem, ε) by default.

    Returns
    -------
    NehariPoint
        Its t_u is t_ε.
    """
    policy = GridPolicy() if policy is None else policy
    z = np.broadcast_to(np.asarray(z, dtype=float), (problem.dim,))
    if not delta > 0:
        raise ConfigurationError(
            f"delta = {delta} is not positive", inequality="delta <= 0"
        )
    if not problem.potential.region.contains_ball(z, delta):
        raise ConfigurationError(
            f"the ball of radius {delta:g} about {tuple(z)} is not inside Lambda",
            inequality="B(z, delta) not inside Lambda",
        )
    grid = policy.penalized(problem, epsilon) if grid is None else grid
    if w is None:
        w = reference_ground_state(problem, policy, config)[0].u

    shifted = resample(w, grid, offset=z / epsilon)
    eta = cutoff(epsilon * grid.radius(z / epsilon), delta)
    psi = shifted.with_values(np.maximum(shifted.values * eta, 0.0))
    return nehari_project(psi, PenalizedEnergy(problem, epsilon))


def solve_penalized(epsilon, problem, grid=None, init=None, config=None, policy=None):
    """Minimize J_ε on its Nehari manifold.

    Parameters
    ----------
    epsilon : float
    problem : ProblemSpec
    grid : GridSpec, optional
        policy.penalized(problem, ε) by default.
    init : GridField, optional
        Defaults to make_phi at the centre of the well set.
    config : SolverConfig, optional

    Returns
    -------
    (NehariPoint, float)
        The solution u_ε and c_ε.

    Raises
    ------
    InfeasibleEpsilonError
        If Λ/ε does not fit in an affordable box.
    NonConvergenceError
    """
    policy = GridPolicy() if policy is None else policy
    grid = policy.penalized(problem, epsilon) if grid is None else grid
    check_box(grid, problem, epsilon)
    if init is None:
        z = problem.potential.well.center
        init = make_phi(z, epsilon, problem, grid=grid, policy=policy, config=config).u
    point = minimize_on_nehari(PenalizedEnergy(problem, epsilon), init, config)
    logger.info(
        f"epsilon = {epsilon:g}: c = {point.energy:.12g} after {point.iterations} "
        f"iterations on {grid.points} points"
    )
    return point, point.energy


def barycenter(u, epsilon, rho):
    """β_ε(u) = ∫ Υ(εx) u² / ∫ u², with Υ clamping to the ball of radius ρ.

    Raises
    ------
    DomainError
        If ρ <= 0 or u vanishes identically.
    """
    if not rho > 0:
        raise DomainError(f"the clamp radius must be positive, got {rho}")
    weight = u.values**2
    total = float(np.sum(weight))
    if total == 0.0:
        raise DomainError("the barycenter of the zero field is undefined")
    points = epsilon * np.asarray(u.spec.coordinates())
    r = np.sqrt(np.sum(points**2, axis=0))
    with np.errstate(divide="ignore"):
        factor = np.where(r < rho, 1.0, rho / r)
    clamped = points * factor
    return np.array([float(np.sum(c * weight)) / total for c in clamped])


@dataclass(frozen=True)
class DecayFit:
    """u ≈ C e^{-c r} on a window, and the competing power law.

    Attributes
    ----------
    amplitude : float
        C.
    rate : float
        c.
    r2 : float
        R² of the exponential model in log u.
    power_r2 : float
        R² of log u against log r.
    power_exponent : float
        The fitted exponent of the power law.
    """

    amplitude: float
    rate: float
    r2: float
    power_r2: float
    power_exponent: float

    @property
    def exponential_wins(self):
        return self.r2 > self.power_r2


def _r_squared(data, model):
    residual = np.sum((data - model) ** 2)
    total = np.sum((data - np.mean(data)) ** 2)
    return 1.0 - residual / total if total > 0 else 1.0


def decay_fit(u, center=None, window=(4.0, 10.0)):
    """Fit exponential and power laws to u on the annulus r_lo <= r <= r_hi.

    Samples at the same distance from the centre are averaged first.

    Raises
    ------
    WindowError
        If the window leaves the box, holds too few radii, or contains a
        nonpositive sample.
    """
    spec = u.spec
    center = np.zeros(spec.dim) if center is None else np.asarray(center, dtype=float)
    r_lo, r_hi = (float(w) for w in window)
    if not 0.0 < r_lo < r_hi:
        raise WindowError(f"window ({r_lo:g}, {r_hi:g}) is not an interval in r > 0")
    room = float(np.min(spec.half_width - np.abs(center)))
    if r_hi > room:
        raise WindowError(
            f"window edge {r_hi:g} is beyond the box ({room:g} from the centre)"
        )

    r = spec.radius(center)
    mask = (r >= r_lo) & (r <= r_hi)
    samples = u.values[mask]
    if np.any(samples <= 0.0):
        raise WindowError(f"nonpositive samples in the window ({r_lo:g}, {r_hi:g})")
    radii, inverse = np.unique(np.round(r[mask], 12), return_inverse=True)
    if radii.size < 3:
        raise WindowError(f"only {radii.size} distinct radii in the window")
    means = np.bincount(inverse, weights=samples) / np.bincount(inverse)
    log_u = np.log(means)

    slope, intercept = np.polyfit(radii, log_u, 1)
    power_slope, power_intercept = np.polyfit(np.log(radii), log_u, 1)
    return DecayFit(
        amplitude=float(np.exp(intercept)),
        rate=float(-slope),
        r2=float(_r_squared(log_u, np.polyval([slope, intercept], radii))),
        power_r2=float(
            _r_squared(log_u, np.polyval([power_slope, power_intercept], np.log(radii)))
        ),
        power_exponent=float(-power_slope),
    )


@dataclass(frozen=True)
class SweepRecord:
    """The outcome of one penalized solve in an ε-sweep."""

    epsilon: float
    energy: float = math.nan
    maximum_point: tuple = ()
    potential_at_maximum: float = math.nan
    distance_to_well: float = math.nan
    sup_outside: float = math.nan
    below_a: bool = False
    sup_norm: float = math.nan
    decay: object = None
    residual: float = math.nan
    unpenalized_residual: float = math.nan
    iterations: int = 0
    points: int = 0
    spacing: float = math.nan
    error: object = None

    def as_row(self):
        row = {
            "epsilon": self.epsilon,
            "c_epsilon": self.energy,
            "V(eps x_max)": self.potential_at_maximum,
            "dist(eps x_max, M)": self.distance_to_well,
            "sup outside": self.sup_outside,
            "below a": self.below_a,
            "sup norm": self.sup_norm,
            "residual": self.residual,
            "unpenalized residual": self.unpenalized_residual,
            "iterations": self.iterations,
            "points": self.points,
        }
        for i, x in enumerate(self.maximum_point):
            row[f"x_max{i + 1}"] = x
        decay = self.decay
        row["decay C"] = decay.amplitude if decay else math.nan
        row["decay c"] = decay.rate if decay else math.nan
        row["decay R2"] = decay.r2 if decay else math.nan
        row["power R2"] = decay.power_r2 if decay else math.nan
        row["error"] = "" if self.error is None else str(self.error)
        return row


@dataclass(frozen=True)
class SweepReport:
    """Records ordered by decreasing ε, with the limit d and the height a."""

    records: tuple
    reference_energy: float
    a: float
    notes: tuple = field(default=())

    def to_frame(self):
        frame = pandas.DataFrame([record.as_row() for record in self.records])
        frame["|c - d|"] = (frame["c_epsilon"] - self.reference_energy).abs()
        return frame

    @property
    def succeeded(self):
        return [record for record in self.records if record.error is None]


def _sweep_record(problem, epsilon, policy, config, window):
    try:
        grid = policy.penalized(problem, epsilon)
        point, energy = solve_penalized(
            epsilon, problem, grid, config=config, policy=policy
        )
    except RelFracError as e:
        logger.warning(f"epsilon = {epsilon:g} failed: {e}")
        return SweepRecord(epsilon=epsilon, error=e)

    u = point.u
    functional = PenalizedEnergy(problem, epsilon)
    x_max = grid.point(u.argmax())
    scaled = epsilon * np.asarray(x_max)
    outside = ~functional.inside(grid)
    sup_outside = float(np.max(u.values[outside])) if np.any(outside) else 0.0
    try:
        decay = decay_fit(u, x_max, window)
    except WindowError as e:
        logger.warning(f"epsilon = {epsilon:g}: no decay fit: {e}")
        decay = None
    return SweepRecord(
        epsilon=epsilon,
        energy=energy,
        maximum_point=tuple(float(x) for x in x_max),
        potential_at_maximum=float(problem.potential(scaled)),
        distance_to_well=float(problem.potential.distance_to_well(scaled)),
        sup_outside=sup_outside,
        below_a=sup_outside < problem.penalization.a,
        sup_norm=u.sup(),
        decay=decay,
        residual=point.residual,
        unpenalized_residual=functional.unpenalized_residual(u),
        iterations=point.iterations,
        points=grid.points,
        spacing=grid.spacing,
    )


def epsilon_sweep(
    problem, epsilons, policy=None, config=None, workers=None, window=(4.0, 10.0)
):
    """Solve the penalized problem for every ε and collect the observables.

    A failing ε is recorded with its error and the sweep continues.

    Parameters
    ----------
    problem : ProblemSpec
    epsilons : [float]
    policy : GridPolicy, optional
    config : SolverConfig, optional
    workers : int, optional
        Solve in a thread pool of this size.
    window : (float, float)
        The annulus of the decay fits, about the maximum point.

    Returns
    -------
    SweepReport
    """
    policy = GridPolicy() if policy is None else policy
    config = SolverConfig() if config is None else config
    _, reference = reference_ground_state(problem, policy, config)
    ordered = sorted({float(e) for e in epsilons}, reverse=True)

    def run(epsilon):
        return _sweep_record(problem, epsilon, policy, config, window)

    if workers is None or workers <= 1:
        records = [run(epsilon) for epsilon in ordered]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(run, ordered))
    return SweepReport(tuple(records), reference, problem.penalization.a)
