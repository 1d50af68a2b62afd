#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Tests for the energies, the Nehari projection and the ground states."""

import numpy as np
import pytest

from relfrac import (
    AutonomousEnergy,
    ConfigurationError,
    GridSpec,
    NonConvergenceError,
    PenalizationParams,
    PenalizedEnergy,
    PowerNonlinearity,
    ProblemSpec,
    ProjectionError,
    SolverConfig,
    energy_J,
    energy_L,
    gradient_J,
    gradient_L,
    ground_state,
    minimize_on_nehari,
    nehari_project,
    penalized_G,
    penalized_g,
)
from relfrac.experiments import random_bumps
from relfrac.variational import (
    PotentialSpec,
    Region,
    WellSet,
    constant_potential,
    gaussian_start,
    gaussian_well,
    ground_state_multistart,
    plateau_well,
    ray_profile,
)

CUBIC = PowerNonlinearity(3.0)


@pytest.fixture
def autonomous():
    return AutonomousEnergy(-0.5, CUBIC, 1.0, 0.3)


@pytest.fixture
def bump(coarse_line):
    return gaussian_start(coarse_line)


@pytest.fixture(scope="module")
def solved():
    """The ground state at mu = -0.5 on a small grid."""
    return ground_state(-0.5, CUBIC, 1.0, 0.3, GridSpec(1, 10.0, 128))


def test_power_nonlinearity():
    """f, F and the switch height."""
    t = np.array([-1.0, 0.0, 2.0])
    np.testing.assert_allclose(CUBIC.f(t), [0.0, 0.0, 8.0])
    np.testing.assert_allclose(CUBIC.F(t), [0.0, 0.0, 4.0])
    a = CUBIC.switch_height(0.125)
    assert CUBIC.f(a) / a == pytest.approx(0.125)


def test_power_rejects():
    with pytest.raises(ConfigurationError):
        PowerNonlinearity(1.0)
    with pytest.raises(ConfigurationError):
        PowerNonlinearity(4.5).validate(5.0)


def test_regions():
    box = Region.box(2.0)
    ball = Region.ball(1.0, dim=2, center=(1.0, 0.0))
    assert box.contains(np.array([[1.9, -2.0, 0.0]])).tolist() == [True, False, True]
    assert ball.contains(np.array([[1.5, 0.0], [0.0, 1.5]])).tolist() == [True, False]
    assert box.contains_ball(0.0, 1.5)
    assert not box.contains_ball(1.0, 1.5)
    assert box.extent == 2.0
    assert ball.extent == 2.0
    assert box.diameter == 4.0


def test_region_rejects():
    with pytest.raises(ConfigurationError):
        Region("triangle", (0.0,), (1.0,))
    with pytest.raises(ConfigurationError):
        Region.box(0.0)


def test_boundary_samples():
    """Boundary samples of a box lie on its faces."""
    box = Region.box((2.0, 1.0))
    points = box.boundary_samples(32)
    on_face = np.isclose(np.abs(points[0]), 2.0) | np.isclose(np.abs(points[1]), 1.0)
    assert points.shape == (2, 32)
    assert np.all(on_face)


def test_well_set():
    """Distances to a ball and its sample points."""
    well = WellSet((0.0,), 0.5)
    distances = well.distance(np.array([[0.2, 1.0, -2.0]]))
    np.testing.assert_allclose(distances, [0.0, 0.5, 1.5])
    samples = well.samples(5)
    assert samples.shape == (5, 1)
    np.testing.assert_allclose(samples[:, 0], [-0.5, -0.25, 0.0, 0.25, 0.5])


def test_potentials():
    """The wells attain -V0 on M."""
    assert gaussian_well()(np.zeros((1, 1)))[0] == -0.5
    plateau = plateau_well(depth=0.4, radius=0.5)
    np.testing.assert_allclose(plateau(np.array([[-0.5, 0.0, 0.3]])), -0.4)
    assert plateau(np.array([[1.5]]))[0] > -0.4
    assert constant_potential()(np.ones((1, 3))).tolist() == [-0.5] * 3


def test_check_well():
    """A potential that is lowest on the boundary of Λ is rejected."""
    flat = constant_potential()
    strict = PotentialSpec(
        "flat", flat.function, flat.region, flat.V0, flat.V1, flat.well
    )
    gaussian_well().check_well()
    with pytest.raises(ConfigurationError):
        strict.check_well()


def test_default_penalization():
    """κ = 2 max{V1/(m^{2s}-V1), θ/(θ-2)} for the benchmark."""
    params = PenalizationParams.for_problem(gaussian_well(), CUBIC, 1.0, 0.3)
    assert params.kappa == pytest.approx(4.0)
    assert params.slope == pytest.approx(0.125)
    assert params.a == pytest.approx(np.sqrt(0.125))
    assert not params.multiplicity


def test_multiplicity_penalization():
    """In multiplicity mode the slope uses V0."""
    well = plateau_well(depth=0.4)
    params = PenalizationParams.for_problem(well, CUBIC, 1.0, 0.3, multiplicity=True)
    assert params.kappa == pytest.approx(max(2.0 * 2.0, 4.0 * 0.4 / 0.6))
    assert params.slope == pytest.approx(0.4 / params.kappa)


def test_penalization_rejects_kappa():
    with pytest.raises(ConfigurationError) as info:
        PenalizationParams.for_problem(gaussian_well(), CUBIC, 1.0, 0.3, kappa=1.5)
    assert "kappa" in info.value.inequality


def test_penalization_rejects_deep_well():
    with pytest.raises(ConfigurationError):
        PenalizationParams.for_problem(gaussian_well(depth=1.2), CUBIC, 1.0, 0.3)


def test_benchmark(benchmark):
    assert benchmark.dim == 1
    assert benchmark.constants.two_star_s == pytest.approx(5.0)
    assert benchmark.decay_rate == pytest.approx(np.sqrt(1.0 - 0.5 ** (1.0 / 0.3)))


def test_problem_rejects_exponent():
    """p must stay below 2*_s - 1."""
    with pytest.raises(ConfigurationError) as info:
        ProblemSpec.build(1, 0.3, 1.0, gaussian_well(), p=4.5)
    assert info.value.inequality == "p >= 2*_s - 1"


def test_problem_rejects_dimension():
    with pytest.raises(ConfigurationError):
        ProblemSpec.build(2, 0.3, 1.0, gaussian_well(dim=1))


def test_penalized_reaction(benchmark):
    """g is f inside Λ and capped linearly above a outside."""
    pot, pen, nl = benchmark.potential, benchmark.penalization, benchmark.nonlinearity
    t = np.array([0.1, 1.0, 1.0])
    x = np.array([[5.0, 0.0, 5.0]])
    np.testing.assert_allclose(
        penalized_g(x, t, pot, pen, nl), [0.001, 1.0, pen.slope * 1.0]
    )
    assert penalized_g(np.array([5.0]), -1.0, pot, pen, nl) == 0.0


def test_penalized_primitive(benchmark):
    """G is the primitive of g, also across the switch height."""
    pot, pen, nl = benchmark.potential, benchmark.penalization, benchmark.nonlinearity
    t = np.linspace(0.05, 2.0, 40)
    x = np.full((1, t.size), 5.0)
    step = 1.0e-6
    derivative = (
        penalized_G(x, t + step, pot, pen, nl) - penalized_G(x, t - step, pot, pen, nl)
    ) / (2.0 * step)
    np.testing.assert_allclose(derivative, penalized_g(x, t, pot, pen, nl), atol=1.0e-6)


def test_autonomous_rejects_mu():
    with pytest.raises(ConfigurationError):
        AutonomousEnergy(-1.0, CUBIC, 1.0, 0.3)


def test_gradient_is_derivative(autonomous, bump, coarse_line):
    """⟨∇L(u), v⟩ is the directional derivative of L."""
    v = coarse_line.field(lambda x: np.exp(-((x - 1.0) ** 2)))
    tau = 1.0e-5
    quotient = (
        autonomous.energy(bump + tau * v) - autonomous.energy(bump - tau * v)
    ) / (2.0 * tau)
    assert autonomous.gradient(bump).inner(v) == pytest.approx(quotient, rel=1.0e-7)


def test_penalized_gradient_is_derivative(benchmark, line):
    """The same for J_ε, with the field crossing the switch height outside Λ_ε."""
    functional = PenalizedEnergy(benchmark, 0.5)
    u = line.field(lambda x: 2.0 * np.exp(-((x / 6.0) ** 2)))
    v = line.field(lambda x: np.exp(-((x - 3.0) ** 2)))
    tau = 1.0e-6
    quotient = (functional.energy(u + tau * v) - functional.energy(u - tau * v)) / (
        2.0 * tau
    )
    assert functional.gradient(u).inner(v) == pytest.approx(quotient, rel=1.0e-6)


def test_constant_potential_consistency(coarse_line, bump):
    """With V ≡ -V0 and Λ_ε covering the box, J_ε is L_{-V0}."""
    pot = constant_potential(depth=0.5, half_width=100.0)
    pen = PenalizationParams.for_problem(pot, CUBIC, 1.0, 0.3)
    J = energy_J(bump, 1.0, pot, pen, CUBIC, 1.0, 0.3)
    L = energy_L(bump, -0.5, CUBIC, 1.0, 0.3)
    assert J == pytest.approx(L, rel=1.0e-12)
    np.testing.assert_allclose(
        gradient_J(bump, 1.0, pot, pen, CUBIC, 1.0, 0.3).values,
        gradient_L(bump, -0.5, CUBIC, 1.0, 0.3).values,
        atol=1.0e-12,
    )


def test_penalized_rejects_epsilon(benchmark):
    with pytest.raises(ConfigurationError):
        PenalizedEnergy(benchmark, 0.0)


def test_nehari_closed_form(autonomous, bump):
    """For a pure power the projection balances Q against ∫ u^{p+1}."""
    point = nehari_project(bump, autonomous)
    u = point.u
    moment = u.spec.cell_volume * np.sum(u.values**4)
    assert autonomous.quadratic(u) == pytest.approx(moment, rel=1.0e-10)
    np.testing.assert_allclose(u.values, point.t_u * bump.values)


def test_nehari_bisection(benchmark, line):
    """The bracketed scaling zeroes the Nehari ratio."""
    functional = PenalizedEnergy(benchmark, 0.5)
    u = line.field(lambda x: np.exp(-(x**2)))
    point = nehari_project(u, functional, evaluate_residual=False)
    q = functional.quadratic(point.u)
    assert abs(functional.nehari_ratio(point.u, 1.0)) < 1.0e-9 * q
    assert np.isnan(point.residual)


def test_nehari_rejects_nonpositive(autonomous, coarse_line):
    with pytest.raises(ProjectionError):
        nehari_project(coarse_line.field(lambda x: -np.exp(-x * x)), autonomous)


def test_ray_profile_peaks_on_nehari(autonomous, bump):
    """The energy along t -> tu is largest at t = 1 on the manifold."""
    point = nehari_project(bump, autonomous)
    ts = np.linspace(0.5, 1.5, 101)
    profile = ray_profile(point.u, autonomous, ts)
    assert int(np.argmax(profile)) == 50
    assert profile[50] == pytest.approx(point.energy)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"max_iterations": 0},
        {"initial_step": 0.0},
        {"initial_step": 2.0},
        {"tolerance": 0.0},
    ],
)
def test_solver_config_rejects(kwargs):
    with pytest.raises(ConfigurationError):
        SolverConfig(**kwargs)


def test_iteration_cap(autonomous, bump):
    """Stopping at the cap raises with the residual history."""
    with pytest.raises(NonConvergenceError) as info:
        minimize_on_nehari(autonomous, bump, SolverConfig(max_iterations=3))
    assert len(info.value.history) == 3


def test_ground_state(solved):
    """A positive, converged, symmetric critical point."""
    point, d = solved
    u = point.u.values
    assert point.residual < 1.0e-7
    assert d == point.energy
    assert d > 0
    assert u.min() >= 0.0
    assert point.u.argmax() == (64,)
    np.testing.assert_allclose(u[1:64], u[127:64:-1], atol=1.0e-8)


def test_ground_state_energy_identity(solved):
    """On the manifold Q(w) = 2(p+1)/(p-1) d."""
    point, d = solved
    functional = AutonomousEnergy(-0.5, CUBIC, 1.0, 0.3)
    assert functional.quadratic(point.u) == pytest.approx(4.0 * d, rel=1.0e-8)


def test_ground_state_history(solved):
    point, _ = solved
    assert point.iterations == len(point.history)
    assert point.history[-1] < 1.0e-8


def test_ground_energy_increases_with_mu(solved, coarse_line):
    """d_μ is increasing in μ."""
    _, d = solved
    _, higher = ground_state(-0.25, CUBIC, 1.0, 0.3, coarse_line)
    assert higher > d


@pytest.mark.slow
def test_multistart_agrees(line):
    """Random starts reach the same energy."""
    points = ground_state_multistart(
        -0.5, CUBIC, 1.0, 0.3, line, count=4, seed=1, workers=2
    )
    energies = [point.energy for point in points]
    assert max(energies) - min(energies) < 1.0e-6 * abs(energies[0])


def _nehari_norms(functional, grid, seed, count=100):
    rng = np.random.default_rng(seed)
    return np.array(
        [
            functional.quadratic(nehari_project(random_bumps(grid, rng), functional).u)
            for _ in range(count)
        ]
    )


def test_nehari_lower_bound(solved):
    """Projected random fields stay a fixed distance from the origin.

    For the cubic J = Q/4 on the manifold, so Q >= 4 d_μ.
    """
    point, d = solved
    functional = AutonomousEnergy(-0.5, CUBIC, 1.0, 0.3)
    norms = _nehari_norms(functional, point.u.spec, seed=5)
    assert norms.min() >= 4.0 * d * (1.0 - 1.0e-6)
    np.testing.assert_array_equal(
        norms, _nehari_norms(functional, point.u.spec, seed=5)
    )
    assert _nehari_norms(functional, point.u.spec, seed=6).min() >= 4.0 * d * (
        1.0 - 1.0e-6
    )


@pytest.mark.parametrize("cells", [5, -17])
def test_translation_invariance(solved, cells):
    """Starting from a translated Gaussian gives the same d_μ."""
    _, d = solved
    grid = GridSpec(1, 10.0, 128)
    functional = AutonomousEnergy(-0.5, CUBIC, 1.0, 0.3)
    point = minimize_on_nehari(functional, gaussian_start(grid).roll(cells))
    assert abs(point.energy - d) < 1.0e-10
    assert point.u.argmax() == (64 + cells,)
