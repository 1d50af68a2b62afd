#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Tests for the penalized solves, barycenters and the ε-sweep."""

import numpy as np
import pytest

from relfrac import (
    ConfigurationError,
    DomainError,
    GridPolicy,
    GridSpec,
    InfeasibleEpsilonError,
    PenalizedEnergy,
    WindowError,
    barycenter,
    decay_fit,
    epsilon_sweep,
    make_phi,
    solve_penalized,
)
from relfrac.concentration import check_box, cutoff, reference_ground_state


@pytest.fixture
def policy():
    return GridPolicy()


@pytest.mark.parametrize(
    "epsilon, points, half_width",
    [(0.5, 1024, 20.0), (0.35, 2048, 40.0), (0.25, 2048, 40.0), (0.18, 4096, 80.0)],
)
def test_penalized_grids(benchmark, policy, epsilon, points, half_width):
    """Boxes grow with 1/ε at the common spacing."""
    grid = policy.penalized(benchmark, epsilon)
    assert grid.points == points
    assert grid.half_width == half_width
    assert grid.spacing == policy.spacing


def test_reference_grid(benchmark, policy):
    grid = policy.reference(benchmark)
    assert (grid.points, grid.half_width) == (1024, 20.0)
    assert policy.autonomous(1, 1.0) == grid


def test_infeasible_epsilon(benchmark, policy):
    """An ε whose box needs more than max-points is refused."""
    with pytest.raises(InfeasibleEpsilonError) as info:
        policy.penalized(benchmark, 0.05)
    assert info.value.inequality == "n > max-points"


def test_policy_rejects_spacing():
    with pytest.raises(ConfigurationError):
        GridPolicy(spacing=0.0)


def test_check_box(benchmark, line):
    check_box(line, benchmark, 0.5)
    with pytest.raises(InfeasibleEpsilonError):
        check_box(line, benchmark, 0.05)


def test_cutoff():
    """η is 1 inside δ/2, 0 beyond δ and 1/2 half way."""
    values = cutoff(np.array([0.0, 0.75, 1.125, 1.5, 3.0]), 1.5)
    np.testing.assert_allclose(values, [1.0, 1.0, 0.5, 0.0, 0.0])


def test_barycenter_of_centred_bump(gaussian):
    np.testing.assert_allclose(barycenter(gaussian, 0.5, 4.0), [0.0], atol=1.0e-12)


def test_barycenter_follows_bump(line):
    """β_ε of a bump at x0 is ε x0."""
    u = line.field(lambda x: np.exp(-((x - 1.0) ** 2)))
    np.testing.assert_allclose(barycenter(u, 0.5, 4.0), [0.5], atol=1.0e-10)


def test_barycenter_clamps():
    """Mass beyond ρ/ε is pulled back onto the ball of radius ρ."""
    grid = GridSpec(1, 40.0, 2048)
    u = grid.field(lambda x: np.exp(-((x - 20.0) ** 2)))
    np.testing.assert_allclose(barycenter(u, 0.5, 4.0), [4.0], atol=1.0e-10)


def test_barycenter_rejects(gaussian, line):
    with pytest.raises(DomainError):
        barycenter(gaussian, 0.5, 0.0)
    with pytest.raises(DomainError):
        barycenter(line.zeros(), 0.5, 4.0)


def test_decay_fit_exact(line):
    """An exact exponential is recovered and beats the power law."""
    u = line.field(lambda x: 3.0 * np.exp(-0.8 * np.abs(x)))
    fit = decay_fit(u, window=(4.0, 10.0))
    assert fit.amplitude == pytest.approx(3.0, rel=1.0e-10)
    assert fit.rate == pytest.approx(0.8, rel=1.0e-10)
    assert fit.r2 == pytest.approx(1.0)
    assert fit.exponential_wins


def test_decay_fit_off_centre(line):
    u = line.field(lambda x: np.exp(-0.5 * np.abs(x - 2.0)))
    fit = decay_fit(u, center=[2.0], window=(3.0, 9.0))
    assert fit.rate == pytest.approx(0.5, rel=1.0e-10)


@pytest.mark.parametrize("window", [(5.0, 4.0), (0.0, 4.0), (10.0, 25.0)])
def test_decay_fit_rejects_window(gaussian, window):
    with pytest.raises(WindowError):
        decay_fit(gaussian, window=window)


def test_decay_fit_rejects_sign_change(line):
    u = line.field(lambda x: np.cos(x) * np.exp(-np.abs(x)))
    with pytest.raises(WindowError):
        decay_fit(u, window=(4.0, 10.0))


def test_make_phi(benchmark, line, gaussian):
    """Φ_ε(z) is supported within δ/ε of z/ε and lies on the manifold."""
    epsilon, delta = 0.5, 1.5
    point = make_phi(0.0, epsilon, benchmark, w=gaussian, delta=delta, grid=line)
    functional = PenalizedEnergy(benchmark, epsilon)
    outside = np.abs(line.axis()) >= delta / epsilon
    assert np.all(point.u.values[outside] == 0.0)
    assert point.u.values.min() >= 0.0
    assert point.t_u > 0
    q = functional.quadratic(point.u)
    assert abs(functional.nehari_ratio(point.u, 1.0)) < 1.0e-9 * q


def test_make_phi_shifts(benchmark, line, gaussian):
    """The bump is centred at z/ε."""
    point = make_phi(0.25, 0.5, benchmark, w=gaussian, delta=1.0, grid=line)
    peak = line.point(point.u.argmax())[0]
    assert peak == pytest.approx(0.5, abs=line.spacing)


@pytest.mark.parametrize("z, delta", [(1.0, 1.5), (0.0, 0.0), (0.0, 2.5)])
def test_make_phi_rejects(benchmark, line, gaussian, z, delta):
    """B(z, δ) must lie inside Λ."""
    with pytest.raises(ConfigurationError):
        make_phi(z, 0.5, benchmark, w=gaussian, delta=delta, grid=line)


@pytest.mark.slow
def test_reference_ground_state(benchmark):
    """The limiting ground state converges and decays at the predicted rate."""
    point, d = reference_ground_state(benchmark)
    assert point.residual < 1.0e-7
    fit = decay_fit(point.u, window=(4.0, 10.0))
    assert fit.rate >= 0.9 * benchmark.decay_rate
    assert fit.exponential_wins


@pytest.mark.slow
def test_solve_penalized(benchmark):
    """At ε = 1/2 the solution concentrates in the well and stays below a outside."""
    point, energy = solve_penalized(0.5, benchmark)
    _, d = reference_ground_state(benchmark)
    functional = PenalizedEnergy(benchmark, 0.5)
    outside = ~functional.inside(point.u.spec)
    assert point.residual < 1.0e-7
    assert point.u.values[outside].max() < benchmark.penalization.a
    assert energy > 0
    assert abs(energy - d) < d


@pytest.mark.slow
def test_sweep(benchmark):
    """|c_ε - d| shrinks and the maximum point approaches the well."""
    report = epsilon_sweep(benchmark, (0.25, 0.5))
    frame = report.to_frame()
    assert list(frame["epsilon"]) == [0.5, 0.25]
    assert len(report.succeeded) == 2
    assert frame["|c - d|"].iloc[1] < frame["|c - d|"].iloc[0]
    assert frame["below a"].all()
    assert (frame["decay R2"] > frame["power R2"]).all()


@pytest.mark.slow
def test_sweep_records_failures(benchmark):
    """An infeasible ε is recorded and the sweep goes on."""
    report = epsilon_sweep(benchmark, (0.5, 0.05))
    frame = report.to_frame()
    assert len(report.succeeded) == 1
    assert frame["error"].iloc[0] == ""
    assert "points per axis" in frame["error"].iloc[1]


@pytest.mark.slow
def test_penalization_consistency(benchmark):
    """Below a outside Λ, the penalized solution also solves the original equation."""
    report = epsilon_sweep(benchmark, (0.5, 0.25))
    frame = report.to_frame()
    below = frame[frame["below a"]]
    assert len(below) == 2
    assert (below["unpenalized residual"] < 1.0e-6).all()
