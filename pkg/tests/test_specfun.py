#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Tests for the special functions and operator constants."""

import math

import numpy as np
import pytest
from scipy import special

from relfrac import (
    ConfigurationError,
    DomainError,
    bessel_k,
    gamma_fn,
    lattice_defect,
    norm_equivalence,
    operator_constants,
    sigma_s,
    theta_profile,
)
from relfrac.specfun import SWITCH_RADIUS, c_ns


def test_gamma_values():
    """Γ at integers and at 1/2."""
    assert gamma_fn(1.0) == pytest.approx(1.0)
    assert gamma_fn(5.0) == pytest.approx(24.0)
    assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi))


def test_gamma_rejects_nonpositive():
    """Γ is only evaluated for x > 0."""
    with pytest.raises(DomainError):
        gamma_fn(0.0)
    with pytest.raises(DomainError):
        gamma_fn(np.array([1.0, -2.5]))


def test_bessel_half_order():
    """K_{1/2}(r) = sqrt(π/2r) e^{-r}."""
    r = np.array([0.01, 1.0, 7.0, 60.0])
    expected = np.sqrt(np.pi / (2.0 * r)) * np.exp(-r)
    np.testing.assert_allclose(bessel_k(0.5, r), expected, rtol=1.0e-14)


def test_bessel_half_integer_closed_form():
    """The closed forms for orders 3/2 and 5/2 agree with scipy."""
    r = np.geomspace(1.0e-3, 50.0, 40)
    for nu in (1.5, 2.5):
        np.testing.assert_allclose(bessel_k(nu, r), special.kv(nu, r), rtol=1.0e-10)


@pytest.mark.parametrize("nu", [0.0, 0.3, 0.8, 1.7, 2.4])
def test_bessel_quadrature(nu):
    """The integral representation below the switch radius agrees with scipy."""
    r = np.geomspace(1.0e-3, SWITCH_RADIUS, 60)
    np.testing.assert_allclose(bessel_k(nu, r), special.kv(nu, r), rtol=1.0e-9)


@pytest.mark.parametrize("nu", [0.3, 1.3])
def test_bessel_asymptotic(nu):
    """The asymptotic series beyond the switch radius agrees with scipy."""
    r = np.linspace(SWITCH_RADIUS + 0.5, 120.0, 40)
    np.testing.assert_allclose(bessel_k(nu, r), special.kv(nu, r), rtol=1.0e-10)


def test_bessel_even_in_order():
    """K_{-ν} = K_ν."""
    assert bessel_k(-0.7, 2.0) == bessel_k(0.7, 2.0)


def test_bessel_scalar_and_shape():
    """Scalars give floats and arrays keep their shape."""
    assert isinstance(bessel_k(0.3, 1.0), float)
    assert bessel_k(0.3, np.ones((3, 4))).shape == (3, 4)


def test_bessel_recurrence_across_switch():
    """K_{ν+1} = K_{ν-1} + (2ν/r) K_ν holds on both sides of the switch radius."""
    nu = 1.3
    r = np.linspace(20.0, 30.0, 41)
    lhs = bessel_k(nu + 1.0, r)
    rhs = bessel_k(nu - 1.0, r) + 2.0 * nu / r * bessel_k(nu, r)
    np.testing.assert_allclose(lhs, rhs, rtol=1.0e-8)


def test_bessel_decreasing():
    """K_ν is positive and strictly decreasing in r."""
    values = bessel_k(0.3, np.linspace(0.1, 40.0, 400))
    assert np.all(values > 0)
    assert np.all(np.diff(values) < 0)


def test_bessel_small_r():
    """r K_1(r) -> 1 as r -> 0."""
    assert 1.0e-6 * bessel_k(1.0, 1.0e-6) == pytest.approx(1.0, rel=1.0e-6)


def test_bessel_saturates():
    """An overflowing value saturates at the largest float."""
    assert bessel_k(200.0, 1.0e-3) == np.finfo(float).max


def test_bessel_rejects_nonpositive_radius():
    """K_ν is only evaluated at r > 0."""
    with pytest.raises(DomainError):
        bessel_k(0.3, np.array([1.0, 0.0]))


def test_theta_profile_values():
    """θ(0) = 1 and θ(r) = e^{-r} for s = 1/2."""
    assert theta_profile(0.3, 0.0) == 1.0
    assert theta_profile(0.5, 1.0) == pytest.approx(math.exp(-1.0), rel=1.0e-12)
    r = np.linspace(0.0, 30.0, 301)
    values = theta_profile(0.3, r)
    assert np.all(np.diff(values) <= 0)
    assert values[-1] < 1.0e-10


def test_theta_profile_ode():
    """θ'' + ((1-2s)/r) θ' - θ = 0 by central differences."""
    s = 0.3
    r = np.geomspace(0.1, 10.0, 20)
    step = 1.0e-3 * r
    plus = theta_profile(s, r + step)
    minus = theta_profile(s, r - step)
    center = theta_profile(s, r)
    second = (plus - 2.0 * center + minus) / step**2
    first = (plus - minus) / (2.0 * step)
    residual = second + (1.0 - 2.0 * s) / r * first - center
    assert np.max(np.abs(residual)) < 1.0e-5


def test_theta_profile_rejects_order():
    """θ needs 0 < s < 1."""
    with pytest.raises(DomainError):
        theta_profile(1.0, 1.0)


def test_constants_at_one_half():
    """σ_{1/2} = 1 and C(1, 1/2) = 1/π."""
    assert sigma_s(0.5) == pytest.approx(1.0)
    assert c_ns(1, 0.5) == pytest.approx(1.0 / math.pi)


def test_operator_constants():
    """The derived exponents for N = 3, s = 0.3."""
    constants = operator_constants(3, 0.3, 2.0)
    assert constants.two_star_s == pytest.approx(6.0 / 2.4)
    assert constants.gamma_embed == pytest.approx(1.0 + 2.0 / 2.4)
    assert constants.nu == pytest.approx(1.8)
    assert constants.m2s == pytest.approx(2.0**0.6)


@pytest.mark.parametrize(
    "N, s, m", [(1, 0.5, 1.0), (1, 0.0, 1.0), (1, 0.3, 0.0), (1, 1.2, 1.0)]
)
def test_operator_constants_rejects(N, s, m):
    """N > 2s, 0 < s < 1 and m > 0 are required."""
    with pytest.raises(ConfigurationError) as info:
        operator_constants(N, s, m)
    assert info.value.inequality is not None


def test_norm_equivalence():
    """A and B for a negative and a positive mu."""
    assert norm_equivalence(-0.5, 1.0, 0.3) == pytest.approx((0.5, 1.0))
    assert norm_equivalence(0.5, 1.0, 0.3) == pytest.approx((1.0, 1.5))


def test_norm_equivalence_rejects():
    """mu <= -m^{2s} has no lower constant."""
    with pytest.raises(ConfigurationError):
        norm_equivalence(-1.0, 1.0, 0.3)


@pytest.mark.parametrize("N", [1, 2, 3])
def test_lattice_defect_of_constant(N):
    """For a = 0 the defect is the missing origin point."""
    assert lattice_defect(N, 0.0) == pytest.approx(1.0, abs=1.0e-8)


def test_lattice_defect_excluded_points():
    """Points inside rho are added back to the defect."""
    assert lattice_defect(1, 0.0, 1.5) == pytest.approx(3.0, abs=1.0e-10)


def test_lattice_defect_one_dimensional():
    """In one dimension the defect is -2ζ(-a)."""
    a = -0.6
    expected = -2.0 * (special.zetac(-a) + 1.0)
    assert lattice_defect(1, a) == pytest.approx(expected)


def test_lattice_defect_rejects():
    """The singularity must be integrable."""
    with pytest.raises(DomainError):
        lattice_defect(2, -2.0)
