#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Tests for the extension to the half-space."""

import numpy as np
import pytest

from relfrac import (
    ConfigurationError,
    ExtensionField,
    GradedMesh,
    NumericalError,
    apply_fourier,
    extend_ode,
    extend_spectral,
    hs_norm,
    sigma_s,
    trace_derivative,
    xs_norm,
)
from relfrac.extension import solve_profile
from relfrac.specfun import theta_profile


@pytest.fixture
def datum(coarse_line):
    return coarse_line.field(lambda x: np.exp(-0.5 * x * x))


def test_default_mesh():
    """Y = 10/m with grading max(2, 1/s)."""
    mesh = GradedMesh.default(2.0, 0.3)
    assert mesh.height == 5.0
    assert mesh.exponent == pytest.approx(1.0 / 0.3)
    assert mesh.nodes[0] == 0.0
    assert mesh.nodes[-1] == pytest.approx(5.0)
    assert np.all(np.diff(mesh.nodes) > 0)
    assert GradedMesh.default(1.0, 0.7).exponent == 2.0


@pytest.mark.parametrize(
    "height, count, exponent", [(0.0, 64, 2.0), (1.0, 1, 2.0), (1.0, 64, 0.5)]
)
def test_mesh_rejects(height, count, exponent):
    with pytest.raises(ConfigurationError):
        GradedMesh(height, count, exponent)


def test_refined():
    mesh = GradedMesh(10.0, 64, 3.0).refined()
    assert mesh.count == 128
    assert mesh.exponent == 3.0


def test_spectral_extension_trace(datum):
    """The bottom slice is the datum and the top one has decayed."""
    U = extend_spectral(datum, 1.0, 0.3, GradedMesh.default(1.0, 0.3))
    np.testing.assert_allclose(U.slice(0).values, datum.values, atol=1.0e-14)
    assert U.slice(U.mesh.count).sup() < 1.0e-3
    assert U.values().shape == (U.mesh.count + 1,) + datum.spec.shape


def test_field_arithmetic(datum):
    U = extend_spectral(datum, 1.0, 0.3, GradedMesh(10.0, 16, 2.0))
    V = 2.0 * U + U
    np.testing.assert_allclose(V.slice(3).values, 3.0 * U.slice(3).values, atol=1.0e-14)


def test_from_values(datum):
    """Slices rebuilt from samples give back the spectra."""
    U = extend_spectral(datum, 1.0, 0.3, GradedMesh(10.0, 16, 2.0))
    V = ExtensionField.from_values(U.base, U.mesh, U.values(), U.m, U.s)
    np.testing.assert_allclose(V.spectra, U.spectra, atol=1.0e-13)


def test_profile_boundary_values():
    """φ(0) = 1, φ(Y) = 0 and φ decreases."""
    phi = solve_profile(1.0, 0.3, GradedMesh(10.0, 128, 3.0))
    assert phi[0] == 1.0
    assert phi[-1] == 0.0
    assert np.all(np.diff(phi) < 0)


def test_profile_matches_theta():
    """At s = 1/2 the profile is e^{-ωy}, and refining reduces the error."""
    errors = []
    for count in (128, 512):
        mesh = GradedMesh(10.0, count, 2.0)
        phi = solve_profile(1.0, 0.5, mesh)
        errors.append(np.max(np.abs(phi - theta_profile(0.5, mesh.nodes))))
    assert errors[1] < errors[0]
    assert errors[1] < 1.0e-3


def test_ode_extension_converges(datum):
    """Doubling the cells at least halves the gap to the spectral extension."""
    differences = []
    for count in (64, 128):
        mesh = GradedMesh.default(1.0, 0.3, count)
        U = extend_spectral(datum, 1.0, 0.3, mesh)
        V = extend_ode(datum, 1.0, 0.3, mesh)
        differences.append(
            np.linalg.norm(V.spectra - U.spectra) / np.linalg.norm(U.spectra)
        )
    assert differences[1] < 0.5 * differences[0]


def test_ode_extension_needs_cells(datum):
    with pytest.raises(ConfigurationError):
        extend_ode(datum, 1.0, 0.3, GradedMesh(10.0, 32, 2.0))


def test_trace_identity(datum):
    """-y^{1-2s} ∂_y U at y = 0 is σ_s (-Δ+m²)^s u."""
    s = 0.3
    U = extend_spectral(datum, 1.0, s, GradedMesh.default(1.0, s))
    trace = trace_derivative(U, s)
    expected = sigma_s(s) * apply_fourier(datum, 1.0, s)
    assert (trace - expected).norm() / expected.norm() < 1.0e-2


def test_trace_needs_boundary_layer(gaussian):
    """A coarse mesh cannot resolve the highest frequencies."""
    U = extend_spectral(gaussian, 1.0, 0.3, GradedMesh(10.0, 16, 2.0))
    with pytest.raises(NumericalError):
        trace_derivative(U, 0.3)


def test_energy_equality(datum):
    """The extension energy is σ_s |u|²_{H^s}."""
    s = 0.3
    U = extend_spectral(datum, 1.0, s, GradedMesh.default(1.0, s))
    expected = sigma_s(s) * hs_norm(datum, 1.0, s) ** 2
    assert xs_norm(U, 1.0) ** 2 == pytest.approx(expected, rel=1.0e-2)


def test_energy_is_a_norm(datum):
    U = extend_spectral(datum, 1.0, 0.3, GradedMesh(10.0, 64, 3.0))
    assert xs_norm(2.0 * U, 1.0) == pytest.approx(2.0 * xs_norm(U, 1.0))


@pytest.mark.parametrize("epsilon", [0.1, -0.1])
def test_canonical_extension_is_minimal(datum, epsilon):
    """Adding a field that vanishes at y = 0 raises the extension energy."""
    s = 0.3
    mesh = GradedMesh.default(1.0, s, 128)
    U = extend_spectral(datum, 1.0, s, mesh)
    y = mesh.nodes / mesh.height
    bump = 4.0 * y * (1.0 - y)
    W = ExtensionField.from_values(
        datum.spec, mesh, np.multiply.outer(bump, datum.values), 1.0, s
    )
    assert xs_norm(U + epsilon * W, 1.0) > xs_norm(U, 1.0)


def test_mass_inequality(datum):
    """σ_s m^{2s} |u|² is below the extension energy."""
    s, m = 0.3, 1.5
    U = extend_spectral(datum, m, s, GradedMesh.default(m, s))
    assert sigma_s(s) * m ** (2.0 * s) * datum.inner(datum) <= xs_norm(U, m) ** 2
