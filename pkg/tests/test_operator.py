#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Tests for the two realizations of (-Δ+m²)^s."""

import numpy as np
import pytest

from relfrac import (
    DomainError,
    GridSpec,
    SingularQuadratureConfig,
    apply_bessel_potential,
    apply_fourier,
    apply_singular_integral,
    dual_norm,
    hs_norm,
    quadratic_form,
)
from relfrac.kernels import jump_kernel
from relfrac.operator import JumpKernel


def test_plane_wave(line):
    """A resolved cosine is an eigenfunction with eigenvalue (k²+m²)^s."""
    k = 8.0 * np.pi / line.half_width
    u = line.field(lambda x: np.cos(k * x))
    result = apply_fourier(u, 1.5, 0.3)
    expected = (k * k + 2.25) ** 0.3 * u.values
    np.testing.assert_allclose(result.values, expected, atol=1.0e-11)


def test_order_one_is_helmholtz(gaussian, line):
    """For s = 1 the operator is -u'' + m² u."""
    result = apply_fourier(gaussian, 2.0, 1.0)
    expected = line.field(lambda x: (5.0 - x * x) * np.exp(-0.5 * x * x))
    np.testing.assert_allclose(result.values, expected.values, atol=1.0e-10)


def test_quadratic_form(gaussian):
    """⟨Au, u⟩ is the squared H^s norm."""
    Au = apply_fourier(gaussian, 1.0, 0.3)
    assert Au.inner(gaussian) == pytest.approx(quadratic_form(gaussian, 1.0, 0.3))
    assert hs_norm(gaussian, 1.0, 0.3) ** 2 == pytest.approx(
        quadratic_form(gaussian, 1.0, 0.3)
    )


def test_dual_norm(gaussian):
    """|Au|_{H^{-s}} = |u|_{H^s}."""
    Au = apply_fourier(gaussian, 1.0, 0.3)
    assert dual_norm(Au, 1.0, 0.3) == pytest.approx(hs_norm(gaussian, 1.0, 0.3))


def test_bessel_potential_inverts(gaussian):
    """(1-Δ)^{-α/2} undoes (1-Δ)^{α/2}."""
    raised = apply_fourier(gaussian, 1.0, 0.3)
    result = apply_bessel_potential(raised, 0.6)
    np.testing.assert_allclose(result.values, gaussian.values, atol=1.0e-12)


def test_rejects_order_and_mass(gaussian):
    with pytest.raises(DomainError):
        apply_fourier(gaussian, 0.0, 0.3)
    with pytest.raises(DomainError):
        apply_fourier(gaussian, 1.0, 1.5)
    with pytest.raises(DomainError):
        apply_bessel_potential(gaussian, 0.0)
    with pytest.raises(DomainError):
        apply_singular_integral(gaussian, 1.0, 1.0)


def test_core_coefficient():
    """J(r) r^{N+2s} tends to the core coefficient."""
    kernel = JumpKernel(1.0, 0.3, 1)
    r = 1.0e-4
    assert jump_kernel(r, 1.0, 0.3, 1) * r**1.6 == pytest.approx(
        kernel.core_coefficient, rel=1.0e-5
    )


def test_cut_validation(line):
    h = line.spacing
    with pytest.raises(DomainError):
        SingularQuadratureConfig(inner_cut=0.25 * h).resolve(line)
    with pytest.raises(DomainError):
        SingularQuadratureConfig(inner_cut=2.0 * h, outer_cut=h).resolve(line)
    assert SingularQuadratureConfig().resolve(line) == (0.5 * h, line.half_width)


def test_shift_set_excludes_origin(line):
    mask = SingularQuadratureConfig().shift_set(line)
    assert not mask[0]
    assert mask[1] and mask[-1]


def test_singular_integral_agrees(gaussian):
    """The singular integral matches the multiplier on the reference grid."""
    result = apply_singular_integral(gaussian, 1.0, 0.3)
    expected = apply_fourier(gaussian, 1.0, 0.3)
    error = (result - expected).norm() / expected.norm()
    assert error < 1.0e-3
    assert result.notes == ()


def test_singular_integral_converges(line):
    """Halving the spacing reduces the error at least threefold."""
    errors = []
    for points in (1024, 2048):
        spec = type(line)(1, 20.0, points)
        u = spec.field(lambda x: np.exp(-0.5 * x * x))
        expected = apply_fourier(u, 1.0, 0.3)
        errors.append((apply_singular_integral(u, 1.0, 0.3) - expected).norm())
    assert errors[1] < errors[0] / 3.0


def test_core_correction_helps(gaussian):
    """Dropping the core correction makes the error worse."""
    expected = apply_fourier(gaussian, 1.0, 0.3)
    corrected = apply_singular_integral(gaussian, 1.0, 0.3)
    bare = apply_singular_integral(
        gaussian, 1.0, 0.3, SingularQuadratureConfig(correct_core=False)
    )
    assert (corrected - expected).norm() < (bare - expected).norm()


def test_outer_cut_beyond_box(gaussian, line):
    """An outer cut past the box is noted in the result."""
    cfg = SingularQuadratureConfig(outer_cut=2.0 * line.half_width)
    result = apply_singular_integral(gaussian, 1.0, 0.3, cfg)
    assert any("exceeds the half width" in note for note in result.notes)


def test_short_outer_cut_is_flagged(gaussian):
    """Truncating the kernel close to the origin is flagged."""
    cfg = SingularQuadratureConfig(outer_cut=2.0)
    result = apply_singular_integral(gaussian, 1.0, 0.3, cfg)
    assert any("truncated" in note for note in result.notes)


REALIZATIONS = [apply_fourier, apply_singular_integral]


@pytest.fixture
def noise(coarse_line):
    rng = np.random.default_rng(3)
    return [coarse_line.zeros().with_values(rng.standard_normal(128)) for _ in "uv"]


@pytest.mark.parametrize("apply", REALIZATIONS)
def test_self_adjoint(apply, noise):
    """⟨Au, v⟩ = ⟨u, Av⟩ for random u and v."""
    u, v = noise
    Au = apply(u, 1.0, 0.3)
    Av = apply(v, 1.0, 0.3)
    scale = Au.norm() * v.norm()
    assert abs(Au.inner(v) - u.inner(Av)) <= 1.0e-10 * scale


@pytest.mark.parametrize("apply", REALIZATIONS)
def test_commutes_with_reflection(apply, noise):
    u, _ = noise
    reflected = u.with_values(np.roll(u.values[::-1], 1))
    Au = apply(u, 1.0, 0.3)
    expected = np.roll(Au.values[::-1], 1)
    result = apply(reflected, 1.0, 0.3).values
    np.testing.assert_allclose(result, expected, atol=1.0e-10 * Au.sup())


@pytest.mark.parametrize("apply", REALIZATIONS)
def test_commutes_with_translation(apply, noise):
    u, _ = noise
    Au = apply(u, 1.0, 0.3)
    result = apply(u.roll(7), 1.0, 0.3).values
    np.testing.assert_allclose(result, Au.roll(7).values, atol=1.0e-10 * Au.sup())


@pytest.mark.parametrize("apply", REALIZATIONS)
def test_quadratic_form_bounded_below(apply, noise):
    """⟨Au, u⟩ >= m^{2s} |u|²."""
    u, _ = noise
    m, s = 1.5, 0.3
    assert apply(u, m, s).inner(u) >= m ** (2.0 * s) * u.inner(u) * (1.0 - 1.0e-12)


@pytest.mark.parametrize("points", [1024, 2048])
def test_inner_cut_consistency(points):
    """Halving the inner cut from 2h to h changes the result by O(h²)."""
    spec = GridSpec(1, 20.0, points)
    h = spec.spacing
    u = spec.field(lambda x: np.exp(-0.5 * x * x))
    wide = apply_singular_integral(u, 1.0, 0.3, SingularQuadratureConfig(2.0 * h))
    narrow = apply_singular_integral(u, 1.0, 0.3, SingularQuadratureConfig(h))
    assert (wide - narrow).sup() <= h * h


def test_massless_kernel_limit():
    """J_m(1) tends to C(N,s) 2^{ν-1} Γ(ν) as m -> 0."""
    limit = JumpKernel(1.0e-3, 0.3, 1).core_coefficient
    assert jump_kernel(1.0, 1.0e-3, 0.3, 1) == pytest.approx(limit, rel=1.0e-3)
