# -*- coding: utf-8 -*-

"""The operator (-Δ+m²)^s as a Fourier multiplier and as a singular integral.

The singular-integral realization is

    A u(x) = m^{2s} u(x) + ½ ∫ J_m(|y|) [2u(x) - u(x+y) - u(x-y)] dy,

with the jump kernel J_m(r) = C(N,s) m^ν r^{-ν} K_ν(m r), ν = (N+2s)/2. The
integral is summed over the grid shifts y = j h with inner_cut <= |y| <=
outer_cut, which makes it a periodic convolution. The dropped core is
restored to leading order by the lattice-defect correction of the
|y|^{2-N-2s} singularity, driven by a second-order finite-difference
Laplacian.
"""

from dataclasses import dataclass
import functools
import logging

import numpy as np
from scipy import special
import scipy.fft

from .errors import DomainError
from . import grid as grid_module
from .grid import GridField, apply_multiplier, radial_symbol, sobolev_norm
from .kernels import jump_kernel, jump_kernel_table
from .specfun import c_ns, lattice_defect

logger = logging.getLogger(__name__)


def _check_order(m, s):
    if not m > 0:
        raise DomainError(f"the mass must be positive, got m = {m}")
    if not 0.0 < s <= 1.0:
        raise DomainError(f"the order must lie in (0, 1], got s = {s}")


def relativistic_symbol(m, s):
    """The symbol (|k|²+m²)^s as a function of the frequency array."""
    return radial_symbol(lambda k2: (k2 + m * m) ** s)


def apply_fourier(u, m, s):
    """(-Δ+m²)^s u by the Fourier multiplier (|k|²+m²)^s."""
    _check_order(m, s)
    return apply_multiplier(u, relativistic_symbol(m, s))


def apply_bessel_potential(u, alpha):
    """(1-Δ)^{-α/2} u by the multiplier (1+|k|²)^{-α/2}."""
    if alpha <= 0:
        raise DomainError(f"Bessel potential order must be positive, got {alpha}")
    return apply_multiplier(u, radial_symbol(lambda k2: (1.0 + k2) ** (-alpha / 2.0)))


def hs_norm(u, m, s):
    """|u|_{H^s} = (Σ (|k|²+m²)^s |û|² h^N)^{1/2} (unitary DFT)."""
    _check_order(m, s)
    return sobolev_norm(u, relativistic_symbol(m, s))


def dual_norm(r, m, s):
    """The discrete H^{-s} norm (Σ (|k|²+m²)^{-s} |r̂|² h^N)^{1/2}."""
    _check_order(m, s)
    return sobolev_norm(r, radial_symbol(lambda k2: (k2 + m * m) ** (-s)))


@dataclass(frozen=True)
class JumpKernel:
    """The jump kernel J_m of the singular integral for (m, s, N)."""

    m: float
    s: float
    N: int

    def __call__(self, r):
        return jump_kernel(r, self.m, self.s, self.N)

    @functools.cached_property
    def table(self):
        return jump_kernel_table(self.m, self.s, self.N)

    @property
    def core_coefficient(self):
        """C' with J_m(r) ~ C' r^{-(N+2s)} as r -> 0."""
        nu = 0.5 * (self.N + 2.0 * self.s)
        return c_ns(self.N, self.s) * special.gamma(nu) * 2.0 ** (nu - 1.0)


@dataclass(frozen=True)
class SingularQuadratureConfig:
    """Cut radii of the singular-integral quadrature.

    Attributes
    ----------
    inner_cut : float or None
        Shifts with |y| < inner_cut are dropped; defaults to h/2 and must be
        at least h/2.
    outer_cut : float or None
        Shifts with |y| > outer_cut are dropped; defaults to L.
    tail_tolerance : float
        Kernel tail above which truncation is flagged.
    correct_core : bool
        Whether to restore the dropped core with the lattice-defect term.
    """

    inner_cut: object = None
    outer_cut: object = None
    tail_tolerance: float = 1.0e-8
    correct_core: bool = True

    def resolve(self, spec):
        """(inner, outer) in physical units for the grid."""
        h = spec.spacing
        inner = 0.5 * h if self.inner_cut is None else float(self.inner_cut)
        outer = spec.half_width if self.outer_cut is None else float(self.outer_cut)
        if inner < 0.5 * h * (1.0 - 1.0e-12):
            raise DomainError(f"inner cut {inner:g} is below h/2 = {0.5 * h:g}")
        if outer <= inner:
            raise DomainError(
                f"outer cut {outer:g} is not beyond the inner cut {inner:g}"
            )
        return inner, outer

    def shift_set(self, spec):
        """Boolean mask (offset order) of the grid shifts used as nodes."""
        inner, outer = self.resolve(spec)
        offsets = spec.offsets()
        radius = np.sqrt(np.sum(offsets**2, axis=0))
        interior = np.all(np.abs(offsets) < spec.half_width * (1.0 - 1.0e-12), axis=0)
        inside = radius >= inner * (1.0 - 1.0e-12)
        inside &= radius <= outer * (1.0 + 1.0e-12)
        return interior & inside


@functools.lru_cache(maxsize=16)
def _quadrature_weights(spec, m, s, inner, outer):
    """h^N J_m(|y|) on the shift set (offset order) and their sum."""
    cfg = SingularQuadratureConfig(inner, outer)
    mask = cfg.shift_set(spec)
    squares = np.sum((spec.offsets() / spec.spacing) ** 2, axis=0)
    squares = np.rint(squares).astype(np.int64)
    unique, inverse = np.unique(squares[mask], return_inverse=True)
    radii = spec.spacing * np.sqrt(unique.astype(float))
    weights = np.zeros(spec.shape)
    weights[mask] = spec.cell_volume * jump_kernel(radii, m, s, spec.dim)[inverse]
    spectrum = scipy.fft.fftn(weights, workers=grid_module.FFT_WORKERS)
    spectrum.setflags(write=False)
    return spectrum, float(weights.sum())


def _laplacian_fd(values, h):
    result = np.zeros_like(values)
    for axis in range(values.ndim):
        result += np.roll(values, 1, axis=axis) + np.roll(values, -1, axis=axis)
        result -= 2.0 * values
    return result / (h * h)


def apply_singular_integral(u, m, s, cfg=None):
    """(-Δ+m²)^s u by the singular-integral representation.

    Parameters
    ----------
    u : GridField
    m, s : float
        Mass and order, 0 < s < 1.
    cfg : SingularQuadratureConfig, optional

    Returns
    -------
    GridField
        The result; truncation of the kernel tail is recorded in its notes.
    """
    if not 0.0 < s < 1.0:
        raise DomainError(f"the singular integral needs 0 < s < 1, got s = {s}")
    _check_order(m, s)
    cfg = SingularQuadratureConfig() if cfg is None else cfg
    spec = u.spec
    inner, outer = cfg.resolve(spec)
    notes = u.notes

    if outer > spec.half_width:
        note = (
            f"outer cut {outer:g} exceeds the half width {spec.half_width:g}; "
            "shifts are limited to the box"
        )
        logger.warning(note)
        notes = notes + (note,)
    tail = float(jump_kernel(min(outer, spec.half_width), m, s, spec.dim))
    tail *= (2.0 * spec.half_width) ** spec.dim
    if tail > cfg.tail_tolerance:
        edge = min(outer, spec.half_width)
        note = f"jump kernel truncated at {edge:g}: tail {tail:.2e}"
        logger.warning(note)
        notes = notes + (note,)

    spectrum, total = _quadrature_weights(spec, float(m), float(s), inner, outer)
    values = u.values
    convolution = scipy.fft.ifftn(
        spectrum * scipy.fft.fftn(values, workers=grid_module.FFT_WORKERS),
        workers=grid_module.FFT_WORKERS,
    ).real
    result = (m ** (2.0 * s) + total) * values - convolution

    if cfg.correct_core:
        N = spec.dim
        h = spec.spacing
        a = 2.0 - N - 2.0 * s
        core = JumpKernel(m, s, N).core_coefficient
        defect = lattice_defect(N, a, inner / h)
        result -= core / (2.0 * N) * h ** (N + a) * defect * _laplacian_fd(values, h)

    return GridField(spec, result, notes=notes)


def quadratic_form(u, m, s):
    """⟨A u, u⟩ with the multiplier realization."""
    return hs_norm(u, m, s) ** 2
