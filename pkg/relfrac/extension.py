# -*- coding: utf-8 -*-

"""The degenerate-elliptic extension of a boundary datum.

The extension U of u solves -div(y^{1-2s} ∇U) + m² y^{1-2s} U = 0 on the
half-space with U(·, 0) = u. Per frequency it is Û(k, y) = û(k) θ(y ω),
ω = sqrt(|k|² + m²). It is computed either from that profile or by a
finite-volume solve of the profile ODE on a graded mesh in y.
"""

from dataclasses import dataclass
import functools
import logging

import numpy as np
import scipy.fft
from scipy import linalg

from .errors import ConfigurationError, NumericalError
from . import grid as grid_module
from .grid import GridField
from .specfun import theta_profile

logger = logging.getLogger(__name__)

#: Positive mesh nodes used by the trace-derivative fit.
TRACE_FIT_NODES = 6


@dataclass(frozen=True)
class GradedMesh:
    """Nodes y_j = Y (j/M)^q, j = 0..M.

    Attributes
    ----------
    height : float
        The truncation height Y.
    count : int
        M, the number of cells.
    exponent : float
        The grading power q >= 1.
    """

    height: float
    count: int
    exponent: float = 2.0

    def __post_init__(self):
        if not self.height > 0:
            raise ConfigurationError(f"mesh height {self.height} is not positive")
        if self.count < 2:
            raise ConfigurationError(f"mesh needs at least 2 cells, got {self.count}")
        if self.exponent < 1.0:
            raise ConfigurationError(
                f"grading exponent {self.exponent} is below 1", inequality="q >= 1"
            )

    @classmethod
    def default(cls, m, s, count=256):
        """Y = 10/m and q = max(2, 1/s)."""
        return cls(10.0 / m, count, max(2.0, 1.0 / s))

    @functools.cached_property
    def nodes(self):
        nodes = self.height * (np.arange(self.count + 1) / self.count) ** self.exponent
        nodes.setflags(write=False)
        return nodes

    def refined(self):
        """The same mesh with twice the cells."""
        return GradedMesh(self.height, 2 * self.count, self.exponent)


@dataclass(frozen=True, eq=False)
class ExtensionField:
    """U sampled on base grid x mesh.

    Attributes
    ----------
    base : GridSpec
    mesh : GradedMesh
    spectra : numpy.ndarray
        Unitary DFT of every slice, shape (M+1, *base.shape).
    m, s : float
        Mass and order the field was built for.
    """

    base: object
    mesh: GradedMesh
    spectra: np.ndarray
    m: float = 1.0
    s: float = 0.5

    def slice(self, j):
        """The GridField at height y_j."""
        values = scipy.fft.ifftn(
            self.spectra[j], norm="ortho", workers=grid_module.FFT_WORKERS
        )
        return GridField(self.base, values.real)

    @property
    def slices(self):
        return [self.slice(j) for j in range(self.mesh.count + 1)]

    def values(self):
        """All slices as an array of shape (M+1, *base.shape)."""
        axes = tuple(range(1, self.spectra.ndim))
        return scipy.fft.ifftn(
            self.spectra, axes=axes, norm="ortho", workers=grid_module.FFT_WORKERS
        ).real

    def __add__(self, other):
        return ExtensionField(
            self.base, self.mesh, self.spectra + other.spectra, self.m, self.s
        )

    def __mul__(self, factor):
        return ExtensionField(
            self.base, self.mesh, self.spectra * factor, self.m, self.s
        )

    __rmul__ = __mul__

    @classmethod
    def from_values(cls, base, mesh, values, m=1.0, s=0.5):
        """Build from samples of shape (M+1, *base.shape)."""
        axes = tuple(range(1, np.ndim(values)))
        spectra = scipy.fft.fftn(
            values, axes=axes, norm="ortho", workers=grid_module.FFT_WORKERS
        )
        return cls(base, mesh, spectra, m, s)


def _unique_omegas(spec, m):
    k2 = spec.k_squared()
    unique, inverse = np.unique(k2, return_inverse=True)
    return np.sqrt(unique + m * m), inverse.reshape(k2.shape)


def extend_spectral(u, m, s, mesh):
    """The canonical extension from the profile θ(y sqrt(|k|²+m²))."""
    omegas, inverse = _unique_omegas(u.spec, m)
    spectrum = scipy.fft.fftn(u.values, norm="ortho", workers=grid_module.FFT_WORKERS)
    y = mesh.nodes
    profiles = theta_profile(s, np.multiply.outer(y, omegas))
    spectra = profiles[:, inverse] * spectrum[None, ...]
    spectra[0] = spectrum
    return ExtensionField(u.spec, mesh, spectra, m, s)


def solve_profile(omega, s, mesh):
    """Finite-volume solution of -(y^{1-2s} φ')' + ω² y^{1-2s} φ = 0.

    φ(0) = 1 and φ(Y) = 0. Face conductances are exact for the layer
    solutions c + A y^{2s}; the reaction term uses the exact weight integral
    over each dual cell.

    Returns
    -------
    numpy.ndarray
        φ at every mesh node.
    """
    y = mesh.nodes
    M = mesh.count
    power = 2.0 * s
    conductance = power / np.diff(y**power)
    mid = 0.5 * (y[:-1] + y[1:])
    edges = np.concatenate([[0.0], mid, [y[-1]]])
    weight = (edges[1:] ** (2.0 - power) - edges[:-1] ** (2.0 - power)) / (2.0 - power)

    inner = slice(1, M)
    diagonal = conductance[:-1] + conductance[1:] + omega * omega * weight[inner]
    band = np.zeros((3, M - 1))
    band[0, 1:] = -conductance[1:-1]
    band[1, :] = diagonal
    band[2, :-1] = -conductance[1:-1]
    rhs = np.zeros(M - 1)
    rhs[0] = conductance[0]
    try:
        interior = linalg.solve_banded((1, 1), band, rhs)
    except (linalg.LinAlgError, ValueError) as e:
        raise NumericalError(f"profile solve failed for omega = {omega:g}: {e}") from e
    if not np.all(np.isfinite(interior)):
        raise NumericalError(
            f"profile solve produced non-finite values for omega = {omega:g}"
        )
    return np.concatenate([[1.0], interior, [0.0]])


def extend_ode(u, m, s, mesh):
    """The extension from a per-frequency finite-volume solve.

    Raises
    ------
    ConfigurationError
        If the mesh has fewer than 64 cells.
    NumericalError
        If a profile solve fails; the message names the frequency.
    """
    if mesh.count < 64:
        raise ConfigurationError(
            f"extend_ode needs at least 64 cells, got {mesh.count}"
        )
    omegas, inverse = _unique_omegas(u.spec, m)
    profiles = np.empty((mesh.count + 1, omegas.size))
    for i, omega in enumerate(omegas):
        try:
            profiles[:, i] = solve_profile(omega, s, mesh)
        except NumericalError as e:
            raise NumericalError(f"frequency index {i}: {e}") from e
    spectrum = scipy.fft.fftn(u.values, norm="ortho", workers=grid_module.FFT_WORKERS)
    spectra = profiles[:, inverse] * spectrum[None, ...]
    return ExtensionField(u.spec, mesh, spectra, m, s)


def trace_derivative(U, s):
    """-lim_{y->0} y^{1-2s} ∂U/∂y, which equals σ_s (-Δ+m²)^s u.

    U(y) ≈ U(0) + A y^{2s} is fitted on the smallest positive nodes and -2sA
    returned at every boundary point.

    Raises
    ------
    NumericalError
        If the mesh does not resolve the boundary layer or the fit is
        ill-conditioned.
    """
    spec = U.base
    y = U.mesh.nodes
    omega_max = np.sqrt(spec.k_squared().max() + U.m * U.m)
    resolved = np.count_nonzero((y > 0) & (y * omega_max < 0.1))
    if resolved < 8:
        raise NumericalError(
            f"mesh resolves the boundary layer with {resolved} nodes, 8 are needed"
        )
    nodes = y[1 : TRACE_FIT_NODES + 1]
    design = np.column_stack([np.ones_like(nodes), nodes ** (2.0 * s)])
    if np.linalg.cond(design) > 1.0e12:
        raise NumericalError("trace fit is ill-conditioned")
    samples = U.spectra[1 : TRACE_FIT_NODES + 1].reshape(TRACE_FIT_NODES, -1)
    solution, *_ = np.linalg.lstsq(design, samples, rcond=None)
    spectrum = -2.0 * s * solution[1].reshape(spec.shape)
    values = scipy.fft.ifftn(spectrum, norm="ortho", workers=grid_module.FFT_WORKERS)
    return GridField(spec, values.real)


def xs_norm(U, m, s=None):
    """(∬ y^{1-2s} (|∇U|² + m² U²) dx dy)^{1/2} on [0, Y].

    Spectral in x. In y each cell uses U linear in y^{2s} for the
    derivative term, which is exact for the layer, and exact weight
    integrals with the mean of U² for the zero-order term.
    """
    s = U.s if s is None else s
    spec = U.base
    y = U.mesh.nodes
    power = 2.0 * s
    k2 = spec.k_squared()
    hN = spec.cell_volume

    density = np.abs(U.spectra) ** 2
    axes = tuple(range(1, density.ndim))
    zero_order = hN * np.sum((k2 + m * m)[None, ...] * density, axis=axes)
    weight = (y[1:] ** (2.0 - power) - y[:-1] ** (2.0 - power)) / (2.0 - power)
    energy = np.sum(weight * 0.5 * (zero_order[:-1] + zero_order[1:]))

    jumps = U.spectra[1:] - U.spectra[:-1]
    jump_density = hN * np.sum(np.abs(jumps) ** 2, axis=tuple(range(1, jumps.ndim)))
    energy += np.sum(power * jump_density / np.diff(y**power))
    return float(np.sqrt(energy))
