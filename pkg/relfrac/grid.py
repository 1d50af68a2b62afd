# -*- coding: utf-8 -*-

"""Periodic-box fields, discrete Fourier transforms and Fourier multipliers.

Conventions
-----------
The box is [-L, L)^dim with n points per axis and spacing h = 2L/n. Sample j
of an axis sits at x_j = -L + j h, so x = 0 is index n/2. Field values are
stored as arrays of shape (n,) * dim in lexicographic (C) order.

Transforms use ``scipy.fft`` with ``norm="ortho"``: the coefficient array is
the unitary DFT of the samples, kept in FFT offset order. The frequency of
entry j along an axis is ``2π * fftfreq(n, h)[j]``, i.e. (π/L) times an integer
in [-n/2, n/2). With this normalization the discrete Parseval identity
Σ|u|² = Σ|û|² is exact, and the L² norm of a field is h^{dim/2} times either.
"""

from dataclasses import dataclass, field
import functools
import logging
from pathlib import Path

import numpy as np
import pandas
import scipy.fft

from .errors import ConfigurationError, DomainError, NumericalError

logger = logging.getLogger(__name__)

#: Worker threads used by the FFTs (scipy.fft ``workers``).
FFT_WORKERS = 1

_MAGIC = b"RELFRAC-GRID"


def set_fft_workers(workers):
    """Set the number of threads used by every transform."""
    global FFT_WORKERS
    FFT_WORKERS = int(workers)


def next_power_of_two(value):
    """The smallest power of two >= value."""
    value = int(np.ceil(value))
    return 1 << max(value - 1, 0).bit_length()


@dataclass(frozen=True)
class GridSpec:
    """A periodic box [-L, L)^dim with n points per axis.

    Attributes
    ----------
    dim : int
        1, 2 or 3.
    half_width : float
        L > 0.
    points : int
        n, a power of two >= 16.
    """

    dim: int
    half_width: float
    points: int

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ConfigurationError(f"grid dimension {self.dim} is not 1, 2 or 3")
        if not self.half_width > 0:
            raise ConfigurationError(
                f"grid half-width {self.half_width} is not positive", inequality="L > 0"
            )
        n = self.points
        if n < 16 or n & (n - 1) != 0:
            raise ConfigurationError(
                f"{n} points per axis is not a power of two >= 16",
                inequality="n >= 16, power of 2",
            )

    @property
    def spacing(self):
        """The grid spacing h = 2L/n."""
        return 2.0 * self.half_width / self.points

    @property
    def cell_volume(self):
        """h^dim."""
        return self.spacing**self.dim

    @property
    def shape(self):
        return (self.points,) * self.dim

    @property
    def size(self):
        return self.points**self.dim

    @property
    def k_max(self):
        """The largest frequency magnitude along an axis, π/h."""
        return np.pi / self.spacing

    def axis(self):
        """The coordinates -L + j h of one axis."""
        return -self.half_width + self.spacing * np.arange(self.points)

    def coordinates(self):
        """The coordinate arrays, one per axis, each of the field shape."""
        return _coordinates(self)

    def radius(self, center=None):
        """|x - center| at every grid point."""
        coords = self.coordinates()
        if center is None:
            center = np.zeros(self.dim)
        center = np.broadcast_to(np.asarray(center, dtype=float), (self.dim,))
        return np.sqrt(sum((x - c) ** 2 for x, c in zip(coords, center)))

    def point(self, index):
        """The coordinates of the grid point with the given index tuple."""
        index = np.unravel_index(index, self.shape) if np.isscalar(index) else index
        return np.array([-self.half_width + self.spacing * i for i in index])

    def wavenumbers(self):
        """The frequency vectors, an array of shape (dim, *shape), offset order."""
        return _wavenumbers(self)

    def k_squared(self):
        """|k|² at every coefficient, offset order."""
        return _k_squared(self)

    def offsets(self):
        """The displacement vectors j h of every entry, offset order.

        Entry j along an axis is the displacement j h for j < n/2 and
        (j - n) h otherwise, matching the FFT frequency layout.
        """
        return _offsets(self)

    def zeros(self, notes=()):
        return GridField(self, np.zeros(self.shape), notes=notes)

    def field(self, function, notes=()):
        """Sample function(*coordinates) on the grid."""
        return GridField(self, function(*self.coordinates()), notes=notes)


def _readonly(array):
    array.setflags(write=False)
    return array


@functools.lru_cache(maxsize=32)
def _coordinates(spec):
    axis = spec.axis()
    return tuple(_readonly(a) for a in np.meshgrid(*([axis] * spec.dim), indexing="ij"))


@functools.lru_cache(maxsize=32)
def _wavenumbers(spec):
    k = 2.0 * np.pi * scipy.fft.fftfreq(spec.points, spec.spacing)
    return _readonly(np.stack(np.meshgrid(*([k] * spec.dim), indexing="ij")))


@functools.lru_cache(maxsize=32)
def _k_squared(spec):
    return _readonly(np.sum(_wavenumbers(spec) ** 2, axis=0))


@functools.lru_cache(maxsize=32)
def _offsets(spec):
    d = spec.spacing * scipy.fft.fftfreq(spec.points, 1.0 / spec.points)
    return _readonly(np.stack(np.meshgrid(*([d] * spec.dim), indexing="ij")))


@dataclass(frozen=True, eq=False)
class GridField:
    """A real function sampled on a GridSpec.

    Attributes
    ----------
    spec : GridSpec
    values : numpy.ndarray
        Read-only samples of shape spec.shape.
    notes : tuple of str
        Free-form metadata, e.g. truncation warnings.
    """

    spec: GridSpec
    values: np.ndarray
    notes: tuple = field(default=())

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != self.spec.shape:
            if values.size != self.spec.size:
                raise DomainError(
                    f"{values.size} samples do not match a grid of shape "
                    f"{self.spec.shape}"
                )
            values = values.reshape(self.spec.shape)
        if not np.all(np.isfinite(values)):
            first = np.flatnonzero(~np.isfinite(values))[0]
            bad = np.unravel_index(first, values.shape)
            raise NumericalError(f"non-finite sample at grid index {bad}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "notes", tuple(self.notes))

    def with_values(self, values, notes=None):
        """A new field on the same grid, keeping the notes unless replaced."""
        notes = self.notes if notes is None else notes
        return GridField(self.spec, values, notes=notes)

    def _other(self, other):
        if isinstance(other, GridField):
            if other.spec != self.spec:
                raise DomainError("fields live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return self.with_values(self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self.with_values(self.values - self._other(other))

    def __rsub__(self, other):
        return self.with_values(self._other(other) - self.values)

    def __mul__(self, other):
        return self.with_values(self.values * self._other(other))

    __rmul__ = __mul__

    def __neg__(self):
        return self.with_values(-self.values)

    def inner(self, other):
        """The discrete inner product h^dim Σ u v."""
        return float(self.spec.cell_volume * np.sum(self.values * self._other(other)))

    def norm(self):
        """The discrete L² norm."""
        return float(np.sqrt(self.inner(self)))

    def integral(self):
        """h^dim Σ u."""
        return float(self.spec.cell_volume * np.sum(self.values))

    def sup(self):
        return float(np.max(np.abs(self.values)))

    def argmax(self):
        """Index tuple of the maximum; ties go to the lexicographically smallest."""
        return np.unravel_index(int(np.argmax(self.values)), self.spec.shape)

    def positive_part(self):
        return self.with_values(np.maximum(self.values, 0.0))

    def roll(self, cells):
        """Translate by whole cells (periodically)."""
        cells = tuple(np.broadcast_to(cells, (self.spec.dim,)))
        axes = tuple(range(self.spec.dim))
        return self.with_values(np.roll(self.values, cells, axis=axes))

    def to_frame(self):
        """The samples as a pandas DataFrame with columns x1.., value."""
        coordinates = self.spec.coordinates()
        data = {f"x{i + 1}": c.reshape(-1) for i, c in enumerate(coordinates)}
        data["value"] = self.values.reshape(-1)
        return pandas.DataFrame(data)

    def save(self, path):
        """Write the field in the binary grid format (bit-exact)."""
        spec = self.spec
        header = b"%s %d %s %d\n" % (
            _MAGIC,
            spec.dim,
            float(spec.half_width).hex().encode(),
            spec.points,
        )
        with open(path, "wb") as fd:
            fd.write(header)
            fd.write(self.values.astype("<f8").tobytes())
        return Path(path)

    @classmethod
    def load(cls, path):
        """Read a field written by save()."""
        with open(path, "rb") as fd:
            header = fd.readline().split()
            if len(header) != 4 or header[0] != _MAGIC:
                raise DomainError(f"'{path}' is not a relfrac grid file")
            half_width = float.fromhex(header[2].decode())
            spec = GridSpec(int(header[1]), half_width, int(header[3]))
            values = np.frombuffer(fd.read(), dtype="<f8")
        return cls(spec, values.astype(float))


@dataclass(frozen=True, eq=False)
class SpectrumField:
    """Unitary DFT coefficients of a field, in FFT offset order."""

    spec: GridSpec
    coefficients: np.ndarray

    def frequencies(self):
        return self.spec.wavenumbers()


def transform(u):
    """The unitary DFT of a field."""
    coefficients = scipy.fft.fftn(u.values, norm="ortho", workers=FFT_WORKERS)
    return SpectrumField(u.spec, coefficients)


def inverse_transform(spectrum, notes=()):
    """The inverse of transform(); the imaginary round-off is dropped."""
    values = scipy.fft.ifftn(spectrum.coefficients, norm="ortho", workers=FFT_WORKERS)
    return GridField(spectrum.spec, values.real, notes=notes)


def radial_symbol(function):
    """Wrap f(|k|²) as a symbol taking the frequency-vector array."""

    def symbol(k):
        return function(np.sum(k**2, axis=0))

    return symbol


def evaluate_symbol(spec, symbol):
    """The symbol sampled at every frequency of the grid, offset order.

    Raises
    ------
    NumericalError
        If the symbol is not finite at some frequency.
    """
    if callable(symbol):
        values = np.asarray(symbol(spec.wavenumbers()), dtype=float)
    else:
        values = np.asarray(symbol, dtype=float)
    values = np.broadcast_to(values, spec.shape)
    bad = ~np.isfinite(values)
    if np.any(bad):
        index = np.unravel_index(np.flatnonzero(bad)[0], spec.shape)
        k = spec.wavenumbers()[(slice(None),) + index]
        raise NumericalError(f"symbol is not finite at frequency k = {tuple(k)}")
    return values


def apply_multiplier(u, symbol):
    """F^{-1}(symbol(k) F u).

    Parameters
    ----------
    u : GridField
    symbol : callable or numpy.ndarray
        Either a function of the frequency array of shape (dim, *shape) or
        the sampled symbol itself in offset order.
    """
    values = evaluate_symbol(u.spec, symbol)
    coefficients = scipy.fft.fftn(u.values, workers=FFT_WORKERS) * values
    result = scipy.fft.ifftn(coefficients, workers=FFT_WORKERS).real
    return GridField(u.spec, result, notes=u.notes)


def sobolev_norm(u, symbol):
    """sqrt(h^dim Σ symbol(k) |û(k)|²) with the unitary DFT."""
    values = evaluate_symbol(u.spec, symbol)
    coefficients = transform(u).coefficients
    squares = values * np.abs(coefficients) ** 2
    return float(np.sqrt(u.spec.cell_volume * np.sum(squares)))


def convolve_radial(u, kernel, tolerance=1.0e-10):
    """Periodic convolution of a field with a radial kernel.

    The kernel supplies its quadrature weights in offset order through
    ``kernel.sample_on(spec)`` (h^dim times the kernel value, with a corrected
    weight at the origin). The product is formed in Fourier space.

    Parameters
    ----------
    u : GridField
    kernel : RadialKernelTable
    tolerance : float
        A kernel whose value at radius L times the box volume exceeds this
        is flagged as truncated in the notes of the result.
    """
    spec = u.spec
    weights = kernel.sample_on(spec)
    result = scipy.fft.ifftn(
        scipy.fft.fftn(weights, workers=FFT_WORKERS)
        * scipy.fft.fftn(u.values, workers=FFT_WORKERS),
        workers=FFT_WORKERS,
    ).real

    notes = u.notes
    tail = kernel.tail_value(spec.half_width) * (2.0 * spec.half_width) ** spec.dim
    if tail > tolerance:
        note = (
            f"kernel '{kernel.name}' truncated at radius {spec.half_width:g}: "
            f"tail estimate {tail:.2e}"
        )
        logger.warning(note)
        notes = notes + (note,)
    return GridField(spec, result, notes=notes)


def _interpolation_matrix(source, targets):
    """Periodic sinc weights S(t_i - x_j) for one axis of an even grid."""
    n = source.points
    d = targets[:, None] - source.axis()[None, :]
    theta = 2.0 * np.pi * d / (n * source.spacing)
    half = 0.5 * theta
    with np.errstate(divide="ignore", invalid="ignore"):
        weights = np.sin(n * half) / (n * np.tan(half))
    # removable singularity where the target coincides with a sample
    exact = np.isclose(np.sin(half), 0.0, atol=1.0e-13)
    weights[exact] = 1.0
    return weights


def resample(u, target, offset=None):
    """Evaluate the trigonometric interpolant of u at the points of target.

    The value at a target point y is the interpolant at y - offset. Points
    whose shifted position falls outside the source box get zero.

    Parameters
    ----------
    u : GridField
    target : GridSpec
        Must have the same dimension.
    offset : array-like, optional
        The physical shift applied to u.
    """
    if target.dim != u.spec.dim:
        raise DomainError("resample requires grids of the same dimension")
    if offset is None:
        offset = np.zeros(target.dim)
    offset = np.broadcast_to(offset, (target.dim,))
    values = u.values
    source = u.spec
    for axis in range(target.dim):
        positions = target.axis() - offset[axis]
        matrix = _interpolation_matrix(source, positions)
        inside = (positions >= -source.half_width) & (positions < source.half_width)
        matrix[~inside, :] = 0.0
        values = np.moveaxis(np.tensordot(matrix, values, axes=([1], [axis])), 0, axis)
    return GridField(target, values, notes=u.notes)
