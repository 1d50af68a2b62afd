# -*- coding: utf-8 -*-

"""The computations behind the relfrac commands.

Every function returns pandas tables so the command line, the acceptance
suite and the tests share one code path.
"""

import logging
import math

import numpy as np
import pandas
import scipy.fft
from scipy import integrate, special

from .concentration import (
    GridPolicy,
    barycenter,
    decay_fit,
    make_phi,
    reference_ground_state,
)
from .errors import RelFracError, WindowError
from .extension import (
    GradedMesh,
    extend_ode,
    extend_spectral,
    trace_derivative,
    xs_norm,
)
from .grid import GridField, GridSpec, convolve_radial
from .kernels import (
    ComparisonKernel,
    ComparisonKernelSpec,
    bessel_potential_kernel,
    bessel_potential_table,
    comparison_kernel_half,
    density_bound_constant,
    kernel_table,
    poisson_kernel,
    split_bound_fit,
)
from .operator import apply_fourier, apply_singular_integral, hs_norm
from .specfun import bessel_k, sigma_s, theta_profile
from .variational import (
    AutonomousEnergy,
    PenalizedEnergy,
    ground_state,
    ground_state_multistart,
    ray_profile,
)

logger = logging.getLogger(__name__)

#: Scalings of the ground state along which the energy is profiled.
RAY_SCALINGS = np.linspace(0.5, 1.5, 101)

#: Radii and times at which the relativistic density is held to its bound.
DENSITY_RADII = (0.5, 1.0, 2.0, 4.0)
DENSITY_TIMES = (0.5, 1.0, 2.0)


def gaussian_datum(spec):
    """exp(-|x|²/2) on the grid."""
    return spec.field(lambda *x: np.exp(-0.5 * sum(xi * xi for xi in x)))


def relative_error(value, reference):
    """|value - reference| / |reference| in the discrete L² norm."""
    return (value - reference).norm() / reference.norm()


def autonomous_rate(mu, m, s):
    """The decay rate of the autonomous ground state at μ."""
    return math.sqrt(m * m - max(-mu, 0.0) ** (1.0 / s))


def _quad(function, lo, hi, tolerance=1.0e-12):
    value, _ = integrate.quad(
        function, lo, hi, epsabs=0.0, epsrel=tolerance, limit=400
    )
    return value


# ------------------------------------------------------------------ operator
def operator_check(dim=1, s=0.3, m=1.0, half_width=20.0, points=(1024, 2048)):
    """Multiplier against singular integral on a Gaussian, for each grid.

    Returns
    -------
    pandas.DataFrame
        points, spacing, relative error and the observed order against the
        previous row.
    """
    rows = []
    previous = None
    for n in points:
        spec = GridSpec(dim, half_width, int(n))
        u = gaussian_datum(spec)
        error = relative_error(
            apply_singular_integral(u, m, s), apply_fourier(u, m, s)
        )
        order = math.nan
        if previous is not None and error > 0:
            order = math.log(previous[1] / error) / math.log(n / previous[0])
        rows.append(
            {
                "points": int(n),
                "spacing": spec.spacing,
                "relative error": error,
                "observed order": order,
            }
        )
        previous = (n, error)
        logger.info(f"operator check n = {n}: relative error {error:.3e}")
    return pandas.DataFrame(rows)


# ------------------------------------------------------------------- specfun
def specfun_checks():
    """The closed-form, asymptotic, ODE and recurrence checks of K_ν and θ.

    Returns
    -------
    pandas.DataFrame
        One row per check with its error and tolerance.
    """
    rows = []

    r = np.geomspace(1.0e-3, 50.0, 200)
    error = max(
        float(np.max(np.abs(bessel_k(nu, r) / special.kv(nu, r) - 1.0)))
        for nu in (0.5, 1.5, 2.5)
    )
    rows.append(("half-integer closed forms", error, 1.0e-10))

    # two-term small-r expansion; the second term is not negligible for ν < 1
    r0 = 1.0e-4
    errors = []
    for nu in (0.3, 1.0, 2.4):
        limit = special.gamma(nu) * 2.0 ** (nu - 1.0)
        if nu < 1.0:
            ratio = special.gamma(-nu) / special.gamma(nu)
            limit *= 1.0 + ratio * (0.5 * r0) ** (2.0 * nu)
        errors.append(abs(r0**nu * bessel_k(nu, r0) / limit - 1.0))
    rows.append(("small-r law", max(errors), 1.0e-3))

    scale = math.exp(40.0) * math.sqrt(40.0) / math.sqrt(math.pi / 2.0)
    error = max(abs(bessel_k(nu, 40.0) * scale - 1.0) for nu in (0.3, 0.5, 1.0))
    rows.append(("large-r law", error, 1.0e-2))

    s = 0.3
    radii = np.geomspace(0.1, 10.0, 25)
    step = 1.0e-3 * radii
    plus = theta_profile(s, radii + step)
    centre = theta_profile(s, radii)
    minus = theta_profile(s, radii - step)
    second = (plus - 2.0 * centre + minus) / step**2
    first = (plus - minus) / (2.0 * step)
    residual = second + (1.0 - 2.0 * s) / radii * first - centre
    rows.append(("theta ODE residual", float(np.max(np.abs(residual))), 1.0e-5))

    radii = np.linspace(20.0, 30.0, 41)
    nu = 1.3
    lhs = bessel_k(nu + 1.0, radii)
    rhs = bessel_k(nu - 1.0, radii) + 2.0 * nu / radii * bessel_k(nu, radii)
    rows.append(("recurrence", float(np.max(np.abs(lhs / rhs - 1.0))), 1.0e-8))

    return pandas.DataFrame(rows, columns=["check", "error", "tolerance"])


# ------------------------------------------------------------------- kernels
def poisson_normalization(N=1, s=0.3, m=1.0, heights=(0.1, 1.0, 5.0)):
    """∫ P_{s,m}(x, y) dx against θ(m y) at each height."""
    area = 2.0 * np.pi ** (N / 2.0) / special.gamma(N / 2.0)
    rows = []
    for y in heights:

        def integrand(r, y=y):
            return area * r ** (N - 1) * float(poisson_kernel(r, y, m, s, N))

        scale = max(y, 1.0 / m)
        total = _quad(integrand, 0.0, scale) + _quad(integrand, scale, np.inf)
        target = theta_profile(s, m * y)
        rows.append(
            {
                "y": y,
                "value": total,
                "reference": target,
                "relative error": abs(total / target - 1.0),
            }
        )
    return pandas.DataFrame(rows)


def bessel_potential_mass(alpha, N=1):
    """∫ G_α over R^N by radial quadrature."""
    area = 2.0 * np.pi ** (N / 2.0) / special.gamma(N / 2.0)

    def integrand(r):
        return area * r ** (N - 1) * bessel_potential_kernel(alpha, r, N)

    return _quad(integrand, 0.0, 1.0) + _quad(integrand, 1.0, np.inf)


def bessel_semigroup_error(
    alpha=0.5, beta=0.5, half_width=20.0, points=1024, r_min=1.0
):
    """Relative L² error of the grid convolution G_α * G_β against G_{α+β}, N = 1.

    The convolution is formed on a periodic grid with the corrected origin
    weights of both kernels; the comparison runs over |x| >= r_min, where the
    sum of two singular kernels is resolved.
    """
    spec = GridSpec(1, half_width, points)
    first = bessel_potential_table(alpha, 1)
    second = bessel_potential_table(beta, 1)
    averages = scipy.fft.fftshift(second.sample_on(spec)) / spec.cell_volume
    product = convolve_radial(GridField(spec, averages), first, tolerance=1.0e-8)
    x = np.abs(spec.axis())
    mask = x >= r_min
    exact = bessel_potential_kernel(alpha + beta, x[mask], 1)
    difference = product.values[mask] - exact
    return float(np.linalg.norm(difference) / np.linalg.norm(exact))


def tail_fit(table, window):
    """The fitted tail law on the window and the R² of log k against it."""
    r_lo, r_hi = window
    law = table.fit_tail(r_lo, r_hi)
    mask = (table.radii >= r_lo) & (table.radii <= r_hi)
    data = np.log(table.values[mask])
    model = np.log(law(table.radii[mask]))
    total = np.sum((data - np.mean(data)) ** 2)
    r2 = 1.0 - np.sum((data - model) ** 2) / total if total > 0 else 1.0
    return law, float(r2)


def kernel_report(
    name,
    m=1.0,
    s=0.3,
    dim=1,
    alpha=0.6,
    y=1.0,
    V1=0.5,
    delta=0.2,
    tail_window=(5.0, 12.0),
):
    """Tabulate a kernel and summarize its checks.

    Returns
    -------
    (pandas.DataFrame, pandas.DataFrame)
        The table and a quantity/value summary: law agreement at the table
        ends, the fitted tail, and for the comparison kernel the spectral
        identity, the two-term decay bound and, at s = 1/2, the closed-form
        cross-check. The Lévy measure also reports the constant of the
        density bound.
    """
    summary = []
    if name == "comparison":
        spec = ComparisonKernelSpec(m, s, V1, delta, dim)
        kernel = ComparisonKernel(spec)
        table = kernel.table()
        summary.append(("spectral error", kernel.spectral_error()))
        summary.append(("mass error", kernel.mass_error()))
        summary.append(("predicted rate", spec.pole_rate))
        if s == 0.5:
            radii = np.array([0.5, 1.0, 2.0, 4.0])
            closed = comparison_kernel_half(spec, radii)
            error = float(np.max(np.abs(kernel(radii) / closed - 1.0)))
            summary.append(("closed-form error", error))
        split = split_bound_fit(kernel, np.geomspace(2.0, table.radii[-1], 40))
        summary.append(("split bound misfit", split.misfit))
        summary.append(("split bound factor", split.bound_factor))
    else:
        table = kernel_table(name, m, s, dim, alpha=alpha, y=y, V1=V1, delta=delta)
        if table.large_r_law is not None:
            summary.append(("predicted rate", table.large_r_law.rate))
        if name == "levy" and dim == 1:
            constant, _ = density_bound_constant(m, s, DENSITY_RADII, DENSITY_TIMES)
            summary.append(("density bound constant", constant))

    check = table.check()
    summary.append(("small-r law error", check.small_r_error))
    summary.append(("large-r law error", check.large_r_error))
    summary.append(("positive", float(check.positive)))
    summary.append(("monotone", float(check.monotone)))
    try:
        law, r2 = tail_fit(table, tail_window)
    except RelFracError as e:
        logger.warning(f"no tail fit for the {name} kernel: {e}")
    else:
        summary.append(("tail rate", law.rate))
        summary.append(("tail exponent", law.exponent))
        summary.append(("tail coefficient", law.coefficient))
        summary.append(("tail R2", r2))
    return table.to_frame(), pandas.DataFrame(summary, columns=["quantity", "value"])


# ----------------------------------------------------------------- extension
def extension_check(dim=1, s=0.3, m=1.0, half_width=20.0, points=1024, mesh=None):
    """The trace identity, the energy equality and the two extensions.

    Returns
    -------
    pandas.DataFrame
        quantity, value, reference and relative error per identity.
    """
    mesh = GradedMesh.default(m, s) if mesh is None else mesh
    spec = GridSpec(dim, half_width, int(points))
    u = gaussian_datum(spec)
    sigma = sigma_s(s)

    U = extend_spectral(u, m, s, mesh)
    trace = trace_derivative(U, s)
    target = apply_fourier(u, m, s) * sigma
    energy = xs_norm(U, m) ** 2
    energy_target = sigma * hs_norm(u, m, s) ** 2

    V = extend_ode(u, m, s, mesh)
    difference = float(
        np.linalg.norm(V.spectra - U.spectra) / np.linalg.norm(U.spectra)
    )
    ode_energy = xs_norm(V, m) ** 2

    rows = [
        (
            "trace derivative",
            trace.norm(),
            target.norm(),
            relative_error(trace, target),
        ),
        ("extension energy", energy, energy_target, abs(energy / energy_target - 1.0)),
        ("ODE extension energy", ode_energy, energy, abs(ode_energy / energy - 1.0)),
        ("ODE extension field", difference, 0.0, difference),
    ]
    return pandas.DataFrame(
        rows, columns=["quantity", "value", "reference", "relative error"]
    )


# --------------------------------------------------------------- variational
def ground_state_report(
    mus,
    nonlinearity,
    m=1.0,
    s=0.3,
    dim=1,
    policy=None,
    config=None,
    starts=1,
    seed=0,
    workers=None,
    window=(4.0, 10.0),
):
    """Ground states and d_μ for each μ, with decay fits.

    The box of each μ holds policy.decay_lengths decay lengths of the
    predicted rate sqrt(m² - (-μ)^{1/s}) (m for μ >= 0). With several starts
    the lowest energy is kept and the relative spread reported.

    Returns
    -------
    (pandas.DataFrame, {float: NehariPoint})
    """
    policy = GridPolicy() if policy is None else policy
    rows = []
    solutions = {}
    for mu in mus:
        rate = autonomous_rate(mu, m, s)
        grid = policy.autonomous(dim, rate)
        spread = math.nan
        if starts > 1:
            points = ground_state_multistart(
                mu, nonlinearity, m, s, grid, starts, seed, config, workers
            )
            energies = np.array([p.energy for p in points])
            point = points[int(np.argmin(energies))]
            spread = float((energies.max() - energies.min()) / abs(energies.min()))
        else:
            point, _ = ground_state(mu, nonlinearity, m, s, grid, config)
        solutions[mu] = point

        u = point.u
        functional = AutonomousEnergy(mu, nonlinearity, m, s)
        ray = ray_profile(u, functional, RAY_SCALINGS)
        row = {
            "mu": mu,
            "d_mu": point.energy,
            "residual": point.residual,
            "iterations": point.iterations,
            "sup norm": u.sup(),
            "min value": float(u.values.min()),
            "ray maximum t": float(RAY_SCALINGS[int(np.argmax(ray))]),
            "points": grid.points,
            "start spread": spread,
            "predicted c": rate,
            "decay C": math.nan,
            "decay c": math.nan,
            "decay R2": math.nan,
            "power R2": math.nan,
        }
        try:
            fit = decay_fit(u, grid.point(u.argmax()), window)
        except WindowError as e:
            logger.warning(f"mu = {mu:g}: no decay fit: {e}")
        else:
            row["decay C"] = fit.amplitude
            row["decay c"] = fit.rate
            row["decay R2"] = fit.r2
            row["power R2"] = fit.power_r2
        rows.append(row)
    return pandas.DataFrame(rows), solutions


def barycenter_check(
    problem, epsilons, samples=5, delta=1.5, rho=4.0, policy=None, config=None
):
    """Φ_ε(z) for sampled z in M: energy, Nehari scaling and barycenter.

    Returns
    -------
    pandas.DataFrame
        One row per (z, ε), ε decreasing within each z.
    """
    policy = GridPolicy() if policy is None else policy
    point, reference = reference_ground_state(problem, policy, config)
    w = point.u
    if problem.potential.well.radius == 0 and samples > 1:
        logger.warning("M is a single point, so every sampled z is the same")
    ordered = sorted({float(e) for e in epsilons}, reverse=True)
    rows = []
    for index, z in enumerate(problem.potential.well.samples(samples)):
        for epsilon in ordered:
            phi = make_phi(
                z, epsilon, problem, w=w, delta=delta, policy=policy, config=config
            )
            beta = barycenter(phi.u, epsilon, rho)
            row = {"sample": index}
            row.update({f"z{i + 1}": float(zi) for i, zi in enumerate(z)})
            row["epsilon"] = epsilon
            row["J(Phi)"] = phi.energy
            row["|J - d|"] = abs(phi.energy - reference)
            row["t_eps"] = phi.t_u
            row.update({f"beta{i + 1}": float(b) for i, b in enumerate(beta)})
            row["|beta - z|"] = float(np.linalg.norm(beta - z))
            rows.append(row)
    return pandas.DataFrame(rows)


def random_bumps(grid, rng, count=3, spread=3.0, signed=False):
    """A sum of Gaussian bumps with random centres, widths and amplitudes."""
    values = np.zeros(grid.shape)
    for _ in range(count):
        center = rng.uniform(-spread, spread, grid.dim)
        width = rng.uniform(0.5, 1.5)
        amplitude = rng.uniform(0.2, 1.5)
        if signed:
            amplitude *= rng.choice((-1.0, 1.0))
        values += amplitude * np.exp(-0.5 * (grid.radius(center) / width) ** 2)
    return grid.zeros().with_values(values)


def gradient_check(functional, grid, pairs=20, seed=0, step=1.0e-5):
    """Central differences of the energy against ⟨∇J(u), v⟩.

    Returns
    -------
    pandas.DataFrame
        One row per random pair (u, v).
    """
    rng = np.random.default_rng(seed)
    rows = []
    for pair in range(pairs):
        u = random_bumps(grid, rng)
        v = random_bumps(grid, rng, signed=True)
        plus = functional.energy(u + v * step)
        minus = functional.energy(u - v * step)
        difference = (plus - minus) / (2.0 * step)
        analytic = functional.gradient(u).inner(v)
        rows.append(
            {
                "pair": pair,
                "difference quotient": difference,
                "gradient": analytic,
                "relative error": abs(difference - analytic) / abs(analytic),
            }
        )
    return pandas.DataFrame(rows)


def gradient_checks(problem, epsilon=0.5, mu=None, pairs=20, seed=0, policy=None):
    """gradient_check for the autonomous and the penalized energies."""
    policy = GridPolicy() if policy is None else policy
    mu = -problem.potential.V0 if mu is None else mu
    autonomous = AutonomousEnergy(mu, problem.nonlinearity, problem.m, problem.s)
    penalized = PenalizedEnergy(problem, epsilon)
    frames = []
    for name, functional, grid in (
        ("autonomous", autonomous, policy.reference(problem)),
        ("penalized", penalized, policy.penalized(problem, epsilon)),
    ):
        frame = gradient_check(functional, grid, pairs, seed)
        frame.insert(0, "functional", name)
        frames.append(frame)
    return pandas.concat(frames, ignore_index=True)
