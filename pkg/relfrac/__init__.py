# -*- coding: utf-8 -*-

"""
relfrac
Ground states and concentration for the fractional relativistic Schrödinger
equation
"""

# Bring up the main classes and functions so that they appear to be directly
# in the relfrac package.

from .errors import (  # noqa: F401
    ConfigurationError,
    DomainError,
    InfeasibleEpsilonError,
    NonConvergenceError,
    NumericalError,
    PositivityError,
    ProjectionError,
    RelFracError,
    ResolutionError,
    WindowError,
)
from .specfun import (  # noqa: F401
    OperatorConstants,
    bessel_k,
    gamma_fn,
    lattice_defect,
    norm_equivalence,
    operator_constants,
    sigma_s,
    theta_profile,
)
from .grid import (  # noqa: F401
    GridField,
    GridSpec,
    apply_multiplier,
    convolve_radial,
    inverse_transform,
    resample,
    set_fft_workers,
    transform,
)
from .operator import (  # noqa: F401
    SingularQuadratureConfig,
    apply_bessel_potential,
    apply_fourier,
    apply_singular_integral,
    dual_norm,
    hs_norm,
    quadratic_form,
)
from .kernels import (  # noqa: F401
    ComparisonKernel,
    ComparisonKernelSpec,
    RadialKernelTable,
    bessel_potential_kernel,
    comparison_kernel,
    kernel_table,
    levy_measure,
    poisson_kernel,
    relativistic_density,
)
from .extension import (  # noqa: F401
    ExtensionField,
    GradedMesh,
    extend_ode,
    extend_spectral,
    trace_derivative,
    xs_norm,
)
from .variational import (  # noqa: F401
    AutonomousEnergy,
    NehariPoint,
    PenalizationParams,
    PenalizedEnergy,
    PotentialSpec,
    PowerNonlinearity,
    ProblemSpec,
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
from .concentration import (  # noqa: F401
    GridPolicy,
    SweepReport,
    barycenter,
    decay_fit,
    epsilon_sweep,
    make_phi,
    solve_penalized,
)
from .relfrac_parameters import RelFracParameters, RunConfig  # noqa: F401

from .metadata import metadata  # noqa: F401

# Handle versioning
from ._version import get_versions

__author__ = "The relfrac developers"
__email__ = ""
versions = get_versions()
__version__ = versions["version"]
__git_revision__ = versions["full-revisionid"]
del get_versions, versions
