# -*- coding: utf-8 -*-
"""
Control parameters for the relfrac commands
"""

from dataclasses import dataclass
import logging

from .concentration import GridPolicy
from .errors import ConfigurationError
from .extension import GradedMesh
from .suite import CHECKS
from .variational import POTENTIALS, ProblemSpec, SolverConfig

logger = logging.getLogger(__name__)


class RelFracParameters:
    """
    The control parameters for relfrac.

    The keys are the option names of the command line and of the config file,
    the values are dictionaries as outlined below.

    Examples
    --------
    ::

        parameters = {
            "s": {
                "default": 0.3,
                "kind": "float",
                "enumeration": tuple(),
                "format_string": ".3f",
                "description": "Order s:",
                "help_text": "The fractional order, 0 < s < 1.",
            },
        }

    parameters : {str: {str: str}}
        A dictionary containing the parameters of every command.
        Each key of the dictionary is a dictionary that contains the
        the following keys:

    parameters["default"] :
        The default value of the parameter. None marks a parameter that the
        commands using it require from the config file or the command line.

    parameters["kind"] : enum()
        Specifies the kind of a variable. One of "integer", "float", "string",
        "boolean", "enum", or "list" (a comma or blank separated list of
        floats).

    parameters["enumeration"]: tuple
        A tuple of enumerated values.

    parameters["format_string"]: str
        A format string for "pretty" output.

    parameters["description"]: str
        A short string used as a label in printed summaries.

    parameters["help_text"]: str
        A longer string to display as help for the user.
    """

    parameters = {
        "dim": {
            "default": 1,
            "kind": "integer",
            "enumeration": (1, 2, 3),
            "format_string": "d",
            "description": "Dimension N:",
            "help_text": "The spatial dimension.",
        },
        "s": {
            "default": 0.3,
            "kind": "float",
            "enumeration": tuple(),
            "format_string": ".3f",
            "description": "Order s:",
            "help_text": "The fractional order, 0 < s < 1.",
        },
        "m": {
            "default": 1.0,
            "kind": "float",
            "enumeration": tuple(),
            "format_string": ".3f",
            "description": "Mass m:",
            "help_text": "The mass, m > 0.",
        },
        "p": {
            "default": 3.0,
            "kind": "float",
            "enumeration": tuple(),
            "format_string": ".3f",
            "description": "Exponent p:",
            "help_text": (
                "The power of the nonlinearity f(t) = (t+)^p, 1 < p < 2*_s - 1."
            ),
        },
        "potential": {
            "default": "gaussian",
            "kind": "enum",
            "enumeration": tuple(POTENTIALS),
            "format_string": "",
            "description": "Potential:",
            "help_text": (
                "The potential well: 'gaussian' -V0 exp(-|x|^2), 'plateau' flat "
                "on a ball, or 'constant'."
            ),
        },
        "depth": {
            "default": 0.5,
            "kind": "float",
            "enumeration": tuple(),
            "format_string": ".4f",
            "description": "Well depth V0:",
            "help_text": "The depth V0 = V1 of the well, 0 < V1 < m^{2s}.",
        },
        "lambda-half-width": {
            "default": 2.0,
            "kind": "float",
            "enumeration": tuple(),
            "format_string": ".3f",
            "description": "Half width of Lambda:",
            "help_text": (
                "The half width of the box Lambda for the gaussian and constant "
                "potentials; the margin beyond the plateau for 'plateau'."
            ),
        },
        "plateau-radius": {
            "default": 0.5,
            "kind": "float",
            "enumeration": tuple(),
            "format_string": ".3f",
            "description": "Plateau radius:",
            "help_text": "The radius of the flat bottom of the plateau well.",
        },
        "kappa": {
            "default": 0.0,
            "kind": "float",
            "enumeration": tuple(),
            "format_string": ".4f",
            "description": "Penalization kappa:",
            "help_text": "The penalization strength; 0 selects the default.",
        },
        "multiplicity": {
            "default": "no",
            "kind": "boolean",
            "enumeration": ("yes", "no"),
            "format_string": "",
            "description": "Multiplicity mode:",
            "help_text": "Cap the nonlinearity at V0/kappa instead of V1/kappa.",
        },
        "spacing": {
            "default": 0.0390625,
            "kind": "float",
            "enumeration": tuple(),
            "format_string": ".6f",
            "description": "Grid spacing:",
            "help_text": "The common grid spacing of the variational solves.",
        },
        "max-points": {
            "default": 4096,
            "kind": "integer",
            "enumeration": tuple(),
            "format_string": "d",
            "description": "Points per axis (cap):",
            "help_text": (
                "Largest number of grid points per axis for a penalized solve."
            ),
        },
        "half-width": {
            "default": 20.0,
            "kind": "float",
            "enumeration": tuple(),
            "format_string": ".2f",
            "description": "Box half width L:",
            "help_text": "The half width of the box for op-check and extend-check.",
        },
        "points": {
            "default": "1024 2048",
            "kind": "list",
            "enumeration": tuple(),
            "format_string": "",
            "description": "Points per axis:",
            "help_text": "The grid sizes of op-check; extend-check uses the first.",
        },
        "mu": {
            "default": None,
            "kind": "list",
            "enumeration": tuple(),
            "format_string": "",
            "description": "Constant potentials mu:",
            "help_text": "The values of mu for ground-state, each > -m^{2s}.",
        },
        "epsilons": {
            "default": None,
            "kind": "list",
            "enumeration": tuple(),
            "format_string": "",
            "description": "Values of epsilon:",
            "help_text": "The semiclassical parameters of sweep and barycenter-check.",
        },
        "delta": {
            "default": 1.5,
            "kind": "float",
            "enumeration": tuple(),
            "format_string": ".3f",
            "description": "Cutoff radius delta:",
            "help_text": (
                "The cutoff radius of the test functions; B(z, delta) in Lambda."
            ),
        },
        "rho": {
            "default": 4.0,
            "kind": "float",
            "enumeration": tuple(),
            "format_string": ".3f",
            "description": "Barycenter clamp rho:",
            "help_text": "The clamp radius of the barycenter map.",
        },
        "samples": {
            "default": 5,
            "kind": "integer",
            "enumeration": tuple(),
            "format_string": "d",
            "description": "Well samples:",
            "help_text": "The number of points z of M sampled by barycenter-check.",
        },
        "window": {
            "default": "4 10",
            "kind": "list",
            "enumeration": tuple(),
            "format_string": "",
            "description": "Decay window:",
            "help_text": "The annulus r_lo r_hi of the decay fits.",
        },
        "kernel": {
            "default": "comparison",
            "kind": "enum",
            "enumeration": ("jump", "levy", "bessel", "poisson", "comparison"),
            "format_string": "",
            "description": "Kernel:",
            "help_text": "The kernel tabulated by the kernel command.",
        },
        "alpha": {
            "default": 0.6,
            "kind": "float",
            "enumeration": tuple(),
            "format_string": ".3f",
            "description": "Bessel order alpha:",
            "help_text": "The order of the Bessel potential kernel.",
        },
        "height": {
            "default": 1.0,
            "kind": "float",
            "enumeration": tuple(),
            "format_string": ".3f",
            "description": "Poisson height y:",
            "help_text": "The height y of the Poisson kernel.",
        },
        "comparison-delta": {
            "default": 0.2,
            "kind": "float",
            "enumeration": tuple(),
            "format_string": ".3f",
            "description": "Comparison margin delta:",
            "help_text": (
                "The margin delta of the comparison kernel, V1 + delta < m^{2s}."
            ),
        },
        "tail-window": {
            "default": "5 12",
            "kind": "list",
            "enumeration": tuple(),
            "format_string": "",
            "description": "Tail fit window:",
            "help_text": "The radii r_lo r_hi of the kernel tail fit.",
        },
        "mesh-cells": {
            "default": 256,
            "kind": "integer",
            "enumeration": tuple(),
            "format_string": "d",
            "description": "Extension mesh cells:",
            "help_text": "The number M of cells of the graded mesh in y.",
        },
        "mesh-exponent": {
            "default": 0.0,
            "kind": "float",
            "enumeration": tuple(),
            "format_string": ".2f",
            "description": "Mesh grading q:",
            "help_text": "The grading power of the mesh; 0 selects max(2, 1/s).",
        },
        "max-iterations": {
            "default": 5000,
            "kind": "integer",
            "enumeration": tuple(),
            "format_string": "d",
            "description": "Maximum iterations:",
            "help_text": "The iteration cap of the descent.",
        },
        "tolerance": {
            "default": 1.0e-8,
            "kind": "float",
            "enumeration": tuple(),
            "format_string": ".1e",
            "description": "Residual tolerance:",
            "help_text": "The preconditioned residual at which the descent stops.",
        },
        "starts": {
            "default": 1,
            "kind": "integer",
            "enumeration": tuple(),
            "format_string": "d",
            "description": "Random starts:",
            "help_text": "The number of random initial iterates of ground-state.",
        },
        "seed": {
            "default": 0,
            "kind": "integer",
            "enumeration": tuple(),
            "format_string": "d",
            "description": "Seed:",
            "help_text": "The seed of every random choice.",
        },
        "checks": {
            "default": None,
            "kind": "list",
            "enumeration": tuple(),
            "format_string": "",
            "description": "Acceptance checks:",
            "help_text": "The numbers of the acceptance checks to run; all by default.",
        },
        "workers": {
            "default": 1,
            "kind": "integer",
            "enumeration": tuple(),
            "format_string": "d",
            "description": "Worker threads:",
            "help_text": "Threads used for independent solves.",
        },
        "fft-workers": {
            "default": 1,
            "kind": "integer",
            "enumeration": tuple(),
            "format_string": "d",
            "description": "FFT threads:",
            "help_text": "Threads used inside each FFT.",
        },
        "table-format": {
            "default": "csv",
            "kind": "enum",
            "enumeration": ("csv", "json", "xlsx", "txt"),
            "format_string": "",
            "description": "Table format:",
            "help_text": "The file format of the tables written.",
        },
        "plots": {
            "default": "yes",
            "kind": "boolean",
            "enumeration": ("yes", "no"),
            "format_string": "",
            "description": "Write plots:",
            "help_text": "Whether to write SVG figures next to the tables.",
        },
        "log-level": {
            "default": "WARNING",
            "kind": "enum",
            "enumeration": ("DEBUG", "INFO", "WARNING", "ERROR"),
            "format_string": "",
            "description": "Log level:",
            "help_text": "The level of the diagnostic log.",
        },
    }

    def __init__(self, defaults={}, data=None):
        """Initialize the parameters, by default with the parameters defined above

        Parameters
        ----------
        defaults: dict
            A dictionary of parameters to initialize. The parameters
            above are used first and any given will override/add to them.
        data: dict
            A dictionary of keys and a subdictionary with value and units
            for updating the current, default values.
        """
        logger.debug("RelFracParameters.__init__")

        self.definitions = {**RelFracParameters.parameters, **defaults}
        self.values = {key: item["default"] for key, item in self.definitions.items()}
        if data is not None:
            self.update(data)

    def update(self, data):
        """Set values, converting each to the kind of its parameter."""
        for key, value in data.items():
            if key not in self.definitions:
                raise ConfigurationError(f"unknown parameter '{key}'", key=key)
            self.values[key] = self.convert(key, value)

    def convert(self, key, value):
        """Convert a raw (string) value to the kind of the parameter."""
        item = self.definitions[key]
        if value is None:
            return None
        kind = item["kind"]
        try:
            if kind == "integer":
                return int(value)
            if kind == "float":
                return float(value)
            if kind == "boolean":
                if isinstance(value, bool):
                    return value
                return str(value).strip().lower() in ("yes", "true", "1", "on")
            if kind == "list":
                if isinstance(value, str):
                    return [float(v) for v in value.replace(",", " ").split()]
                return [float(v) for v in value]
        except ValueError:
            raise ConfigurationError(
                f"parameter '{key}' = '{value}' is not a valid {kind}", key=key
            )
        if kind == "enum" and item["enumeration"] and value not in item["enumeration"]:
            raise ConfigurationError(
                f"parameter '{key}' = '{value}' is not one of {item['enumeration']}",
                key=key,
            )
        return value

    def values_to_dict(self):
        """The current values, converted."""
        return {key: self.convert(key, value) for key, value in self.values.items()}


@dataclass
class RunConfig:
    """The parsed configuration of one command.

    Attributes
    ----------
    command : str
    values : dict
        Every parameter, converted to its kind.
    output : str
        The output directory.
    config_file : str or None
    """

    command: str
    values: dict
    output: str = "."
    config_file: object = None

    def __getitem__(self, key):
        return self.values[key]

    def require(self, *keys):
        """Raise ConfigurationError naming the first key with no value."""
        for key in keys:
            if self.values.get(key) is None:
                raise ConfigurationError(
                    f"the command '{self.command}' requires the parameter '{key}'",
                    key=key,
                )

    def potential(self):
        P = self.values
        name = P["potential"]
        if name == "plateau":
            return POTENTIALS[name](
                P["dim"], P["depth"], P["plateau-radius"], P["lambda-half-width"]
            )
        return POTENTIALS[name](P["dim"], P["depth"], P["lambda-half-width"])

    def problem(self):
        """The ProblemSpec, validated."""
        P = self.values
        return ProblemSpec.build(
            P["dim"],
            P["s"],
            P["m"],
            self.potential(),
            P["p"],
            kappa=P["kappa"] if P["kappa"] > 0 else None,
            multiplicity=P["multiplicity"],
        )

    def grid_policy(self):
        return GridPolicy(spacing=self["spacing"], max_points=self["max-points"])

    def solver_config(self):
        return SolverConfig(
            max_iterations=self["max-iterations"], tolerance=self["tolerance"]
        )

    def mesh(self):
        s = self["s"]
        exponent = self["mesh-exponent"]
        if exponent <= 0:
            exponent = max(2.0, 1.0 / s)
        return GradedMesh(10.0 / self["m"], self["mesh-cells"], exponent)

    def window(self, key="window"):
        window = self[key]
        if window is None or len(window) != 2 or not 0 < window[0] < window[1]:
            raise ConfigurationError(
                f"'{key}' must be two radii 0 < r_lo < r_hi, got {window}", key=key
            )
        return tuple(window)

    def validate(self):
        """Re-check the physical inequalities behind the command.

        Raises
        ------
        ConfigurationError
            Naming the violated inequality.
        """
        P = self.values
        if not 0.0 < P["s"] < 1.0:
            raise ConfigurationError(
                f"s = {P['s']} is not in (0, 1)", inequality="0 < s < 1"
            )
        if not P["m"] > 0:
            raise ConfigurationError(
                f"m = {P['m']} is not positive", inequality="m <= 0"
            )
        if P["dim"] <= 2 * P["s"]:
            raise ConfigurationError(f"N = {P['dim']} <= 2s", inequality="N <= 2s")
        for key in ("alpha", "height", "delta", "rho", "comparison-delta"):
            if not P[key] > 0:
                raise ConfigurationError(
                    f"{key} = {P[key]} is not positive",
                    inequality=f"{key} <= 0",
                    key=key,
                )
        if P["samples"] < 1:
            raise ConfigurationError(
                f"samples = {P['samples']} is less than 1",
                inequality="samples < 1",
                key="samples",
            )
        for n in P["points"] or []:
            n = int(n)
            if n < 16 or n & (n - 1):
                raise ConfigurationError(
                    f"{n} points per axis is not a power of two >= 16",
                    inequality="n >= 16, power of 2",
                    key="points",
                )
        if self.command in ("ground-state", "sweep", "barycenter-check"):
            self.problem()
        if self.command in ("sweep", "barycenter-check"):
            self.require("epsilons")
            if any(e <= 0 for e in P["epsilons"]):
                raise ConfigurationError(
                    "every epsilon must be positive", inequality="epsilon <= 0"
                )
        if self.command == "ground-state":
            self.require("mu")
            m2s = P["m"] ** (2.0 * P["s"])
            for mu in P["mu"]:
                if not mu > -m2s:
                    raise ConfigurationError(
                        f"mu = {mu} <= -m^(2s) = {-m2s:g}", inequality="mu <= -m^{2s}"
                    )
        for number in P["checks"] or []:
            if number != int(number) or not 1 <= number <= len(CHECKS):
                raise ConfigurationError(
                    f"there is no acceptance check {number:g}, only 1 to {len(CHECKS)}",
                    key="checks",
                )
        return self
