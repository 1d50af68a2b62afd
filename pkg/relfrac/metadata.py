"""This file contains metadata describing the results from the relfrac commands
"""

metadata = {}

"""Results that the relfrac commands produce.
`metadata["results"]` describes the columns of the tables the commands write. It
is a dictionary where the keys are the column names, and the values are a
dictionary describing the result. For example::

    metadata["results"] = {
        "c_epsilon": {
            "calculation": ["sweep"],
            "description": "The energy c_eps of the penalized solution",
            "dimensionality": "scalar",
            "type": "float",
        },
    }

Fields
______

calculation : [str]
    The commands that write the column.

description : str
    A human-readable description of the result.

dimensionality : str
    The dimensions of the data, "scalar" or an array definition such as "[N]".

type : str
    The type of the data: string, integer, boolean or float.

units : str
    Optional units; the problems are dimensionless, so this is rarely present.
"""
metadata["results"] = {
    "points": {
        "calculation": ["op-check", "sweep"],
        "description": "Grid points per axis",
        "dimensionality": "scalar",
        "type": "integer",
    },
    "spacing": {
        "calculation": ["op-check"],
        "description": "The grid spacing h",
        "dimensionality": "scalar",
        "type": "float",
    },
    "relative error": {
        "calculation": ["op-check", "extend-check"],
        "description": "Relative discrete L2 discrepancy against the reference",
        "dimensionality": "scalar",
        "type": "float",
    },
    "observed order": {
        "calculation": ["op-check"],
        "description": "log2 of the error ratio between successive grids",
        "dimensionality": "scalar",
        "type": "float",
    },
    "r": {
        "calculation": ["kernel"],
        "description": "The radius of a kernel sample",
        "dimensionality": "scalar",
        "type": "float",
    },
    "value": {
        "calculation": ["kernel", "extend-check", "barycenter-check"],
        "description": "The tabulated or measured value",
        "dimensionality": "scalar",
        "type": "float",
    },
    "quantity": {
        "calculation": ["extend-check"],
        "description": "The identity checked",
        "dimensionality": "scalar",
        "type": "string",
    },
    "mu": {
        "calculation": ["ground-state"],
        "description": "The constant potential of the autonomous problem",
        "dimensionality": "scalar",
        "type": "float",
    },
    "d_mu": {
        "calculation": ["ground-state"],
        "description": "The ground-state energy of the autonomous problem",
        "dimensionality": "scalar",
        "type": "float",
    },
    "epsilon": {
        "calculation": ["sweep", "barycenter-check"],
        "description": "The semiclassical parameter",
        "dimensionality": "scalar",
        "type": "float",
    },
    "c_epsilon": {
        "calculation": ["sweep"],
        "description": "The energy c_eps of the penalized solution",
        "dimensionality": "scalar",
        "type": "float",
    },
    "|c - d|": {
        "calculation": ["sweep"],
        "description": "The distance of c_eps from the limit d_V(0)",
        "dimensionality": "scalar",
        "type": "float",
    },
    "dist(eps x_max, M)": {
        "calculation": ["sweep"],
        "description": "Distance of the scaled maximum point from the well set",
        "dimensionality": "scalar",
        "type": "float",
    },
    "sup outside": {
        "calculation": ["sweep"],
        "description": "The supremum of u_eps outside Lambda/eps",
        "dimensionality": "scalar",
        "type": "float",
    },
    "below a": {
        "calculation": ["sweep"],
        "description": "Whether the supremum outside Lambda/eps is below a",
        "dimensionality": "scalar",
        "type": "boolean",
    },
    "decay c": {
        "calculation": ["ground-state", "sweep"],
        "description": "The fitted exponential decay rate",
        "dimensionality": "scalar",
        "type": "float",
    },
    "decay R2": {
        "calculation": ["ground-state", "sweep"],
        "description": "R^2 of the exponential decay fit",
        "dimensionality": "scalar",
        "type": "float",
    },
    "power R2": {
        "calculation": ["ground-state", "sweep"],
        "description": "R^2 of the competing power-law fit",
        "dimensionality": "scalar",
        "type": "float",
    },
    "J(Phi)": {
        "calculation": ["barycenter-check"],
        "description": "The penalized energy of the test function",
        "dimensionality": "scalar",
        "type": "float",
    },
    "t_eps": {
        "calculation": ["barycenter-check"],
        "description": "The Nehari scaling of the test function",
        "dimensionality": "scalar",
        "type": "float",
    },
    "|beta - z|": {
        "calculation": ["barycenter-check"],
        "description": "Distance of the barycenter of the test function from z",
        "dimensionality": "scalar",
        "type": "float",
    },
    "criterion": {
        "calculation": ["acceptance-suite"],
        "description": "The acceptance criterion",
        "dimensionality": "scalar",
        "type": "string",
    },
    "passed": {
        "calculation": ["acceptance-suite"],
        "description": "Whether the criterion holds",
        "dimensionality": "scalar",
        "type": "boolean",
    },
    "threshold": {
        "calculation": ["acceptance-suite"],
        "description": "The bound the measured value is compared with",
        "dimensionality": "scalar",
        "type": "float",
    },
}


def describe(command):
    """The result descriptions that apply to a command."""
    return {
        key: value
        for key, value in metadata["results"].items()
        if command in value["calculation"]
    }
