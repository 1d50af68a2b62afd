# -*- coding: utf-8 -*-

"""The relfrac command line: parse the configuration, run one command and
write its tables, figures and manifest.
"""

import json
import logging
from pathlib import Path
import pkg_resources
import sys
import time

import configargparse
import numpy as np
import pandas
from tabulate import tabulate

import relfrac
import seamm_util.printing as printing
from seamm_util.printing import FormattedText as __

from .concentration import epsilon_sweep
from .errors import (
    ConfigurationError,
    DomainError,
    NonConvergenceError,
    NumericalError,
)
from .experiments import (
    barycenter_check,
    extension_check,
    ground_state_report,
    kernel_report,
    operator_check,
)
from .grid import set_fft_workers
from .metadata import describe
from .relfrac_parameters import RelFracParameters, RunConfig
from .suite import results_frame, run_suite
from .variational import PowerNonlinearity

# In addition to the normal logger, two logger-like printing facilities are
# defined: "job" and "printer". "job" echoes the short summary of the run,
# "printer" is used for the tables of results.

logger = logging.getLogger(__name__)
job = printing.getPrinter()
printer = printing.getPrinter("relfrac")

path = Path(pkg_resources.resource_filename(__name__, "data/"))
BENCHMARK_CONFIG = path / "benchmark.ini"

COMMANDS = (
    "op-check",
    "kernel",
    "extend-check",
    "ground-state",
    "sweep",
    "barycenter-check",
    "acceptance-suite",
)

#: Other names accepted for the commands.
ALIASES = {"paper-suite": "acceptance-suite"}

#: Exit status of a run whose acceptance checks did not all pass.
EXIT_FAILED_CHECKS = 1
EXIT_CONFIGURATION = 2
EXIT_NUMERICAL = 3


def create_parser():
    """The argument parser: one option per parameter, plus a config file."""
    parser = configargparse.ArgParser(
        prog="relfrac",
        description=(
            "Numerical experiments for the fractional relativistic Schrödinger "
            "equation (-Δ+m²)^s u + V(εx) u = f(u)."
        ),
        epilog=f"The benchmark configuration is {BENCHMARK_CONFIG}",
    )
    parser.add_argument(
        "command", choices=(*COMMANDS, *ALIASES), help="The command to run."
    )
    parser.add_argument(
        "--config",
        is_config_file=True,
        help="A file of 'key = value' lines; '#' starts a comment.",
    )
    parser.add_argument(
        "--output",
        env_var="RELFRAC_OUTPUT",
        default=".",
        help="The directory the results are written to.",
    )
    for key, item in RelFracParameters.parameters.items():
        default = item["default"]
        parser.add_argument(
            f"--{key}",
            dest=key,
            default=None if default is None else str(default),
            help=item["help_text"],
        )
    return parser


def build_config(args):
    """The RunConfig of parsed arguments, validated."""
    options = vars(args)
    data = {key: options[key] for key in RelFracParameters.parameters}
    parameters = RelFracParameters(data=data)
    config = RunConfig(
        command=ALIASES.get(args.command, args.command),
        values=parameters.values_to_dict(),
        output=args.output,
        config_file=args.config,
    )
    return config.validate()


def _save_table(handle):
    """Write a table to disk."""
    filename = handle["filename"]
    index = handle["index column"]
    file_type = Path(filename).suffix
    table = handle["table"]
    if file_type == ".csv":
        table.to_csv(filename, index=index is not None)
    elif file_type == ".json":
        table.to_json(filename, indent=4, orient="table", index=index is not None)
    elif file_type == ".xlsx":
        table.to_excel(filename, index=index is not None)
    elif file_type == ".txt":
        with open(filename, "w") as fd:
            fd.write(table.to_string(header=True, index=index is not None))
    else:
        raise RuntimeError(
            f"Save table: cannot handle format '{file_type}' for file '{filename}'"
        )


def _format_table(table, title):
    tmp = tabulate(
        table, headers="keys", tablefmt="pretty", showindex=False, floatfmt=".6g"
    )
    length = len(tmp.splitlines()[0])
    return "\n" + title.center(length) + "\n" + tmp + "\n"


class Run:
    """The artifacts of one command, written into the output directory."""

    def __init__(self, config):
        self.config = config
        self.directory = Path(config.output)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.artifacts = []
        self.text = ""
        self.passed = True

    def table(self, stem, table, title=None):
        """Save a table and add it to the printed output."""
        filename = self.directory / f"{stem}.{self.config['table-format']}"
        _save_table({"filename": filename, "index column": None, "table": table})
        self.artifacts.append(filename.name)
        if title is not None:
            self.text += _format_table(table, title)
        return filename

    def figure(self, stem, draw):
        """Draw an SVG figure; failures are logged and skipped."""
        if not self.config["plots"]:
            return None
        filename = self.directory / f"{stem}.svg"
        try:
            import matplotlib

            matplotlib.use("Agg")
            import matplotlib.pyplot as plt

            figure, axes = plt.subplots()
            draw(axes)
            figure.tight_layout()
            figure.savefig(filename, format="svg", metadata={"Date": None})
            plt.close(figure)
        except Exception as e:
            logger.warning(f"The figure '{filename.name}' was not written: {e}")
            return None
        self.artifacts.append(filename.name)
        return filename

    def manifest(self, extra=None):
        """Write manifest.json, enough to repeat the run."""
        data = {
            "command": self.config.command,
            "config file": self.config.config_file,
            "parameters": self.config.values,
            "version": relfrac.__version__,
            "git revision": relfrac.__git_revision__,
            "seed": self.config["seed"],
            "artifacts": sorted(self.artifacts),
            "results": describe(self.config.command),
        }
        if extra is not None:
            data.update(extra)
        with open(self.directory / "manifest.json", "w") as fd:
            json.dump(data, fd, indent=4, sort_keys=True, default=str)


# ------------------------------------------------------------------ commands
def run_op_check(run):
    P = run.config
    points = [int(n) for n in P["points"]]
    frame = operator_check(P["dim"], P["s"], P["m"], P["half-width"], points)
    run.table("operator_check", frame, "Multiplier against singular integral")

    def draw(axes):
        axes.loglog(frame["spacing"], frame["relative error"], "o-")
        axes.set_xlabel("h")
        axes.set_ylabel("relative L2 discrepancy")

    run.figure("operator_check", draw)


def run_kernel(run):
    P = run.config
    name = P["kernel"]
    table, summary = kernel_report(
        name,
        P["m"],
        P["s"],
        P["dim"],
        alpha=P["alpha"],
        y=P["height"],
        V1=P["depth"],
        delta=P["comparison-delta"],
        tail_window=P.window("tail-window"),
    )
    run.table(f"kernel_{name}", table)
    run.table(f"kernel_{name}_summary", summary, f"The {name} kernel")

    def draw(axes):
        axes.loglog(table["r"], table["value"], label=name)
        axes.loglog(table["r"], table["small_r_law"], "--", label="small r")
        if "large_r_law" in table:
            axes.loglog(table["r"], table["large_r_law"], ":", label="large r")
        axes.set_ylim(table["value"].min() / 10.0, table["value"].max() * 10.0)
        axes.set_xlabel("r")
        axes.legend()

    run.figure(f"kernel_{name}", draw)


def run_extend_check(run):
    P = run.config
    frame = extension_check(
        P["dim"], P["s"], P["m"], P["half-width"], int(P["points"][0]), P.mesh()
    )
    run.table("extension_check", frame, "Extension identities")


def run_ground_state(run):
    P = run.config
    frame, solutions = ground_state_report(
        P["mu"],
        PowerNonlinearity(P["p"]),
        P["m"],
        P["s"],
        P["dim"],
        policy=P.grid_policy(),
        config=P.solver_config(),
        starts=P["starts"],
        seed=P["seed"],
        workers=P["workers"],
        window=P.window(),
    )
    run.table("ground_state", frame, "Ground states")
    for i, point in enumerate(solutions.values()):
        run.table(f"ground_state_{i + 1}", point.u.to_frame())

    def draw(axes):
        for mu, point in solutions.items():
            u = point.u
            axes.semilogy(u.spec.axis(), np.abs(u.values), label=f"μ={mu:g}")
        axes.set_xlabel("x")
        axes.legend()

    if P["dim"] == 1:
        run.figure("ground_state", draw)


def run_sweep(run):
    P = run.config
    problem = P.problem()
    report = epsilon_sweep(
        problem,
        P["epsilons"],
        P.grid_policy(),
        P.solver_config(),
        workers=P["workers"],
        window=P.window(),
    )
    frame = report.to_frame()
    run.table("sweep", frame)
    columns = ["epsilon", "c_epsilon", "|c - d|", "dist(eps x_max, M)", "below a"]
    title = f"ε-sweep, d = {report.reference_energy:.10g}, a = {report.a:.6g}"
    run.text += _format_table(frame[columns], title)

    def draw_energy(axes):
        axes.loglog(frame["epsilon"], frame["|c - d|"], "o-")
        axes.set_xlabel("ε")
        axes.set_ylabel("|c_ε - d|")

    def draw_decay(axes):
        axes.plot(frame["epsilon"], frame["decay c"], "o-", label="fitted rate")
        axes.axhline(problem.decay_rate, linestyle="--", label="limit rate")
        axes.set_xlabel("ε")
        axes.legend()

    run.figure("sweep_energy", draw_energy)
    run.figure("sweep_decay", draw_decay)
    return {"reference energy": report.reference_energy, "a": report.a}


def run_barycenter_check(run):
    P = run.config
    frame = barycenter_check(
        P.problem(),
        P["epsilons"],
        P["samples"],
        P["delta"],
        P["rho"],
        P.grid_policy(),
        P.solver_config(),
    )
    columns = ["sample", "epsilon", "J(Phi)", "|J - d|", "t_eps", "|beta - z|"]
    run.table("barycenter_check", frame)
    run.text += _format_table(frame[columns], "Test functions and barycenters")


def run_acceptance_suite(run):
    P = run.config
    select = None if P["checks"] is None else [int(n) for n in P["checks"]]
    results = run_suite(
        select=select, seed=P["seed"], workers=P["workers"], policy=P.grid_policy()
    )
    frame = results_frame(results)
    columns = ["criterion", "passed", "value", "threshold", "in time", "detail"]
    run.table("acceptance", frame[columns])
    run.text += _format_table(
        frame[["criterion", "passed", "value", "threshold", "runtime", "in time"]],
        "Acceptance checks",
    )
    run.passed = all(result.passed for result in results)
    late = [result.name for result in results if not result.in_time]
    if late:
        job.normal(
            __(f"Over their time limits: {', '.join(late)}", indent=4 * " ")
        )
    return {"runtimes": {r.name: round(r.runtime, 3) for r in results}}


RUNNERS = {
    "op-check": run_op_check,
    "kernel": run_kernel,
    "extend-check": run_extend_check,
    "ground-state": run_ground_state,
    "sweep": run_sweep,
    "barycenter-check": run_barycenter_check,
    "acceptance-suite": run_acceptance_suite,
}


def _write_history(directory, error):
    filename = Path(directory) / "residual_history.csv"
    history = pandas.DataFrame(
        {"iteration": np.arange(len(error.history)), "residual": error.history}
    )
    history.to_csv(filename, index=False)
    return filename


def main(argv=None):
    """Run one relfrac command and return the exit status.

    0 on success, 1 if an acceptance check failed, 2 for a configuration
    error and 3 for a numerical failure.
    """
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    parser = create_parser()
    args = parser.parse_args(argv)

    handler = logging.StreamHandler(sys.stdout)
    handler.setFormatter(logging.Formatter("%(message)s"))
    job.addHandler(handler)
    job.setLevel(printing.NORMAL)
    printer.setLevel(printing.NORMAL)
    try:
        return _main(args)
    finally:
        job.removeHandler(handler)


def _main(args):
    try:
        config = build_config(args)
    except ConfigurationError as e:
        _report_configuration_error(e)
        return EXIT_CONFIGURATION

    logging.getLogger("relfrac").setLevel(config["log-level"])
    set_fft_workers(config["fft-workers"])
    job.normal(
        __(
            f"relfrac {config.command} (version {relfrac.__version__}), results in "
            f"{Path(config.output).resolve()}",
            indent=4 * " ",
        )
    )

    run = Run(config)
    start = time.perf_counter()
    try:
        extra = RUNNERS[config.command](run)
    except ConfigurationError as e:
        _report_configuration_error(e)
        return EXIT_CONFIGURATION
    except DomainError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIGURATION
    except NonConvergenceError as e:
        filename = _write_history(run.directory, e)
        logger.error(f"{e}; the residual history is in {filename}")
        return EXIT_NUMERICAL
    except NumericalError as e:
        logger.error(f"Numerical failure: {e}")
        return EXIT_NUMERICAL

    run.manifest(extra)
    if run.text != "":
        printer.normal(__(run.text, indent=4 * " ", wrap=False, dedent=False))
    job.normal(
        __(
            f"Finished in {time.perf_counter() - start:.1f} s, wrote "
            f"{len(run.artifacts)} files.",
            indent=4 * " ",
        )
    )
    return 0 if run.passed else EXIT_FAILED_CHECKS


def _report_configuration_error(error):
    text = f"Configuration error: {error}"
    if error.inequality is not None:
        text += f" (violated: {error.inequality})"
    if error.key is not None:
        text += f" [key: {error.key}]"
    logger.error(text)


if __name__ == "__main__":
    sys.exit(main())
