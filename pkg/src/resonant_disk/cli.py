"""Command-line front end: ``resonant-disk {eigen,comparison,continue,scan}``.

Settings come from built-in defaults, then an optional key-value config
file (``--config``), then command-line flags. Exit codes:

    0 ok, 2 configuration error, 3 numerical failure, 4 falsified property,
    5 blow-up, 6 step collapse, 7 scan acceptance failure.
"""

import argparse
import configparser
import csv
import math
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .continuation import (ContinuationConfig, Verdict, run_continuation, scan_threshold,
                           write_scan_csv, write_trace_csv)
from .eigen import first_eigenpair, morse_index, radial_gap
from .errors import (AdmissionError, ConfigurationError, DegenerateLinearizationError,
                     NumericalFailure, UnscalableForcingError)
from .forcing import FOUR_PI, ForcingSpec, admit, build_forcing
from .grid import MIN_NODES, make_grid, write_field_csv
from .laplacian import assemble_laplacian
from .nonlinear import ProblemData, comparison_probe

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_FALSIFIED = 0, 2, 3, 4
EXIT_BLOWUP, EXIT_COLLAPSE, EXIT_SCAN = 5, 6, 7
EIGEN_RTOL = 1e-3


def _floats(text):
    text = str(text).strip()
    return [float(x) for x in text.replace(";", ",").split(",") if x.strip()] if text else []


def _optional_float(text):
    return None if text in (None, "", "none", "None") else float(text)


# key -> (converter, default)
SETTINGS = {
    "n": (int, 512),
    "seed": (int, 0),
    "epsilon_g": (float, 1.0),
    "out": (str, "out"),
    "forcing": (str, "eigenfunction"),
    "amplitude": (float, 4.0),
    "center": (float, 0.0),
    "width": (float, 0.5),
    "coefficients": (_floats, ""),
    "forcing_file": (str, None),
    "target_mass": (_optional_float, None),
    "initial_step": (float, 0.05),
    "min_step": (float, 1e-6),
    "max_step": (float, 0.1),
    "newton_tol": (float, 1e-10),
    "blowup_cap": (float, 1e4),
    "grow": (float, 2.0),
    "shrink": (float, 0.5),
    "masses": (_floats, "1,4,8,12"),
    "margin": (float, 0.5),
    "starts": (int, 20),
    "workers": (int, 1),
}


@dataclass
class RunConfig:
    n: int
    seed: int
    epsilon_g: float
    out: Path
    forcing: ForcingSpec
    continuation: ContinuationConfig
    masses: list = field(default_factory=list)
    margin: float = 0.5
    starts: int = 20
    workers: int = 1


def read_config_file(path):
    """Parse ``key = value`` lines; a ``[section]`` header is optional."""
    text = Path(path).read_text()
    parser = configparser.ConfigParser(interpolation=None)
    if not text.lstrip().startswith("["):
        text = "[run]\n" + text
    parser.read_string(text, source=str(path))
    values = {}
    for section in parser.sections():
        for key, val in parser.items(section):
            values[key.replace("-", "_")] = val
    return values


def resolve(args):
    """Merge defaults, config file and flags into a validated RunConfig.

    Every problem found is collected and reported in one ConfigurationError.
    """
    raw = {k: default for k, (_, default) in SETTINGS.items()}
    problems = []
    if getattr(args, "config", None):
        try:
            from_file = read_config_file(args.config)
        except (OSError, configparser.Error) as exc:
            raise ConfigurationError(f"cannot read config {args.config}: {exc}")
        unknown = sorted(set(from_file) - set(SETTINGS))
        problems += [f"unknown config key {k!r}" for k in unknown]
        raw.update({k: v for k, v in from_file.items() if k in SETTINGS})
    for key in SETTINGS:
        val = getattr(args, key, None)
        if val is not None:
            raw[key] = val

    vals = {}
    for key, (conv, _) in SETTINGS.items():
        try:
            vals[key] = conv(raw[key]) if raw[key] is not None else None
        except (TypeError, ValueError):
            problems.append(f"{key}: cannot parse {raw[key]!r}")
            vals[key] = None

    n = vals["n"]
    if n is not None and n < MIN_NODES:
        problems.append(f"n must be >= {MIN_NODES}, got {n}")
    eps = vals["epsilon_g"]
    if eps is not None and not (math.isfinite(eps) and eps > 0):
        problems.append(f"epsilon_g must be positive, got {eps}")
    if vals["starts"] is not None and vals["starts"] < 1:
        problems.append("starts must be >= 1")
    if vals["workers"] is not None and vals["workers"] < 1:
        problems.append("workers must be >= 1")

    spec = cont = None
    try:
        spec = ForcingSpec(
            family=vals["forcing"], amplitude=vals["amplitude"], center=vals["center"],
            width=vals["width"], coefficients=tuple(vals["coefficients"] or ()),
            path=vals["forcing_file"], target_mass=vals["target_mass"])
        problems += spec.problems()
    except TypeError:
        pass
    try:
        cont = ContinuationConfig(
            initial_step=vals["initial_step"], min_step=vals["min_step"],
            max_step=vals["max_step"], newton_tol=vals["newton_tol"],
            blowup_cap=vals["blowup_cap"], grow=vals["grow"], shrink=vals["shrink"])
        problems += cont.problems()
    except TypeError:
        pass

    if args.command == "scan":
        masses = vals["masses"] or []
        if not masses:
            problems.append("scan needs a non-empty mass list")
        elif any(not (m > 0 and math.isfinite(m)) for m in masses):
            problems.append("scan masses must be positive and finite")
        elif masses != sorted(masses):
            problems.append("scan masses must be sorted ascending")

    # the gap check needs the operator; run it only once the grid is valid
    if n is not None and n >= MIN_NODES and eps is not None and eps > 0 and args.command != "eigen":
        gap = radial_gap(assemble_laplacian(make_grid(n)))
        if eps > gap:
            problems.append(f"epsilon_g = {eps:g} exceeds the radial gap {gap:.6g}")

    if problems:
        raise ConfigurationError("invalid configuration:\n  " + "\n  ".join(problems), problems)
    return RunConfig(
        n=n, seed=vals["seed"], epsilon_g=eps, out=Path(vals["out"]), forcing=spec,
        continuation=cont, masses=vals["masses"], margin=vals["margin"],
        starts=vals["starts"], workers=vals["workers"])


def _num(x):
    return f"{float(x):.17g}"


def _say(key, value):
    print(f"{key}: {value if isinstance(value, str) else _num(value)}")


def _setup(cfg, with_forcing=True):
    g = make_grid(cfg.n)
    A = assemble_laplacian(g)
    eig = first_eigenpair(A)
    gap = radial_gap(A, eig)
    f = build_forcing(cfg.forcing, eig, g) if with_forcing else np.zeros(g.size)
    return ProblemData(grid=g, A=A, eig=eig, f=f, epsilon_g=cfg.epsilon_g, gap=gap)


def cmd_eigen(cfg):
    g = make_grid(cfg.n)
    A = assemble_laplacian(g)
    eig = first_eigenpair(A)
    gap = radial_gap(A, eig)
    cfg.out.mkdir(parents=True, exist_ok=True)
    write_field_csv(cfg.out / "phi1.csv", g, eig.phi1)
    _say("n", str(cfg.n))
    _say("lambda1", eig.lambda1)
    _say("lambda1_ref", eig.lambda1_ref)
    _say("relative_error", eig.relative_error)
    _say("radial_gap", gap)
    _say("phi1_center", eig.phi1[0])
    _say("phi1_deriv_boundary", eig.phi1_deriv_boundary)
    return EXIT_OK if eig.relative_error <= EIGEN_RTOL else EXIT_FALSIFIED


def cmd_comparison(cfg):
    p = _setup(cfg, with_forcing=False)
    results = comparison_probe(p, starts=cfg.starts, seed=cfg.seed)
    cfg.out.mkdir(parents=True, exist_ok=True)
    with open(cfg.out / "probe.csv", "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["start", "start_sup", "converged", "iterations", "residual_norm", "sup_norm",
                      "saturated"])
        for r in results:
            out.writerow([r.index, _num(r.start_sup), int(r.converged), r.iterations,
                          _num(r.residual_norm), _num(r.sup_norm), int(r.saturated)])
    nonzero = [r.index for r in results if r.nonzero_root]
    try:
        index = morse_index(p.A, p.eig.lambda1 + p.epsilon_g)
    except DegenerateLinearizationError as exc:
        print(f"morse_index: degenerate ({exc})")
        return EXIT_FALSIFIED
    _say("seed", str(cfg.seed))
    _say("starts", str(len(results)))
    _say("converged_to_zero", str(sum(r.converged and not r.nonzero_root for r in results)))
    _say("not_converged", str(sum(not r.converged for r in results)))
    _say("nonzero_roots", str(len(nonzero)))
    _say("saturated_roots", str(sum(r.nonzero_root and r.saturated for r in results)))
    _say("morse_index", str(index))
    _say("degree", str((-1) ** index))
    if nonzero or index != 1:
        return EXIT_FALSIFIED
    return EXIT_OK


def cmd_continue(cfg):
    p = _setup(cfg)
    m = admit(p.f, p.eig, p.grid)
    trace = run_continuation(p, cfg.continuation)
    cfg.out.mkdir(parents=True, exist_ok=True)
    write_trace_csv(cfg.out / "trace.csv", trace)
    last = trace.final
    write_field_csv(cfg.out / "solution.csv", p.grid, last.u)
    _say("forcing_mass", m)
    _say("verdict", trace.verdict.value)
    _say("t", last.t)
    _say("steps", str(len(trace.states) - 1))
    _say("rejections", str(trace.rejections))
    _say("newton_iterations", str(trace.newton_iterations))
    _say("residual_norm", last.residual_norm)
    _say("sup_norm", last.sup_norm)
    _say("exp_mass", last.exp_mass)
    _say("identity_residual", last.identity_residual)
    _say("peak_radius", last.peak_radius)
    if trace.verdict is Verdict.REACHED_T1:
        _say("solution", "trivial" if last.sup_norm <= 1e-9 else "nontrivial")
    if trace.message:
        _say("message", trace.message)
    return {Verdict.REACHED_T1: EXIT_OK, Verdict.BLOW_UP: EXIT_BLOWUP,
            Verdict.STEP_COLLAPSE: EXIT_COLLAPSE}[trace.verdict]


def cmd_scan(cfg):
    p = _setup(cfg, with_forcing=False)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rows = scan_threshold(cfg.forcing, cfg.masses, p, cfg.continuation, workers=cfg.workers)
    cfg.out.mkdir(parents=True, exist_ok=True)
    write_scan_csv(cfg.out / "scan.csv", rows)
    limit = FOUR_PI - cfg.margin
    failed = []
    for r in rows:
        guaranteed = r.mass < limit
        print(f"mass {_num(r.mass)}: {r.verdict} sup_norm={_num(r.sup_norm)} "
              f"exp_mass={_num(r.exp_mass)} peak_radius={_num(r.peak_radius)}"
              + ("" if guaranteed else " (outside guarantee)"))
        if guaranteed and r.verdict != Verdict.REACHED_T1.value:
            failed.append(r.mass)
    if failed:
        print("sub-threshold rows that did not reach t=1: " + ", ".join(_num(m) for m in failed))
        return EXIT_SCAN
    return EXIT_OK


COMMANDS = {"eigen": cmd_eigen, "comparison": cmd_comparison,
            "continue": cmd_continue, "scan": cmd_scan}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=str, help="interior grid nodes (>= 8, default 512)")
    common.add_argument("--config", help="key = value settings file")
    common.add_argument("--out", help="output directory for CSV files (default ./out)")
    common.add_argument("--seed", type=str, help="seed for random probe starts")
    common.add_argument("--epsilon-g", dest="epsilon_g", type=str,
                        help="scale of the comparison nonlinearity (default 1)")

    forcing = argparse.ArgumentParser(add_help=False)
    forcing.add_argument("--forcing", help="eigenfunction | gaussian-bump | polynomial | from-file")
    forcing.add_argument("--amplitude", type=str)
    forcing.add_argument("--target-mass", dest="target_mass", type=str,
                         help="rescale the profile so that -int f phi1 equals this")
    forcing.add_argument("--center", type=str)
    forcing.add_argument("--width", type=str)
    forcing.add_argument("--coefficients", help="comma-separated polynomial coefficients c0,c1,...")
    forcing.add_argument("--forcing-file", dest="forcing_file", help="CSV r,value on the grid nodes")

    cont = argparse.ArgumentParser(add_help=False)
    for name in ("initial-step", "min-step", "max-step", "newton-tol", "blowup-cap",
                 "grow", "shrink"):
        cont.add_argument(f"--{name}", dest=name.replace("-", "_"), type=str)

    parser = argparse.ArgumentParser(
        prog="resonant-disk",
        description="Homotopy continuation for -Lap u = lambda1 u + e^u + f on the unit disk.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("eigen", parents=[common], help="first eigenpair and radial gap")
    p = sub.add_parser("comparison", parents=[common], help="uniqueness probe and Morse index at 0")
    p.add_argument("--starts", type=str, help="number of random Newton starts (default 20)")
    sub.add_parser("continue", parents=[common, forcing, cont], help="run the homotopy to t=1")
    p = sub.add_parser("scan", parents=[common, forcing, cont], help="continuation over forcing masses")
    p.add_argument("--masses", help="comma-separated forcing masses, ascending")
    p.add_argument("--margin", type=str, help="rows with mass < 4*pi - margin must reach t=1")
    p.add_argument("--workers", type=str, help="parallel scan rows (default 1)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve(args)
        return COMMANDS[args.command](cfg)
    except (ConfigurationError, UnscalableForcingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(exc, AdmissionError):
            print("error: the necessary condition -int f phi1 > 0 is violated", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
