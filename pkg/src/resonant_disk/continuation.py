"""Natural continuation in the homotopy parameter t from 0 to 1.

The march starts at the exact root u = 0 of the comparison problem, predicts
by secant extrapolation through the last two accepted states, and corrects
with damped Newton. Every accepted state carries the quantities the
a priori bounds are phrased in: the phi1-coefficient T, the orthogonal
remainder omega, the exponential mass t*int(e^u phi1), the solvability
identity and the radius at which |u| peaks.
"""

import csv
import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import AdmissionError, OverflowGuardError, UnscalableForcingError
from .forcing import admit, build_forcing
from .grid import WORK, inner, norm
from .nonlinear import newton_solve, residual, solvability_residual


class Verdict(str, enum.Enum):
    REACHED_T1 = "reached_t1"
    BLOW_UP = "blow_up"
    STEP_COLLAPSE = "step_collapse"


@dataclass(frozen=True)
class ContinuationConfig:
    initial_step: float = 0.05
    min_step: float = 1e-6
    max_step: float = 0.1
    newton_tol: float = 1e-10
    blowup_cap: float = 1e4
    grow: float = 2.0
    shrink: float = 0.5

    def problems(self):
        out = []
        if not 0 < self.min_step <= self.initial_step <= self.max_step <= 1:
            out.append("need 0 < min_step <= initial_step <= max_step <= 1, got "
                       f"{self.min_step!r}, {self.initial_step!r}, {self.max_step!r}")
        if not self.newton_tol > 0:
            out.append(f"newton_tol must be positive, got {self.newton_tol!r}")
        if not self.blowup_cap > 0:
            out.append(f"blowup_cap must be positive, got {self.blowup_cap!r}")
        if not self.grow >= 1:
            out.append(f"grow factor must be >= 1, got {self.grow!r}")
        if not 0 < self.shrink < 1:
            out.append(f"shrink factor must lie in (0, 1), got {self.shrink!r}")
        return out


@dataclass
class HomotopyState:
    t: float
    u: np.ndarray
    residual_norm: float
    T: float
    omega_norm: float
    exp_mass: float
    identity_residual: float
    sup_norm: float
    peak_radius: float
    step: float = 0.0
    newton_iters: int = 0

    def row(self):
        return [self.t, self.step, self.newton_iters, self.residual_norm, self.T,
                self.omega_norm, self.sup_norm, self.exp_mass, self.identity_residual,
                self.peak_radius]


TRACE_COLUMNS = ("t", "step", "newton_iters", "residual_norm", "T", "omega_norm",
                 "sup_norm", "exp_mass", "identity_residual", "peak_radius")
SCAN_COLUMNS = ("mass", "verdict", "sup_norm", "exp_mass", "peak_radius", "steps")


@dataclass
class ContinuationTrace:
    states: list
    verdict: Verdict
    rejections: int = 0
    newton_iterations: int = 0
    message: str = ""

    @property
    def final(self):
        return self.states[-1]


def diagnose(p, t, u, step=0.0, newton_iters=0, residual_norm=None):
    """Full diagnostics of a state u at parameter t."""
    g, phi = p.grid, p.eig.phi1
    if residual_norm is None:
        residual_norm = float(norm(g, residual(p, t, u)))
    T = inner(g, u, phi)
    omega = u - T * phi
    interior = np.abs(u[:-1])
    peak = int(np.argmax(interior))
    return HomotopyState(
        t=float(t),
        u=u,
        residual_norm=float(residual_norm),
        T=float(T),
        omega_norm=float(norm(g, omega)),
        exp_mass=float(WORK(t) * inner(g, np.exp(u), phi)),
        identity_residual=float(abs(solvability_residual(p, t, u))),
        sup_norm=float(np.abs(u).max()),
        peak_radius=float(g.r[peak]),
        step=float(step),
        newton_iters=int(newton_iters),
    )


def run_continuation(p, cfg=ContinuationConfig()):
    """March the homotopy from t = 0 to t = 1.

    Raises AdmissionError before starting when m(f) <= 0; every later
    failure is reported through the trace verdict.
    """
    admit(p.f, p.eig, p.grid)
    g = p.grid
    u = np.zeros(g.size, dtype=WORK)
    states = [diagnose(p, 0.0, u, residual_norm=0.0)]
    trace = ContinuationTrace(states=states, verdict=Verdict.STEP_COLLAPSE)
    h = cfg.initial_step
    prev_t, prev_u = None, None
    t = 0.0
    while True:
        t_new = min(1.0, t + h)
        if prev_u is None:
            guess = u
        else:
            guess = u + WORK((t_new - t) / (t - prev_t)) * (u - prev_u)
        try:
            u_new, rep = newton_solve(p, t_new, guess, cfg.newton_tol)
        except OverflowGuardError as exc:
            trace.verdict = Verdict.BLOW_UP
            trace.message = f"at t={t_new:.17g}: {exc}"
            return trace
        trace.newton_iterations += rep.iterations
        if rep.converged:
            sup = float(np.abs(u_new).max())
            if sup > cfg.blowup_cap:
                trace.verdict = Verdict.BLOW_UP
                trace.message = f"sup norm {sup:.6g} exceeds cap {cfg.blowup_cap:g} at t={t_new:.17g}"
                return trace
            states.append(diagnose(p, t_new, u_new, step=t_new - t,
                                   newton_iters=rep.iterations,
                                   residual_norm=rep.final_residual_norm))
            prev_t, prev_u = t, u
            t, u = t_new, u_new
            if t_new == 1.0:
                trace.verdict = Verdict.REACHED_T1
                return trace
            h = min(h * cfg.grow, cfg.max_step)
        else:
            trace.rejections += 1
            h *= cfg.shrink
            if h < cfg.min_step:
                trace.verdict = Verdict.STEP_COLLAPSE
                trace.message = f"step fell below {cfg.min_step:g} at t={t:.17g} ({rep.reason})"
                return trace


def write_trace_csv(path, trace):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(TRACE_COLUMNS)
        for s in trace.states:
            out.writerow([_fmt(v) for v in s.row()])


@dataclass
class ScanRow:
    mass: float
    verdict: str
    sup_norm: float = math.nan
    exp_mass: float = math.nan
    peak_radius: float = math.nan
    steps: int = 0
    final_t: float = math.nan
    residual_norm: float = math.nan
    identity_residual: float = math.nan
    message: str = ""

    def row(self):
        return [self.mass, self.verdict, self.sup_norm, self.exp_mass, self.peak_radius, self.steps]


def _scan_row(base, mass, template, cfg):
    try:
        f = build_forcing(base.with_mass(mass), template.eig, template.grid)
        trace = run_continuation(template.with_forcing(f), cfg)
    except (AdmissionError, UnscalableForcingError) as exc:
        return ScanRow(mass=mass, verdict="refused", message=str(exc))
    last = trace.final
    return ScanRow(
        mass=mass,
        verdict=trace.verdict.value,
        sup_norm=last.sup_norm,
        exp_mass=last.exp_mass,
        peak_radius=last.peak_radius,
        steps=len(trace.states) - 1,
        final_t=last.t,
        residual_norm=last.residual_norm,
        identity_residual=last.identity_residual,
        message=trace.message,
    )


def scan_threshold(base, masses, template, cfg=ContinuationConfig(), workers=1):
    """One continuation per forcing mass; rows are independent.

    ``base`` is a ForcingSpec whose profile is rescaled to each mass; the
    grid, operator and eigenpair come from the ProblemData ``template``.
    Rows come back in the order of ``masses`` regardless of ``workers``.
    """
    masses = [float(m) for m in masses]
    if workers > 1 and len(masses) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_scan_row, base, m, template, cfg) for m in masses]
            return [fut.result() for fut in futures]
    return [_scan_row(base, m, template, cfg) for m in masses]


def write_scan_csv(path, rows):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(SCAN_COLUMNS)
        for r in rows:
            out.writerow([_fmt(v) for v in r.row()])


def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"
