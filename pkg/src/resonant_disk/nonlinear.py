"""Homotopy residual, its Jacobian, and a damped Newton corrector.

The homotopy joins the comparison problem (t = 0)

    A u = lambda1 u + g(u),        g = eps * sin on [-pi, pi], 0 outside,

whose only root is u = 0, to the resonant target (t = 1)

    A u = lambda1 u + e^u + f.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .eigen import first_eigenpair, radial_gap
from .errors import (ConfigurationError, NumericalFailure, OverflowGuardError,
                     SingularSystemError)
from .grid import WORK, as_field, dirichlet, inner, make_grid, norm
from .laplacian import TridiagonalFactor, apply, assemble_laplacian

OVERFLOW_GUARD = 700.0
NEWTON_TOL = 1e-10
NEWTON_MAX_ITER = 50
MAX_HALVINGS = 30


@dataclass(frozen=True, eq=False)
class ProblemData:
    grid: object
    A: object
    eig: object
    f: np.ndarray
    epsilon_g: float = 1.0
    overflow_guard: float = OVERFLOW_GUARD
    gap: float = None

    def __post_init__(self):
        object.__setattr__(self, "f", as_field(self.grid, self.f))
        eps = self.epsilon_g
        if not (np.isfinite(eps) and eps > 0):
            raise ConfigurationError(f"epsilon_g must be positive, got {eps!r}")
        if self.gap is not None and eps > self.gap:
            raise ConfigurationError(
                f"epsilon_g = {eps:g} exceeds the radial gap lambda2 - lambda1 = {self.gap:.6g}; "
                "the comparison problem is then not guaranteed to have 0 as its only root")

    def with_forcing(self, f):
        return replace(self, f=f)


def make_problem(n=512, forcing=None, epsilon_g=1.0):
    """Assemble grid, operator and eigenpair, then attach a forcing.

    ``forcing`` is a ForcingSpec, a nodal array, or None for f = 0.
    """
    from .forcing import ForcingSpec, build_forcing

    g = make_grid(n)
    A = assemble_laplacian(g)
    eig = first_eigenpair(A)
    gap = radial_gap(A, eig)
    if forcing is None:
        f = np.zeros(g.size, dtype=WORK)
    elif isinstance(forcing, ForcingSpec):
        f = build_forcing(forcing, eig, g)
    else:
        f = forcing
    return ProblemData(grid=g, A=A, eig=eig, f=f, epsilon_g=epsilon_g, gap=gap)


def g_comparison(s, epsilon_g=1.0):
    """Truncated sine: epsilon_g*sin(s) on [-pi, pi], zero elsewhere."""
    s = np.asarray(s)
    out = np.where(np.abs(s) <= np.pi, epsilon_g * np.sin(s), 0.0)
    return out.astype(s.dtype, copy=False) if s.dtype == WORK else out[()]


def g_prime(s, epsilon_g=1.0):
    # the kink at |s| = pi takes the inside value eps*cos(pi) = -eps
    s = np.asarray(s)
    out = np.where(np.abs(s) <= np.pi, epsilon_g * np.cos(s), 0.0)
    return out.astype(s.dtype, copy=False) if s.dtype == WORK else out[()]


def _guard(p, u):
    top = u[:-1].max()
    if not np.isfinite(top) or top > p.overflow_guard:
        raise OverflowGuardError(float(top), p.overflow_guard)


def residual(p, t, u):
    """F_t(u) = A u - lambda1 u - t(e^u + f) - (1-t) g(u); zero at r = 1."""
    u = as_field(p.grid, u)
    _guard(p, u)
    t = WORK(t)
    F = (apply(p.A, u) - p.eig.lambda1 * u - t * (np.exp(u) + p.f)
         - (1 - t) * g_comparison(u, p.epsilon_g))
    F[-1] = 0
    return F


def jacobian(p, t, u):
    """Tridiagonal derivative of ``residual`` with respect to u."""
    u = as_field(p.grid, u)
    _guard(p, u)
    t = WORK(t)
    potential = p.eig.lambda1 + t * np.exp(u) + (1 - t) * g_prime(u, p.epsilon_g)
    return p.A.shifted(potential)


def solvability_residual(p, t, u):
    """t*int(e^u phi1) + t*int(f phi1) + (1-t)*int(g(u) phi1).

    Pairing the equation with phi1 and moving A onto phi1 makes this vanish
    at every root, up to the residual and the eigen-residual of phi1.
    """
    g, phi = p.grid, p.eig.phi1
    u = as_field(g, u)
    t = WORK(t)
    return (t * inner(g, np.exp(u), phi) + t * inner(g, p.f, phi)
            + (1 - t) * inner(g, g_comparison(u, p.epsilon_g), phi))


@dataclass
class NewtonReport:
    converged: bool
    iterations: int
    final_residual_norm: float
    step_norms: list = field(default_factory=list)
    reason: str = ""


def newton_solve(p, t, u0, tol=NEWTON_TOL, max_iter=NEWTON_MAX_ITER, max_halvings=MAX_HALVINGS):
    """Damped Newton for F_t(u) = 0 starting from ``u0``.

    Each step is backtracked by halving until the disk-L2 residual norm
    decreases. Returns the last iterate and a report whether or not the
    tolerance was met. Raises OverflowGuardError only if ``u0`` itself
    is past the guard; trial points past the guard count as rejections.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    g = p.grid
    u = dirichlet(g, u0)
    F = residual(p, t, u)
    rn = float(norm(g, F))
    report = NewtonReport(False, 0, rn)
    for it in range(max_iter + 1):
        report.iterations = it
        report.final_residual_norm = rn
        if rn <= tol:
            report.converged = True
            return u, report
        if it == max_iter:
            report.reason = f"no convergence in {max_iter} iterations"
            break
        try:
            delta = TridiagonalFactor(jacobian(p, t, u)).solve(-F)
        except (SingularSystemError, NumericalFailure) as exc:
            report.reason = f"singular Jacobian: {exc}"
            break
        s = WORK(1)
        for _ in range(max_halvings + 1):
            trial = u + s * delta
            try:
                F_trial = residual(p, t, trial)
                rn_trial = float(norm(g, F_trial))
            except OverflowGuardError:
                rn_trial = np.inf
            if rn_trial < rn:
                break
            s /= 2
        else:
            report.reason = f"line search failed at residual {rn:.3e}"
            break
        report.step_norms.append(float(norm(g, s * delta)))
        u, F, rn = trial, F_trial, rn_trial
    return u, report


@dataclass
class ProbeResult:
    index: int
    start_sup: float
    converged: bool
    iterations: int
    residual_norm: float
    sup_norm: float
    saturated: bool = False

    @property
    def nonzero_root(self):
        return self.converged and self.sup_norm > 1e-9


def random_start(g, rng, sup_bound=3.0, modes=6):
    """Smooth radial Dirichlet field with sup norm uniform in (0, sup_bound]."""
    r = g.r.astype(float)
    k = np.arange(1, modes + 1)
    basis = np.cos((k[:, None] - 0.5) * np.pi * r[None, :])
    u = rng.normal(size=modes) @ basis
    u[-1] = 0.0
    return u * (sup_bound * (1.0 - rng.random()) / np.abs(u).max())


def comparison_probe(p, starts=20, seed=0, sup_bound=3.0, tol=NEWTON_TOL):
    """Newton at t = 0 from seeded random starts; a converged run must land on 0.

    ``saturated`` flags an end point with |u| > pi at every interior node.
    There g vanishes identically, so any multiple of phi1 that large is an
    exact discrete root. The continuum has no such root because phi1 decays
    to zero at r = 1; on a coarse grid no node resolves that layer.
    """
    rng = np.random.default_rng(seed)
    results = []
    for i in range(starts):
        u0 = random_start(p.grid, rng, sup_bound)
        u, rep = newton_solve(p, 0.0, u0, tol)
        results.append(ProbeResult(
            index=i,
            start_sup=float(np.abs(u0).max()),
            converged=rep.converged,
            iterations=rep.iterations,
            residual_norm=rep.final_residual_norm,
            sup_norm=float(np.abs(u).max()),
            saturated=bool(np.abs(u[:-1]).min() > np.pi),
        ))
    return results
