"""Finite-volume radial Dirichlet Laplacian on the unit disk.

Row i (i = 0..n) of the operator acts on the unknowns u_0..u_n; the
boundary value u_{n+1} = 0 is eliminated. For i >= 1

    (A u)_i = -[r_{i+1/2}(u_{i+1} - u_i) - r_{i-1/2}(u_i - u_{i-1})] / (r_i h^2)

and at the center, where the control volume is the disk of radius h/2,

    (A u)_0 = -4 (u_1 - u_0) / h^2.

Multiplying row i by the cell area of node i gives a symmetric matrix, so
``A`` is self-adjoint in the disk inner product of :mod:`grid`.
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import NumericalFailure, ShapeError, SingularSystemError
from .grid import WORK, as_field, norm

PIVOT_TOL = 1e-14
SOLVE_RTOL = 1e-13
MAX_REFINE = 4


@dataclass(frozen=True, eq=False)
class RadialLaplacian:
    """Tridiagonal operator on the n+1 unknowns of a grid.

    ``sub[i-1]`` multiplies u_{i-1} in row i, ``sup[i]`` multiplies u_{i+1}
    in row i, and ``boundary`` multiplies u_{n+1} in row n (it only matters
    for fields that do not vanish at r = 1).
    """

    grid: object
    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    boundary: WORK

    def shifted(self, potential):
        """The operator u -> A u - potential * u (scalar or field)."""
        pot = np.asarray(potential, dtype=WORK)
        if pot.ndim:
            pot = as_field(self.grid, pot)[:-1]
        return replace(self, diag=self.diag - pot)

    def scaled(self, c):
        c = WORK(c)
        return replace(self, sub=c * self.sub, diag=c * self.diag, sup=c * self.sup,
                       boundary=c * self.boundary)

    def dense(self):
        """(n+1) x (n+1) float matrix; for tests and small diagnostics."""
        m = np.diag(self.diag.astype(float))
        m += np.diag(self.sup.astype(float), 1)
        m += np.diag(self.sub.astype(float), -1)
        return m


def assemble_laplacian(g):
    n, r = g.n, g.r
    h = r[1]
    rhalf = r[:-1] + h / 2
    i = np.arange(1, n + 1)
    denom = r[i] * h * h
    diag = np.empty(n + 1, dtype=WORK)
    diag[0] = 4 / (h * h)
    diag[1:] = (rhalf[i] + rhalf[i - 1]) / denom
    sub = -rhalf[i - 1] / denom
    sup = np.empty(n, dtype=WORK)
    sup[0] = -4 / (h * h)
    sup[1:] = -rhalf[1:n] / denom[:-1]
    boundary = -rhalf[n] / denom[-1]
    for a in (sub, diag, sup):
        a.flags.writeable = False
    return RadialLaplacian(grid=g, sub=sub, diag=diag, sup=sup, boundary=boundary)


def apply(A, u):
    """Matrix-vector product; the result is zero at the boundary node."""
    u = as_field(A.grid, u)
    out = np.zeros(A.grid.size, dtype=WORK)
    out[:-1] = A.diag * u[:-1]
    out[:-2] += A.sup * u[1:-1]
    out[1:-1] += A.sub * u[:-2]
    out[-2] += A.boundary * u[-1]
    return out


class TridiagonalFactor:
    """LU factorization (no pivoting) of a shifted operator, in WORK precision.

    Besides the forward pivots, the backward pivots are formed so that the
    twisted pivots gamma_k = 1 / [(A - shift)^{-1}]_{kk} are available. The
    smallest |gamma_k| is within a factor n+1 of the distance from the shift
    to the nearest eigenvalue, so it is the meaningful singularity test: a
    forward pivot alone can stay large at an exact eigenvalue whenever the
    eigenvector is small at the last node.
    """

    def __init__(self, A, shift=0.0, pivot_tol=PIVOT_TOL):
        a = list(A.sub)
        b = list(A.diag - WORK(shift))
        c = list(A.sup)
        m = len(b)
        self.shift = shift
        self.scale = float(np.max(np.abs(A.diag - WORK(shift))
                                  + np.abs(np.append(A.sub, 0)) + np.abs(np.append(A.sup, 0))))
        zero = WORK(0)
        fwd = [b[0]]
        mult = [zero]
        for i in range(1, m):
            if fwd[-1] == 0:
                raise SingularSystemError(shift, 0.0, self.scale)
            q = a[i - 1] / fwd[-1]
            mult.append(q)
            fwd.append(b[i] - q * c[i - 1])
        bwd = [zero] * m
        bwd[m - 1] = b[m - 1]
        for i in range(m - 2, -1, -1):
            if bwd[i + 1] == 0:
                raise SingularSystemError(shift, 0.0, self.scale)
            bwd[i] = b[i] - c[i] * a[i] / bwd[i + 1]
        twisted = np.abs(np.array(fwd, dtype=WORK) + np.array(bwd, dtype=WORK)
                         - np.array(b, dtype=WORK))
        self.min_pivot = float(twisted.min())
        if fwd[-1] == 0 or self.min_pivot < pivot_tol * self.scale:
            raise SingularSystemError(shift, self.min_pivot, self.scale)
        self._fwd, self._mult, self._c = fwd, mult, c
        self._A = A
        self.negative_pivots = sum(1 for d in fwd if d < 0)

    def _substitute(self, rhs):
        fwd, mult, c = self._fwd, self._mult, self._c
        m = len(fwd)
        y = list(rhs[:m])
        for i in range(1, m):
            y[i] = y[i] - mult[i] * y[i - 1]
        x = [WORK(0)] * m
        x[m - 1] = y[m - 1] / fwd[m - 1]
        for i in range(m - 2, -1, -1):
            x[i] = (y[i] - c[i] * x[i + 1]) / fwd[i]
        return x

    def solve(self, rhs, rtol=SOLVE_RTOL, max_refine=MAX_REFINE):
        """Solve (A - shift) u = rhs at the interior nodes; u is zero at r = 1.

        One substitution is followed by iterative refinement until the
        disk-L2 residual is below ``rtol`` times that of ``rhs``.
        """
        g = self._A.grid
        rhs = as_field(g, rhs).copy()
        rhs[-1] = 0
        target = float(norm(g, rhs)) * rtol
        u = np.zeros(g.size, dtype=WORK)
        if target == 0.0:
            return u
        u[:-1] = self._substitute(rhs)
        for _ in range(max_refine):
            res = rhs - (apply(self._A, u) - WORK(self.shift) * u)
            res[-1] = 0
            if float(norm(g, res)) <= target:
                return u
            u[:-1] += np.array(self._substitute(res), dtype=WORK)
        res = rhs - (apply(self._A, u) - WORK(self.shift) * u)
        res[-1] = 0
        achieved = float(norm(g, res))
        if achieved > 10 * target:
            raise NumericalFailure(
                f"tridiagonal solve stalled at relative residual {achieved / (target / rtol):.3e}")
        return u


def solve_shifted(A, shift, rhs, pivot_tol=PIVOT_TOL):
    """Return u with (A - shift*I) u = rhs; raises SingularSystemError near an eigenvalue."""
    if np.shape(rhs) != (A.grid.size,):
        raise ShapeError(f"rhs has shape {np.shape(rhs)}, grid expects ({A.grid.size},)")
    return TridiagonalFactor(A, shift, pivot_tol).solve(rhs)
