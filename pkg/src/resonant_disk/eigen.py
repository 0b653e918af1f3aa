"""Discrete radial eigenpairs and Morse indices of the radial Laplacian."""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateLinearizationError, NumericalFailure
from .grid import WORK, as_field, inner, norm
from .laplacian import TridiagonalFactor, apply
from .specfun import j0_zero

EIG_RTOL = 1e-12
MAX_ITER = 500
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class EigenPair:
    """First discrete eigenpair, phi1 > 0 inside with unit disk-L2 norm."""

    lambda1: WORK
    phi1: np.ndarray
    lambda1_ref: float
    phi1_deriv_boundary: float

    @property
    def relative_error(self):
        return abs(float(self.lambda1) - self.lambda1_ref) / self.lambda1_ref


def _inverse_iteration(A, start, deflate=(), rtol=EIG_RTOL, max_iter=MAX_ITER):
    g = A.grid
    factor = TridiagonalFactor(A, 0.0)

    def project(v):
        for q in deflate:
            v = v - inner(g, v, q) * q
        return v

    x = project(as_field(g, start).copy())
    x[-1] = 0
    x /= norm(g, x)
    for _ in range(max_iter):
        y = project(factor.solve(x))
        y /= norm(g, y)
        ay = apply(A, y)
        lam = inner(g, ay, y)
        if norm(g, ay - lam * y) <= rtol:
            return lam, y
        x = y
    raise NumericalFailure(f"inverse iteration did not converge in {max_iter} iterations")


def first_eigenpair(A):
    g = A.grid
    lam, phi = _inverse_iteration(A, 1 - g.r ** 2)
    if phi[0] < 0:
        phi = -phi
    phi.flags.writeable = False
    j = j0_zero(1)
    return EigenPair(
        lambda1=lam,
        phi1=phi,
        lambda1_ref=j * j,
        phi1_deriv_boundary=float((phi[-1] - phi[-2]) / WORK(g.h)),
    )


def second_eigenpair(A, eig=None):
    """Second radial eigenpair by inverse iteration deflated against phi1."""
    eig = eig or first_eigenpair(A)
    r = A.grid.r
    lam, phi = _inverse_iteration(A, np.cos(np.pi * r) + 0.5, deflate=(eig.phi1,))
    if phi[0] < 0:
        phi = -phi
    return lam, phi


def radial_gap(A, eig=None):
    """lambda2 - lambda1 within the radial class."""
    eig = eig or first_eigenpair(A)
    lam2, _ = second_eigenpair(A, eig)
    return float(lam2 - eig.lambda1)


def count_below(A, potential, shift=0.0):
    """Number of eigenvalues of A - potential that are < shift (Sturm count).

    The off-diagonal products sub*sup are positive, so A is similar to a
    symmetric tridiagonal matrix and the signs of its LU pivots give the
    inertia.
    """
    pot = np.asarray(potential, dtype=WORK)
    if pot.ndim:
        pot = as_field(A.grid, pot)[:-1]
    b = list(A.diag - pot - WORK(shift))
    prod = list(A.sub * A.sup)
    tiny = WORK(np.finfo(WORK).tiny)
    d = b[0] if b[0] != 0 else tiny
    count = int(d < 0)
    for i in range(1, len(b)):
        d = b[i] - prod[i - 1] / d
        if d == 0:
            d = tiny
        count += d < 0
    return count


def morse_index(A, potential, tol=DEGENERACY_TOL):
    """Negative eigenvalue count of u -> A u - potential*u.

    Raises DegenerateLinearizationError when an eigenvalue lies within
    ``tol`` of zero.
    """
    below = count_below(A, potential, -tol)
    above = count_below(A, potential, tol)
    if below != above:
        raise DegenerateLinearizationError(
            f"linearization has {above - below} eigenvalue(s) within {tol:g} of zero")
    return above
