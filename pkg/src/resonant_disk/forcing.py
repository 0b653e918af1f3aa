"""Radial forcing profiles and the forcing mass m(f) = -int_B f phi1.

A target problem needs m(f) > 0 (pairing the equation with phi1 gives
int e^u phi1 = m(f)); existence of a radial solution is guaranteed for
0 < m(f) < 4*pi.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import AdmissionError, ConfigurationError, ShapeError, UnscalableForcingError
from .grid import WORK, as_field, inner, read_field_csv

FOUR_PI = 4 * math.pi
FAMILIES = ("eigenfunction", "gaussian-bump", "polynomial", "from-file")
# polynomial and from-file profiles are taken as given
SCALED_FAMILIES = ("eigenfunction", "gaussian-bump")


class AboveThresholdWarning(UserWarning):
    """Forcing mass at or above 4*pi: existence is no longer guaranteed."""


@dataclass(frozen=True)
class ForcingSpec:
    family: str = "eigenfunction"
    amplitude: float = 1.0
    center: float = 0.0
    width: float = 0.5
    coefficients: tuple = ()
    path: str = None
    target_mass: float = None

    def problems(self):
        """List of invariant violations (empty when valid)."""
        out = []
        if self.family not in FAMILIES:
            out.append(f"forcing family must be one of {', '.join(FAMILIES)}; got {self.family!r}")
        if not math.isfinite(self.amplitude):
            out.append("forcing amplitude must be finite")
        if self.family == "gaussian-bump" and not (self.width > 0 and math.isfinite(self.width)):
            out.append(f"gaussian-bump width must be positive, got {self.width!r}")
        if self.family == "polynomial" and not self.coefficients:
            out.append("polynomial forcing needs at least one coefficient")
        if self.family == "from-file" and not self.path:
            out.append("from-file forcing needs a path")
        if self.target_mass is not None and not math.isfinite(self.target_mass):
            out.append("target_mass must be finite")
        return out

    def with_mass(self, mass):
        return ForcingSpec(self.family, self.amplitude, self.center, self.width,
                           tuple(self.coefficients), self.path, mass)


def _profile(spec, eig, g):
    r = g.r
    if spec.family == "eigenfunction":
        return -eig.phi1
    if spec.family == "gaussian-bump":
        return -np.exp(-((r - WORK(spec.center)) ** 2) / WORK(spec.width) ** 2)
    if spec.family == "polynomial":
        out = np.zeros(g.size, dtype=WORK)
        for c in reversed(spec.coefficients):
            out = out * r + WORK(c)
        return out
    rr, vals = read_field_csv(spec.path)
    if rr.size != g.size:
        raise ShapeError(f"{spec.path}: {rr.size} nodes, grid has {g.size}")
    if np.abs(rr - g.r.astype(float)).max() > 1e-12:
        raise ShapeError(f"{spec.path}: node radii do not match the grid")
    if not np.all(np.isfinite(vals)):
        raise ShapeError(f"{spec.path}: non-finite forcing values")
    return vals.astype(WORK)


def build_forcing(spec, eig, g):
    """Nodal forcing for ``spec``.

    eigenfunction: -a*phi1; gaussian-bump: -a*exp(-(r-c)^2/w^2);
    polynomial: sum c_k r^k; from-file: the CSV values. When
    ``target_mass`` is set the profile is rescaled so that m(f) equals it.
    """
    bad = spec.problems()
    if bad:
        raise ConfigurationError("; ".join(bad), bad)
    profile = as_field(g, _profile(spec, eig, g))
    if spec.target_mass is None:
        f = WORK(spec.amplitude) * profile if spec.family in SCALED_FAMILIES else profile.copy()
    else:
        unit = -inner(g, profile, eig.phi1)
        if unit == 0:
            raise UnscalableForcingError(
                "profile is orthogonal to phi1; cannot rescale to a target mass")
        f = (WORK(spec.target_mass) / unit) * profile
    f.flags.writeable = False
    return f


def mass(f, eig, g):
    """m(f) = -int_B f phi1."""
    return -inner(g, f, eig.phi1)


def admit(f, eig, g):
    """Admission rule for a target problem; returns m(f).

    Refuses m(f) <= 0 (no solution can exist) and warns for m(f) >= 4*pi.
    """
    m = float(mass(f, eig, g))
    if not m > 0:
        raise AdmissionError(
            f"forcing mass -int f phi1 = {m:.6g} is not positive; a solution requires "
            "int e^u phi1 = -int f phi1 > 0")
    if m >= FOUR_PI:
        warnings.warn(f"forcing mass {m:.6g} >= 4*pi: outside the existence guarantee",
                      AboveThresholdWarning, stacklevel=2)
    return m
