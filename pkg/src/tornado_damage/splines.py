"""Clamped cubic B-spline basis expansions for cyclic-ish time covariates.

A basis spec places `knot_count` interior knots evenly inside the domain and
clamps both ends (end knots with multiplicity degree+1), which yields
`knot_count + degree + 1` basis functions forming a partition of unity on
[lo, hi].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainViolation


@dataclass(frozen=True)
class SplineBasisSpec:
    degree: int
    knot_count: int
    lo: float
    hi: float
    include_hi: bool = True

    @property
    def num_basis(self) -> int:
        return self.knot_count + self.degree + 1

    def knot_vector(self) -> np.ndarray:
        interior = self.lo + (self.hi - self.lo) * np.arange(1, self.knot_count + 1) / (self.knot_count + 1)
        return np.concatenate([
            np.full(self.degree + 1, self.lo),
            interior,
            np.full(self.degree + 1, self.hi),
        ])


def time_of_day_spec() -> SplineBasisSpec:
    """Minutes since midnight, [0, 1440), 8 interior knots."""
    return SplineBasisSpec(degree=3, knot_count=8, lo=0.0, hi=1440.0, include_hi=False)


def day_of_year_spec() -> SplineBasisSpec:
    """Day of year, [1, 366], 12 interior knots."""
    return SplineBasisSpec(degree=3, knot_count=12, lo=1.0, hi=366.0, include_hi=True)


def bspline_basis(x: float, spec: SplineBasisSpec) -> np.ndarray:
    """Evaluate all basis functions at x.

    Returns a vector of length spec.num_basis whose entries lie in [0, 1]
    and sum to 1. Raises DomainViolation outside the spec's domain.
    """
    if not (spec.lo <= x <= spec.hi) or (not spec.include_hi and x == spec.hi):
        hi_bracket = "]" if spec.include_hi else ")"
        raise DomainViolation(f"x={x} outside [{spec.lo}, {spec.hi}{hi_bracket}")

    p = spec.degree
    knots = spec.knot_vector()
    n = spec.num_basis
    span = _find_span(x, p, n, knots)

    # Cox-de Boor triangular scheme over the p+1 nonzero functions at `span`.
    vals = np.zeros(p + 1)
    left = np.zeros(p + 1)
    right = np.zeros(p + 1)
    vals[0] = 1.0
    for j in range(1, p + 1):
        left[j] = x - knots[span + 1 - j]
        right[j] = knots[span + j] - x
        saved = 0.0
        for r in range(j):
            term = vals[r] / (right[r + 1] + left[j - r])
            vals[r] = saved + right[r + 1] * term
            saved = left[j - r] * term
        vals[j] = saved

    out = np.zeros(n)
    out[span - p: span + 1] = vals
    return out


def _find_span(x: float, p: int, n: int, knots: np.ndarray) -> int:
    if x >= knots[n]:  # clamp the closed right end onto the last span
        return n - 1
    return int(np.searchsorted(knots, x, side="right")) - 1
