"""Weight functions and weighted norms on filled and cusped regions.

Fields on a filling are measured against a cusp-comparison weight phi_c
(flat at the core scale r_c, growing like r/R further out) times a decay
factor (2/rho)**delta that books exponential-in-distance decay toward the
unfilled end.  The combination is what makes the deficit of a glued
metric shrink at the rate set by the normalized filling size rather than
merely pointwise.

Conventions:
  * rho is a normalized radius in (0, 2].  On a filling of size R we use
    rho = r / R; on the infinite-end testbed rho = 1 / r, so the decay
    factor there reads (2r)**delta.
  * delta is the decay rate.  For L2-compatible estimates it must sit
    strictly inside ((n-1)/2, n-1); the default is the midpoint 3(n-1)/4.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    GridTooCoarse,
    InvalidRho,
    InvalidWeight,
    NonFiniteField,
    OutOfDomain,
    TooFewSamples,
)
from .numutil import smoothstep
from .profiles import closing_parameters

__all__ = [
    "WeightSpec",
    "default_delta",
    "default_core_scale",
    "phi_c",
    "phi_c_raw",
    "decay_weight",
    "weighted_sup_norm",
    "discrete_holder_seminorm",
]


def default_delta(n):
    """Decay rate 3(n-1)/4, the midpoint of the admissible band.

    The band ((n-1)/2, n-1) is where the weighted pairing on an infinite
    end is square-integrable while the weight still undercuts the slowest
    homogeneous solution r**(1-n).
    """
    if n < 3:
        raise InvalidWeight(f"need n >= 3, got n={n}")
    return 0.75 * (n - 1)


def default_core_scale(R, n):
    """Geometric mean of the core radius r_plus(m=1) and the filling size."""
    r_plus, _ = closing_parameters(1.0, n)
    if R <= r_plus:
        raise InvalidWeight(f"filling size R={R} at or below core radius {r_plus}")
    return math.sqrt(r_plus * R)


@dataclass(frozen=True)
class WeightSpec:
    """Resolved weight parameters for one or more cusps.

    R and r_c are per-cusp tuples of equal length; R is carried here
    because every weight evaluation needs the filling size alongside the
    core scale.  delta defaults to default_delta(n) and r_c entries to
    sqrt(r_plus * R).  With l2_mode=True the delta band required for
    square-integrability is enforced at construction.
    """

    n: int
    R: tuple
    delta: float = None
    r_c: tuple = None
    l2_mode: bool = False

    def __post_init__(self):
        if self.n < 3:
            raise InvalidWeight(f"need n >= 3, got n={self.n}")
        R = tuple(float(x) for x in np.atleast_1d(self.R))
        if any(x <= 0 for x in R):
            raise InvalidWeight("filling sizes must be positive")
        object.__setattr__(self, "R", R)
        delta = self.delta
        if delta is None or (isinstance(delta, str) and delta == "auto"):
            delta = default_delta(self.n)
        delta = float(delta)
        if delta < 0:
            raise InvalidWeight(f"delta must be nonnegative, got {delta}")
        if self.l2_mode:
            lo, hi = 0.5 * (self.n - 1), float(self.n - 1)
            if not (lo < delta < hi):
                raise InvalidWeight(
                    f"l2_mode needs delta in ({lo}, {hi}), got {delta}"
                )
        object.__setattr__(self, "delta", delta)
        r_c = self.r_c
        if r_c is None or (isinstance(r_c, str) and r_c == "auto"):
            r_c = tuple(default_core_scale(x, self.n) for x in R)
        else:
            r_c = tuple(float(x) for x in np.atleast_1d(r_c))
        if len(r_c) != len(R):
            raise InvalidWeight(f"got {len(r_c)} core scales for {len(R)} fillings")
        for rc, RR in zip(r_c, R):
            if not (0 < rc <= RR):
                raise InvalidWeight(f"core scale {rc} outside (0, {RR}]")
        object.__setattr__(self, "r_c", r_c)

    @property
    def num_cusps(self):
        return len(self.R)

    def to_dict(self):
        return {"n": self.n, "R": list(self.R), "delta": self.delta,
                "r_c": list(self.r_c), "l2_mode": self.l2_mode}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        return cls(n=d["n"], R=tuple(d["R"]), delta=d.get("delta", "auto"),
                   r_c=tuple(d["r_c"]) if isinstance(d.get("r_c"), (list, tuple))
                   else d.get("r_c", "auto"),
                   l2_mode=bool(d.get("l2_mode", False)))


def phi_c_raw(r, r_c, R, smooth_frac=0.05):
    """Cusp comparison weight: max(r, r_c)/R with a smoothed corner.

    Piecewise the weight is r_c/R for r <= r_c and r/R beyond; the kink
    at r = r_c is mollified over a window of half-width smooth_frac*r_c
    by blending the two branches with a C-infinity step.  When r_c sits
    within a window-width of R there is no room to smooth inside the
    filling and the raw piecewise formula is returned.
    """
    r = np.asarray(r, dtype=float)
    if r_c <= 0 or R <= 0:
        raise InvalidWeight("phi_c needs positive r_c and R")
    if np.any(r <= 0):
        raise OutOfDomain("phi_c is defined for positive r")
    if np.any(r > R * (1.0 + 1e-12)):
        raise OutOfDomain(f"radius beyond the filling size {R}")
    w = smooth_frac * r_c
    base = np.maximum(r, r_c) / R
    if w <= 0 or r_c >= R - w:
        return base if base.ndim else float(base)
    t = np.clip((r - (r_c - w)) / (2.0 * w), 0.0, 1.0)
    s = np.where(t <= 0, 0.0, np.where(t >= 1, 1.0, smoothstep(t)))
    out = ((1.0 - s) * r_c + s * np.maximum(r, r_c)) / R
    return out if out.ndim else float(out)


def phi_c(w, cusp_index, r):
    """phi_c for one cusp of a WeightSpec."""
    if not (0 <= cusp_index < w.num_cusps):
        raise InvalidWeight(f"cusp index {cusp_index} out of range")
    return phi_c_raw(r, w.r_c[cusp_index], w.R[cusp_index])


def decay_weight(w, rho):
    """(2/rho)**delta for normalized radius rho in (0, 2].

    Equals 1 at the outer edge rho = 2 and grows monotonically toward
    the small-rho end, so multiplying by it prices in decay of rate
    delta.  On the infinite-end testbed rho = 1/r and the factor is
    (2r)**delta.
    """
    rho = np.asarray(rho, dtype=float)
    if np.any(~np.isfinite(rho)) or np.any(rho <= 0) or np.any(rho > 2.0 + 1e-12):
        raise InvalidRho("normalized radius must lie in (0, 2]")
    out = (2.0 / rho) ** w.delta
    return out if out.ndim else float(out)


def _check_field(field_vals, grid):
    field_vals = np.asarray(field_vals, dtype=float)
    grid = np.asarray(grid, dtype=float)
    if field_vals.shape[0] != grid.shape[0]:
        raise TooFewSamples(
            f"field has {field_vals.shape[0]} samples on a grid of {grid.shape[0]}"
        )
    if grid.shape[0] < 2:
        raise TooFewSamples("need at least 2 grid points")
    if np.any(np.diff(grid) <= 0):
        raise GridTooCoarse("grid must be strictly increasing")
    if not np.all(np.isfinite(field_vals)):
        raise NonFiniteField("field contains nan or inf")
    return field_vals, grid


def weighted_sup_norm(field, w, metric=None, cusp_index=0, rho=None):
    """sup over the grid of decay_weight * phi_c**-1 * |field|.

    field is a (grid, values) pair; values may carry trailing component
    axes, reduced pointwise by the absolute maximum.  rho defaults to
    r / R for the chosen cusp.  metric, when given, only validates that
    the dimensions agree.
    """
    grid, vals = field
    vals, grid = _check_field(vals, grid)
    if metric is not None and metric.n != w.n:
        raise InvalidWeight(f"metric dimension {metric.n} != weight dimension {w.n}")
    amp = np.abs(vals)
    while amp.ndim > 1:
        amp = amp.max(axis=-1)
    if rho is None:
        rho = grid / w.R[cusp_index]
    wt = decay_weight(w, rho) / phi_c(w, cusp_index, grid)
    return float(np.max(wt * amp))


def discrete_holder_seminorm(field, grid, alpha=0.5, order=0):
    """Discrete Holder quotient of the order-th divided difference.

    Forms the order-th divided differences of the field (a derivative
    proxy on the grid) and returns the maximum over adjacent windows of
    their difference divided by the window separation to the alpha.
    order=0 is the plain Holder quotient of the field itself.
    """
    field_vals, grid = _check_field(field, grid)
    if field_vals.ndim != 1:
        raise InvalidWeight("seminorm expects a scalar field")
    if order not in (0, 1, 2):
        raise InvalidWeight(f"order must be 0, 1 or 2, got {order}")
    if not (0 < alpha <= 1):
        raise InvalidWeight(f"alpha must lie in (0, 1], got {alpha}")
    if grid.shape[0] < max(3, order + 2):
        raise GridTooCoarse(
            f"need at least {max(3, order + 2)} points for order={order}"
        )
    vals = field_vals
    x = grid
    for _ in range(order):
        vals = np.diff(vals) / np.diff(x)
        x = 0.5 * (x[:-1] + x[1:])
    num = np.abs(np.diff(vals))
    den = np.diff(x) ** alpha
    return float(np.max(num / den))
