"""The gauged linearized Einstein operator on torus-invariant deformations.

On a warped product V**-1 dr^2 + V dtheta^2 + r^2 g_T the operator acts
blockwise on frame components of a symmetric 2-tensor h.  Every block
shares the radial part

    A = -V d^2/dr^2 - (V' + (n-2)V/r) d/dr

and carries a zeroth-order piece built from V, r and the sectional
curvatures.  The diagonal blocks (11, 22, jj) couple through a symmetric
matrix whose rows sum to -2 ric_aa; off-diagonal blocks are scalar.

Applying the operator to the metric itself (h_ab = delta_ab in the
orthonormal frame) therefore returns -2 ric_aa on the diagonal for any
profile, which is 2(n-1) delta_ab when the background is Einstein.  That
identity is the structural check used throughout the tests.

The cusp model (V = r^2, all curvatures -1) reduces every block to an
Euler operator; its indicial roots drive the oscillation estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curvature import sectional_curvatures
from .errors import (
    GridTooCoarse,
    NonFiniteField,
    OutOfDomain,
    SingularAtCore,
    TooFewSamples,
    UnknownBlock,
)
from .numutil import apply_diff, fit_loglog
from .profiles import (
    BlackHoleProfile,
    CuspProfile,
    FillingMetric,
    GluedProfile,
    black_hole_metric,
    cusp_metric,
    eval_profile,
)

__all__ = [
    "BLOCK_LABELS",
    "InvariantDeformation",
    "ODESystemL",
    "assemble_L_blackhole",
    "assemble_L_cusp",
    "apply_L",
    "indicial_roots",
    "metric_deformation",
    "bump_deformation",
    "OperatorComparison",
    "compare_operators",
    "torus_average",
]

BLOCK_LABELS = ("11", "22", "12", "1j", "2j", "jj", "jk")


@dataclass(frozen=True, eq=False)
class InvariantDeformation:
    """Frame components of a torus-invariant symmetric 2-tensor.

    components maps block labels to arrays whose leading axis runs over
    the grid.  Blocks jj and jk may carry one column per torus direction
    or unordered pair; scalar blocks may be (npts,) or (npts, m).
    """

    n: int
    grid: np.ndarray
    components: dict

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        if grid.ndim != 1 or grid.shape[0] < 2:
            raise GridTooCoarse("deformation grid needs at least 2 points")
        if np.any(np.diff(grid) <= 0):
            raise GridTooCoarse("deformation grid must be strictly increasing")
        comps = {}
        for label, arr in self.components.items():
            if label not in BLOCK_LABELS:
                raise UnknownBlock(f"unknown block label {label!r}")
            arr = np.asarray(arr, dtype=float)
            if arr.shape[0] != grid.shape[0]:
                raise TooFewSamples(
                    f"block {label} has {arr.shape[0]} rows on a grid of "
                    f"{grid.shape[0]}"
                )
            if not np.all(np.isfinite(arr)):
                raise NonFiniteField(f"block {label} contains nan or inf")
            comps[label] = arr
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "components", comps)

    def block(self, label):
        """Component array for label, zeros if absent."""
        if label in self.components:
            return self.components[label]
        npts = self.grid.shape[0]
        if label == "jj":
            return np.zeros((npts, self.n - 2))
        if label == "jk":
            npair = (self.n - 2) * (self.n - 3) // 2
            return np.zeros((npts, npair))
        return np.zeros(npts)

    def diag_matrix(self):
        """(npts, n) array of diagonal components (11, 22, jj...)."""
        npts = self.grid.shape[0]
        d = np.zeros((npts, self.n))
        d[:, 0] = np.asarray(self.block("11")).reshape(npts)
        d[:, 1] = np.asarray(self.block("22")).reshape(npts)
        jj = np.atleast_2d(self.block("jj"))
        if jj.shape[0] != npts:
            jj = jj.T
        if jj.shape != (npts, self.n - 2):
            raise TooFewSamples(
                f"jj block must have {self.n - 2} columns, got {jj.shape}"
            )
        d[:, 2:] = jj
        return d

    def max_abs(self):
        return max(
            float(np.max(np.abs(arr))) for arr in self.components.values()
        )


def metric_deformation(n, grid):
    """h = g itself: unit diagonal frame components on the grid."""
    grid = np.asarray(grid, dtype=float)
    npts = grid.shape[0]
    return InvariantDeformation(
        n=n, grid=grid,
        components={
            "11": np.ones(npts),
            "22": np.ones(npts),
            "jj": np.ones((npts, n - 2)),
        },
    )


@dataclass(frozen=True, eq=False)
class ODESystemL:
    """The assembled operator: radial coefficients plus zeroth-order data.

    kind is "cusp" for the exact Euler model and "warped" for a
    profile-backed assembly.  Coefficients are evaluated on demand as
    functions of r.
    """

    n: int
    kind: str
    profile: object

    def _v(self, r):
        V = eval_profile(self.profile, r, 0)
        V1 = eval_profile(self.profile, r, 1)
        if np.any(V <= 0):
            raise SingularAtCore(
                "profile vanishes on the grid; the zeroth-order terms divide by V"
            )
        return V, V1

    def a_coefficients(self, r):
        """(c2, c1) with A u = c2 u'' + c1 u'."""
        r = np.asarray(r, dtype=float)
        if self.kind == "cusp":
            return -(r**2), -float(self.n) * r
        V, V1 = self._v(r)
        return -V, -(V1 + (self.n - 2) * V / r)

    def zeroth_offdiag(self, r):
        """Scalar zeroth-order coefficients for blocks 12, 1j, 2j, jk."""
        r = np.asarray(r, dtype=float)
        n = self.n
        if self.kind == "cusp":
            one = np.ones_like(r)
            return {
                "12": 2.0 * (n - 1) * one,
                "1j": float(n) * one,
                "2j": np.zeros_like(r),
                "jk": np.zeros_like(r),
            }
        V, V1 = self._v(r)
        metric = FillingMetric(n=n, profile=self.profile, beta=2.0 * math.pi)
        K12, K1p, Kpp = sectional_curvatures(metric, r)
        return {
            "12": V1**2 / V + 2.0 * (n - 2) * V / r**2 + 2.0 * K12,
            "1j": V1**2 / (4.0 * V) + (n + 1.0) * V / r**2 + 2.0 * K1p,
            "2j": V1**2 / (4.0 * V) + V / r**2 + 2.0 * K1p,
            "jk": V1**2 / (2.0 * V) + 2.0 * Kpp,
        }

    def coupling_diag(self, r):
        """(npts, n, n) symmetric coupling of the (11, 22, jj) sector.

        Row sums equal -2 ric_aa for every profile, which is the gauge
        identity L(g) = -2 ric on constant deformations.
        """
        r = np.atleast_1d(np.asarray(r, dtype=float))
        n = self.n
        npts = r.shape[0]
        M = np.zeros((npts, n, n))
        if self.kind == "cusp":
            P = 2.0 * np.ones(npts)
            Vr2 = np.ones(npts)
            K12 = -np.ones(npts)
            K1p = -np.ones(npts)
            Kpp = -np.ones(npts)
        else:
            V, V1 = self._v(r)
            P = V1**2 / (2.0 * V)
            Vr2 = V / r**2
            metric = FillingMetric(n=n, profile=self.profile, beta=2.0 * math.pi)
            K12, K1p, Kpp = sectional_curvatures(metric, r)
            K12 = np.atleast_1d(K12)
            K1p = np.atleast_1d(K1p)
            Kpp = np.atleast_1d(Kpp)
        M[:, 0, 0] = P + 2.0 * (n - 2) * Vr2
        M[:, 0, 1] = -(P + 2.0 * K12)
        M[:, 1, 0] = M[:, 0, 1]
        M[:, 1, 1] = P
        for j in range(2, n):
            M[:, 0, j] = -2.0 * (Vr2 + K1p)
            M[:, j, 0] = M[:, 0, j]
            M[:, 1, j] = -2.0 * K1p
            M[:, j, 1] = M[:, 1, j]
            M[:, j, j] = 2.0 * Vr2
            for k in range(2, n):
                if k != j:
                    M[:, j, k] = -2.0 * Kpp
        return M


def assemble_L_blackhole(metric):
    """Operator assembly from a profile-backed metric.

    Accepts any FillingMetric; with the cusp profile the coefficients
    reduce to the exact Euler model.
    """
    return ODESystemL(n=metric.n, kind="warped", profile=metric.profile)


def assemble_L_cusp(n):
    """The exact cusp model: A = -r^2 d^2 - n r d with constant couplings."""
    if n < 3:
        raise OutOfDomain(f"need n >= 3, got {n}")
    return ODESystemL(n=int(n), kind="cusp", profile=CuspProfile())


def _core_margin_check(sys, grid):
    profile = sys.profile
    if isinstance(profile, (BlackHoleProfile, GluedProfile)):
        r_plus = profile.r_plus
        dr = grid[1] - grid[0]
        margin = max(0.01 * r_plus, 10.0 * dr)
        if grid[0] < r_plus + margin:
            raise SingularAtCore(
                f"grid must start above r_plus + {margin:.3g} = "
                f"{r_plus + margin:.6g}; got {grid[0]:.6g}"
            )


def apply_L(sys, h):
    """Apply the assembled operator to a deformation on its grid.

    First derivatives use 5-point stencils and second derivatives
    6-point ones, so the one-sided rows at the grid ends keep the same
    4th order as the interior.  Returns a deformation with every block
    populated.
    """
    if h.n != sys.n:
        raise UnknownBlock(f"dimension mismatch: operator {sys.n}, h {h.n}")
    grid = h.grid
    if grid.shape[0] < 9:
        raise GridTooCoarse("need at least 9 grid points to apply the operator")
    _core_margin_check(sys, grid)
    c2, c1 = sys.a_coefficients(grid)

    def a_op(u):
        u = np.asarray(u, dtype=float)
        d1 = apply_diff(grid, u, 1)
        d2 = apply_diff(grid, u, 2, stencil=6)
        if u.ndim == 1:
            return c2 * d2 + c1 * d1
        return c2[:, None] * d2 + c1[:, None] * d1

    out = {}
    coeffs = sys.zeroth_offdiag(grid)
    for label in ("12", "1j", "2j", "jk"):
        u = h.block(label)
        c = coeffs[label]
        res = a_op(u)
        out[label] = res + (c * u if u.ndim == 1 else c[:, None] * u)
    D = h.diag_matrix()
    M = sys.coupling_diag(grid)
    LD = a_op(D) + np.einsum("pab,pb->pa", M, D)
    out["11"] = LD[:, 0]
    out["22"] = LD[:, 1]
    out["jj"] = LD[:, 2:]
    return InvariantDeformation(n=sys.n, grid=grid, components=out)


def indicial_roots(block, n):
    """Indicial exponents of the cusp-model block.

    Scalar blocks give a pair (larger, smaller); the coupled diagonal
    sector (label "diag") gives all 2n eigen-exponents sorted
    descending.  Euler substitution r**s turns A into -(s^2 + (n-1)s),
    so each zeroth-order constant c contributes the polynomial
    s^2 + (n-1)s - c.
    """
    if n < 3:
        raise OutOfDomain(f"need n >= 3, got {n}")

    def roots_for(c):
        disc = (n - 1) ** 2 + 4.0 * c
        sq = math.sqrt(disc)
        return (0.5 * (-(n - 1) + sq), 0.5 * (-(n - 1) - sq))

    if block in ("11", "12"):
        return roots_for(2.0 * (n - 1))
    if block == "1j":
        return (1.0, -float(n))
    if block in ("2j", "jk"):
        return (0.0, float(1 - n))
    if block in ("diag", "coupled"):
        sys = assemble_L_cusp(n)
        M = sys.coupling_diag(np.array([1.0]))[0]
        eigvals = np.linalg.eigvalsh(M)
        exps = []
        for lam in eigvals:
            exps.extend(roots_for(float(lam)))
        return tuple(sorted(exps, reverse=True))
    raise UnknownBlock(f"unknown block label {block!r}")


def _unit_bump(x, center, width):
    """C-infinity bump in x, support (center-width, center+width)."""
    t = (x - (center - width)) / (2.0 * width)
    out = np.zeros_like(x)
    inside = (t > 0) & (t < 1)
    ti = t[inside]
    out[inside] = np.exp(4.0 - 1.0 / ti - 1.0 / (1.0 - ti))
    return out


def bump_deformation(n, grid, centers, width=0.4, blocks=None):
    """Sum of unit-C2 log-radial bumps, one per center.

    Each bump lives in x = log r with half-width `width` and is scaled
    so that max(|b|, |b'|, |b''|) = 1 with derivatives in x (the frame
    radial direction scales like r d/dr).  Centers should be separated
    by more than 2*width in log r so the sum keeps unit size.
    """
    grid = np.asarray(grid, dtype=float)
    x = np.log(grid)
    total = np.zeros_like(x)
    xf = np.linspace(-1.0, 1.0, 4001)
    ref = _unit_bump(xf, 0.0, 1.0)
    d1 = np.gradient(ref, xf)
    d2 = np.gradient(d1, xf)
    # unit-width reference scale; derivatives of the rescaled bump gain 1/width
    scale = max(np.max(np.abs(ref)),
                np.max(np.abs(d1)) / width,
                np.max(np.abs(d2)) / width**2)
    for c in np.atleast_1d(centers):
        total += _unit_bump(x, math.log(c), width) / scale
    if blocks is None:
        blocks = BLOCK_LABELS
    npts = grid.shape[0]
    comps = {}
    for label in blocks:
        if label == "jj":
            comps[label] = np.tile(total[:, None], (1, n - 2))
        elif label == "jk":
            npair = (n - 2) * (n - 3) // 2
            if npair:
                comps[label] = np.tile(total[:, None], (1, npair))
        else:
            comps[label] = total.copy()
    return InvariantDeformation(n=n, grid=grid, components=comps)


@dataclass(frozen=True, eq=False)
class OperatorComparison:
    """Pointwise difference of two operator applications with a decay fit."""

    grid: np.ndarray
    diff: np.ndarray
    bin_centers: np.ndarray
    bin_max: np.ndarray
    slope: float
    intercept: float
    residual: float


def compare_operators(h, r_window=None, m=1.0, metric_a=None, metric_b=None,
                      bins=12):
    """|L_C h - L_BH h| on the grid of h, with a log-log envelope fit.

    By default compares the cusp model against the black hole of mass m.
    The pointwise difference is reduced to its maximum over blocks, then
    an envelope (binwise maximum over log-spaced bins inside r_window)
    is fitted; for unit-C2 h translated across the window the slope
    comes out at -(n-1).  All-zero differences give slope nan.
    """
    n = h.n
    sys_a = assemble_L_cusp(n) if metric_a is None else assemble_L_blackhole(metric_a)
    sys_b = (assemble_L_blackhole(black_hole_metric(m, n))
             if metric_b is None else assemble_L_blackhole(metric_b))
    La = apply_L(sys_a, h)
    Lb = apply_L(sys_b, h)
    grid = h.grid
    diff = np.zeros(grid.shape[0])
    for label in BLOCK_LABELS:
        d = np.abs(np.atleast_2d(La.block(label).T).T
                   - np.atleast_2d(Lb.block(label).T).T)
        if d.size == 0:
            continue
        while d.ndim > 1:
            d = d.max(axis=-1)
        diff = np.maximum(diff, d)
    if r_window is None:
        r_window = (float(grid[0]), float(grid[-1]))
    lo, hi = r_window
    edges = np.geomspace(lo, hi, bins + 1)
    centers = np.sqrt(edges[:-1] * edges[1:])
    bin_max = np.zeros(bins)
    for i in range(bins):
        mask = (grid >= edges[i]) & (grid <= edges[i + 1])
        if np.any(mask):
            bin_max[i] = np.max(diff[mask])
    keep = bin_max > 0
    if keep.sum() >= 3:
        slope, intercept, residual = fit_loglog(centers[keep], bin_max[keep])
    else:
        slope, intercept, residual = float("nan"), float("nan"), float("nan")
    return OperatorComparison(grid=grid, diff=diff, bin_centers=centers,
                              bin_max=bin_max, slope=slope,
                              intercept=intercept, residual=residual)


def torus_average(n, grid, samples):
    """Componentwise mean over torus sample points (the last axis).

    samples maps block labels to arrays (npts, ..., nsamples) of the
    lifted field evaluated at >= 16 torus points per radius.
    """
    averaged = {}
    for label, arr in samples.items():
        arr = np.asarray(arr, dtype=float)
        if arr.ndim < 2 or arr.shape[-1] < 16:
            raise TooFewSamples(
                f"block {label}: need >= 16 torus samples per radius"
            )
        averaged[label] = arr.mean(axis=-1)
    return InvariantDeformation(n=n, grid=grid, components=averaged)
