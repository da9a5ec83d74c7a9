"""Multiplier weights and their feasibility machinery.

The decay proof rests on the time weights f(t) = eps1*(1+t)^2,
g(t) = eps2*(1+t) and the space-time weight h(t,x) = eps3*(1+t)*phi(x),
where phi grows like 1+x near the boundary and saturates at 1+l2.  This
module builds phi, the canonical parameter choice, the algebraic
feasibility system on (eps1, eps2, eps3, k), the two pointwise positivity
conditions that must hold for t past an activation time t0, and the late
time coercivity ratio used for the lower bound on the weighted energy.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .profiles import DampingProfile, ProfileConstants, evaluate

__all__ = [
    "MultiplierParams",
    "PhiSpec",
    "phi",
    "phi_prime",
    "default_params",
    "FeasibilityReport",
    "check_feasibility",
    "condition_iii",
    "condition_iv",
    "find_t0",
    "lemma28_coercivity",
]


@dataclass(frozen=True)
class MultiplierParams:
    """Weight amplitudes (eps1, eps2, eps3), the Young parameter k, and
    the activation time t0 (set once found; 0 until then)."""

    eps1: float
    eps2: float
    eps3: float
    k: float
    t0: float = 0.0

    def __post_init__(self):
        if min(self.eps1, self.eps2, self.eps3, self.k) <= 0:
            raise ValueError("eps1, eps2, eps3, k must all be positive")
        if self.t0 < 0:
            raise ValueError("t0 must be nonnegative")

    def f(self, t):
        return self.eps1 * (1.0 + t) ** 2

    def f_t(self, t):
        return 2.0 * self.eps1 * (1.0 + t)

    def g(self, t):
        return self.eps2 * (1.0 + t)

    @property
    def g_t(self) -> float:
        return self.eps2

    # g is linear in t, so the bound constants of the weighted mass terms
    # are both just eps2: g_t - g*V <= eps2 and g_t*V - g_tt = eps2*V.
    @property
    def c1(self) -> float:
        return self.eps2

    @property
    def c2(self) -> float:
        return self.eps2

    def with_t0(self, t0: float) -> "MultiplierParams":
        return replace(self, t0=t0)


def _quintic_bridge(s, y0, y1, m0, m1):
    """Quintic Hermite on s in [0,1] with end values/slopes and zero end
    curvatures.  Slopes are given in the s variable."""
    h0 = 1.0 - 10.0 * s**3 + 15.0 * s**4 - 6.0 * s**5
    h1 = s - 6.0 * s**3 + 8.0 * s**4 - 3.0 * s**5
    g1 = -4.0 * s**3 + 7.0 * s**4 - 3.0 * s**5
    g0 = 10.0 * s**3 - 15.0 * s**4 + 6.0 * s**5
    return y0 * h0 + m0 * h1 + y1 * g0 + m1 * g1


def _quintic_bridge_prime(s, y0, y1, m0, m1):
    dh0 = -30.0 * s**2 + 60.0 * s**3 - 30.0 * s**4
    dh1 = 1.0 - 18.0 * s**2 + 32.0 * s**3 - 15.0 * s**4
    dg1 = -12.0 * s**2 + 28.0 * s**3 - 15.0 * s**4
    dg0 = 30.0 * s**2 - 60.0 * s**3 + 30.0 * s**4
    return y0 * dh0 + m0 * dh1 + y1 * dg0 + m1 * dg1


@dataclass(frozen=True)
class PhiSpec:
    """Piecewise weight: phi = 1+x below l1, constant 1+l2 above l2, and a
    monotone C^2 quintic bridge in between (end slopes 1 and 0, zero end
    curvatures).  Degenerate l1 = l2 = 0 gives phi identically 1."""

    l1: float
    l2: float

    def __post_init__(self):
        if self.l1 < 0 or self.l2 < self.l1:
            raise ValueError("need 0 <= l1 <= l2")
        if self.l2 > self.l1:
            s = np.linspace(0.0, 1.0, 2001)
            dp = _quintic_bridge_prime(
                s, 1.0 + self.l1, 1.0 + self.l2, self.l2 - self.l1, 0.0
            )
            if float(np.min(dp)) < -1e-12 * (self.l2 - self.l1):
                raise ValueError("bridge is not monotone")

    @classmethod
    def from_constants(cls, constants: ProfileConstants) -> "PhiSpec":
        return cls(constants.l1, constants.l2)


def phi(spec: PhiSpec, x):
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    lo = x < spec.l1
    hi = x >= spec.l2
    out[lo] = 1.0 + x[lo]
    out[hi] = 1.0 + spec.l2
    mid = ~(lo | hi)
    if np.any(mid):
        width = spec.l2 - spec.l1
        if width == 0.0:
            out[mid] = 1.0 + spec.l2
        else:
            s = (x[mid] - spec.l1) / width
            out[mid] = _quintic_bridge(s, 1.0 + spec.l1, 1.0 + spec.l2, width, 0.0)
    if out.ndim == 0:
        return float(out)
    return out


def phi_prime(spec: PhiSpec, x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    lo = x < spec.l1
    out[lo] = 1.0
    mid = (x >= spec.l1) & (x < spec.l2)
    if np.any(mid):
        width = spec.l2 - spec.l1
        s = (x[mid] - spec.l1) / width
        out[mid] = (
            _quintic_bridge_prime(s, 1.0 + spec.l1, 1.0 + spec.l2, width, 0.0) / width
        )
    if out.ndim == 0:
        return float(out)
    return out


def default_params(v0: float, v_star: float) -> MultiplierParams:
    """The canonical parameter choice (1, v0/2, 2*v0, 4*v0*v_star/(v0-2)).

    Only defined for v0 > 2; the Young parameter blows up as v0 -> 2, so
    a warning is emitted when the gap is below 0.1.
    """
    if v0 <= 2.0:
        raise ValueError("default parameters require v0 > 2")
    if v_star <= 0.0:
        raise ValueError("v_star must be positive")
    if v0 - 2.0 < 0.1:
        warnings.warn(
            f"v0 = {v0} is barely above 2; k = {4*v0*v_star/(v0-2):.3g} is huge",
            stacklevel=2,
        )
    return MultiplierParams(1.0, v0 / 2.0, 2.0 * v0, 4.0 * v0 * v_star / (v0 - 2.0))


@dataclass
class FeasibilityReport:
    """Margins of the six algebraic inequalities on the parameters.

    The last three pointwise conditions are all implied by the unified
    margin, so overall feasibility only needs the first two plus the
    unified one to be strictly positive.
    """

    margin_sum: float           # eps3 - 2 eps1 - 2 eps2
    margin_damping: float       # 2 eps1 v0 - 2 eps1 - 2 eps2
    margin_near: float          # 2 eps2 - 2 eps1 + eps3 - (eps3/k)(1+l1) v_big
    margin_mid: float           # 2 eps2 - 2 eps1 - (eps3/k)(1+l2) v_big
    margin_tail: float          # 2 eps2 - 2 eps1 - (eps3/k) v1
    margin_unified: float       # 2 eps2 - 2 eps1 - (eps3/k) v_star

    @property
    def passed(self) -> bool:
        return (
            self.margin_sum > 0
            and self.margin_damping > 0
            and self.margin_unified > 0
        )


def check_feasibility(
    params: MultiplierParams, constants: ProfileConstants
) -> FeasibilityReport:
    e1, e2, e3, k = params.eps1, params.eps2, params.eps3, params.k
    return FeasibilityReport(
        margin_sum=e3 - 2.0 * e1 - 2.0 * e2,
        margin_damping=2.0 * e1 * constants.v0 - 2.0 * e1 - 2.0 * e2,
        margin_near=2.0 * e2 - 2.0 * e1 + e3 - (e3 / k) * (1.0 + constants.l1) * constants.v_big,
        margin_mid=2.0 * e2 - 2.0 * e1 - (e3 / k) * (1.0 + constants.l2) * constants.v_big,
        margin_tail=2.0 * e2 - 2.0 * e1 - (e3 / k) * constants.v1,
        margin_unified=2.0 * e2 - 2.0 * e1 - (e3 / k) * constants.v_star,
    )


def condition_iii(t, x, params: MultiplierParams, profile: DampingProfile, spec: PhiSpec):
    """Exact left-hand side of the velocity-weight positivity condition:
    2 f V - f_t - 2 g + h_x - k h V - h_t at (t, x)."""
    v = evaluate(profile, x)
    p = phi(spec, x)
    pp = phi_prime(spec, x)
    one_t = 1.0 + np.asarray(t, dtype=float)
    e1, e2, e3, k = params.eps1, params.eps2, params.eps3, params.k
    return (
        2.0 * e1 * one_t**2 * v
        - 2.0 * e1 * one_t
        - 2.0 * e2 * one_t
        + e3 * one_t * pp
        - k * e3 * one_t * p * v
        - e3 * p
    )


def condition_iv(t, x, params: MultiplierParams, profile: DampingProfile, spec: PhiSpec):
    """Exact left-hand side of the gradient-weight positivity condition:
    2 g - f_t + h_x - (1/k) h V - h_t at (t, x)."""
    v = evaluate(profile, x)
    p = phi(spec, x)
    pp = phi_prime(spec, x)
    one_t = 1.0 + np.asarray(t, dtype=float)
    e1, e2, e3, k = params.eps1, params.eps2, params.eps3, params.k
    return (
        2.0 * e2 * one_t
        - 2.0 * e1 * one_t
        + e3 * one_t * pp
        - (e3 / k) * one_t * p * v
        - e3 * p
    )


def _x_samples(profile: DampingProfile, spec: PhiSpec, r: float, t: float, resolution: float):
    """Dense samples on the structured near field, log-spaced on the tail
    out to the wavefront x = r + t."""
    near_end = max(spec.l2, profile.dead_zone_end, r) + 2.0
    x_near = np.arange(0.0, near_end, resolution)
    x_far = r + t
    if x_far > near_end:
        tail = np.geomspace(near_end, x_far, 256)
        return np.concatenate([x_near, tail])
    return np.concatenate([x_near, [max(x_far, near_end)]])


@dataclass
class T0Result:
    found: bool
    t0: float
    min_margin: float
    t_max: float


def find_t0(
    params: MultiplierParams,
    profile: DampingProfile,
    spec: PhiSpec,
    r: float,
    t_max: float = 1e4,
    resolution: float = 0.05,
    n_t: int = 400,
) -> T0Result:
    """Smallest sampled time past which both positivity conditions hold on
    the whole light cone [0, r + t], confirmed on a trailing window up to
    t_max.  Sampled, not symbolic: t runs over a log grid, x over a dense
    near-field grid plus a log-spaced tail."""
    t_grid = np.unique(np.concatenate([[0.0], np.geomspace(1.0, t_max, n_t)]))
    margins = np.empty(t_grid.size)
    for i, t in enumerate(t_grid):
        x = _x_samples(profile, spec, r, t, resolution)
        m3 = condition_iii(t, x, params, profile, spec)
        m4 = condition_iv(t, x, params, profile, spec)
        margins[i] = min(float(np.min(m3)), float(np.min(m4)))

    # suffix minimum: the activation time must survive all later samples
    suffix = np.minimum.accumulate(margins[::-1])[::-1]
    ok = suffix > 0.0
    if not ok.any():
        return T0Result(False, float("nan"), float(np.max(suffix)), t_max)
    i0 = int(np.argmax(ok))
    return T0Result(True, float(t_grid[i0]), float(suffix[i0]), t_max)


def lemma28_coercivity(params: MultiplierParams, l2: float, t: float) -> float:
    """inf over x of (f(t) - 2 h(t,x)) / f(t); h is maximal where phi
    saturates, so the ratio is 1 - 2*eps3*(1+l2)/(eps1*(1+t)).  Positive
    once t exceeds 2*eps3*(1+l2)/eps1 - 1 and at least 1/2 from
    t = 4*eps3*(1+l2)/eps1 - 1 on."""
    return 1.0 - 2.0 * params.eps3 * (1.0 + l2) / (params.eps1 * (1.0 + t))
