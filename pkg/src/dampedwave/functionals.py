"""Scalar functionals evaluated along a trajectory.

Everything here is a pure function of a field snapshot: total energy, the
weighted Lyapunov pair, the Hardy ratio, the three-term bounded
combination, the weighted data norm, and the accumulated-solution budget.
Spatial integrals use the trapezoidal rule on the active grid, matching
the second-order scheme; u_x is the centered difference in the interior
with a one-sided second-order stencil at the boundary (half line) or the
symmetric value zero slope closure (whole line, even data).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .multipliers import MultiplierParams, PhiSpec, phi, phi_prime
from .profiles import DampingProfile, evaluate

__all__ = [
    "FieldSnapshot",
    "WeightedDataNorm",
    "trapezoid",
    "spatial_derivative",
    "energy",
    "hardy_ratio",
    "lyapunov_E",
    "dissipation_F",
    "lyapunov_combo",
    "weighted_source_norm",
    "budget_lhs",
    "budget_rhs",
    "BudgetReport",
    "check_budget",
]

_trapz = getattr(np, "trapezoid", np.trapz)


def trapezoid(y: np.ndarray, dx: float) -> float:
    return float(_trapz(y, dx=dx))


@dataclass
class FieldSnapshot:
    """One recorded time level: displacement, reconstructed velocity, the
    running time integral of u, and the accumulated damped mass.

    ``extent`` is the last possibly-nonzero index; ``whole_line`` marks
    even-symmetric runs whose integrals count both half lines.
    """

    t: float
    x: np.ndarray
    u: np.ndarray
    u_t: np.ndarray
    dx: float
    extent: int
    whole_line: bool = False
    w: np.ndarray | None = None
    damped_mass: float = 0.0

    @property
    def factor(self) -> float:
        return 2.0 if self.whole_line else 1.0

    @property
    def hi(self) -> int:
        return self.extent + 1

    def integrate(self, integrand: np.ndarray) -> float:
        return self.factor * trapezoid(integrand, self.dx)


def spatial_derivative(u: np.ndarray, dx: float, whole_line: bool = False) -> np.ndarray:
    """Nodal u_x: centered in the interior, second-order one-sided at the
    ends.  For whole-line (even) data the derivative at x = 0 vanishes by
    symmetry, and is set to the exact symmetric value 0."""
    ux = np.empty_like(u)
    ux[1:-1] = (u[2:] - u[:-2]) / (2.0 * dx)
    if whole_line:
        ux[0] = 0.0
    elif u.size >= 3:
        ux[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * dx)
    else:
        ux[0] = 0.0
    if u.size >= 3:
        ux[-1] = (3.0 * u[-1] - 4.0 * u[-2] + u[-3]) / (2.0 * dx)
    else:
        ux[-1] = 0.0
    return ux


def energy(snap: FieldSnapshot) -> float:
    """Total energy: half the integral of u_t^2 + u_x^2."""
    hi = snap.hi
    u = snap.u[:hi]
    ut = snap.u_t[:hi]
    ux = spatial_derivative(u, snap.dx, snap.whole_line)
    return 0.5 * snap.integrate(ut * ut + ux * ux)


def hardy_ratio(snap: FieldSnapshot) -> float:
    """max |u| / sqrt(1+x) over the grid, divided by the L2 norm of u_x.

    Only meaningful on the half line (functions vanishing at x = 0); the
    zero state returns 0 by convention, whole-line snapshots return 0.
    """
    if snap.whole_line:
        return 0.0
    hi = snap.hi
    u = snap.u[:hi]
    ux = spatial_derivative(u, snap.dx, snap.whole_line)
    denom = np.sqrt(snap.integrate(ux * ux))
    if denom == 0.0:
        return 0.0
    sup = float(np.max(np.abs(u) / np.sqrt(1.0 + snap.x[:hi])))
    return sup / denom


def _weights(snap: FieldSnapshot, params: MultiplierParams, spec: PhiSpec):
    hi = snap.hi
    x = snap.x[:hi]
    t = snap.t
    f = params.f(t)
    g = params.g(t)
    h = params.eps3 * (1.0 + t) * phi(spec, x)
    return f, g, h, x


def lyapunov_E(
    snap: FieldSnapshot,
    params: MultiplierParams,
    profile: DampingProfile,
    spec: PhiSpec,
) -> float:
    """Weighted Lyapunov functional: half the integral of
    f (u_t^2 + u_x^2) + 2 g u u_t + (g V - g_t) u^2 + 2 h u_x u_t."""
    hi = snap.hi
    u = snap.u[:hi]
    ut = snap.u_t[:hi]
    ux = spatial_derivative(u, snap.dx, snap.whole_line)
    f, g, h, x = _weights(snap, params, spec)
    v = evaluate(profile, x)
    bracket = (
        f * (ut * ut + ux * ux)
        + 2.0 * g * u * ut
        + (g * v - params.g_t) * u * u
        + 2.0 * h * ux * ut
    )
    return 0.5 * snap.integrate(bracket)


def dissipation_F(
    snap: FieldSnapshot,
    params: MultiplierParams,
    profile: DampingProfile,
    spec: PhiSpec,
) -> float:
    """Dissipation functional paired with the Lyapunov functional:
    d(lyapunov_E)/dt + dissipation_F = 0 along exact trajectories.

    Five terms; g is linear so g_tt = 0, and the pure-divergence term
    integrates to +h(t,0) u_x(t,0)^2 / 2 via the boundary (it vanishes for
    even whole-line data where u_x(t,0) = 0).
    """
    hi = snap.hi
    u = snap.u[:hi]
    ut = snap.u_t[:hi]
    ux = spatial_derivative(u, snap.dx, snap.whole_line)
    f, g, h, x = _weights(snap, params, spec)
    t = snap.t
    v = evaluate(profile, x)
    f_t = params.f_t(t)
    h_x = params.eps3 * (1.0 + t) * phi_prime(spec, x)
    h_t = params.eps3 * phi(spec, x)
    total = 0.5 * snap.integrate((2.0 * f * v - f_t - 2.0 * g + h_x) * ut * ut)
    total += 0.5 * snap.integrate((2.0 * g - f_t + h_x) * ux * ux)
    total += 0.5 * snap.integrate((0.0 - params.g_t * v) * u * u)
    total += snap.integrate((h * v - h_t) * ux * ut)
    if not snap.whole_line:
        h0 = params.eps3 * (1.0 + t) * phi(spec, 0.0)
        total += 0.5 * h0 * ux[0] ** 2
    return total


def lyapunov_combo(
    snap: FieldSnapshot,
    params: MultiplierParams,
    spec: PhiSpec,
) -> float:
    """The bounded three-term combination f E + g (u, u_t) + 2 (h u_x, u_t)."""
    hi = snap.hi
    u = snap.u[:hi]
    ut = snap.u_t[:hi]
    ux = spatial_derivative(u, snap.dx, snap.whole_line)
    f, g, h, _ = _weights(snap, params, spec)
    e = 0.5 * snap.integrate(ut * ut + ux * ux)
    return (
        f * e
        + g * snap.integrate(u * ut)
        + 2.0 * snap.integrate(h * ux * ut)
    )


@dataclass(frozen=True)
class WeightedDataNorm:
    """L1 norm of V u0 + u1 with weight sqrt(1+x), and its square."""

    value: float

    @property
    def squared(self) -> float:
        return self.value * self.value


def weighted_source_norm(
    u0: np.ndarray,
    u1: np.ndarray,
    x: np.ndarray,
    profile: DampingProfile,
    dx: float,
    whole_line: bool = False,
) -> WeightedDataNorm:
    """Weighted norm of the accumulated-equation source V u0 + u1,
    integrated over the data support (compact, so always finite)."""
    v = evaluate(profile, x)
    integrand = np.sqrt(1.0 + x) * np.abs(v * u0 + u1)
    factor = 2.0 if whole_line else 1.0
    return WeightedDataNorm(factor * trapezoid(integrand, dx))


def budget_lhs(snap: FieldSnapshot) -> float:
    """Left side of the accumulated-solution budget at this sample:
    ||u||^2 / 2 + ||w_x||^2 / 4 + accumulated damped mass."""
    hi = snap.hi
    u = snap.u[:hi]
    u_l2 = snap.integrate(u * u)
    if snap.w is None:
        raise ValueError("snapshot carries no accumulated w")
    wx = spatial_derivative(snap.w[:hi], snap.dx, snap.whole_line)
    return 0.5 * u_l2 + 0.25 * snap.integrate(wx * wx) + snap.damped_mass


def budget_rhs(
    u0: np.ndarray,
    u1: np.ndarray,
    x: np.ndarray,
    profile: DampingProfile,
    dx: float,
    whole_line: bool = False,
) -> float:
    """Right side of the budget: ||u0||^2 / 2 + weighted source norm squared."""
    factor = 2.0 if whole_line else 1.0
    u0_l2 = factor * trapezoid(u0 * u0, dx)
    norm = weighted_source_norm(u0, u1, x, profile, dx, whole_line)
    return 0.5 * u0_l2 + norm.squared


@dataclass
class BudgetReport:
    t: np.ndarray
    lhs: np.ndarray
    rhs: float
    rel_tol: float
    passed: bool
    min_margin: float


def check_budget(
    t: np.ndarray, lhs: np.ndarray, rhs: float, rel_tol: float = 1e-6
) -> BudgetReport:
    """Pass iff lhs <= rhs * (1 + rel_tol) at every sample."""
    margin = rhs - lhs
    passed = bool(np.all(lhs <= rhs * (1.0 + rel_tol)))
    return BudgetReport(t, lhs, rhs, rel_tol, passed, float(np.min(margin)))
