"""Damping coefficient families on the half line.

A profile is a continuous, nonnegative coefficient V(x) for x >= 0.  The
kinds that claim a critical 1/(1+x) tail carry the tail constants with
them; structural constants needed downstream (positivity interval, sup on
the near field, the combined constant V*) are derived by grid scanning.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ProfileKind",
    "DampingProfile",
    "ProfileConstants",
    "ClauseResult",
    "ValidationReport",
    "evaluate",
    "validate_assumption_A",
    "derive_constants",
]


class ProfileKind(str, enum.Enum):
    CRITICAL_TAIL_WITH_DEAD_ZONE = "critical-tail-with-dead-zone"
    PURE_CRITICAL = "pure-critical"
    CONSTANT = "constant"
    ZERO = "zero"


def _hermite_ramp(s: np.ndarray) -> np.ndarray:
    """Monotone cubic bridge 0 -> 1 on [0, 1] with zero end slopes."""
    return s * s * (3.0 - 2.0 * s)


@dataclass(frozen=True)
class DampingProfile:
    """Parametric damping coefficient V(x), immutable after construction.

    ``amplitude`` is the tail coefficient for the critical kinds (the
    common value of the lower/upper tail constants) and the constant
    level for the constant kind.  ``l2`` is where the critical tail
    bound starts; ``dead_zone_end`` is where V stops being identically
    zero (dead-zone kind only).
    """

    kind: ProfileKind
    amplitude: float = 0.0
    l2: float = 0.0
    dead_zone_end: float = 0.0

    def __post_init__(self):
        if self.kind in (ProfileKind.PURE_CRITICAL, ProfileKind.CONSTANT):
            if self.amplitude <= 0:
                raise ValueError(f"{self.kind.value} profile needs amplitude > 0")
        if self.kind is ProfileKind.CRITICAL_TAIL_WITH_DEAD_ZONE:
            if self.amplitude <= 0:
                raise ValueError("dead-zone profile needs a positive tail amplitude")
            if not 0.0 <= self.dead_zone_end < self.l2:
                raise ValueError("need 0 <= dead_zone_end < l2")
        if self.l2 < 0:
            raise ValueError("l2 must be nonnegative")

    # Declared tail constants; the critical kinds are built so the lower
    # and upper constants coincide.
    @property
    def v0(self) -> float:
        return self.amplitude

    @property
    def v1(self) -> float:
        return self.amplitude

    def __call__(self, x):
        return evaluate(self, x)


def evaluate(profile: DampingProfile, x):
    """Evaluate V at x (scalar or array).  Negative x reads V(|x|)."""
    x = np.abs(np.asarray(x, dtype=float))
    kind = profile.kind
    if kind is ProfileKind.ZERO:
        out = np.zeros_like(x)
    elif kind is ProfileKind.CONSTANT:
        out = np.full_like(x, profile.amplitude)
    elif kind is ProfileKind.PURE_CRITICAL:
        out = profile.amplitude / (1.0 + x)
    else:  # critical tail with dead zone
        d, l2 = profile.dead_zone_end, profile.l2
        out = np.zeros_like(x)
        tail = x >= l2
        out[tail] = profile.amplitude / (1.0 + x[tail])
        ramp = (x > d) & (x < l2)
        s = (x[ramp] - d) / (l2 - d)
        out[ramp] = profile.amplitude / (1.0 + l2) * _hermite_ramp(s)
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class ProfileConstants:
    """Structural constants derived from a profile satisfying the tail bounds."""

    v0: float
    v1: float
    l1: float
    l2: float
    v_m: float
    v_big: float          # sup of V on [0, l2]
    v_star: float         # max{(1 + l2) * v_big, v1}

    def __post_init__(self):
        if self.l2 > 0 and not 0.0 <= self.l1 < self.l2:
            raise ValueError("need 0 <= l1 < l2")
        if self.v_m <= 0:
            raise ValueError("v_m must be positive")
        if self.v_big < self.v_m:
            raise ValueError("v_big must dominate v_m")
        if self.v_star < self.v1:
            raise ValueError("v_star must dominate v1")


@dataclass
class ClauseResult:
    name: str
    passed: bool
    worst_x: float | None = None
    worst_margin: float | None = None


@dataclass
class ValidationReport:
    clauses: list[ClauseResult] = field(default_factory=list)

    @property
    def structural_ok(self) -> bool:
        """All clauses except the strength clause v0 > 2."""
        return all(c.passed for c in self.clauses if c.name != "v0 > 2")

    @property
    def all_ok(self) -> bool:
        return all(c.passed for c in self.clauses)

    def clause(self, name: str) -> ClauseResult:
        for c in self.clauses:
            if c.name == name:
                return c
        raise KeyError(name)


def validate_assumption_A(
    profile: DampingProfile, sample_resolution: float, x_max: float
) -> ValidationReport:
    """Sample-check the structural hypotheses on V.

    Checked clauses: nonnegativity, continuity (sampled increments at the
    given resolution), the two-sided critical tail bound for x >= l2, and
    separately the strength clause v0 > 2.  Profiles with v0 <= 2 are
    legal objects (used to probe the sub-critical conjecture) but fall
    outside the fast-decay hypothesis, so that clause is reported on its
    own.  Everything is sampling-based at the given resolution.
    """
    if sample_resolution <= 0:
        raise ValueError("sample_resolution must be positive")
    if x_max <= profile.l2:
        raise ValueError("x_max must exceed l2")

    x = np.arange(0.0, x_max + sample_resolution, sample_resolution)
    v = evaluate(profile, x)
    report = ValidationReport()

    i = int(np.argmin(v))
    report.clauses.append(
        ClauseResult("V >= 0", bool(v[i] >= 0.0), float(x[i]), float(v[i]))
    )

    jumps = np.abs(np.diff(v))
    # Continuity proxy: increments at resolution h should be O(h) with a
    # Lipschitz-type constant; an O(1) jump at fine h flags a discontinuity.
    cont_tol = 10.0 * sample_resolution * max(1.0, float(np.max(v, initial=0.0)))
    j = int(np.argmax(jumps)) if jumps.size else 0
    worst_jump = float(jumps[j]) if jumps.size else 0.0
    report.clauses.append(
        ClauseResult("continuity", worst_jump <= cont_tol, float(x[j]), worst_jump)
    )

    tail = x >= profile.l2
    xt, vt = x[tail], v[tail]
    scaled = (1.0 + xt) * vt
    lo = scaled - profile.v0
    i = int(np.argmin(lo))
    report.clauses.append(
        ClauseResult("tail lower bound", bool(lo[i] >= -1e-12), float(xt[i]), float(lo[i]))
    )
    hi = profile.v1 - scaled
    i = int(np.argmin(hi))
    report.clauses.append(
        ClauseResult("tail upper bound", bool(hi[i] >= -1e-12), float(xt[i]), float(hi[i]))
    )

    report.clauses.append(
        ClauseResult("v0 > 2", profile.v0 > 2.0, None, profile.v0 - 2.0)
    )
    return report


def derive_constants(
    profile: DampingProfile, sample_resolution: float
) -> ProfileConstants:
    """Derive (l1, v_m, v_big, v_star) by grid scan on [0, l2].

    l1 is found by scanning left from l2 while V stays strictly positive;
    v_m is half the sampled minimum on [l1, l2].  Refuses profiles with
    V(l2) = 0, which cannot satisfy the tail lower bound.
    """
    if sample_resolution <= 0:
        raise ValueError("sample_resolution must be positive")
    l2 = profile.l2
    if evaluate(profile, l2) <= 0.0:
        raise ValueError("V(l2) = 0 contradicts the tail lower bound")

    if l2 == 0.0:
        v_at_0 = evaluate(profile, 0.0)
        return ProfileConstants(
            v0=profile.v0,
            v1=profile.v1,
            l1=0.0,
            l2=0.0,
            v_m=0.5 * v_at_0,
            v_big=v_at_0,
            v_star=max(v_at_0, profile.v1),
        )

    n = max(2, int(np.ceil(l2 / sample_resolution)) + 1)
    x = np.linspace(0.0, l2, n)
    v = evaluate(profile, x)

    j = n - 1
    while j > 0 and v[j - 1] > 0.0:
        j -= 1
    l1 = float(x[j])
    v_m = 0.5 * float(np.min(v[j:]))
    v_big = float(np.max(v))
    return ProfileConstants(
        v0=profile.v0,
        v1=profile.v1,
        l1=l1,
        l2=l2,
        v_m=v_m,
        v_big=v_big,
        v_star=max((1.0 + l2) * v_big, profile.v1),
    )
