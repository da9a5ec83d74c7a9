"""Decay-rate estimation and the certified decay-shape checks.

The decay exponent is read off a least-squares line through
(log(1+t), log E) over log-spaced subsamples of the fit window; the
(1+t) shift matches the time weights used throughout.  The weighted
boundedness check and the quadratic-inequality check turn the closing
estimates of the analysis into trajectory-wise assertions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .multipliers import MultiplierParams

__all__ = [
    "RateFit",
    "fit_decay_rate",
    "BoundedWeightedEnergy",
    "bounded_weighted_energy",
    "QuadraticBoundReport",
    "quadratic_bound_check",
]


@dataclass(frozen=True)
class RateFit:
    alpha: float
    log_intercept: float
    window: tuple[float, float]
    rms_residual: float
    sample_count: int
    envelope_alpha: float | None = None

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "log_intercept": self.log_intercept,
            "window": list(self.window),
            "rms_residual": self.rms_residual,
            "sample_count": self.sample_count,
            "envelope_alpha": self.envelope_alpha,
        }


def _log_spaced_subsample(t: np.ndarray, n_target: int = 200) -> np.ndarray:
    """Indices of samples closest to a log-spaced set of (1+t) values.
    Keeps every sample when there are fewer than the target."""
    if t.size <= n_target:
        return np.arange(t.size)
    targets = np.geomspace(1.0 + t[0], 1.0 + t[-1], n_target)
    idx = np.searchsorted(1.0 + t, targets)
    return np.unique(np.clip(idx, 0, t.size - 1))


def _local_maxima(y: np.ndarray) -> np.ndarray:
    if y.size < 3:
        return np.array([], dtype=int)
    interior = (y[1:-1] >= y[:-2]) & (y[1:-1] >= y[2:])
    return np.nonzero(interior)[0] + 1


def fit_decay_rate(
    t: np.ndarray, e: np.ndarray, window: tuple[float, float]
) -> RateFit:
    """Fit E ~ C (1+t)^(-alpha) over the window.

    Requires strictly positive energies inside the window (a zero sample
    means the trace hit the rounding floor; shrink the window).  An
    envelope fit through local maxima is reported alongside because the
    raw energy can oscillate as the packet crosses the undamped zone.
    """
    t = np.asarray(t, dtype=float)
    e = np.asarray(e, dtype=float)
    lo, hi = window
    if lo < t[0] or hi > t[-1]:
        raise ValueError("fit window must lie inside the trace span")
    mask = (t >= lo) & (t <= hi)
    tw, ew = t[mask], e[mask]
    if tw.size < 8:
        raise ValueError("need at least 8 samples in the fit window")
    if np.any(ew <= 0.0):
        raise ValueError("nonpositive energy in fit window; shrink the window")

    idx = _log_spaced_subsample(tw)
    lt = np.log(1.0 + tw[idx])
    le = np.log(ew[idx])
    slope, intercept = np.polyfit(lt, le, 1)
    resid = le - (slope * lt + intercept)
    rms = float(np.sqrt(np.mean(resid * resid)))

    env_alpha = None
    peaks = _local_maxima(ew)
    if peaks.size >= 8:
        lt_p = np.log(1.0 + tw[peaks])
        le_p = np.log(ew[peaks])
        env_slope, _ = np.polyfit(lt_p, le_p, 1)
        env_alpha = float(-env_slope)

    return RateFit(
        alpha=float(-slope),
        log_intercept=float(intercept),
        window=(float(lo), float(hi)),
        rms_residual=rms,
        sample_count=int(idx.size),
        envelope_alpha=env_alpha,
    )


@dataclass(frozen=True)
class BoundedWeightedEnergy:
    sup: float
    first: float
    last: float

    @property
    def ratio(self) -> float:
        return self.last / self.first if self.first != 0.0 else float("inf")


def bounded_weighted_energy(
    t: np.ndarray, e: np.ndarray, exponent: float, window: tuple[float, float]
) -> BoundedWeightedEnergy:
    """sup and first/last trend of E(t) (1+t)^exponent over the window."""
    t = np.asarray(t, dtype=float)
    e = np.asarray(e, dtype=float)
    mask = (t >= window[0]) & (t <= window[1])
    if not mask.any():
        raise ValueError("empty window")
    weighted = e[mask] * (1.0 + t[mask]) ** exponent
    return BoundedWeightedEnergy(
        sup=float(np.max(weighted)),
        first=float(weighted[0]),
        last=float(weighted[-1]),
    )


@dataclass
class QuadraticBoundReport:
    c_est: float
    t0: float
    passed: bool
    max_violation: float      # max of sqrt(E) - bound (negative when passing)
    worst_t: float


def quadratic_bound_check(
    t: np.ndarray,
    e: np.ndarray,
    lyap_combo: np.ndarray,
    u_l2: np.ndarray,
    params: MultiplierParams,
    t0: float,
) -> QuadraticBoundReport:
    """Check the closing quadratic estimate on sqrt(E).

    The empirical constant is taken from the bounded three-term
    combination with its sign-indefinite cross term replaced by its
    Schwarz bound g ||u|| ||u_t||  (||u_t|| <= sqrt(2E) from the trace):
    C = max over t >= t0 of [combo + g sqrt(2 E u_l2)].  The certified
    shape then requires, at every sample past t0,
    sqrt(E) <= [C g + sqrt(C^2 g^2 + 4 C f)] / (2 f).
    """
    t = np.asarray(t, dtype=float)
    mask = t >= t0
    if not mask.any():
        raise ValueError("no samples at or past t0")
    tm = t[mask]
    em = np.asarray(e, dtype=float)[mask]
    combo = np.asarray(lyap_combo, dtype=float)[mask]
    ul2 = np.asarray(u_l2, dtype=float)[mask]
    g = params.g(tm)
    f = params.f(tm)
    c_est = float(np.max(combo + g * np.sqrt(np.maximum(2.0 * em * ul2, 0.0))))
    c_est = max(c_est, 0.0)
    bound = (c_est * g + np.sqrt(c_est**2 * g**2 + 4.0 * c_est * f)) / (2.0 * f)
    violation = np.sqrt(np.maximum(em, 0.0)) - bound
    i = int(np.argmax(violation))
    return QuadraticBoundReport(
        c_est=c_est,
        t0=float(t0),
        passed=bool(np.all(violation <= 0.0)),
        max_violation=float(violation[i]),
        worst_t=float(tm[i]),
    )
