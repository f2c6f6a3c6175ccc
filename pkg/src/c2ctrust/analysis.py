"""Trust-dynamics shape classification and the windowed-variance oscillation detector."""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

# reported in place of an infinite variance ratio
RATIO_CAP = 1e6


class Shape(str, enum.Enum):
    MONOTONE_DECREASE = "MonotoneDecrease"
    SPIKE_THEN_DECREASE = "SpikeThenDecrease"
    SPIKE_THEN_PLATEAU = "SpikeThenPlateau"
    OSCILLATING = "Oscillating"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class DynamicsThresholds:
    window: int = 10
    kappa: float = 2.0
    spike_window: int = 10
    spike_factor: float = 1.5
    # slope tolerance as a fraction of the pre-attack attacker mean per `slope_span` ticks
    slope_rel: float = 0.10
    slope_span: int = 30

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DynamicsVerdict:
    shape: Shape
    post_attack_slope: float
    peak_value: float
    peak_tick: int
    variance_ratio: float
    pre_attack_mean: float
    oscillating: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["shape"] = self.shape.value
        return d


def windowed_variance(series, window: int) -> np.ndarray:
    """Sliding sample variance (divisor ``window - 1``).

    Entry ``j`` covers ticks ``j .. j + window - 1``, i.e. it is aligned to the
    window's last tick ``j + window - 1``. 2-D input is treated column-wise.
    """
    x = np.asarray(series, dtype=float)
    if window < 2:
        raise ValueError(f"window must be >= 2, got {window}")
    if x.shape[0] < window:
        raise ValueError(f"window too large: {window} > series length {x.shape[0]}")
    return sliding_window_view(x, window, axis=0).var(axis=-1, ddof=1)


def windowed_residual_variance(series, window: int) -> np.ndarray:
    """Sliding variance around a per-window least-squares line (divisor ``window - 2``).

    A steady rise or decay contributes nothing; only wobble around the local
    trend remains. Same alignment as :func:`windowed_variance`.
    """
    x = np.asarray(series, dtype=float)
    if window < 3:
        raise ValueError(f"window must be >= 3 to fit a line, got {window}")
    if x.shape[0] < window:
        raise ValueError(f"window too large: {window} > series length {x.shape[0]}")
    v = sliding_window_view(x, window, axis=0)
    u = np.arange(window) - (window - 1) / 2.0
    slope = (v * u).sum(axis=-1) / (u * u).sum()
    resid = v - v.mean(axis=-1, keepdims=True) - slope[..., None] * u
    return (resid**2).sum(axis=-1) / (window - 2)


def _cohort_curve(series, window: int, detrend: bool) -> np.ndarray:
    fn = windowed_residual_variance if detrend else windowed_variance
    v = fn(series, window)
    # per-node input: average the per-node variances across the cohort
    return v.mean(axis=1) if v.ndim == 2 else v


def detect_oscillation(
    attacker_series,
    normal_series,
    attack_tick: int,
    window: int = 10,
    kappa: float = 2.0,
    detrend: bool = True,
) -> tuple[bool, float]:
    """Flag attackers whose post-attack trust wobbles more than normal users'.

    Each argument is either a cohort-mean series (1-D) or a per-node trust
    matrix (ticks x nodes). Compares the typical (median) windowed variance
    over the windows lying entirely after ``attack_tick`` and returns
    ``(attacker > kappa * normal, attacker / normal)``. The median keeps a
    one-off transient such as a spike from counting as sustained wobble.

    Per-node input is what makes the test informative: the two cohort means
    of a run are tied by the unit total of trust, so their variances always
    differ by a fixed factor. With ``detrend`` the variance is taken around
    each window's linear trend so a steady decay is not mistaken for
    oscillation.
    """
    a = np.asarray(attacker_series, dtype=float)
    b = np.asarray(normal_series, dtype=float)
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"series lengths differ: {a.shape[0]} vs {b.shape[0]}")
    if attack_tick < 0 or attack_tick + window > a.shape[0]:
        raise ValueError(f"need attack_tick + window <= length, got {attack_tick} + {window} > {a.shape[0]}")
    va = float(np.median(_cohort_curve(a[attack_tick:], window, detrend)))
    vb = float(np.median(_cohort_curve(b[attack_tick:], window, detrend)))
    # round-off on exactly flat or linear windows is not variance
    floor = (1e-9 * max(np.abs(a[attack_tick:]).max(), np.abs(b[attack_tick:]).max())) ** 2
    va = va if va > floor else 0.0
    vb = vb if vb > floor else 0.0
    if va <= 0 and vb <= 0:
        return False, 0.0
    ratio = RATIO_CAP if vb <= 0 else min(float(va / vb), RATIO_CAP)
    return bool(va > kappa * vb), ratio


def trend_slope(series, from_tick: int, to_tick: int) -> float:
    """OLS slope of value against tick over the closed range ``[from_tick, to_tick]``."""
    y = np.asarray(series, dtype=float)
    if to_tick <= from_tick + 1:
        raise ValueError(f"need to_tick > from_tick + 1, got [{from_tick}, {to_tick}]")
    if from_tick < 0 or to_tick >= len(y):
        raise ValueError(f"range [{from_tick}, {to_tick}] out of bounds for length {len(y)}")
    x = np.arange(from_tick, to_tick + 1, dtype=float)
    seg = y[from_tick : to_tick + 1]
    xc = x - x.mean()
    return float((xc * (seg - seg.mean())).sum() / (xc * xc).sum())


def classify_dynamics(
    attacker_means,
    normal_means,
    attack_tick: int,
    thresholds: DynamicsThresholds = DynamicsThresholds(),
) -> DynamicsVerdict:
    """Label the attacker trust trajectory after the attack starts.

    Either argument may be a per-node matrix; its row mean is then the cohort
    series while the oscillation test uses the per-node columns.

    Order of tests: oscillation, then a spike within ``spike_window`` ticks
    of the attack above ``spike_factor`` times the pre-attack mean (followed
    by decrease or plateau depending on the late slope), then a decrease over
    both the whole post-attack range and its last ``slope_span`` ticks.
    """
    th = thresholds
    a_raw = np.asarray(attacker_means, dtype=float)
    n_raw = np.asarray(normal_means, dtype=float)
    a = a_raw.mean(axis=1) if a_raw.ndim == 2 else a_raw
    end = len(a) - 1
    if attack_tick < 1 or attack_tick + max(th.window, th.spike_window) > end:
        raise ValueError(f"series of length {len(a)} does not cover attack tick {attack_tick} plus its windows")

    oscillating, ratio = detect_oscillation(a_raw, n_raw, attack_tick, th.window, th.kappa)

    pre = float(a[max(0, attack_tick - th.spike_window) : attack_tick].mean())
    hi = min(end, attack_tick + th.spike_window)
    peak_tick = attack_tick + int(np.argmax(a[attack_tick : hi + 1]))
    peak = float(a[peak_tick])
    late_from = max(attack_tick, end - th.slope_span)
    late_slope = trend_slope(a, late_from, end) if end - late_from >= 2 else 0.0
    full_slope = trend_slope(a, attack_tick, end)
    eps = th.slope_rel * abs(pre) / th.slope_span

    if oscillating:
        shape = Shape.OSCILLATING
    elif peak > th.spike_factor * pre:
        if late_slope < -eps:
            shape = Shape.SPIKE_THEN_DECREASE
        elif abs(late_slope) <= eps:
            shape = Shape.SPIKE_THEN_PLATEAU
        else:
            shape = Shape.INCONCLUSIVE
    elif full_slope < -eps and late_slope < -eps:
        shape = Shape.MONOTONE_DECREASE
    else:
        shape = Shape.INCONCLUSIVE
    return DynamicsVerdict(shape, late_slope, peak, peak_tick, ratio, pre, oscillating)


# qualitative outcome reported for each threat model
EXPECTED_SHAPES = {
    "A": Shape.MONOTONE_DECREASE,
    "B": Shape.SPIKE_THEN_DECREASE,
    "C": Shape.SPIKE_THEN_PLATEAU,
    "D": Shape.SPIKE_THEN_PLATEAU,
    "E": Shape.OSCILLATING,
    "F": Shape.OSCILLATING,
}
EXPECTED_DETECTABLE = {"A": "detectable", "B": "detectable", "C": "not detectable", "D": "not detectable",
                       "E": "oscillating", "F": "oscillating"}
