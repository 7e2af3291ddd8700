"""Post-processing: Hurst exponent, wealth aggregates and return histograms."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from .decision import Profile
from .errors import InsufficientDataError

MIN_HURST_LENGTH = 256
MIN_HISTOGRAM_SAMPLES = 100


@dataclass(frozen=True)
class HurstEstimate:
    h: float
    stderr: float
    window_range: tuple[int, int]
    h_uncorrected: float
    windows: tuple[int, ...]
    rs: tuple[float, ...]
    two_slope_gain: float  # share of residual removed by a two-segment fit


def expected_rs(n: int) -> float:
    """Anis-Lloyd expectation of R/S for ``n`` i.i.d. normal samples, with Peters' factor."""
    i = np.arange(1, n)
    ratio = math.exp(math.lgamma((n - 1) / 2) - math.lgamma(n / 2)) / math.sqrt(math.pi)
    return (n - 0.5) / n * ratio * float(np.sum(np.sqrt((n - i) / i)))


def rescaled_range(x: np.ndarray, window: int) -> float:
    """Mean R/S over the disjoint windows of length ``window``; nan if all are flat."""
    k = len(x) // window
    seg = x[: k * window].reshape(k, window)
    dev = np.cumsum(seg - seg.mean(axis=1, keepdims=True), axis=1)
    r = dev.max(axis=1) - dev.min(axis=1)
    s = seg.std(axis=1)
    ok = s > 0
    if not ok.any():
        return float("nan")
    return float(np.mean(r[ok] / s[ok]))


def _fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Slope, slope standard error and residual sum of squares."""
    coef, res, *_ = np.polyfit(x, y, 1, full=True)
    rss = float(res[0]) if len(res) else 0.0
    dof = len(x) - 2
    if dof <= 0:
        return float(coef[0]), float("nan"), rss
    sxx = float(np.sum((x - x.mean()) ** 2))
    return float(coef[0]), math.sqrt(rss / dof / sxx), rss


def _two_slope_gain(x: np.ndarray, y: np.ndarray, rss_one: float) -> float:
    if len(x) < 4 or rss_one <= 0:
        return 0.0
    best = rss_one
    for cut in range(2, len(x) - 1):
        rss = _fit(x[:cut], y[:cut])[2] + _fit(x[cut:], y[cut:])[2]
        best = min(best, rss)
    return 1.0 - best / rss_one


def hurst_from_returns(returns, min_window: int = 16) -> HurstEstimate:
    """Bias-corrected rescaled-range Hurst exponent of an increment series.

    Windows are powers of two from ``min_window`` to ``len / 4``. The slope of
    log(R/S) - log(E[R/S]) is added to 0.5, which removes the small-window
    upward bias of the raw R/S slope.
    """
    x = np.asarray(returns, dtype=np.float64)
    windows, rs = [], []
    w = min_window
    while w <= len(x) // 4:
        v = rescaled_range(x, w)
        if math.isfinite(v) and v > 0:
            windows.append(w)
            rs.append(v)
        w *= 2
    if len(windows) < 2:
        raise InsufficientDataError(f"R/S needs at least two usable window sizes, series length {len(x)}")
    lw = np.log(np.array(windows, dtype=np.float64))
    lrs = np.log(np.array(rs))
    raw_slope = _fit(lw, lrs)[0]
    corrected = lrs - np.log([expected_rs(w) for w in windows])
    slope, stderr, rss = _fit(lw, corrected)
    return HurstEstimate(
        h=0.5 + slope,
        stderr=stderr,
        window_range=(windows[0], windows[-1]),
        h_uncorrected=raw_slope,
        windows=tuple(windows),
        rs=tuple(rs),
        two_slope_gain=_two_slope_gain(lw, corrected, rss),
    )


def log_returns(series) -> np.ndarray:
    s = np.asarray(series, dtype=np.float64)
    if np.any(s <= 0):
        raise ValueError("log-returns need a strictly positive series")
    return np.diff(np.log(s))


def hurst_rs(series, min_window: int = 16) -> HurstEstimate:
    """Hurst exponent of the log-returns of an index series (length >= 256)."""
    if len(series) < MIN_HURST_LENGTH:
        raise InsufficientDataError(f"Hurst estimate needs >= {MIN_HURST_LENGTH} values, got {len(series)}")
    return hurst_from_returns(log_returns(series), min_window)


@dataclass(frozen=True)
class WealthStats:
    mean: float
    sd: float
    count: int


def profile_wealth_stats(profiles, wealth) -> dict[Profile, WealthStats]:
    """Mean and (population) sd of wealth per profile; empty profiles are omitted."""
    profiles = np.asarray(profiles)
    wealth = np.asarray(wealth, dtype=np.float64)
    out = {}
    for p in Profile:
        w = wealth[profiles == int(p)]
        if len(w):
            out[p] = WealthStats(float(w.mean()), float(w.std()), int(len(w)))
    return out


@dataclass(frozen=True)
class HistogramSummary:
    edges: np.ndarray
    counts: np.ndarray
    mean: float
    sd: float
    n: int
    gaussian_r2: float
    fit_center: float
    fit_width: float
    profile: Profile | None = None


def _gauss(x, a, mu, s):
    return a * np.exp(-0.5 * ((x - mu) / s) ** 2)


def sturges_bins(n: int) -> int:
    return int(math.ceil(math.log2(n))) + 1


def return_histogram(returns, profile: Profile | None = None) -> HistogramSummary:
    """Sturges-binned histogram with a least-squares Gaussian fit to the bin counts."""
    x = np.asarray(returns, dtype=np.float64)
    x = x[np.isfinite(x)]
    n = len(x)
    if n < MIN_HISTOGRAM_SAMPLES:
        raise InsufficientDataError(f"histogram needs >= {MIN_HISTOGRAM_SAMPLES} samples, got {n}")
    counts, edges = np.histogram(x, bins=sturges_bins(n))
    centers = 0.5 * (edges[:-1] + edges[1:])
    mean, sd = float(x.mean()), float(x.std())
    width = edges[1] - edges[0]
    if sd > 0 and width > 0:
        p0 = (counts.max(), mean, sd)
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", OptimizeWarning)  # covariance is not used
                params, _ = curve_fit(_gauss, centers, counts, p0=p0, maxfev=5000)
        except RuntimeError:
            params = (n * width / (sd * math.sqrt(2 * math.pi)), mean, sd)
        pred = _gauss(centers, *params)
        ss_tot = float(np.sum((counts - counts.mean()) ** 2))
        r2 = 1.0 - float(np.sum((counts - pred) ** 2)) / ss_tot if ss_tot > 0 else 1.0
        center, fwidth = float(params[1]), abs(float(params[2]))
    else:
        r2, center, fwidth = 1.0, mean, 0.0
    return HistogramSummary(edges, counts, mean, sd, n, r2, center, fwidth, profile)


def interdecile_range(x) -> float:
    q10, q90 = np.quantile(np.asarray(x, dtype=np.float64), [0.1, 0.9])
    return float(q90 - q10)


def mean_is_symmetric(mean: float, sd: float, n: int) -> bool:
    """``|mean| < 2 sd / sqrt(n)``."""
    return n > 0 and abs(mean) < 2.0 * sd / math.sqrt(n)
