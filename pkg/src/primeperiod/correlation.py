"""Autocorrelation of telegraph signals, the random-phase model curve, and
period estimation from autocorrelation series."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping

import numpy as np
from scipy.signal import find_peaks

from .csvio import write_csv
from .errors import (
    NoLinearSegmentError,
    NoMinimumError,
    TooShortInputError,
    WindowTooSmallError,
    ZeroVarianceError,
)
from .spectrum import dominant_period
from .telegraph import ModelTelegraphParams, TelegraphSignal, simulate_model_telegraph

FIRST_MINIMUM = "first-minimum"
SPECTRAL = "spectral"
METHODS = (FIRST_MINIMUM, SPECTRAL)

NORMALIZATION_EPS = 1e-9
DISCREPANCY_LIMIT = 0.25


@dataclass(frozen=True)
class AutocorrelationSeries:
    lags: np.ndarray
    values: np.ndarray
    window: tuple[int, int]
    variance_at_zero: float
    normalized: bool = True
    # standard error per lag, only for Monte Carlo ensembles
    stderr: np.ndarray | None = None

    def __len__(self):
        return int(np.asarray(self.values).size)

    @property
    def max_lag(self) -> int:
        return int(self.lags[-1])


@dataclass(frozen=True)
class PeriodEstimate:
    T_hat: float
    uncertainty: float
    method: str
    T0: float
    scale_used: float


def autocorrelation(
    signal: TelegraphSignal, window_start: int, window_end: int, max_lag: int
) -> AutocorrelationSeries:
    """Windowed autocorrelation <v(n)v(n+t)> - <v(n)><v(n+t)>, normalized at t = 0.

    For each lag t the averages run over every n with both n and n + t
    strictly inside (window_start, window_end); the two means are taken over
    the same index sets as the product.
    """
    lo, hi = window_start + 1, window_end - 1
    if lo < signal.start_index or hi > signal.end_index:
        raise ValueError(
            f"window ({window_start}, {window_end}) exceeds signal domain "
            f"[{signal.start_index}, {signal.end_index}]"
        )
    length = hi - lo + 1
    if length < 2 or max_lag < 0 or max_lag >= length / 2:
        raise WindowTooSmallError(
            f"max_lag {max_lag} must be below half the window length ({length} points)"
        )
    v = signal.values[lo - signal.start_index : hi - signal.start_index + 1].astype(float)
    cov = np.empty(max_lag + 1)
    for tau in range(max_lag + 1):
        a, b = v[: length - tau], v[tau:]
        cov[tau] = np.mean(a * b) - a.mean() * b.mean()
    if cov[0] <= 1e-15:
        raise ZeroVarianceError("signal is constant on the window")
    return AutocorrelationSeries(
        lags=np.arange(max_lag + 1),
        values=cov / cov[0],
        window=(int(window_start), int(window_end)),
        variance_at_zero=float(cov[0]),
    )


def model_autocorrelation_piece(q: float, T: float, tau, n: int):
    """The n-th linear piece, valid on (n-1)T <= tau < nT."""
    r = 2.0 * q - 1.0
    s = np.asarray(tau, dtype=float) / T
    return (n - s) * r ** (n - 1) + (s - (n - 1)) * r**n


def model_autocorrelation(q: float, T: float, tau):
    """Autocorrelation of the random-phase telegraph with persistence ``q``.

    Piecewise linear in tau, with knot values (2q - 1)**n at tau = nT.
    Accepts a scalar or an array of lags.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    tau_arr = np.asarray(tau, dtype=float)
    if np.any(tau_arr < 0):
        raise ValueError("tau must be nonnegative")
    n = np.floor(tau_arr / T).astype(np.int64) + 1
    r = 2.0 * q - 1.0
    s = tau_arr / T
    out = (n - s) * np.power(r, n - 1) + (s - (n - 1)) * np.power(r, n)
    return float(out) if out.ndim == 0 else out


def ensemble_model_acf(
    params: ModelTelegraphParams,
    flip_probability: float,
    realizations: int,
    max_lag: int,
    seed: int,
) -> AutocorrelationSeries:
    """Monte Carlo ACF of the model telegraph, with per-lag standard errors.

    Realization i uses seed ``seed + i``. Each realization contributes the
    position average of v(n)v(n+tau); the ensemble mean of those averages is
    reported with its standard error. No mean is subtracted, so a signal that
    never flips gives C = 1 at every lag.
    """
    if realizations < 100:
        raise ValueError("need at least 100 realizations")
    if not 0 <= max_lag < params.length:
        raise WindowTooSmallError("max_lag must be below the realization length")
    paths = np.empty((realizations, params.length), dtype=np.int8)
    for i in range(realizations):
        paths[i] = simulate_model_telegraph(params, flip_probability, seed + i).values
    v = paths.astype(float)
    per_real = np.empty((realizations, max_lag + 1))
    for tau in range(max_lag + 1):
        per_real[:, tau] = np.mean(v[:, : params.length - tau] * v[:, tau:], axis=1)
    mean = per_real.mean(axis=0)
    se = per_real.std(axis=0, ddof=1) / math.sqrt(realizations)
    return AutocorrelationSeries(
        lags=np.arange(max_lag + 1),
        values=mean / mean[0],
        window=(-1, params.length),
        variance_at_zero=float(mean[0]),
        stderr=se / mean[0],
    )


def rescale(series: AutocorrelationSeries, lag_factor: float, amplitude_factor: float) -> AutocorrelationSeries:
    """Stretch the lag axis by ``lag_factor`` and multiply values by ``amplitude_factor``.

    The stretched curve is linearly re-interpolated onto integer lags
    0..floor(max_lag * lag_factor).
    """
    if lag_factor <= 0 or amplitude_factor <= 0:
        raise ValueError("rescale factors must be positive")
    src = np.asarray(series.lags, dtype=float) * lag_factor
    target = np.arange(int(math.floor(src[-1] + 1e-9)) + 1)
    values = np.interp(target, src, series.values) * amplitude_factor
    stderr = None
    if series.stderr is not None:
        stderr = np.interp(target, src, series.stderr) * amplitude_factor
    return replace(
        series,
        lags=target,
        values=values,
        normalized=series.normalized and amplitude_factor == 1,
        stderr=stderr,
    )


def smooth(values, window: int) -> np.ndarray:
    """Centered moving average; the ends are mirror-padded (the ACF is even in tau)."""
    if window < 1 or window % 2 == 0:
        raise ValueError("smoothing window must be a positive odd integer")
    v = np.asarray(values, dtype=float)
    if window == 1:
        return v.copy()
    half = window // 2
    padded = np.pad(v, half, mode="reflect")
    return np.convolve(padded, np.ones(window) / window, mode="valid")


def recover_fundamental_period(T_hat: float, scale: float = 10.0) -> float:
    if scale <= 0:
        raise ValueError("scale must be positive")
    return math.exp(T_hat / scale)


def estimate_period(
    series: AutocorrelationSeries,
    method: str = FIRST_MINIMUM,
    smoothing_window: int = 3,
    prominence: float = 0.02,
    scale: float = 10.0,
) -> PeriodEstimate:
    """Half-period of the ACF oscillation.

    ``first-minimum`` takes the lag of the first local minimum of the
    smoothed series whose prominence exceeds ``prominence``.
    ``spectral`` halves the period of the dominant nonzero-frequency peak.
    """
    lags = np.asarray(series.lags, dtype=float)
    step = float(lags[1] - lags[0]) if lags.size > 1 else 1.0
    if method == FIRST_MINIMUM:
        s = smooth(series.values, smoothing_window)
        idx, _ = find_peaks(-s, prominence=prominence)
        if idx.size == 0:
            raise NoMinimumError(f"no local minimum with prominence > {prominence}")
        T_hat = float(lags[idx[0]])
        uncertainty = step
    elif method == SPECTRAL:
        period, resolution = dominant_period(series.values, step=step)
        if lags[-1] - lags[0] < 3 * period:
            raise TooShortInputError(
                f"spectral method needs >= 3 oscillations; lag span {lags[-1] - lags[0]:g}, period {period:.3g}"
            )
        T_hat = period / 2.0
        uncertainty = max(step, resolution / 2.0)
    else:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    return PeriodEstimate(T_hat, uncertainty, method, recover_fundamental_period(T_hat, scale), scale)


def estimates_disagree(a: PeriodEstimate, b: PeriodEstimate, limit: float = DISCREPANCY_LIMIT) -> bool:
    return abs(a.T_hat - b.T_hat) > limit * min(a.T_hat, b.T_hat)


def _r_squared(y: np.ndarray) -> tuple[float, float]:
    x = np.arange(y.size, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        return 0.0, float(slope)
    ss_res = float(np.sum((y - (slope * x + intercept)) ** 2))
    return 1.0 - ss_res / ss_tot, float(slope)


def linear_decay_endpoint(series: AutocorrelationSeries, r2_threshold: float = 0.98) -> int:
    """Last lag k of the initial linear decay.

    Grows k from 2 while a least-squares line through lags 0..k keeps
    R^2 >= ``r2_threshold`` and a negative slope; returns the last such k.
    """
    if not series.normalized:
        raise ValueError("linear_decay_endpoint needs a normalized series")
    if not 0 < r2_threshold < 1:
        raise ValueError("r2_threshold must lie in (0, 1)")
    y = np.asarray(series.values, dtype=float)
    end = None
    for k in range(2, y.size):
        r2, slope = _r_squared(y[: k + 1])
        if r2 < r2_threshold or slope >= 0:
            break
        end = k
    if end is None:
        raise NoLinearSegmentError("no linear decay segment through lags 0..2")
    return int(series.lags[end])


def to_csv(
    series: AutocorrelationSeries, path: str | Path, config: Mapping | None = None, column: str = "c"
) -> Path:
    return write_csv(path, ["tau", column], [series.lags.tolist(), series.values.tolist()], config)
