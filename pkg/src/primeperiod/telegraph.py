"""Two-level (+1/-1) telegraph signals on discrete grids."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .csvio import write_csv
from .errors import NonMonotoneError


@dataclass(frozen=True)
class TelegraphSignal:
    """A +/-1 signal on grid indices ``start_index, start_index + 1, ...``.

    ``grid_step`` and ``time_origin`` map a grid index ``k`` to the time
    coordinate ``time_origin + (k - start_index) * grid_step`` for signals
    sampled from continuous time; natural-number signals keep the defaults.
    """

    start_index: int
    values: np.ndarray
    grid_step: float = 1.0
    time_origin: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.int8)
        if v.ndim != 1 or v.size < 1:
            raise ValueError("telegraph signal needs at least one value")
        if not np.all(np.abs(v) == 1):
            raise ValueError("telegraph values must be +1 or -1")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return int(self.values.size)

    @property
    def index(self) -> np.ndarray:
        return np.arange(self.start_index, self.start_index + self.values.size)

    @property
    def end_index(self) -> int:
        return self.start_index + self.values.size - 1

    @property
    def change_points(self) -> np.ndarray:
        """Grid indices where the value differs from its predecessor."""
        return self.start_index + 1 + np.flatnonzero(np.diff(self.values) != 0)

    def flipped(self) -> "TelegraphSignal":
        return TelegraphSignal(self.start_index, -self.values, self.grid_step, self.time_origin)


@dataclass(frozen=True)
class ModelTelegraphParams:
    """Random-phase telegraph: events at ``n * period_T + phase``, n = 0, 1, ...

    ``phase`` of None draws a fresh Uniform[0, period_T) phase per realization.
    ``period_T`` is in time units; grid point k sits at time ``k * grid_step``.
    """

    period_T: float
    persistence_q: float = 0.25
    length: int = 200
    grid_step: float = 1.0
    phase: float | None = None

    def __post_init__(self):
        if not self.period_T > 0:
            raise ValueError("period_T must be positive")
        if not 0 <= self.persistence_q < 1:
            raise ValueError("persistence_q must lie in [0, 1)")
        if not self.grid_step > 0:
            raise ValueError("grid_step must be positive")
        if self.length < 1:
            raise ValueError("length must be >= 1")
        if self.phase is not None and not 0 <= self.phase <= self.period_T:
            raise ValueError("phase must lie in [0, period_T]")


def _check_increasing(points: np.ndarray, what: str) -> None:
    if points.size > 1 and np.any(np.diff(points) <= 0):
        raise NonMonotoneError(f"{what} must be strictly increasing")


def _sign_array(parity_counts: np.ndarray, initial_sign: int) -> np.ndarray:
    return np.where(parity_counts % 2 == 0, initial_sign, -initial_sign).astype(np.int8)


def telegraph_from_changepoints(
    points: Sequence[int] | np.ndarray,
    domain_start: int,
    domain_end: int,
    initial_sign: int = 1,
) -> TelegraphSignal:
    """v(n) = initial_sign * (-1)**#{s in points : s <= n} on [domain_start, domain_end].

    Points below the domain still count toward the parity.
    """
    if initial_sign not in (1, -1):
        raise ValueError("initial_sign must be +1 or -1")
    if domain_start >= domain_end:
        raise ValueError("domain_start must be < domain_end")
    pts = np.asarray(points, dtype=np.int64)
    _check_increasing(pts, "change points")
    n = np.arange(domain_start, domain_end + 1)
    counts = np.searchsorted(pts, n, side="right")
    return TelegraphSignal(int(domain_start), _sign_array(counts, initial_sign))


def telegraph_from_crossings(
    times: Sequence[float] | np.ndarray,
    horizon: tuple[float, float],
    grid_step: float,
    initial_sign: int = 1,
) -> TelegraphSignal:
    """Sample a signal that flips at each crossing time onto a uniform grid.

    Grid point k sits at ``horizon[0] + k * grid_step`` and takes the sign
    valid at that time, so a flip shows up at the first grid point at or
    after the crossing.
    """
    if initial_sign not in (1, -1):
        raise ValueError("initial_sign must be +1 or -1")
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    t0, t1 = float(horizon[0]), float(horizon[1])
    if t1 < t0:
        raise ValueError("horizon end precedes start")
    ts = np.asarray(times, dtype=float)
    _check_increasing(ts, "crossing times")
    if ts.size and (ts[0] < t0 or ts[-1] > t1):
        raise ValueError("crossing times must lie inside the horizon")
    n_points = int(math.floor((t1 - t0) / grid_step + 1e-9)) + 1
    grid = t0 + grid_step * np.arange(n_points)
    counts = np.searchsorted(ts, grid, side="right")
    return TelegraphSignal(0, _sign_array(counts, initial_sign), grid_step=grid_step, time_origin=t0)


def model_event_times(params: ModelTelegraphParams, rng: np.random.Generator) -> np.ndarray:
    """Event times ``n * T + phase`` inside the grid horizon."""
    t_max = (params.length - 1) * params.grid_step
    phase = params.phase if params.phase is not None else rng.uniform(0.0, params.period_T)
    if phase > t_max:
        return np.empty(0)
    n_events = int(math.floor((t_max - phase) / params.period_T)) + 1
    return phase + params.period_T * np.arange(n_events)


def simulate_model_telegraph(
    params: ModelTelegraphParams,
    flip_probability: float,
    seed: int,
    initial_sign: int = 1,
) -> TelegraphSignal:
    """One realization of the random-phase telegraph model.

    Draws the phase (unless fixed in ``params``), then flips independently
    with ``flip_probability`` at every event time on the horizon.
    """
    if not 0.0 <= flip_probability <= 1.0:
        raise ValueError("flip_probability must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    events = model_event_times(params, rng)
    flips = rng.random(events.size) < flip_probability
    horizon = (0.0, (params.length - 1) * params.grid_step)
    return telegraph_from_crossings(events[flips], horizon, params.grid_step, initial_sign)


def to_csv(signal: TelegraphSignal, path: str | Path, config: Mapping | None = None) -> Path:
    return write_csv(path, ["n", "v"], [signal.index.tolist(), signal.values.tolist()], config)
