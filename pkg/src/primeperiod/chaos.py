"""Rossler system integration and upward threshold crossings."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .csvio import write_csv
from .errors import DegenerateHorizonError, DivergenceError, TooShortInputError
from .spectrum import dominant_period

DIVERGENCE_LIMIT = 1e6
DEFAULT_INITIAL = (1.0, 1.0, 1.0)
DEFAULT_DT = 0.01
DEFAULT_TRANSIENT = 200.0
DEFAULT_T_END = 5200.0
MIN_CYCLES = 50


@dataclass(frozen=True)
class RosslerParams:
    a: float = 0.15
    b: float = 0.20
    c: float = 10.0
    threshold_x: float = 7.0


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        if not (len(self.t) == len(self.x) == len(self.y) == len(self.z)):
            raise ValueError("trajectory arrays must have equal length")

    def __len__(self):
        return len(self.t)

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0]) if len(self.t) > 1 else 0.0


def rossler_derivative(state: Sequence[float], params: RosslerParams) -> tuple[float, float, float]:
    x, y, z = state
    return (-(y + z), x + params.a * y, params.b + x * z - params.c * z)


def rk4(
    deriv: Callable[[tuple], Sequence[float]],
    initial: Sequence[float],
    dt: float,
    n_steps: int,
    check_every: int = 1000,
) -> np.ndarray:
    """Classical fixed-step fourth-order Runge-Kutta.

    Returns an ``(n_steps + 1, dim)`` array including the initial state.
    Raises DivergenceError once any coordinate exceeds DIVERGENCE_LIMIT in
    magnitude or becomes non-finite (checked every ``check_every`` steps).
    """
    s = tuple(float(v) for v in initial)
    out = np.empty((n_steps + 1, len(s)))
    out[0] = s
    h2, h6 = dt / 2.0, dt / 6.0
    for i in range(1, n_steps + 1):
        k1 = deriv(s)
        k2 = deriv(tuple(a + h2 * b for a, b in zip(s, k1)))
        k3 = deriv(tuple(a + h2 * b for a, b in zip(s, k2)))
        k4 = deriv(tuple(a + dt * b for a, b in zip(s, k3)))
        s = tuple(a + h6 * (b1 + 2.0 * b2 + 2.0 * b3 + b4) for a, b1, b2, b3, b4 in zip(s, k1, k2, k3, k4))
        out[i] = s
        if i % check_every == 0 or i == n_steps:
            chunk = out[max(0, i - check_every) : i + 1]
            if not np.all(np.isfinite(chunk)) or np.abs(chunk).max() > DIVERGENCE_LIMIT:
                raise DivergenceError(f"trajectory left |coord| <= {DIVERGENCE_LIMIT:g} near step {i}")
    return out


def integrate(
    params: RosslerParams = RosslerParams(),
    initial: Sequence[float] = DEFAULT_INITIAL,
    dt: float = DEFAULT_DT,
    t_end: float = DEFAULT_T_END,
    transient: float = DEFAULT_TRANSIENT,
) -> Trajectory:
    """RK4 solution from t = 0, keeping samples with t >= transient."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    if transient < 0:
        raise ValueError("transient must be nonnegative")
    if t_end <= transient:
        raise DegenerateHorizonError("t_end must exceed the transient")
    n_steps = int(round(t_end / dt))
    skip = int(round(transient / dt))
    states = rk4(lambda s: rossler_derivative(s, params), initial, dt, n_steps)[skip:]
    t = dt * np.arange(skip, n_steps + 1)
    return Trajectory(t, states[:, 0].copy(), states[:, 1].copy(), states[:, 2].copy())


def upward_crossings(traj: Trajectory, threshold: float) -> np.ndarray:
    """Linearly interpolated times where x goes from below ``threshold`` to at-or-above it."""
    if len(traj) == 0:
        raise TooShortInputError("empty trajectory")
    x, t = np.asarray(traj.x), np.asarray(traj.t)
    i = np.flatnonzero((x[:-1] < threshold) & (x[1:] >= threshold))
    frac = (threshold - x[i]) / (x[i + 1] - x[i])
    return t[i] + frac * (t[i + 1] - t[i])


def fundamental_period(traj: Trajectory) -> float:
    """Period of the dominant spectral peak of x(t)."""
    if len(traj) < 4:
        raise TooShortInputError("trajectory too short")
    period, _ = dominant_period(traj.x, step=traj.dt)
    span = float(traj.t[-1] - traj.t[0])
    if span < MIN_CYCLES * period:
        raise TooShortInputError(
            f"trajectory spans {span / period:.1f} cycles; need at least {MIN_CYCLES}"
        )
    return period


def trajectory_to_csv(traj: Trajectory, path: str | Path, config: Mapping | None = None) -> Path:
    return write_csv(path, ["t", "x", "y", "z"], [traj.t, traj.x, traj.y, traj.z], config)


def crossings_to_csv(times: np.ndarray, path: str | Path, config: Mapping | None = None) -> Path:
    return write_csv(path, ["t_cross"], [np.asarray(times).tolist()], config)
