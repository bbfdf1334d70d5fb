"""End-to-end experiments: one dataset per reproduced figure."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import chaos, correlation as corr, lnseq, primes
from .chaos import RosslerParams
from .csvio import config_hash, write_csv
from .errors import InsufficientPrimesError, NoMinimumError, NoPeakError, TooShortInputError
from .telegraph import ModelTelegraphParams, telegraph_from_changepoints, telegraph_from_crossings

log = logging.getLogger(__name__)

FIGURES = ("1", "2", "3", "5", "6", "7")
STATED_K2_PRIME_COUNT = 2000


@dataclass
class RosslerSettings:
    params: RosslerParams = field(default_factory=RosslerParams)
    initial: tuple[float, float, float] = chaos.DEFAULT_INITIAL
    dt: float = chaos.DEFAULT_DT
    t_end: float = chaos.DEFAULT_T_END
    transient: float = chaos.DEFAULT_TRANSIENT
    # sampling step of the crossing telegraph and its ACF lag range (grid units)
    telegraph_step: float = 0.1
    max_lag: int = 600


@dataclass
class ModelSettings:
    period_T: float = 10.0
    persistence_q: float = 0.25
    # None means 1 - persistence_q
    flip_probability: float | None = None
    length: int = 200
    grid_step: float = 1.0
    realizations: int = 10_000
    max_lag: int = 60

    @property
    def effective_flip_probability(self) -> float:
        if self.flip_probability is None:
            return 1.0 - self.persistence_q
        return self.flip_probability

    def telegraph_params(self) -> ModelTelegraphParams:
        return ModelTelegraphParams(self.period_T, self.persistence_q, self.length, self.grid_step)


@dataclass
class ExperimentConfig:
    prime_count: int = 10_000
    scale: float = lnseq.DEFAULT_SCALE
    fig1_interval: tuple[int, int] = (90_000, 100_000)
    fig2_interval: tuple[int, int] = (1_000, 20_000)
    k2_intervals: tuple[tuple[int, int], ...] = ((6_000, 6_600), (12_000, 13_000), (19_000, 20_000))
    # None sizes the K2 prime supply from the largest interval bound
    k2_prime_count: int | None = None
    max_lag: int = 150
    smoothing_window: int = 3
    prominence: float = 0.02
    r2_threshold: float = 0.98
    rossler: RosslerSettings = field(default_factory=RosslerSettings)
    model: ModelSettings = field(default_factory=ModelSettings)
    seed: int = 42
    output_dir: str = "out"

    def validate(self) -> None:
        for lo, hi in (self.fig1_interval, self.fig2_interval, *self.k2_intervals):
            if hi - lo < 2:
                raise ValueError(f"interval ({lo}, {hi}) is empty")
            if self.max_lag >= (hi - lo - 1) / 2:
                raise ValueError(f"max_lag {self.max_lag} too large for interval ({lo}, {hi})")

    def as_dict(self) -> dict:
        """Every setting except the output location; this is what gets hashed."""
        d = asdict(self)
        d.pop("output_dir")
        return d

    @property
    def hash(self) -> str:
        return config_hash(self.as_dict())


@dataclass
class IntervalResult:
    interval: tuple[int, int]
    acf: corr.AutocorrelationSeries
    first_minimum: corr.PeriodEstimate | None
    spectral: corr.PeriodEstimate | None
    discrepancy: bool
    decay_endpoint: int | None = None
    flip_count: int | None = None
    overlay: corr.AutocorrelationSeries | None = None
    path: Path | None = None

    def estimates(self) -> list[corr.PeriodEstimate]:
        return [e for e in (self.first_minimum, self.spectral) if e is not None]


@dataclass
class RosslerSummary:
    crossing_count: int
    mean_crossing_interval: float
    fundamental_period: float
    acf: corr.AutocorrelationSeries
    first_minimum: corr.PeriodEstimate

    @property
    def relative_period_mismatch(self) -> float:
        return abs(self.mean_crossing_interval - self.fundamental_period) / self.fundamental_period


@dataclass
class Fig12Result:
    intervals: list[IntervalResult]
    rossler: RosslerSummary
    ln_length: int


@dataclass
class Fig3Result:
    analytic: np.ndarray
    ensemble: corr.AutocorrelationSeries
    max_z: float
    path: Path


def required_prime_count(end: int, scale: float = lnseq.DEFAULT_SCALE) -> int:
    """Smallest prime count whose ln-sequence reaches ``end``."""
    count = 16
    while True:
        seq = primes.first_n_primes(count)
        rounded = lnseq.round_half_away(lnseq.cumulative_log_gaps(primes.gaps(seq), scale))
        hit = np.flatnonzero(rounded >= end)
        if hit.size:
            # cumulative index j uses gaps 0..j, i.e. j + 2 primes
            return int(hit[0]) + 2
        count *= 2


def _estimate(series, method, config, scale):
    try:
        return corr.estimate_period(series, method, config.smoothing_window, config.prominence, scale)
    except (NoPeakError, TooShortInputError, NoMinimumError) as exc:
        log.warning("%s estimate unavailable on window %s: %s", method, series.window, exc)
        return None


def _interval_result(signal, interval, config, scale) -> IntervalResult:
    acf = corr.autocorrelation(signal, interval[0], interval[1], config.max_lag)
    fm = _estimate(acf, corr.FIRST_MINIMUM, config, scale)
    sp = _estimate(acf, corr.SPECTRAL, config, scale)
    disagree = fm is not None and sp is not None and corr.estimates_disagree(fm, sp)
    if disagree:
        log.warning("period estimators disagree by more than 25%% on %s", interval)
    return IntervalResult(interval, acf, fm, sp, disagree)


def ln_signal(config: ExperimentConfig):
    """ln-sequence telegraph covering both Fig. 1/2 intervals."""
    end = max(config.fig1_interval[1], config.fig2_interval[1])
    seq = lnseq.ln_sequence(primes.gaps(primes.first_n_primes(config.prime_count)), config.scale)
    if len(seq) == 0 or seq.values[-1] < end:
        need = required_prime_count(end, config.scale)
        raise InsufficientPrimesError(
            f"ln-sequence of {config.prime_count} primes ends below {end}; need {need} primes",
            required_count=need,
        )
    return seq, telegraph_from_changepoints(seq.values, 2, end)


def rossler_summary(config: ExperimentConfig) -> RosslerSummary:
    rs = config.rossler
    traj = chaos.integrate(rs.params, rs.initial, rs.dt, rs.t_end, rs.transient)
    crossings = chaos.upward_crossings(traj, rs.params.threshold_x)
    if crossings.size < 2:
        raise TooShortInputError("fewer than two threshold crossings")
    period = chaos.fundamental_period(traj)
    signal = telegraph_from_crossings(crossings, (traj.t[0], traj.t[-1]), rs.telegraph_step)
    acf = corr.autocorrelation(signal, -1, len(signal), rs.max_lag)
    fm = corr.estimate_period(acf, corr.FIRST_MINIMUM, config.smoothing_window, config.prominence, config.scale)
    return RosslerSummary(int(crossings.size), float(np.diff(crossings).mean()), period, acf, fm)


def overlay(target: IntervalResult, ross: RosslerSummary, max_lag: int) -> corr.AutocorrelationSeries:
    """Rossler ACF stretched so its first minimum lands on the target's, depth-matched."""
    t_ln, t_ross = target.first_minimum.T_hat, ross.first_minimum.T_hat
    depth_ln = target.acf.values[int(round(t_ln))]
    depth_ross = ross.acf.values[int(round(t_ross))]
    amplitude = depth_ln / depth_ross if depth_ross < 0 and depth_ln < 0 else 1.0
    stretched = corr.rescale(ross.acf, t_ln / t_ross, amplitude)
    n = min(max_lag + 1, len(stretched))
    return corr.AutocorrelationSeries(
        stretched.lags[:n], stretched.values[:n], stretched.window, stretched.variance_at_zero, stretched.normalized
    )


def run_fig1_fig2(config: ExperimentConfig, out_dir: str | Path | None = None) -> Fig12Result:
    config.validate()
    out = Path(out_dir or config.output_dir)
    seq, signal = ln_signal(config)
    ross = rossler_summary(config)
    log.info(
        "Rossler: %d crossings, mean interval %.4f, spectral period %.4f",
        ross.crossing_count, ross.mean_crossing_interval, ross.fundamental_period,
    )
    results = []
    for name, interval in (("fig1", config.fig1_interval), ("fig2", config.fig2_interval)):
        res = _interval_result(signal, interval, config, config.scale)
        columns = [res.acf.lags.tolist(), res.acf.values.tolist()]
        if res.first_minimum is not None:
            res.overlay = overlay(res, ross, config.max_lag)
            padded = np.full(len(res.acf), np.nan)
            padded[: len(res.overlay)] = res.overlay.values
            columns.append(padded.tolist())
        else:
            columns.append([float("nan")] * len(res.acf))
        res.path = write_csv(out / f"{name}.csv", ["tau", "c", "c_rossler"], columns, config.as_dict())
        results.append(res)
    return Fig12Result(results, ross, len(seq))


def run_fig3(config: ExperimentConfig, out_dir: str | Path | None = None) -> Fig3Result:
    m = config.model
    out = Path(out_dir or config.output_dir)
    lags = np.arange(m.max_lag + 1)
    analytic = corr.model_autocorrelation(m.persistence_q, m.period_T / m.grid_step, lags)
    ens = corr.ensemble_model_acf(
        m.telegraph_params(), m.effective_flip_probability, m.realizations, m.max_lag, config.seed
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.abs(ens.values - analytic) / ens.stderr
    z = np.where(np.abs(ens.values - analytic) <= 1e-12, 0.0, z)
    path = write_csv(
        out / "fig3.csv",
        ["tau", "c_model", "c_mc", "c_mc_se"],
        [lags.tolist(), analytic.tolist(), ens.values.tolist(), ens.stderr.tolist()],
        config.as_dict(),
    )
    return Fig3Result(analytic, ens, float(np.max(z)), path)


def k2_sequence(config: ExperimentConfig) -> primes.PrimeSequence:
    end = max(hi for _, hi in config.k2_intervals)
    # p + 2 must be visible to decide twin membership of primes near the end
    limit = end + 2
    if config.k2_prime_count is not None:
        full = primes.first_n_primes(config.k2_prime_count)
        if full.values[-1] < limit:
            need = len(primes.primes_up_to(limit))
            raise InsufficientPrimesError(
                f"first {config.k2_prime_count} primes end at {full.values[-1]} < {limit}; need {need} primes",
                required_count=need,
            )
    else:
        full = primes.primes_up_to(limit)
        if len(full) != STATED_K2_PRIME_COUNT:
            log.info(
                "K2 supply: %d primes up to %d (stated first-%d supply ends at %d)",
                len(full), limit, STATED_K2_PRIME_COUNT,
                primes.first_n_primes(STATED_K2_PRIME_COUNT).values[-1],
            )
    return primes.kill_twins(full)


def run_fig567(config: ExperimentConfig, out_dir: str | Path | None = None) -> list[IntervalResult]:
    config.validate()
    out = Path(out_dir or config.output_dir)
    k2 = k2_sequence(config)
    end = max(hi for _, hi in config.k2_intervals)
    signal = telegraph_from_changepoints(k2.values, 2, end)
    results = []
    for fig, interval in zip((5, 6, 7), config.k2_intervals):
        res = _interval_result(signal, interval, config, config.scale)
        res.decay_endpoint = corr.linear_decay_endpoint(res.acf, config.r2_threshold)
        cp = signal.change_points
        res.flip_count = int(np.count_nonzero((cp > interval[0]) & (cp < interval[1])))
        res.path = corr.to_csv(res.acf, out / f"fig{fig}.csv", config.as_dict())
        results.append(res)
    return results


def reproduce(config: ExperimentConfig, figures: str | list[str] = "all", out_dir: str | Path | None = None) -> dict:
    """Run every experiment needed for ``figures`` ('all' or a subset of FIGURES)."""
    wanted = set(FIGURES) if figures == "all" else {str(f) for f in figures}
    unknown = wanted - set(FIGURES)
    if unknown:
        raise ValueError(f"unknown figure(s) {sorted(unknown)}; choose from {FIGURES} or 'all'")
    done: dict = {}
    if wanted & {"1", "2"}:
        done["fig1_fig2"] = run_fig1_fig2(config, out_dir)
    if "3" in wanted:
        done["fig3"] = run_fig3(config, out_dir)
    if wanted & {"5", "6", "7"}:
        done["fig567"] = run_fig567(config, out_dir)
    return done


__all__ = [
    "ExperimentConfig", "ModelSettings", "RosslerSettings", "Fig12Result", "Fig3Result",
    "IntervalResult", "RosslerSummary", "InsufficientPrimesError", "required_prime_count",
    "run_fig1_fig2", "run_fig3", "run_fig567", "reproduce",
]
