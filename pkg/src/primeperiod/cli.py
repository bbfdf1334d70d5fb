"""Command-line front end.

Every subcommand accepts ``--config FILE`` with flat ``key = value`` lines
(``#`` starts a comment). Keys are flag names without the leading dashes;
explicit flags override the file, which overrides the built-in defaults.
Exit codes: 0 success, 1 usage error, 2 computation error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import chaos, correlation as corr, lnseq, pipeline, primes, telegraph
from .csvio import write_csv
from .errors import PrimePeriodError

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE = 0, 1, 2

DEFAULTS = {
    "count": 10_000,
    "limit": None,
    "scale": 10.0,
    "interval": (90_000, 100_000),
    "max-lag": 150,
    "q": 0.25,
    "flip-prob": None,
    "period-T": 10.0,
    "realizations": 10_000,
    "dt": 0.01,
    "t-end": 5200.0,
    "transient": 200.0,
    "threshold": 7.0,
    "seed": 42,
    "figure": "all",
    "out": None,
}


class UsageError(Exception):
    pass


def _int_like(text: str) -> int:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value.is_integer():
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(value)


def _interval(text: str) -> tuple[int, int]:
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"interval must look like start:end, got {text!r}")
    lo, hi = (_int_like(p) for p in parts)
    if hi <= lo:
        raise argparse.ArgumentTypeError(f"interval end must exceed start: {text!r}")
    return lo, hi


def _figure(text: str) -> str:
    if text != "all" and text not in pipeline.FIGURES:
        raise argparse.ArgumentTypeError(f"figure must be one of {', '.join(pipeline.FIGURES)} or all")
    return text


FLAGS = {
    "count": (_int_like, "number of primes"),
    "limit": (_int_like, "upper bound for primes (overrides --count where accepted)"),
    "scale": (float, "ln-sequence scale factor"),
    "interval": (_interval, "open averaging interval start:end (scientific notation allowed)"),
    "max-lag": (_int_like, "largest ACF lag"),
    "q": (float, "persistence q of the model telegraph"),
    "flip-prob": (float, "per-event flip probability (default: 1 - q)"),
    "period-T": (float, "model telegraph period in grid units"),
    "realizations": (_int_like, "Monte Carlo realizations"),
    "dt": (float, "RK4 time step"),
    "t-end": (float, "integration end time"),
    "transient": (float, "initial time discarded as transient"),
    "threshold": (float, "upward-crossing threshold for x"),
    "seed": (_int_like, "base random seed"),
    "figure": (_figure, "figure to reproduce: 1, 2, 3, 5, 6, 7 or all"),
    "out": (str, "output path (file, or directory for rossler/reproduce)"),
}

SUBCOMMANDS = {
    "primes": (["count", "limit", "out"], "print primes (first --count, or all up to --limit)"),
    "lnseq": (["count", "scale", "out"], "print the ln-sequence of the first --count primes"),
    "telegraph": (["count", "scale", "interval", "out"], "ln-sequence telegraph v(n) on an interval"),
    "rossler": (["dt", "t-end", "transient", "threshold", "out"], "integrate the Rossler system and detect crossings"),
    "acf": (["count", "scale", "interval", "max-lag", "out"], "ACF of the ln-sequence telegraph and its period"),
    "model": (["q", "flip-prob", "period-T", "realizations", "max-lag", "seed", "out"], "analytic vs Monte Carlo model ACF"),
    "k2": (["limit", "interval", "max-lag", "out"], "twin-killed K2 telegraph: ACF, period, decay endpoint"),
    "reproduce": (
        ["figure", "seed", "out", "count", "scale", "interval", "max-lag", "q", "flip-prob", "period-T",
         "realizations", "dt", "t-end", "transient", "threshold"],
        "regenerate figure datasets",
    ),
}

SUBCOMMAND_DEFAULTS = {
    "k2": {"interval": (6_000, 6_600)},
    "reproduce": {"interval": None, "out": "out"},
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _fmt_default(value) -> str:
    if isinstance(value, tuple):
        return f"{value[0]}:{value[1]}"
    return "none" if value is None else str(value)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="primeperiod", description="Hidden periodicity in the primes via logarithmic gaps.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    for name, (flags, help_text) in SUBCOMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        defaults = {**DEFAULTS, **SUBCOMMAND_DEFAULTS.get(name, {})}
        for flag in flags:
            conv, text = FLAGS[flag]
            p.add_argument(
                f"--{flag}", dest=flag, type=conv, default=argparse.SUPPRESS,
                help=f"{text} (default: {_fmt_default(defaults[flag])})",
            )
        p.add_argument("--config", default=argparse.SUPPRESS, help="flat key = value config file")
    return parser


def read_config(path: str | Path, allowed: list[str]) -> dict:
    """Parse a flat ``key = value`` file into converted flag values."""
    values = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("_", "-")
        if key == "period-t":
            key = "period-T"
        if key not in allowed:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}; valid keys: {', '.join(allowed)}")
        try:
            values[key] = FLAGS[key][0](value)
        except argparse.ArgumentTypeError as exc:
            raise UsageError(f"{path}:{lineno}: {exc}") from None
    return values


def resolve(command: str, explicit: dict) -> dict:
    flags = SUBCOMMANDS[command][0]
    opts = {f: {**DEFAULTS, **SUBCOMMAND_DEFAULTS.get(command, {})}[f] for f in flags}
    if "config" in explicit:
        try:
            opts.update(read_config(explicit["config"], flags))
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
    opts.update({k: v for k, v in explicit.items() if k in flags})
    return opts


def _settings(opts: dict) -> dict:
    """The resolved options as hashed into CSV headers."""
    return {k: list(v) if isinstance(v, tuple) else v for k, v in sorted(opts.items()) if k != "out"}


def _prime_seq(opts):
    if opts.get("limit") is not None:
        return primes.primes_up_to(opts["limit"])
    return primes.first_n_primes(opts["count"])


def _ln_signal(opts, end):
    seq = lnseq.ln_sequence(primes.gaps(primes.first_n_primes(opts["count"])), opts["scale"])
    if len(seq) == 0 or seq.values[-1] < end:
        need = pipeline.required_prime_count(end, opts["scale"])
        raise pipeline.InsufficientPrimesError(
            f"ln-sequence of {opts['count']} primes ends below {end}; need {need} primes", need
        )
    return seq, telegraph.telegraph_from_changepoints(seq.values, 2, end)


def _report_estimates(acf, scale, show_t0=True):
    ests = []
    for method in corr.METHODS:
        try:
            est = corr.estimate_period(acf, method, scale=scale)
        except PrimePeriodError as exc:
            print(f"{method}: unavailable ({type(exc).__name__}: {exc})")
            continue
        ests.append(est)
        line = f"{method}: T_hat = {est.T_hat:.3f} +/- {est.uncertainty:.2f}"
        if show_t0:
            line += f"  T0 = exp(T_hat/{scale:g}) = {est.T0:.3f}"
        print(line)
    if len(ests) == 2 and corr.estimates_disagree(*ests):
        print("warning: estimators disagree by more than 25%")
    return ests


def cmd_primes(opts):
    seq = _prime_seq(opts)
    if opts["out"]:
        primes.to_csv(seq, opts["out"], _settings(opts))
    else:
        print(" ".join(map(str, seq.tolist())))


def cmd_lnseq(opts):
    seq = lnseq.ln_sequence(primes.gaps(primes.first_n_primes(opts["count"])), opts["scale"])
    if opts["out"]:
        lnseq.to_csv(seq, opts["out"], _settings(opts))
    else:
        print(" ".join(map(str, seq.values.tolist())))
    print(
        f"# {len(seq)} values; discarded below 1: {seq.discarded_below_one}; "
        f"duplicates dropped: {seq.duplicates_dropped}",
        file=sys.stderr,
    )


def cmd_telegraph(opts):
    lo, hi = opts["interval"]
    _, signal = _ln_signal(opts, hi)
    cp = signal.change_points
    inside = int(np.count_nonzero((cp > lo) & (cp < hi)))
    window = telegraph.TelegraphSignal(lo + 1, signal.values[lo + 1 - signal.start_index : hi - signal.start_index])
    if opts["out"]:
        telegraph.to_csv(window, opts["out"], _settings(opts))
    print(f"v(n) on ({lo}, {hi}): {len(window)} points, {inside} sign changes")


def cmd_rossler(opts):
    params = chaos.RosslerParams(threshold_x=opts["threshold"])
    traj = chaos.integrate(params, dt=opts["dt"], t_end=opts["t-end"], transient=opts["transient"])
    crossings = chaos.upward_crossings(traj, opts["threshold"])
    period = chaos.fundamental_period(traj)
    if opts["out"]:
        out = Path(opts["out"])
        chaos.trajectory_to_csv(traj, out / "trajectory.csv", _settings(opts))
        chaos.crossings_to_csv(crossings, out / "crossings.csv", _settings(opts))
    print(f"samples: {len(traj)}  max|x|: {np.abs(traj.x).max():.3f}")
    print(f"upward crossings of x = {opts['threshold']:g}: {crossings.size}")
    if crossings.size > 1:
        mean = float(np.diff(crossings).mean())
        print(f"mean crossing interval: {mean:.4f}  spectral period: {period:.4f}  "
              f"relative difference: {abs(mean - period) / period:.3f}")


def cmd_acf(opts):
    lo, hi = opts["interval"]
    _, signal = _ln_signal(opts, hi)
    acf = corr.autocorrelation(signal, lo, hi, opts["max-lag"])
    if opts["out"]:
        corr.to_csv(acf, opts["out"], _settings(opts))
    print(f"ACF of ln-sequence v(n) on ({lo}, {hi}), lags 0..{opts['max-lag']}")
    _report_estimates(acf, opts["scale"])


def cmd_model(opts):
    q = opts["q"]
    flip = 1.0 - q if opts["flip-prob"] is None else opts["flip-prob"]
    length = max(200, 4 * opts["max-lag"])
    params = telegraph.ModelTelegraphParams(opts["period-T"], q, length)
    lags = np.arange(opts["max-lag"] + 1)
    analytic = corr.model_autocorrelation(q, opts["period-T"], lags)
    ens = corr.ensemble_model_acf(params, flip, opts["realizations"], opts["max-lag"], opts["seed"])
    diff = np.abs(ens.values - analytic)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(diff <= 1e-12, 0.0, diff / ens.stderr)
    if opts["out"]:
        write_csv(
            opts["out"], ["tau", "c_model", "c_mc", "c_mc_se"],
            [lags.tolist(), analytic.tolist(), ens.values.tolist(), ens.stderr.tolist()], _settings(opts),
        )
    print(f"q = {q:g}, flip probability = {flip:g}, T = {opts['period-T']:g}, realizations = {opts['realizations']}")
    print(f"max |MC - analytic| = {diff.max():.4g}; max z = {z.max():.3f}")


def cmd_k2(opts):
    lo, hi = opts["interval"]
    limit = opts["limit"] if opts["limit"] is not None else hi + 2
    full = primes.primes_up_to(limit)
    k2 = primes.kill_twins(full)
    signal = telegraph.telegraph_from_changepoints(k2.values, 2, max(hi, 3))
    acf = corr.autocorrelation(signal, lo, hi, opts["max-lag"])
    if opts["out"]:
        corr.to_csv(acf, opts["out"], _settings(opts))
    print(f"primes <= {limit}: {len(full)}; twin pairs: {len(primes.twin_pairs(full))}; K2 size: {len(k2)}")
    _report_estimates(acf, 10.0, show_t0=False)
    print(f"linear decay endpoint: {corr.linear_decay_endpoint(acf)}")


def cmd_reproduce(opts):
    rs = pipeline.RosslerSettings(
        params=chaos.RosslerParams(threshold_x=opts["threshold"]),
        dt=opts["dt"], t_end=opts["t-end"], transient=opts["transient"],
    )
    model = pipeline.ModelSettings(
        period_T=opts["period-T"], persistence_q=opts["q"], flip_probability=opts["flip-prob"],
        realizations=opts["realizations"],
    )
    config = pipeline.ExperimentConfig(
        prime_count=opts["count"], scale=opts["scale"], max_lag=opts["max-lag"], rossler=rs, model=model,
        seed=opts["seed"], output_dir=opts["out"],
    )
    figure = opts["figure"]
    if opts["interval"] is not None:
        if figure in ("1", "2"):
            config = replace(config, **{f"fig{figure}_interval": opts["interval"]})
        elif figure in ("5", "6", "7"):
            k2 = list(config.k2_intervals)
            k2[int(figure) - 5] = opts["interval"]
            config = replace(config, k2_intervals=tuple(k2))
        else:
            raise UsageError("--interval needs a single --figure among 1, 2, 5, 6, 7")
    done = pipeline.reproduce(config, figure)
    if "fig1_fig2" in done:
        r = done["fig1_fig2"]
        for name, res in zip(("fig1", "fig2"), r.intervals):
            print(f"{name} {res.interval}: -> {res.path}")
            for est in res.estimates():
                print(f"  {est.method}: T_hat = {est.T_hat:.3f}  T0 = {est.T0:.3f}")
        ro = r.rossler
        print(f"rossler: {ro.crossing_count} crossings, mean interval {ro.mean_crossing_interval:.4f}, "
              f"spectral period {ro.fundamental_period:.4f}")
    if "fig3" in done:
        r = done["fig3"]
        print(f"fig3: max z = {r.max_z:.3f} -> {r.path}")
    if "fig567" in done:
        for fig, res in zip((5, 6, 7), done["fig567"]):
            fm = res.first_minimum
            print(f"fig{fig} {res.interval}: T_hat = {fm.T_hat if fm else float('nan'):g}  "
                  f"decay endpoint = {res.decay_endpoint}  flips = {res.flip_count} -> {res.path}")


COMMANDS = {
    "primes": cmd_primes, "lnseq": cmd_lnseq, "telegraph": cmd_telegraph, "rossler": cmd_rossler,
    "acf": cmd_acf, "model": cmd_model, "k2": cmd_k2, "reproduce": cmd_reproduce,
}


def _flag_hint(argv) -> str:
    command = next((a for a in argv if a in SUBCOMMANDS), None)
    if command is None:
        return f"valid commands: {', '.join(SUBCOMMANDS)}"
    flags = ", ".join(f"--{f}" for f in SUBCOMMANDS[command][0] + ["config"])
    return f"valid flags for {command}: {flags}"


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        if ns.command is None:
            raise UsageError(parser.format_help())
        opts = resolve(ns.command, vars(ns))
    except UsageError as exc:
        print(str(exc).rstrip(), file=sys.stderr)
        print(_flag_hint(argv), file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        COMMANDS[ns.command](opts)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except (PrimePeriodError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
