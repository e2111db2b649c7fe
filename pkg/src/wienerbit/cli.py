"""Batch experiment runner.

    wienerbit fixed-point  [--sigma2 S] [--period T] [--out quantizer.txt]
    wienerbit table1       [--periods N] [--seed S] [--out table1.csv]
    wienerbit table2       [--periods N] [--burn-in B] [--out table2.csv]
    wienerbit sweep-delay  [--delays 0,0.1,...] [--repetitions R] [--jobs J]
    wienerbit simulate     [--strategy optimum|lastbit|gaussian] [--out trace.csv]

Settings come from built-in defaults, then ``--config FILE`` (flat
``key=value`` lines using the flag names), then the command line.
Exit status: 0 ok, 1 I/O error, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import metrics
from .errors import ConfigurationError, NumericalError
from .quantize import Symbol, gaussian_fixed_point
from .track import (
    Deterministic,
    GaussianStatic,
    LastBitAware,
    OptimumTracking,
    SimConfig,
    UniformRandom,
    derive_last_bit_tables,
    simulate,
    with_delay,
)

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

COMMON_DEFAULTS = {
    "sigma2": 1.0,
    "period": 1.0,
    "delay": 0.0,
    "delay_model": "det",
    "half_width": 0.05,
    "strategy": "optimum",
    "burn_in": 1000,
    "substeps": 100,
    "seed": 0,
    "out": None,
    "delays": "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9",
    "repetitions": 1,
    "jobs": 1,
}
PERIOD_DEFAULTS = {
    "fixed-point": 1,
    "table1": 1_000_000,
    "table2": 101_000,
    "sweep-delay": 101_000,
    "simulate": 1_000,
}
STRATEGY_NAMES = ("optimum", "lastbit", "gaussian")

_CONVERTERS = {
    "sigma2": float, "period": float, "delay": float, "half_width": float,
    "periods": int, "burn_in": int, "substeps": int, "seed": int,
    "repetitions": int, "jobs": int,
}


def _fmt(v):
    return f"{v:.9g}"


def read_config(path):
    settings = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigurationError(f"{path}:{n}: expected key=value")
        key = key.strip().replace("-", "_")
        if key not in COMMON_DEFAULTS and key != "periods":
            raise ConfigurationError(f"{path}:{n}: unknown key {key!r}")
        settings[key] = value.strip()
    return settings


def resolve_settings(command, args):
    """defaults < config file < command-line flags."""
    settings = dict(COMMON_DEFAULTS, periods=PERIOD_DEFAULTS[command])
    if args.config:
        settings.update(read_config(args.config))
    for key in settings:
        v = getattr(args, key, None)
        if v is not None:
            settings[key] = v
    try:
        for key, conv in _CONVERTERS.items():
            settings[key] = conv(settings[key])
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from None
    if settings["delay_model"] not in ("det", "uniform"):
        raise ConfigurationError("delay-model must be 'det' or 'uniform'")
    if settings["strategy"] not in STRATEGY_NAMES:
        raise ConfigurationError(f"strategy must be one of {STRATEGY_NAMES}")
    return settings


def _delay_model(kind, d, half_width):
    return UniformRandom(d, half_width) if kind == "uniform" else Deterministic(d)


def _strategy(name, sigma2, T):
    if name == "optimum":
        return OptimumTracking()
    if name == "lastbit":
        return LastBitAware.standard(sigma2, T)
    return GaussianStatic.from_fixed_point(sigma2, T)


def sim_config(s, strategy=None, delay=None):
    return SimConfig(
        sigma2=s["sigma2"], T=s["period"], periods=s["periods"],
        burn_in=min(s["burn_in"], s["periods"] - 1),
        strategy=strategy or _strategy(s["strategy"], s["sigma2"], s["period"]),
        delay=delay or _delay_model(s["delay_model"], s["delay"], s["half_width"]),
        substeps=s["substeps"], seed=s["seed"],
    )


def _emit(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# -- commands -------------------------------------------------------------------

def cmd_fixed_point(s):
    fp = gaussian_fixed_point(s["sigma2"] * s["period"])
    lines = [f"rho={_fmt(fp.rho)}", f"sigmaG2={_fmt(fp.sigmaG2)}", f"EQ2={_fmt(fp.EQ2)}"]
    lines += [f"{k}={_fmt(v)}" for k, v in zip(
        ("tau_minus", "tau_plus", "c_minus", "c_empty", "c_plus"), fp.quantizer.as_tuple())]
    print("\n".join(lines))
    if s["out"]:
        Path(s["out"]).write_text(fp.quantizer.to_text())
    return fp


TABLE1_ROWS = ("c_minus", "c_empty", "c_plus", "tau_minus", "tau_plus")


def table1_rows(tables, gaussian, scale):
    cols = [tables[Symbol.MINUS], tables[Symbol.EMPTY], tables[Symbol.PLUS], gaussian]
    return [[name] + [_fmt(getattr(q, name) / scale) for q in cols] for name in TABLE1_ROWS]


def cmd_table1(s):
    cfg = sim_config(s, strategy=OptimumTracking(), delay=Deterministic(0.0))
    trace = simulate(cfg)
    scale = math.sqrt(s["sigma2"] * s["period"])
    rows = table1_rows(derive_last_bit_tables(trace), gaussian_fixed_point(scale ** 2).quantizer, scale)
    text = _csv_text(["parameter", "phi_minus", "phi_empty", "phi_plus", "phi_G"], rows)
    _emit(text, s["out"])
    return text


def table2_rows(s):
    """Runs the three strategies on one increment stream; the last-bit table is
    derived from the optimum run itself."""
    cfg = sim_config(s, strategy=OptimumTracking(), delay=Deterministic(0.0))
    opt = simulate(cfg)
    lastbit = simulate(replace(cfg, strategy=LastBitAware(derive_last_bit_tables(opt))))
    gauss = simulate(replace(cfg, strategy=GaussianStatic.from_fixed_point(s["sigma2"], s["period"])))
    s2T = s["sigma2"] * s["period"]
    return [
        [name, _fmt(tr.empirical_EQ2 / s2T), _fmt(tr.empirical_TR * s["period"])]
        for name, tr in (("optimum", opt), ("lastbit", lastbit), ("gaussian", gauss))
    ]


def cmd_table2(s):
    text = _csv_text(["strategy", "EQ2_over_sigma2T", "TR_times_T"], table2_rows(s))
    _emit(text, s["out"])
    return text


SWEEP_HEADER = ["strategy", "delay_model", "d", "repetition", "empirical_mse", "analytic_mse", "EQ2", "status"]


def _sweep_job(job):
    s, name, rep, delays = job
    s = dict(s, seed=s["seed"] + rep)
    base = simulate(sim_config(s, strategy=_strategy(name, s["sigma2"], s["period"]), delay=Deterministic(0.0)))
    rows = []
    for d in delays:
        for model in ("det", "uniform"):
            dm = _delay_model(model, d, s["half_width"])
            key = [name, model, _fmt(d), rep]
            try:
                tr = with_delay(base, dm)
            except ConfigurationError as exc:
                rows.append(key + ["", "", "", "skipped: " + str(exc).split(";")[0]])
                continue
            analytic = metrics.average_mse(
                metrics.AnalyticInputs(s["sigma2"], s["period"], dm.mean, tr.empirical_EQ2),
                random_delay=dm.is_random)
            rows.append(key + [_fmt(tr.empirical_MSE), _fmt(analytic), _fmt(tr.empirical_EQ2), "ok"])
    return rows


def sweep_rows(s, strategies=STRATEGY_NAMES):
    delays = [float(v) for v in str(s["delays"]).split(",") if v.strip()]
    jobs = [(s, name, rep, delays) for name in strategies for rep in range(s["repetitions"])]
    if s["jobs"] > 1:
        with ProcessPoolExecutor(max_workers=s["jobs"]) as pool:
            results = list(pool.map(_sweep_job, jobs))
    else:
        results = [_sweep_job(j) for j in jobs]
    rows = [r for block in results for r in block]
    order = {n: i for i, n in enumerate(STRATEGY_NAMES)}
    rows.sort(key=lambda r: (order[r[0]], r[1], float(r[2]), r[3]))
    return rows


def cmd_sweep_delay(s):
    text = _csv_text(SWEEP_HEADER, sweep_rows(s))
    _emit(text, s["out"])
    return text


def cmd_simulate(s):
    cfg = sim_config(s)
    trace = simulate(cfg, record_path=True)
    out = Path(s["out"] or "trace.csv")
    trace.write_csv(out)
    trace.write_path_csv(out.with_name(out.stem + "_path.csv"))
    print(f"EQ2={_fmt(trace.empirical_EQ2)} TR={_fmt(trace.empirical_TR)} MSE={_fmt(trace.empirical_MSE)}")
    return trace


COMMANDS = {
    "fixed-point": cmd_fixed_point,
    "table1": cmd_table1,
    "table2": cmd_table2,
    "sweep-delay": cmd_sweep_delay,
    "simulate": cmd_simulate,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model and run settings")
    g.add_argument("--sigma2", help="variance of the Wiener process per unit time (default 1)")
    g.add_argument("--period", help="sampling period T (default 1)")
    g.add_argument("--delay", help="channel delay d, or its mean for uniform delay (default 0)")
    g.add_argument("--delay-model", dest="delay_model", choices=("det", "uniform"), help="default det")
    g.add_argument("--half-width", dest="half_width", help="half-width of the uniform delay (default 0.05)")
    g.add_argument("--strategy", choices=STRATEGY_NAMES, help="default optimum")
    g.add_argument("--periods", help="number of sampling periods, burn-in included")
    g.add_argument("--burn-in", dest="burn_in", help="periods discarded before averaging (default 1000)")
    g.add_argument("--substeps", help="path samples per period for the MSE integral (default 100)")
    g.add_argument("--seed", help="64-bit seed (default 0)")
    g.add_argument("--out", help="output file (default stdout; simulate: trace.csv)")
    g.add_argument("--config", help="flat key=value settings file")
    g.add_argument("--delays", help="sweep-delay: comma-separated delays")
    g.add_argument("--repetitions", help="sweep-delay: runs per point, seeds seed..seed+R-1")
    g.add_argument("--jobs", help="sweep-delay: worker processes")

    parser = argparse.ArgumentParser(prog="wienerbit", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=COMMANDS[name].__name__.replace("cmd_", ""))
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](resolve_settings(args.command, args))
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
