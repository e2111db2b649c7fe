"""Periodic sampling of a Wiener process, one-bit-plus-silence quantization,
delayed delivery and monitor-side estimation.

The run is split in two stages.  The first walks the periods sequentially:
draw the increment, form the quantizer input from the previous error, ask the
strategy for a quantizer, apply it.  The second rebuilds the continuous path
between sampling instants by Brownian-bridge interpolation and integrates the
squared estimation error.  The stages use separate random streams, so the
symbol sequence does not depend on the delay model and vice versa.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import ClassVar, Mapping, Optional

import numpy as np

from . import distgrid
from .errors import ConfigurationError, InsufficientDataError
from .quantize import (
    LAST_BIT_TABLE,
    LloydConfig,
    Quantizer,
    Symbol,
    gaussian_fixed_point,
    lloyd_max,
)

_CHUNK = 2048
# Long runs of one symbol fatten a tail of the tracked density; on the default
# 7-sigma grid up to a few 1e-6 of mass can cross the edge, which is dropped.
TRACKING_OVERFLOW_TOLERANCE = 1e-4


# -- delay models -----------------------------------------------------------

@dataclass(frozen=True)
class Deterministic:
    d: float = 0.0
    is_random: ClassVar[bool] = False

    @property
    def mean(self):
        return self.d

    @property
    def bounds(self):
        return self.d, self.d

    def sample(self, rng, n):
        return np.full(n, float(self.d))


@dataclass(frozen=True)
class UniformRandom:
    center: float
    half_width: float = 0.05
    is_random: ClassVar[bool] = True

    @property
    def mean(self):
        return self.center

    @property
    def bounds(self):
        return self.center - self.half_width, self.center + self.half_width

    def sample(self, rng, n):
        lo, hi = self.bounds
        return rng.uniform(lo, hi, n)


# -- strategies -------------------------------------------------------------

class _OptimumState:
    """Tracks the input density and redesigns the quantizer every period."""

    def __init__(self, cfg):
        self.grid = cfg.make_grid()
        self.f_X = distgrid.gaussian_pdf(self.grid, 0.0, cfg.sigma2 * cfg.T)
        self._add_increment = distgrid.Convolver(self.f_X, TRACKING_OVERFLOW_TOLERANCE)
        self.lloyd = cfg.lloyd
        self.f_Y = self.f_X
        self.f_Q = distgrid.point_mass(self.grid, 0.0)
        self.quantizer = None

    def next_quantizer(self):
        self.quantizer = lloyd_max(self.f_Y, self.lloyd).quantizer
        return self.quantizer

    def observe(self, record):
        q = self.quantizer
        self.f_Q = distgrid.shift_truncate_normalize(self.f_Y, q.region(record.symbol), record.center)
        self.f_Y = self._add_increment(self.f_Q)


class _LastBitState:
    def __init__(self, table):
        self.table = table
        self.last = Symbol.EMPTY

    def next_quantizer(self):
        return self.table[self.last]

    def observe(self, record):
        self.last = record.symbol


class _StaticState:
    def __init__(self, quantizer):
        self.quantizer = quantizer

    def next_quantizer(self):
        return self.quantizer

    def observe(self, record):
        pass


@dataclass(frozen=True)
class OptimumTracking:
    name: ClassVar[str] = "optimum"
    needs_fixed_delay: ClassVar[bool] = True

    def start(self, cfg):
        return _OptimumState(cfg)


@dataclass(frozen=True)
class LastBitAware:
    """Switches between three fixed quantizers (signal units) on the last symbol."""

    table: Mapping[Symbol, Quantizer]
    name: ClassVar[str] = "lastbit"
    needs_fixed_delay: ClassVar[bool] = True

    def __post_init__(self):
        if set(self.table) != set(Symbol):
            raise ConfigurationError("last-bit table needs one quantizer per symbol")

    @classmethod
    def standard(cls, sigma2=1.0, T=1.0):
        """The built-in table, scaled to ``sigma * sqrt(T)``."""
        s = math.sqrt(sigma2 * T)
        return cls({k: q.scaled(s) for k, q in LAST_BIT_TABLE.items()})

    def start(self, cfg):
        return _LastBitState(self.table)


@dataclass(frozen=True)
class GaussianStatic:
    quantizer: Quantizer
    name: ClassVar[str] = "gaussian"
    needs_fixed_delay: ClassVar[bool] = False

    def __post_init__(self):
        if self.quantizer.c_empty != 0.0:
            raise ConfigurationError("static Gaussian quantizer must have c_empty == 0")

    @classmethod
    def from_fixed_point(cls, sigma2=1.0, T=1.0, **kw):
        return cls(gaussian_fixed_point(sigma2 * T, **kw).quantizer)

    def start(self, cfg):
        return _StaticState(self.quantizer)


# -- configuration and results -----------------------------------------------

@dataclass(frozen=True)
class SimConfig:
    sigma2: float = 1.0
    T: float = 1.0
    periods: int = 10_000
    burn_in: int = 1000
    strategy: object = field(default_factory=OptimumTracking)
    delay: object = field(default_factory=Deterministic)
    substeps: int = 100
    seed: int = 0
    half_width_sigmas: float = 7.0
    step_sigmas: float = 1e-3
    lloyd: LloydConfig = field(default_factory=LloydConfig)

    def __post_init__(self):
        if not (self.sigma2 > 0 and self.T > 0):
            raise ConfigurationError("sigma2 and T must be positive")
        if self.periods < 1 or self.substeps < 1:
            raise ConfigurationError("periods and substeps must be >= 1")
        if not 0 <= self.burn_in < self.periods:
            raise ConfigurationError("burn_in must be in [0, periods)")
        lo, hi = self.delay.bounds
        if lo < 0 or not hi < self.T:
            raise ConfigurationError(f"delays must lie in [0, T); got [{lo}, {hi}]")
        if self.delay.is_random and self.strategy.needs_fixed_delay:
            raise ConfigurationError(
                f"strategy '{self.strategy.name}' needs a deterministic delay; "
                "only the static Gaussian quantizer works with random delay"
            )
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigurationError("seed must be a 64-bit unsigned integer")

    def make_grid(self):
        scale = math.sqrt(self.sigma2 * self.T)
        return distgrid.make_grid(self.sigma2, self.T, self.half_width_sigmas, self.step_sigmas * scale)

    def streams(self):
        """Independent generators for increments, bridge fills and delays."""
        return [np.random.Generator(np.random.PCG64(s)) for s in np.random.SeedSequence(self.seed).spawn(3)]


@dataclass(frozen=True)
class PeriodRecord:
    k: int
    X: float
    Y: float
    symbol: Symbol
    center: float
    Q: float
    delay: float
    quantizer: Optional[Quantizer] = None


@dataclass(eq=False)
class TraceStats:
    """Per-period arrays (index ``k - 1`` holds period ``k``) and aggregates.

    ``W`` and ``W_hat`` have ``periods + 1`` entries: the process at ``kT`` and
    the monitor estimate after the k-th delivery (index 0 is the start).
    ``params`` holds the five quantizer parameters used in each period.
    """

    config: SimConfig
    X: np.ndarray
    Y: np.ndarray
    symbol: np.ndarray
    center: np.ndarray
    Q: np.ndarray
    delay: np.ndarray
    params: np.ndarray
    W: np.ndarray
    W_hat: np.ndarray
    empirical_EQ2: float
    empirical_TR: float
    empirical_MSE: float
    symbol_counts: tuple
    path: Optional[tuple] = None

    def __len__(self):
        return self.X.size

    def record(self, k):
        i = k - 1
        return PeriodRecord(
            k, float(self.X[i]), float(self.Y[i]), Symbol(int(self.symbol[i])),
            float(self.center[i]), float(self.Q[i]), float(self.delay[i]), Quantizer(*map(float, self.params[i])),
        )

    @property
    def records(self):
        return [self.record(k) for k in range(1, len(self) + 1)]

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["k", "X", "Y", "symbol", "center", "Q", "delay"])
            for i in range(len(self)):
                w.writerow([i + 1] + [f"{v:.9g}" for v in (self.X[i], self.Y[i])]
                           + [int(self.symbol[i])]
                           + [f"{v:.9g}" for v in (self.center[i], self.Q[i], self.delay[i])])

    def write_path_csv(self, path):
        if self.path is None:
            raise ValueError("trace was simulated without record_path=True")
        t, W, W_hat = self.path
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "W", "What"])
            for row in zip(t, W, W_hat):
                w.writerow([f"{v:.9g}" for v in row])


# -- simulation ---------------------------------------------------------------

@dataclass
class _Quantized:
    X: np.ndarray
    Y: np.ndarray
    symbol: np.ndarray
    center: np.ndarray
    Q: np.ndarray
    params: np.ndarray


def _run_periods(cfg, rng, observer=None):
    K = cfg.periods
    X = rng.normal(0.0, math.sqrt(cfg.sigma2 * cfg.T), K)
    Y = np.empty(K)
    symbol = np.empty(K, dtype=np.int8)
    center = np.empty(K)
    Q = np.empty(K)
    params = np.empty((K, 5))
    state = cfg.strategy.start(cfg)
    q_prev = 0.0
    for i in range(K):
        y = X[i] + q_prev
        quant = state.next_quantizer()
        s, c, q = quant.apply(y)
        Y[i], symbol[i], center[i], Q[i] = y, s, c, q
        params[i] = quant.as_tuple()
        rec = PeriodRecord(i + 1, float(X[i]), float(y), s, c, q, 0.0, quant)
        if observer is not None:
            observer(rec, state)
        state.observe(rec)
        q_prev = q
    return _Quantized(X, Y, symbol, center, Q, params)


def _bridge_block(w0, w1, sigma2, T, substeps, z):
    """Rows of a Wiener path at ``j*T/substeps``, j = 0..substeps, pinned at both ends.

    ``z`` is a standard-normal array of shape ``(rows, substeps)``.
    """
    s = np.arange(substeps + 1) * T / substeps
    B = np.zeros((z.shape[0], substeps + 1))
    np.cumsum(z * math.sqrt(T / substeps), axis=1, out=B[:, 1:])
    frac = s / T
    bridge = B - frac * B[:, -1:]
    return w0[:, None] + frac * (w1 - w0)[:, None] + math.sqrt(sigma2) * bridge


def brownian_bridge_fill(W_start, W_end, sigma2, T, substeps, rng):
    """Sample ``W`` at the interior times ``j*T/substeps``, j = 1..substeps-1,
    given ``W(0) = W_start`` and ``W(T) = W_end``."""
    if substeps < 1:
        raise ConfigurationError("substeps must be >= 1")
    z = rng.standard_normal((1, substeps))
    row = _bridge_block(np.array([W_start], float), np.array([W_end], float), sigma2, T, substeps, z)[0]
    return row[1:-1]


def _segment_integral(e0, e1, length, sigma2):
    # E[int (W - const)^2] over a segment given the endpoint errors.
    return length * ((e0 * e0 + e0 * e1 + e1 * e1) / 3.0 + sigma2 * length / 6.0)


def _integrate_path(cfg, qz, delays, W, W_hat, rng, record_path):
    """Conditional-expectation integral of (W - W_hat)^2 over every period.

    Returns ``(per-interval integrals, path or None)``.  Interval ``p`` spans
    ``[pT, (p+1)T)``; the p-th delivery lands at ``pT + d_p`` inside it.
    """
    K, M, T, s2 = cfg.periods, cfg.substeps, cfg.T, cfg.sigma2
    s = np.arange(M + 1) * T / M
    cell = s[1:] - s[:-1]
    totals = np.empty(K)
    pieces = []
    for p0 in range(0, K, _CHUNK):
        p = np.arange(p0, min(p0 + _CHUNK, K))
        n = p.size
        z = rng.standard_normal((n, M))
        z_d = rng.standard_normal(n)
        Wp = _bridge_block(W[p], W[p + 1], s2, T, M, z)
        hb = W_hat[np.maximum(p - 1, 0)]
        ha = W_hat[p]
        d = np.where(p >= 1, delays[np.maximum(p - 1, 0)], 0.0)
        j = np.clip(np.searchsorted(s, d, side="right") - 1, 0, M - 1)
        rows = np.arange(n)
        sj, sj1 = s[j], s[j + 1]
        lo, hi = Wp[rows, j], Wp[rows, j + 1]
        Wd = lo + (d - sj) / (sj1 - sj) * (hi - lo) + np.sqrt(s2 * (d - sj) * (sj1 - d) / (sj1 - sj)) * z_d

        eb = Wp - hb[:, None]
        ea = Wp - ha[:, None]
        before = _segment_integral(eb[:, :-1], eb[:, 1:], cell, s2)
        after = _segment_integral(ea[:, :-1], ea[:, 1:], cell, s2)
        col = np.arange(M)
        acc = np.where(col < j[:, None], before, after)
        split = (_segment_integral(lo - hb, Wd - hb, d - sj, s2)
                 + _segment_integral(Wd - ha, hi - ha, sj1 - d, s2))
        acc[rows, j] = split
        totals[p] = acc.sum(axis=1)

        if record_path:
            t = p[:, None] * T + s[None, :M]
            wh = np.where(s[None, :M] < d[:, None], hb[:, None], ha[:, None])
            t = np.concatenate([t, (p * T + d)[:, None]], axis=1)
            w = np.concatenate([Wp[:, :M], Wd[:, None]], axis=1)
            wh = np.concatenate([wh, ha[:, None]], axis=1)
            pieces.append((t.ravel(), w.ravel(), wh.ravel()))

    path = None
    if record_path:
        t = np.concatenate([a for a, _, _ in pieces] + [[K * T]])
        w = np.concatenate([b for _, b, _ in pieces] + [[W[K]]])
        wh = np.concatenate([c for _, _, c in pieces] + [[W_hat[K - 1]]])
        # stable sort keeps the pre-delivery grid sample ahead of a coincident delivery
        order = np.argsort(t, kind="stable")
        path = (t[order], w[order], wh[order])
    return totals, path


def _finish(cfg, qz, rng_bridge, rng_delay, record_path):
    K, b = cfg.periods, cfg.burn_in
    delays = cfg.delay.sample(rng_delay, K)
    if cfg.delay.is_random:
        # Silence is never delivered; the monitor cannot know when it would have been.
        increments = np.where(qz.symbol != Symbol.EMPTY, qz.center, 0.0)
    else:
        increments = qz.center
    W = np.concatenate([[0.0], np.cumsum(qz.X)])
    W_hat = np.concatenate([[0.0], np.cumsum(increments)])
    totals, path = _integrate_path(cfg, qz, delays, W, W_hat, rng_bridge, record_path)

    post = slice(b, K)
    n_post = K - b
    counts = tuple(int(np.count_nonzero(qz.symbol == s)) for s in Symbol)
    sent = np.count_nonzero(qz.symbol[post] != Symbol.EMPTY)
    return TraceStats(
        config=cfg, X=qz.X, Y=qz.Y, symbol=qz.symbol, center=qz.center, Q=qz.Q,
        delay=delays, params=qz.params, W=W, W_hat=W_hat,
        empirical_EQ2=float(np.mean(qz.Q[post] ** 2)),
        empirical_TR=float(sent / (n_post * cfg.T)),
        empirical_MSE=float(totals[post].sum() / (n_post * cfg.T)),
        symbol_counts=counts,
        path=path,
    )


def simulate(cfg: SimConfig, record_path=False, observer=None) -> TraceStats:
    """Run ``cfg.periods`` sampling periods.

    ``observer(record, state)`` is called each period after the quantizer is
    applied and before the strategy state is updated.
    """
    rng_inc, rng_bridge, rng_delay = cfg.streams()
    qz = _run_periods(cfg, rng_inc, observer)
    return _finish(cfg, qz, rng_bridge, rng_delay, record_path)


def with_delay(trace: TraceStats, delay, record_path=False) -> TraceStats:
    """Same result as ``simulate(replace(trace.config, delay=delay))``, reusing
    the quantization pass (which never depends on the delay)."""
    cfg = replace(trace.config, delay=delay)
    _, rng_bridge, rng_delay = cfg.streams()
    qz = _Quantized(trace.X, trace.Y, trace.symbol, trace.center, trace.Q, trace.params)
    return _finish(cfg, qz, rng_bridge, rng_delay, record_path)


def derive_last_bit_tables(trace: TraceStats):
    """Average the per-period quantizers grouped by the previous period's symbol."""
    prev = trace.symbol[:-1]
    params = trace.params[1:]
    table = {}
    for s in Symbol:
        rows = params[prev == s]
        if rows.size == 0:
            raise InsufficientDataError(f"symbol {s.glyph} never observed as a predecessor")
        table[s] = Quantizer(*map(float, rows.mean(axis=0)))
    return table
