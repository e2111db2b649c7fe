"""Three-region quantizers with a silent middle symbol, and Lloyd-Max design."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, fields, replace
from typing import NamedTuple

from . import distgrid
from .distgrid import DiscretePdf, Region, RegionKind
from .errors import DegenerateRegionError, NonConvergenceError, ParameterError


class Symbol(enum.IntEnum):
    """Codebook entry.  ``EMPTY`` means nothing is sent and costs nothing."""

    MINUS = -1
    EMPTY = 0
    PLUS = 1

    @property
    def cost(self) -> int:
        return 0 if self is Symbol.EMPTY else 1

    @property
    def glyph(self) -> str:
        return {-1: "-", 0: "0", 1: "+"}[self.value]


@dataclass(frozen=True)
class Quantizer:
    """Thresholds and reconstruction points, all in signal units.

    ``y <= tau_minus`` maps to ``c_minus``, ``y >= tau_plus`` to ``c_plus``
    and anything strictly between to ``c_empty``.
    """

    tau_minus: float
    tau_plus: float
    c_minus: float
    c_empty: float
    c_plus: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v):
                raise ParameterError(f"{f.name} must be finite")
        if not self.tau_minus < self.tau_plus:
            raise ParameterError("tau_minus must be below tau_plus")
        if not (self.c_minus <= self.tau_minus <= self.c_empty <= self.tau_plus <= self.c_plus):
            raise ParameterError(f"centers must lie inside their regions: {self}")

    def classify(self, y: float) -> Symbol:
        if y <= self.tau_minus:
            return Symbol.MINUS
        if y >= self.tau_plus:
            return Symbol.PLUS
        return Symbol.EMPTY

    def center(self, symbol: Symbol) -> float:
        return (self.c_minus, self.c_empty, self.c_plus)[symbol + 1]

    def apply(self, y: float):
        """Return ``(symbol, center, y - center)``."""
        s = self.classify(y)
        c = self.center(s)
        return s, c, y - c

    def region(self, symbol: Symbol) -> Region:
        if symbol is Symbol.MINUS:
            return Region(RegionKind.LEFT_TAIL, upper=self.tau_minus)
        if symbol is Symbol.PLUS:
            return Region(RegionKind.RIGHT_TAIL, lower=self.tau_plus)
        return Region(RegionKind.MIDDLE, self.tau_minus, self.tau_plus)

    def scaled(self, a: float) -> "Quantizer":
        return Quantizer(*(a * v for v in self.as_tuple()))

    def mirrored(self) -> "Quantizer":
        """Quantizer for ``-Y``."""
        return Quantizer(-self.tau_plus, -self.tau_minus, -self.c_plus, -self.c_empty, -self.c_minus)

    def as_tuple(self):
        return (self.tau_minus, self.tau_plus, self.c_minus, self.c_empty, self.c_plus)

    def to_text(self) -> str:
        return "".join(f"{f.name}={getattr(self, f.name)!r}\n" for f in fields(self))

    @classmethod
    def from_text(cls, text: str) -> "Quantizer":
        values = {}
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            if not sep:
                raise ParameterError(f"expected key=value, got {line!r}")
            values[key.strip()] = float(val)
        names = {f.name for f in fields(cls)}
        if set(values) != names:
            raise ParameterError(f"quantizer file needs exactly the keys {sorted(names)}")
        return cls(**values)


# Quantizers averaged over a long optimum-tracking run, grouped by the
# previous symbol, in units of sigma*sqrt(T).
LAST_BIT_TABLE = {
    Symbol.MINUS: Quantizer(-0.768, 0.639, -1.489, -0.048, 1.326),
    Symbol.EMPTY: Quantizer(-0.655, 0.655, -1.310, 0.0, 1.310),
    Symbol.PLUS: Quantizer(-0.639, 0.768, -1.326, 0.048, 1.489),
}
# The fixed-point Gaussian quantizer, same units.
STATIC_GAUSSIAN_QUANTIZER = Quantizer(-0.680, 0.680, -1.360, 0.0, 1.360)


@dataclass(frozen=True)
class LloydConfig:
    epsilon: float = 1e-4
    max_iterations: int = 500

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ParameterError("epsilon must be positive")
        if self.max_iterations < 1:
            raise ParameterError("max_iterations must be >= 1")


class LloydResult(NamedTuple):
    quantizer: Quantizer
    distortion: float
    iterations: int


def _region_stats(pdf: DiscretePdf, tau_minus, tau_plus, order=2):
    """Integrals of (1, y[, y^2]) over the left, middle and right cells."""
    left = pdf.partial_integrals(tau_minus, order)
    upto_plus = pdf.partial_integrals(tau_plus, order)
    total = pdf.total_integrals(order)
    mid = tuple(b - a for a, b in zip(left, upto_plus))
    right = tuple(b - a for a, b in zip(upto_plus, total))
    return left, mid, right


def _centroids(pdf, tau_minus, tau_plus):
    if tau_plus - tau_minus < pdf.grid.step:
        raise DegenerateRegionError("middle region narrower than one grid step")
    out = []
    for name, (m0, m1) in zip(("minus", "empty", "plus"), _region_stats(pdf, tau_minus, tau_plus, order=1)):
        if not m0 > distgrid.MASS_FLOOR:
            raise DegenerateRegionError(f"region {name} has mass {m0:.3e}")
        out.append(m1 / m0)
    return out


def _distortion(pdf, tau_minus, tau_plus, centers):
    total = 0.0
    for c, (m0, m1, m2) in zip(centers, _region_stats(pdf, tau_minus, tau_plus)):
        total += m2 - 2.0 * c * m1 + c * c * m0
    return total


def expected_distortion(pdf: DiscretePdf, q: Quantizer) -> float:
    return _distortion(pdf, q.tau_minus, q.tau_plus, (q.c_minus, q.c_empty, q.c_plus))


def symbol_probabilities(pdf: DiscretePdf, q: Quantizer):
    """``(p_minus, p_empty, p_plus)``."""
    left, mid, right = (s[0] for s in _region_stats(pdf, q.tau_minus, q.tau_plus, order=1))
    z = left + mid + right
    return left / z, mid / z, right / z


def lloyd_max(pdf: DiscretePdf, cfg: LloydConfig = LloydConfig(), history=None) -> LloydResult:
    """Alternate centroid and midpoint steps from the tercile thresholds.

    Stops once neither threshold moves by more than ``cfg.epsilon``.  The
    returned thresholds are the ones the centers were computed from, so the
    centers are exact conditional means and the thresholds are within
    epsilon of the center midpoints.  If ``history`` is a list, the
    distortion after each centroid step is appended to it.
    """
    new_minus = distgrid.cdf_inverse(pdf, 1.0 / 3.0)
    new_plus = distgrid.cdf_inverse(pdf, 2.0 / 3.0)
    iterations = 0
    while True:
        iterations += 1
        tau_minus, tau_plus = new_minus, new_plus
        centers = _centroids(pdf, tau_minus, tau_plus)
        c_minus, c_empty, c_plus = centers
        if history is not None:
            history.append(_distortion(pdf, tau_minus, tau_plus, centers))
        new_minus = 0.5 * (c_minus + c_empty)
        new_plus = 0.5 * (c_empty + c_plus)
        if abs(tau_minus - new_minus) <= cfg.epsilon and abs(tau_plus - new_plus) <= cfg.epsilon:
            q = Quantizer(tau_minus, tau_plus, *centers)
            return LloydResult(q, expected_distortion(pdf, q), iterations)
        if iterations >= cfg.max_iterations:
            raise NonConvergenceError(
                f"Lloyd iteration did not converge in {iterations} steps",
                last=Quantizer(tau_minus, tau_plus, *centers),
            )


class FixedPoint(NamedTuple):
    rho: float
    sigmaG2: float
    EQ2: float
    quantizer: Quantizer


def unit_gaussian_distortion(half_width_sigmas=7.0, step_sigmas=1e-3, cfg: LloydConfig = LloydConfig()):
    """Normalized 3-level Lloyd distortion of a unit-variance Gaussian."""
    grid = distgrid.make_grid(1.0, 1.0, half_width_sigmas, step_sigmas)
    return lloyd_max(distgrid.gaussian_pdf(grid, 0.0, 1.0), cfg).distortion


def gaussian_fixed_point(sigma2T, half_width_sigmas=7.0, step_sigmas=1e-3, cfg: LloydConfig = LloydConfig()):
    """Static quantizer obtained by treating every quantization error as Gaussian.

    If the input has variance ``v`` the error has variance ``rho * v``, and the
    next input variance is ``sigma2T + rho * v``; the fixed point of that map is
    ``sigma2T / (1 - rho)``.
    """
    if not sigma2T > 0:
        raise ParameterError("sigma2T must be positive")
    rho = unit_gaussian_distortion(half_width_sigmas, step_sigmas, cfg)
    EQ2 = rho / (1.0 - rho) * sigma2T
    sigmaG2 = sigma2T + EQ2
    grid = distgrid.make_grid(sigma2T, 1.0, half_width_sigmas, step_sigmas * math.sqrt(sigma2T))
    q = lloyd_max(distgrid.gaussian_pdf(grid, 0.0, sigmaG2), cfg).quantizer
    if abs(q.c_empty) < 1e-9:
        q = replace(q, c_empty=0.0)
    return FixedPoint(rho, sigmaG2, EQ2, q)
