"""Probability densities sampled on a uniform grid.

A ``DiscretePdf`` stores density values at the grid points.  Integrals use the
midpoint rule: grid point ``i`` represents the cell ``[x_i - h/2, x_i + h/2]``
on which the density is taken to be constant.  Integrals up to an arbitrary
(off-grid) threshold are evaluated exactly under that piecewise-constant
reading, which makes CDFs piecewise linear and lets the Lloyd iteration move
thresholds continuously instead of snapping them to grid points.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import fft as sfft

from .errors import DegenerateRegionError, GridOverflowError, ParameterError

MASS_FLOOR = 1e-12
OVERFLOW_TOLERANCE = 1e-6
KL_FLOOR = 1e-300


@dataclass(frozen=True)
class Grid:
    x_min: float
    x_max: float
    step: float
    n_points: int

    def __post_init__(self):
        if not self.step > 0:
            raise ParameterError("grid step must be positive")
        if not self.x_max > self.x_min:
            raise ParameterError("x_max must exceed x_min")
        if self.n_points != round((self.x_max - self.x_min) / self.step) + 1:
            raise ParameterError("n_points inconsistent with span and step")

    @cached_property
    def x(self) -> np.ndarray:
        x = self.x_min + np.arange(self.n_points) * self.step
        x.flags.writeable = False
        return x

    @cached_property
    def edges(self) -> np.ndarray:
        """Cell boundaries, ``n_points + 1`` of them."""
        e = self.x_min - 0.5 * self.step + np.arange(self.n_points + 1) * self.step
        e.flags.writeable = False
        return e

    @property
    def zero_index(self) -> float:
        return -self.x_min / self.step


def make_grid(sigma2, T, half_width_sigmas=7.0, step=None):
    """Symmetric grid on ``[-h*sigma*sqrt(T), h*sigma*sqrt(T)]``.

    ``step`` is absolute; when omitted it is ``1e-3 * sigma * sqrt(T)``.
    The half-width is rounded to a whole number of steps so that ``x = 0`` is
    a grid point, which the convolution relies on.
    """
    if not (sigma2 > 0 and T > 0 and half_width_sigmas > 0):
        raise ParameterError("sigma2, T and half_width_sigmas must be positive")
    scale = math.sqrt(sigma2 * T)
    if step is None:
        step = 1e-3 * scale
    if not step > 0:
        raise ParameterError("step must be positive")
    m = int(round(half_width_sigmas * scale / step))
    if m < 1:
        raise ParameterError("step larger than the grid half-width")
    return Grid(x_min=-m * step, x_max=m * step, step=step, n_points=2 * m + 1)


class RegionKind(enum.Enum):
    LEFT_TAIL = "left"
    MIDDLE = "middle"
    RIGHT_TAIL = "right"


@dataclass(frozen=True)
class Region:
    """One of the three quantizer cells.

    LeftTail is ``(-inf, upper]``, Middle ``(lower, upper)``, RightTail
    ``[lower, inf)``.
    """

    kind: RegionKind
    lower: float = -math.inf
    upper: float = math.inf

    def __post_init__(self):
        if self.kind is RegionKind.LEFT_TAIL and self.lower != -math.inf:
            raise ParameterError("left tail must be unbounded below")
        if self.kind is RegionKind.RIGHT_TAIL and self.upper != math.inf:
            raise ParameterError("right tail must be unbounded above")
        if not self.lower < self.upper:
            raise ParameterError("empty region")

    def contains(self, y):
        if self.kind is RegionKind.LEFT_TAIL:
            return y <= self.upper
        if self.kind is RegionKind.RIGHT_TAIL:
            return y >= self.lower
        return (y > self.lower) & (y < self.upper)


@dataclass(eq=False)
class DiscretePdf:
    grid: Grid
    density: np.ndarray = field(repr=False)

    def __post_init__(self):
        d = np.asarray(self.density, dtype=float)
        if d.shape != (self.grid.n_points,):
            raise ParameterError("density length does not match the grid")
        if np.any(d < 0) or not np.all(np.isfinite(d)):
            raise ParameterError("density must be finite and non-negative")
        d.flags.writeable = False
        self.density = d

    @classmethod
    def normalized(cls, grid, values):
        """Build from unnormalized non-negative values."""
        values = np.clip(np.asarray(values, dtype=float), 0.0, None)
        total = values.sum() * grid.step
        if not total > 0:
            raise ParameterError("cannot normalize a density with zero mass")
        return cls(grid, values / total)

    @property
    def x(self):
        return self.grid.x

    def mass(self):
        return float(self.density.sum() * self.grid.step)

    @cached_property
    def _cumulative(self):
        # Exact integrals of 1 and y against the piecewise-constant density,
        # accumulated up to each cell edge.
        h = self.grid.step
        f = self.density
        out = np.zeros((2, f.size + 1))
        np.cumsum(f, out=out[0, 1:])
        np.cumsum(f * self.grid.x, out=out[1, 1:])
        out *= h
        return out

    @cached_property
    def _cumulative_sq(self):
        h = self.grid.step
        x = self.grid.x
        out = np.zeros(self.density.size + 1)
        np.cumsum(self.density * (x * x * h + h ** 3 / 12.0), out=out[1:])
        return out

    def partial_integrals(self, t, order=2):
        """``(int f, int y f[, int y^2 f])`` over ``(-inf, t]``.

        ``order=1`` skips the second moment.
        """
        cum = self._cumulative
        sq = self._cumulative_sq if order >= 2 else None
        g = self.grid
        e0 = g.edges[0]
        h = g.step
        if t <= e0:
            return (0.0, 0.0, 0.0)[: order + 1]
        if t >= g.edges[-1]:
            return self.total_integrals(order)
        j = min(int((t - e0) // h), g.n_points - 1)
        e = e0 + j * h
        fj = self.density[j]
        m0 = float(cum[0, j] + fj * (t - e))
        m1 = float(cum[1, j] + fj * (t * t - e * e) / 2.0)
        if sq is None:
            return m0, m1
        return m0, m1, float(sq[j] + fj * (t ** 3 - e ** 3) / 3.0)

    def total_integrals(self, order=2):
        cum = self._cumulative
        if order < 2:
            return float(cum[0, -1]), float(cum[1, -1])
        return float(cum[0, -1]), float(cum[1, -1]), float(self._cumulative_sq[-1])

    def region_integrals(self, region, order=2):
        zero = (0.0,) * (order + 1)
        lo = zero if region.lower == -math.inf else self.partial_integrals(region.lower, order)
        hi = self.total_integrals(order) if region.upper == math.inf else self.partial_integrals(region.upper, order)
        return tuple(b - a for a, b in zip(lo, hi))

    def region_mass(self, region):
        return self.region_integrals(region, order=1)[0]


def gaussian_pdf(grid, mean, variance):
    if not variance > 0:
        raise ParameterError("variance must be positive")
    if not grid.x_min <= mean <= grid.x_max:
        raise ParameterError("mean outside the grid span")
    z = grid.x - mean
    return DiscretePdf.normalized(grid, np.exp(-0.5 * z * z / variance))


def point_mass(grid, at=0.0):
    """Density concentrated in the single cell nearest to ``at``."""
    i = int(round((at - grid.x_min) / grid.step))
    if not 0 <= i < grid.n_points:
        raise ParameterError("point outside the grid span")
    values = np.zeros(grid.n_points)
    values[i] = 1.0
    return DiscretePdf.normalized(grid, values)


def moments(pdf):
    """Midpoint-rule ``(E[X], E[X^2])``."""
    w = pdf.density * pdf.grid.step
    x = pdf.grid.x
    return float(w @ x), float(w @ (x * x))


def cdf_inverse(pdf, p):
    """Smallest ``x`` with ``F(x) >= p``, ``F`` linear inside each cell."""
    if not 0.0 < p < 1.0:
        raise ParameterError("p must lie in (0, 1)")
    cdf = pdf._cumulative[0]
    target = p * cdf[-1]
    j = int(np.searchsorted(cdf, target, side="left"))
    # cdf[j-1] < target <= cdf[j]; interpolate across cell j-1.
    if j == 0:
        return float(pdf.grid.edges[0])
    lo, hi = cdf[j - 1], cdf[j]
    frac = (target - lo) / (hi - lo)
    return float(pdf.grid.edges[j - 1] + frac * pdf.grid.step)


def _shifted(f, a):
    # out[i] = f[i + a], zero where i + a falls off the array
    n = f.size
    out = np.zeros(n)
    lo, hi = max(0, -a), min(n, n - a)
    if lo < hi:
        out[lo:hi] = f[lo + a: hi + a]
    return out


def _cell_weights(grid, region, center):
    """Fraction of each shifted cell ``[x_i + center -/+ h/2]`` inside the region."""
    n, h = grid.n_points, grid.step
    # cell index coordinates measured from x = 0, which keeps the boundary
    # fractions free of cancellation against x_min
    base = grid.zero_index + 0.5
    w = np.ones(n)
    if region.lower != -math.inf:
        u = (region.lower - center) / h + base
        i0 = math.floor(u)
        if i0 >= n:
            w[:] = 0.0
        elif i0 >= 0:
            w[:i0] = 0.0
            w[i0] = 1.0 - (u - i0)
    if region.upper != math.inf:
        v = (region.upper - center) / h + base
        i1 = math.floor(v)
        if i1 < 0:
            w[:] = 0.0
        elif i1 < n:
            w[i1 + 1:] = 0.0
            w[i1] -= 1.0 - (v - i1)
    return np.clip(w, 0.0, 1.0, out=w)


def shift_truncate_normalize(pdf, region, center):
    """Density of ``Y - center`` given ``Y`` in ``region``.

    ``f_Y`` is linearly interpolated at the shifted points; cells straddling
    a region boundary are weighted by the fraction lying inside it.  Mass
    shifted past the grid edge is dropped.
    """
    mass = pdf.region_mass(region)
    if not mass > MASS_FLOOR:
        raise DegenerateRegionError(f"region {region.kind.value} has mass {mass:.3e}")
    g = pdf.grid
    r = center / g.step
    a = math.floor(r)
    theta = r - a
    f = pdf.density
    values = (1.0 - theta) * _shifted(f, a) + theta * _shifted(f, a + 1)
    values *= _cell_weights(g, region, center)
    return DiscretePdf.normalized(g, values)


def _window(grid):
    z = grid.zero_index
    if abs(z - round(z)) > 1e-6:
        raise ParameterError("convolution needs a grid with x = 0 on a grid point")
    return int(round(z))


def _circular_size(grid):
    # Smallest transform length whose wrap-around never lands in the output
    # window, rounded up to a fast size.
    n, off = grid.n_points, _window(grid)
    return sfft.next_fast_len(max(2 * n - 1 - off, off + n), real=True)


def _finish_convolution(grid, full, tolerance=OVERFLOW_TOLERANCE):
    # Total mass of the exact sum density is 1; whatever the window misses escaped.
    off = _window(grid)
    h = grid.step
    # FFT round-off can leave tiny negatives in the far tails.
    inside = np.clip(full[off: off + grid.n_points], 0.0, None) * h
    escaped = 1.0 - inside.sum() * h
    if escaped >= tolerance:
        raise GridOverflowError(escaped, tolerance)
    return DiscretePdf.normalized(grid, inside)


def convolve(a, b, tolerance=OVERFLOW_TOLERANCE):
    """Density of the sum of independent variables with densities ``a`` and ``b``.

    Raises ``GridOverflowError`` if at least ``tolerance`` of the mass falls
    outside the grid; smaller losses are renormalized away.
    """
    if a.grid != b.grid:
        raise ParameterError("convolution operands must share a grid")
    size = _circular_size(a.grid)
    full = sfft.irfft(sfft.rfft(a.density, size) * sfft.rfft(b.density, size), size)
    return _finish_convolution(a.grid, full, tolerance)


def convolve_direct(a, b, tolerance=OVERFLOW_TOLERANCE):
    """Direct-summation version of :func:`convolve`, O(n^2)."""
    if a.grid != b.grid:
        raise ParameterError("convolution operands must share a grid")
    return _finish_convolution(a.grid, np.convolve(a.density, b.density), tolerance)


class Convolver:
    """``convolve(kernel, pdf)`` with the kernel spectrum computed once."""

    def __init__(self, kernel, tolerance=OVERFLOW_TOLERANCE):
        self.kernel = kernel
        self.tolerance = tolerance
        self._size = _circular_size(kernel.grid)
        self._spectrum = sfft.rfft(kernel.density, self._size)

    def __call__(self, pdf):
        if pdf.grid != self.kernel.grid:
            raise ParameterError("convolution operands must share a grid")
        full = sfft.irfft(self._spectrum * sfft.rfft(pdf.density, self._size), self._size)
        return _finish_convolution(pdf.grid, full, self.tolerance)


def kl_divergence(p, q):
    """Relative entropy ``D(p || q)`` in nats."""
    if p.grid != q.grid:
        raise ParameterError("KL operands must share a grid")
    mask = p.density > 0
    pp = p.density[mask]
    qq = np.maximum(q.density[mask], KL_FLOOR)
    return max(float(np.sum(pp * np.log(pp / qq)) * p.grid.step), 0.0)


def moment_matched_gaussian(pdf):
    m1, m2 = moments(pdf)
    return gaussian_pdf(pdf.grid, m1, m2 - m1 * m1)
