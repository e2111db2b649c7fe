"""Closed-form MSE, age-of-information and transmission-rate expressions."""
from __future__ import annotations

from dataclasses import dataclass

from .errors import ParameterError


@dataclass(frozen=True)
class AnalyticInputs:
    sigma2: float
    T: float
    delay_mean: float
    EQ2: float

    def __post_init__(self):
        if min(self.sigma2, self.T, self.delay_mean, self.EQ2) < 0:
            raise ParameterError("analytic inputs must be non-negative")
        if self.T > 0 and not self.delay_mean < self.T:
            raise ParameterError("mean delay must be below the period")


def aoi(t, k_t, T):
    """Age of the freshest delivered sample, taken at ``k_t * T``."""
    age = t - k_t * T
    if age < 0:
        raise ParameterError("t precedes the sampling instant k_t*T")
    return age


def instantaneous_mse(sigma2, t, k_t, T, Q):
    """``sigma2 * AoI(t) + Q**2``.

    Equivalently the age at ``t`` of a sample taken ``Q**2 / sigma2`` earlier
    than ``k_t * T``: quantization error acts as extra staleness.
    """
    return sigma2 * aoi(t, k_t, T) + Q * Q


def period_mse(sigma2, T, d, EQ2_k):
    """Expected time-averaged MSE over ``[(k-1)T + d, kT + d]``."""
    return sigma2 * T / 2.0 + sigma2 * d + EQ2_k


def average_mse(inputs: AnalyticInputs, random_delay=False):
    """Long-run MSE.  For a random delay the delay enters through its mean;
    both forms coincide numerically when ``delay_mean`` is the constant delay."""
    base = inputs.sigma2 * inputs.T / 2.0 + inputs.EQ2
    if random_delay:
        return base + inputs.sigma2 * inputs.delay_mean
    return inputs.sigma2 * inputs.T / 2.0 + inputs.sigma2 * inputs.delay_mean + inputs.EQ2


def transmission_rate(p_empty, T):
    """Non-silent transmissions per unit time."""
    if not 0.0 <= p_empty <= 1.0:
        raise ParameterError("p_empty must be a probability")
    if not T > 0:
        raise ParameterError("T must be positive")
    return (1.0 - p_empty) / T
