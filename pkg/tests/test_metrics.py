import numpy as np
import pytest
from hypothesis import given, strategies as st

from wienerbit import metrics
from wienerbit.errors import ParameterError


def test_instantaneous_mse():
    assert metrics.instantaneous_mse(1.0, 3.0, 3, 1.0, 0.0) == 0.0
    assert metrics.instantaneous_mse(1.0, 3.5, 3, 1.0, 0.3) == pytest.approx(0.59)


@given(s2=st.floats(0.1, 5), age=st.floats(0, 3), q=st.floats(-2, 2), k=st.integers(0, 50))
def test_error_acts_as_extra_age(s2, age, q, k):
    T = 1.0
    t = k * T + age
    shifted_age = t - (k * T - q * q / s2)
    assert metrics.instantaneous_mse(s2, t, k, T, q) == pytest.approx(s2 * shifted_age, rel=1e-9, abs=1e-12)


def test_aoi_sawtooth():
    T, d, k = 1.0, 0.3, 4
    assert metrics.aoi(k * T + d, k, T) == pytest.approx(d)
    assert metrics.aoi((k + 1) * T + d - 1e-12, k, T) == pytest.approx(T + d)
    # average over one cycle [kT + d, (k+1)T + d)
    t = np.linspace(k * T + d, (k + 1) * T + d, 200_001)[:-1]
    ages = np.array([metrics.aoi(v, k, T) for v in t[::100]])
    assert ages.mean() == pytest.approx(T / 2 + d, abs=1e-3)


def test_aoi_rejects_future_sample():
    with pytest.raises(ParameterError):
        metrics.aoi(0.5, 1, 1.0)
    with pytest.raises(ParameterError):
        metrics.instantaneous_mse(1.0, 0.5, 1, 1.0, 0.0)


@pytest.mark.parametrize("args,expected", [
    ((1, 1, 0, 0), 0.5),
    ((1, 1, 0.3, 0.2367), 1.0367),
    ((4, 1, 0.1, 4 * 0.2367), 3.3468),
])
def test_period_mse(args, expected):
    assert metrics.period_mse(*args) == pytest.approx(expected, abs=1e-12)


def test_average_mse():
    det = metrics.AnalyticInputs(1, 1, 0.3, 0.2367)
    assert metrics.average_mse(det) == pytest.approx(1.0367)
    rnd = metrics.AnalyticInputs(1, 1, 0.3, 0.2390)
    assert metrics.average_mse(rnd, random_delay=True) == pytest.approx(1.0390)
    assert metrics.average_mse(metrics.AnalyticInputs(1, 1, 0, 0)) == 0.5


@given(st.floats(0, 0.99), st.floats(0, 1))
def test_average_mse_forms_coincide(d, eq2):
    a = metrics.AnalyticInputs(1.0, 1.0, d, eq2)
    assert metrics.average_mse(a) == pytest.approx(metrics.average_mse(a, random_delay=True), abs=1e-15)


@pytest.mark.parametrize("kw", [dict(sigma2=-1), dict(delay_mean=1.0), dict(EQ2=-0.1)])
def test_analytic_inputs_validation(kw):
    base = dict(sigma2=1.0, T=1.0, delay_mean=0.2, EQ2=0.2)
    base.update(kw)
    with pytest.raises(ParameterError):
        metrics.AnalyticInputs(**base)


@pytest.mark.parametrize("p,T,expected", [(0.46, 1, 0.54), (1, 3.0, 0.0), (0, 2, 0.5)])
def test_transmission_rate(p, T, expected):
    assert metrics.transmission_rate(p, T) == pytest.approx(expected)


def test_transmission_rate_rejects():
    with pytest.raises(ParameterError):
        metrics.transmission_rate(1.2, 1.0)
    with pytest.raises(ParameterError):
        metrics.transmission_rate(0.5, 0.0)
