"""Estimation error against channel delay for the three strategies.

The time-averaged squared error should be sigma2*T/2 + sigma2*d + E[Q^2]:
the quantization error acts like extra staleness on top of the delay.  We
compare the simulated error with that formula, including a uniformly random
delay for the static quantizer (the only one that does not need to know when
a silent period ends).  At these horizons a deviation of a percent or two is
sampling noise; it shrinks with longer runs.
"""
from wienerbit import metrics
from wienerbit.track import (
    Deterministic, GaussianStatic, LastBitAware, OptimumTracking, SimConfig, UniformRandom,
    simulate, with_delay,
)

strategies = {
    "optimum": OptimumTracking(),
    "lastbit": LastBitAware.standard(),
    "gaussian": GaussianStatic.from_fixed_point(),
}
delays = [0.0, 0.2, 0.4, 0.6, 0.8]

print("strategy  delay       simulated  formula   rel.err")
for name, strategy in strategies.items():
    periods = 5_000 if name == "optimum" else 50_000
    base = simulate(SimConfig(periods=periods, burn_in=500, seed=1, strategy=strategy))
    models = [Deterministic(d) for d in delays]
    if name == "gaussian":
        models += [UniformRandom(d) for d in delays[1:]]
    for dm in models:
        tr = with_delay(base, dm)
        want = metrics.average_mse(metrics.AnalyticInputs(1.0, 1.0, dm.mean, tr.empirical_EQ2),
                                   random_delay=dm.is_random)
        kind = "uniform" if dm.is_random else "fixed"
        print(f"{name:9s} {dm.mean:.1f} {kind:8s} {tr.empirical_MSE:9.4f} {want:8.4f}  "
              f"{100 * (tr.empirical_MSE - want) / want:+.2f}%")
