"""Where the error settles if we pretend it stays Gaussian.

Each period the quantizer input is the fresh increment plus last period's
error.  If both were Gaussian the input variance would obey
v -> sigma2*T + rho*v, with rho the normalized distortion of the optimal
three-level quantizer.  Iterating the map by hand shows the geometric
convergence to the closed-form fixed point.
"""
from wienerbit.quantize import gaussian_fixed_point

fp = gaussian_fixed_point(1.0)
print(f"rho (normalized distortion) = {fp.rho:.5f}")

v = 1.0
for k in range(1, 9):
    print(f"  period {k}: input variance {v:.5f}, error variance {fp.rho * v:.5f}")
    v = 1.0 + fp.rho * v

print(f"\nfixed point: input variance {fp.sigmaG2:.5f}, error variance {fp.EQ2:.5f}")
q = fp.quantizer
print("static quantizer designed for that input:")
print(f"  thresholds {q.tau_minus:+.4f} {q.tau_plus:+.4f}")
print(f"  centers    {q.c_minus:+.4f} {q.c_empty:+.4f} {q.c_plus:+.4f}")
print("\nfor a different sigma^2*T everything scales:")
for s2T in (0.25, 4.0):
    print(f"  sigma2T={s2T}: error variance {gaussian_fixed_point(s2T).EQ2:.5f}")
