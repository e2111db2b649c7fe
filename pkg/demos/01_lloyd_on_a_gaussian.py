"""Design a three-level quantizer for a standard normal input.

The middle level is silence: a sample that lands there is not transmitted.
We watch Lloyd's algorithm walk from the tercile thresholds to the optimum
and print how often each symbol would be sent.
"""
from wienerbit import distgrid
from wienerbit.quantize import lloyd_max, symbol_probabilities

grid = distgrid.make_grid(1.0, 1.0)
pdf = distgrid.gaussian_pdf(grid, 0.0, 1.0)

print("starting thresholds (terciles):",
      f"{distgrid.cdf_inverse(pdf, 1 / 3):+.4f}", f"{distgrid.cdf_inverse(pdf, 2 / 3):+.4f}")

history = []
q, distortion, iterations = lloyd_max(pdf, history=history)
for i, d in enumerate(history, 1):
    print(f"  iteration {i:2d}  distortion {d:.6f}")

print(f"\nconverged after {iterations} iterations")
print(f"thresholds  {q.tau_minus:+.4f}  {q.tau_plus:+.4f}")
print(f"centers     {q.c_minus:+.4f}  {q.c_empty:+.4f}  {q.c_plus:+.4f}")
print(f"mean squared error {distortion:.4f} (input variance 1)")

p_minus, p_empty, p_plus = symbol_probabilities(pdf, q)
print(f"P(-)={p_minus:.3f}  P(silent)={p_empty:.3f}  P(+)={p_plus:.3f}")
