"""Where a fuzzy-valued function changes its differentiability form.

The running example is trap(2,4,5,8) * (cos x - x^2/32) on [-10, 10]:
the band's width breathes with the kernel, and each time the breathing
reverses the lateral derivative flips between its i_p and d_p forms.
"""

import os

import numpy as np

from fuzznum import (FuzzyFunction, FuzzyNumber, classification_profile,
                     find_switching_points, gp_derivative, integrate,
                     newton_leibniz_check, p_derivative)

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except Exception:
    plt = None

HERE = os.path.dirname(os.path.abspath(__file__))


def kernel(x):
    return np.cos(x) - x * x / 32.0


def d_kernel(x):
    return -np.sin(x) - x / 16.0


F = FuzzyFunction.from_product(FuzzyNumber.trapezoidal(2, 4, 5, 8),
                               kernel, (-10.0, 10.0), d_kernel=d_kernel)

print("classification regions (coarse scan):")
for region in classification_profile(F, n_scan=801):
    print(f"  [{region.x_lo:8.4f}, {region.x_hi:8.4f}]  {region.label}")

print("\nswitching points:")
for sp in find_switching_points(F, n_scan=2001):
    print(f"  x = {sp.x:8.4f}  {sp.kind}")

x0 = 2.0
rep = p_derivative(F, x0)
lo, hi = rep.value.cuts()
print(f"\np-derivative at x={x0} ({rep.classification}): "
      f"support [{lo[0]:.4f}, {hi[0]:.4f}], core [{lo[-1]:.4f}, {hi[-1]:.4f}]")
gp = gp_derivative(F, x0)
glo, ghi = gp.cuts()
print(f"gp-derivative at x={x0}:      "
      f"support [{glo[0]:.4f}, {ghi[0]:.4f}], core [{glo[-1]:.4f}, {ghi[-1]:.4f}]")

# Integrating the derivative across a switch telescopes through parametric
# differences of the segment-end values rather than one big difference.
report = newton_leibniz_check(F, -1.2, 1.2, n_scan=801)
print(f"\nintegral-vs-telescoped check on [-1.2, 1.2]: "
      f"distance {report.distance:.2e}, "
      f"{len(report.switches)} switch inside, ok={report.ok}")

total = integrate(F, -1.2, 1.2)
tlo, thi = total.cuts()
print(f"plain level-wise integral over the same window: "
      f"support [{tlo[0]:.4f}, {thi[0]:.4f}]")

if plt is not None:
    xs = np.linspace(-10.0, 10.0, 801)
    lo = np.array([F.value(x).cuts()[0][0] for x in xs])
    hi = np.array([F.value(x).cuts()[1][0] for x in xs])
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.fill_between(xs, lo, hi, alpha=0.3, label="support band")
    for sp in find_switching_points(F, n_scan=2001):
        ax.axvline(sp.x, color="tab:red" if sp.kind == "typeII" else "tab:green",
                   lw=0.8)
    ax.set_xlabel("x")
    ax.legend()
    out = os.path.join(HERE, "derivatives_and_switching.png")
    fig.savefig(out, dpi=120, bbox_inches="tight")
    print(f"\nwrote {out}")
