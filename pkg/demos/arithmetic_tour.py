"""Tour of the arithmetic layer: level sets, the four semantics, differences.

Run as a script.  Prints small level tables; drops a PNG next to this file
when matplotlib is importable.
"""

import os

import numpy as np

from fuzznum import (AlphaGrid, FuzzyNumber, arith, distance, gp_difference,
                     p_difference)

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except Exception:
    plt = None

HERE = os.path.dirname(os.path.abspath(__file__))
g = AlphaGrid.uniform(5)  # coarse on purpose, tables stay readable


def show(label, fz):
    lo, hi = fz.cuts(g)
    rows = "  ".join(f"a={a:.2f}:[{l:.3f},{u:.3f}]"
                     for a, l, u in zip(g.levels, lo, hi))
    print(f"{label:28s} {rows}")


a = FuzzyNumber.triangular(12, 15, 19)
b = FuzzyNumber.triangular(5, 9, 11)

print("operands")
show("a = tri(12,15,19)", a)
show("b = tri(5,9,11)", b)

print("\nsums and products agree across semantics when operands are distinct")
for sem in ("standard", "parametric", "cia"):
    show(f"a + b  [{sem}]", arith(a, b, "+", sem=sem))
show("a * b  [standard]", arith(a, b, "*"))

print("\nsubtraction is where the semantics split")
show("a - b  [standard]", arith(a, b, "-"))
show("a - a  [standard]", arith(a, a, "-"))   # width doubles
show("a - a  [cia]", arith(a, a, "-", sem="cia"))  # same object: one slot
show("a - a  [slcia]", arith(a, a, "-", sem="slcia"))

print("\nthe parametric difference may fail: its candidate cuts do not nest")
rep = p_difference(a, b)
print(f"a (-)p b exists: {rep.exists} (condition {rep.condition_used})")

print("the generalized form always exists and is the nesting repair")
show("a (-)gp b", gp_difference(a, b))

# With a narrower subtrahend the plain parametric difference does exist,
# and the generalized one collapses onto it.
nb = FuzzyNumber.triangular(2, 3, 4)
rep2 = p_difference(a, nb)
print(f"\na (-)p tri(2,3,4) exists: {rep2.exists} "
      f"(condition {rep2.condition_used})")
show("a (-)p tri(2,3,4)", rep2.result)
show("a (-)gp tri(2,3,4)", gp_difference(a, nb))

print(f"\nmetric: D(a, tri(2,3,4)) = {distance(a, nb):.6f}")
print(f"        D(a (-)p tri(2,3,4), 0) = "
      f"{distance(rep2.result, FuzzyNumber.crisp(0.0)):.6f} (same number)")

if plt is not None:
    fine = AlphaGrid.uniform(101)
    fig, ax = plt.subplots(figsize=(6, 4))
    for fz, color, label in ((gp_difference(a, b), "tab:blue", "a (-)gp b"),
                             (arith(a, b, "-"), "tab:orange",
                              "a - b standard")):
        lo, hi = fz.cuts(fine)
        ax.plot(lo, fine.levels, color=color, label=label)
        ax.plot(hi, fine.levels, color=color)
    ax.set_xlabel("value")
    ax.set_ylabel("alpha")
    ax.legend()
    out = os.path.join(HERE, "arithmetic_tour.png")
    fig.savefig(out, dpi=120, bbox_inches="tight")
    print(f"\nwrote {out}")
