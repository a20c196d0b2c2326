#!/usr/bin/env python3
"""Walkthrough: linear vs quadratic NLL runtime.

Times one NLL evaluation for the log-space kernels and for a naive
index-matrix reference across input sizes, then reports the growth ratios.
A PNG of the curves is written when matplotlib is available.
"""

import numpy as np

import coxkit as ck

SIZES = [2 ** k for k in range(6, 14)]  # 64 .. 8192

print(f"timing one NLL evaluation per method, sizes {SIZES[0]}..{SIZES[-1]}")
report = ck.run_scaling_bench(SIZES, reps=5, seed=7)

by = {(r.n, r.method): r.median_ns for r in report.rows}
methods = ("fast_breslow", "fast_efron", "naive_breslow", "naive_efron")
print(f"\n{'n':>6} " + " ".join(f"{m:>14}" for m in methods) + "   (median us)")
for n in SIZES:
    cells = " ".join(f"{by[(n, m)] / 1e3:14.1f}" for m in methods)
    print(f"{n:>6} {cells}")

print("\ngrowth from n=1024 to n=8192 (8x the input):")
for m in methods:
    ratio = by[(8192, m)] / by[(1024, m)]
    kind = "linear-ish" if ratio < 12 else "quadratic-ish"
    print(f"  {m:14s} {ratio:6.1f}x   {kind}")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("\nmatplotlib not installed; skipping the plot")
else:
    fig, ax = plt.subplots(figsize=(6, 4))
    for m in methods:
        ax.loglog(SIZES, [by[(n, m)] / 1e6 for n in SIZES], marker="o", label=m)
    ax.set_xlabel("input size n")
    ax.set_ylabel("median time per NLL evaluation [ms]")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig("runtime_scaling.png", dpi=120)
    print("\nwrote runtime_scaling.png")
