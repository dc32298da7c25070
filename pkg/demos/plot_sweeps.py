"""
Latency/throughput curves
=========================

Plots the threshold sweep (mean latency against normalised throughput) and
the fixed-throughput INR sweep. Needs matplotlib, which the package itself
does not depend on. Figures are written next to this script.
"""
import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from crlab.experiments import SweepKind, SweepSpec, run_sweep

here = pathlib.Path(__file__).parent

pf_grid = tuple(np.round(np.geomspace(0.005, 0.6, 14), 4))
tradeoff = run_sweep(SweepSpec(kind=SweepKind.THRESHOLD, schemes=("hd", "slotted", "sliding"),
                               grid=pf_grid, grid_unit="pf", trials=20_000))
fig, ax = plt.subplots()
for scheme in ("hd", "slotted", "sliding"):
    rows = tradeoff.select(scheme, monte_carlo=True)
    ax.semilogy([r.throughput_norm for r in rows], [r.latency_mean for r in rows], "o-", label=scheme)
    exact = tradeoff.select(scheme, monte_carlo=False)
    if exact:
        ax.semilogy([r.throughput_norm for r in exact], [r.latency_mean for r in exact], "k:", lw=1)
ax.set_xlabel("normalised throughput")
ax.set_ylabel("mean access latency [samples]")
ax.legend()
fig.savefig(here / "latency_vs_throughput.png", dpi=120)

inr = run_sweep(SweepSpec(kind=SweepKind.INR_FIXED_THROUGHPUT, grid=tuple(range(11)),
                          target=0.9, trials=20_000))
fig, ax = plt.subplots()
for scheme in ("slotted", "sliding"):
    rows = inr.select(scheme, monte_carlo=True)
    ax.plot([r.inr_db for r in rows], [r.latency_mean for r in rows], "o-", label=scheme)
ax.set_xlabel("INR [dB]")
ax.set_ylabel("mean access latency [samples]")
ax.legend()
fig.savefig(here / "latency_vs_inr.png", dpi=120)
print("wrote", here / "latency_vs_throughput.png", "and", here / "latency_vs_inr.png")
