"""
Residual self-interference
==========================

A full-duplex SU hears what is left of its own transmission. That residual
raises the sensing floor, and with it the threshold needed for a fixed
false-alarm rate, so the PU is harder to see. Here the INR is swept at a
normalised throughput of 0.9 and a line is fitted to latency against INR.
"""
from crlab.experiments import SweepKind, SweepSpec, run_sweep
from crlab.rng import SeedSpec

spec = SweepSpec(kind=SweepKind.INR_FIXED_THROUGHPUT, grid=tuple(range(0, 11, 2)),
                 target=0.9, trials=30_000, seed=SeedSpec(3, 0))
result = run_sweep(spec)

print("INR dB  slotted  sliding")
for inr in spec.grid:
    slotted = [r for r in result.select("slotted", True) if r.inr_db == inr][0]
    sliding = [r for r in result.select("sliding", True) if r.inr_db == inr][0]
    print(f"{inr:6.0f}  {slotted.latency_mean:7.2f}  {sliding.latency_mean:7.2f}")

for name, value in sorted(result.fits.items()):
    print(f"{name}: {value:.3f}")
