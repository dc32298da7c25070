"""
Tail latency
============

The PU usually cares about the worst case more than the mean. The quantile
sweep reports the 95th and 99th percentiles of the latency per scheme as the
false-alarm rate, and with it the throughput, changes.
"""
from crlab.experiments import SweepKind, SweepSpec, run_sweep

spec = SweepSpec(kind=SweepKind.QUANTILE, schemes=("hd", "slotted", "sliding"),
                 grid=(0.01, 0.05, 0.1, 0.3), grid_unit="pf", trials=30_000)
result = run_sweep(spec)

print("scheme               Pf    thr    p95    p99")
for row in result.rows:
    print(f"{row.scheme.value:20s} {row.pf:4.2f}  {row.throughput_norm:.3f}"
          f"  {row.latency_p95:5.0f}  {row.latency_p99:5.0f}")
