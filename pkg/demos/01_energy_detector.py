"""
Energy detection with a partially occupied window
=================================================

A window of n_s samples is averaged in power and compared with a threshold.
Under noise alone the statistic is a scaled chi-square, so the threshold for
a given false-alarm rate is exact. When the PU arrives mid-window only k of
the samples carry its power, and the detection probability grows with k.
"""
import numpy as np

from crlab import Detector, RadioScenario, pd_analytic, pd_gaussian, pf_analytic

scenario = RadioScenario(snr_pu_db=0.0, n_s=16, n_frame=128)

# Threshold for Pf = 0.1 on a unit noise floor
det = Detector.for_pf(0.1, n_s=16, sensing_floor=1.0)
print(f"threshold {det.threshold:.4f}, Pf {pf_analytic(det):.4f}")

# Pd against the number of PU samples in the window, exact and normal approximation
print(" k   exact  gaussian")
for k in (1, 2, 4, 8, 12, 16):
    print(f"{k:2d}  {pd_analytic(det, scenario, k):.4f}  {pd_gaussian(det, scenario, k):.4f}")

# Empirical check with plain numpy draws
gen = np.random.default_rng(0)
energies = gen.exponential(size=(200_000, 16))
energies[:, 8:] *= 1 + scenario.pu_power  # 8 PU samples at the end of the window
print(f"empirical Pd(8) {np.mean(energies.mean(axis=1) > det.threshold):.4f}")
