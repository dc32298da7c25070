"""
Closed-form access latency
==========================

Half-duplex SUs sense for n_s samples and then transmit blind for the rest
of the frame, so a PU arriving in the blind part waits at least until the
next sensing window ends. Slotted full-duplex SUs sense all the time and
decide every n_s samples. Both averages follow from a geometric series over
retries, averaged over the arrival position.
"""
import itertools

from crlab import (DetectionProfile, Detector, RadioScenario, detection_profile,
                   general_latency_series, hd_average_latency, hd_latency_blind,
                   slotted_fd_average_latency)

n_s, n_frame = 16, 128

# Perfect detection: latency is set by frame geometry alone
ones = DetectionProfile.constant(1.0, n_s)
print("Pd = 1:  HD", hd_average_latency(ones, n_s, n_frame),
      " slotted", slotted_fd_average_latency(ones, n_s))

# A realistic detector at 0 dB and Pf = 0.1
sc = RadioScenario(snr_pu_db=0.0)
prof = detection_profile(Detector.for_pf(0.1, n_s, 1.0), sc)
print(f"Pf 0.1: HD {hd_average_latency(prof, n_s, n_frame):.2f}"
      f"  slotted {slotted_fd_average_latency(prof, n_s):.2f}")

# The closed form is the sum of the decision-by-decision series
p = prof.pd_full
series = ((10 + n_s + n * n_frame, p) for n in itertools.count())
print(f"blind arrival at 10: closed {hd_latency_blind(10, prof, n_s, n_frame):.6f}"
      f"  series {general_latency_series(series):.6f}")
