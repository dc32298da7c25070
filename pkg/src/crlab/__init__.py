"""Spectrum-sensing access latency for half-duplex and full-duplex cognitive radios.

Energy detection, closed-form latency/throughput for the half-duplex and
slotted full-duplex schemes, and sample-level Monte-Carlo simulation of all
three schemes including the sliding-window full-duplex detector.
"""
__version__ = "0.1.0"

from .errors import DivergenceError, DomainError, NonConvergenceError
from .rng import SeedSpec
from .stats import (EmpiricalSummary, chi_square_inverse_cdf, q_function,
                    q_function_inverse, summarize)
from .latency import (DetectionProfile, SchemeKind, ThroughputPoint, capacity_c0,
                      general_latency_series, hd_average_latency, hd_latency_blind,
                      hd_latency_sensing, slotted_fd_average_latency,
                      slotted_fd_latency, throughput)
from .detector import (Detector, RadioScenario, decide, detection_profile,
                       energy_metric, pd_analytic, pd_gaussian, pf_analytic,
                       threshold_for_pf)
from .sim import (LatencyDistribution, LatencySample, TrialConfig, run_batch,
                  run_trial, sliding_decision_stream)
from .experiments import (SweepResult, SweepSpec, emit, run_inr_sweep_fixed_latency,
                          run_inr_sweep_fixed_throughput, run_threshold_sweep)
