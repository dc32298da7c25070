"""Sample-level Monte-Carlo simulation of access latency.

Time is indexed by sample position relative to the primary user's arrival:
position 1 is the first sample carrying the PU, positions <= 0 are earlier.
A decision whose window ends at position ``e`` has latency ``e``. False
alarms before the arrival are not counted; the clock starts at position 1.

Each sensed sample is the sum of noise, residual self-interference (full
duplex only) and, from position 1 on, the PU signal. All three are
independent circular complex Gaussians, so the sum is one circular complex
Gaussian whose power is the total; the engine draws it as such.

Trials are evaluated in vectorised groups, but every random number a trial
uses is addressed by ``(master_seed, trial_index, position)`` and the loop
structure is the same for every trial, so a trial's outcome never depends
on which other trials share its group or thread.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math

import numpy as np

from . import rng
from .detector import Detector, RadioScenario
from .errors import DomainError
from .latency import DetectionProfile, SchemeKind
from .stats import DEFAULT_LEVELS, EmpiricalSummary, summarize

HORIZON_FRAMES = 1000
MIN_HORIZON_FRAMES = 100
MAX_TRUNCATION_RATE = 1e-3
TRIALS_PER_TASK = 8192

# Sliding scheme: end positions are visited in chunks whose length depends
# only on the chunk index, so every trial sees identical arithmetic.
_SLIDING_CHUNKS = (32, 64, 128, 256)
_WINDOW_BUDGET = 2**21
_H0_TRIAL_BASE = 2**63


@dataclass(frozen=True)
class TrialConfig:
    """Everything needed to run one trial, or a batch starting at ``seed.trial_index``."""

    scenario: RadioScenario
    scheme: SchemeKind
    detector: Detector
    seed: rng.SeedSpec = field(default_factory=rng.SeedSpec)
    max_samples: int = None

    def __post_init__(self):
        object.__setattr__(self, "scheme", SchemeKind.parse(self.scheme))
        if self.max_samples is None:
            object.__setattr__(self, "max_samples", HORIZON_FRAMES * self.scenario.n_frame)
        if self.detector.n_s != self.scenario.n_s:
            raise DomainError("detector and scenario disagree on n_s")
        floor = self.scenario.sensing_floor(self.scheme)
        if not math.isclose(self.detector.sensing_floor, floor, rel_tol=1e-12):
            raise DomainError(
                f"detector calibrated for floor {self.detector.sensing_floor}, "
                f"but {self.scheme.value} senses at {floor}")
        if self.max_samples < MIN_HORIZON_FRAMES * self.scenario.n_frame:
            raise DomainError(f"max_samples must be at least {MIN_HORIZON_FRAMES} frames")

    @classmethod
    def build(cls, scenario, scheme, *, pf=None, threshold=None, master_seed=0,
              max_samples=None):
        """Config with a detector calibrated for the scheme's sensing floor."""
        scheme = SchemeKind.parse(scheme)
        detector = Detector.for_scheme(scenario, scheme, pf=pf, threshold=threshold)
        return cls(scenario, scheme, detector, rng.SeedSpec(master_seed, 0), max_samples)


@dataclass(frozen=True)
class LatencySample:
    latency: int
    arrival_phase: int
    truncated: bool


class LatencyDistribution:
    """Latencies of a batch of trials, in trial-index order."""

    def __init__(self, latencies, arrival_phases, truncated, levels=DEFAULT_LEVELS):
        self.latencies = np.asarray(latencies, dtype=np.int64)
        self.arrival_phases = np.asarray(arrival_phases, dtype=np.int64)
        self.truncated = np.asarray(truncated, dtype=bool)
        self.summary: EmpiricalSummary = summarize(self.latencies, levels)
        self.truncation_rate = float(self.truncated.mean())

    @property
    def valid(self):
        return self.truncation_rate < MAX_TRUNCATION_RATE

    @property
    def mean(self):
        return self.summary.mean

    @property
    def standard_error(self):
        n = self.latencies.size
        return float(self.latencies.std(ddof=1) / math.sqrt(n)) if n > 1 else math.inf

    @property
    def samples(self):
        return [LatencySample(int(l), int(p), bool(t))
                for l, p, t in zip(self.latencies, self.arrival_phases, self.truncated)]

    def __len__(self):
        return self.latencies.size

    def __repr__(self):
        return (f"LatencyDistribution(n={len(self)}, mean={self.mean:.4g}, "
                f"truncation_rate={self.truncation_rate:.3g})")


def _powers(positions, floor, busy):
    return np.where(positions >= 1, busy, floor)


def _first_window_end(scheme, phase, n_s, n_frame):
    if scheme is SchemeKind.HALF_DUPLEX:
        # Frame offsets [0, n_s) sense, [n_s, n_frame) transmit blind.
        return (n_s - phase - 1) % n_frame + 1
    return n_s - phase


def _simulate_windowed(config, keys):
    """Half-duplex and slotted full-duplex: one decision per ``period`` samples."""
    sc, scheme, eps = config.scenario, config.scheme, config.detector.threshold
    n_s = sc.n_s
    floor = sc.sensing_floor(scheme)
    busy = floor + sc.pu_power
    period = sc.n_frame if scheme is SchemeKind.HALF_DUPLEX else n_s

    phase = np.floor(rng.uniforms(keys, rng.PHASE_COUNTER) * period).astype(np.int64)
    first_end = _first_window_end(scheme, phase, n_s, sc.n_frame)

    n = keys.size
    latency = np.full(n, config.max_samples, dtype=np.int64)
    truncated = np.ones(n, dtype=bool)
    active = np.arange(n)
    offsets = np.arange(-n_s + 1, 1)
    m0 = 0
    rounds = 4
    while active.size:
        m = m0 + np.arange(rounds)
        ends = first_end[active, None] + m[None, :] * period
        pos = ends[:, :, None] + offsets
        energy = rng.unit_energies(keys[active, None, None], pos) * _powers(pos, floor, busy)
        metric = energy.sum(axis=2) / n_s
        hit = (metric > eps) & (ends <= config.max_samples)
        found = hit.any(axis=1)
        which = active[found]
        latency[which] = ends[found, hit[found].argmax(axis=1)]
        truncated[which] = False
        beyond = ends[:, -1] + period > config.max_samples
        active = active[~found & ~beyond]
        m0 += rounds
        # Window sums are per-window, so block size may track the group size.
        rounds = max(1, min(rounds * 2, 64, _WINDOW_BUDGET // max(active.size, 1) // n_s))
    return latency, phase, truncated


def _simulate_sliding(config, keys):
    """Sliding full-duplex: a decision at every sample over the trailing window."""
    sc, eps = config.scenario, config.detector.threshold
    n_s = sc.n_s
    floor = sc.sensing_floor(SchemeKind.SLIDING_FULL_DUPLEX)
    busy = floor + sc.pu_power

    n = keys.size
    latency = np.full(n, config.max_samples, dtype=np.int64)
    truncated = np.ones(n, dtype=bool)
    active = np.arange(n)
    start = 1
    chunk_index = 0
    while active.size and start <= config.max_samples:
        width = _SLIDING_CHUNKS[min(chunk_index, len(_SLIDING_CHUNKS) - 1)]
        width = min(width, config.max_samples - start + 1)
        pos = np.arange(start - n_s + 1, start + width)
        energy = rng.unit_energies(keys[active, None], pos[None, :]) * _powers(pos, floor, busy)
        csum = np.zeros((active.size, pos.size + 1))
        np.cumsum(energy, axis=1, out=csum[:, 1:])
        metric = (csum[:, n_s:] - csum[:, :-n_s]) / n_s
        hit = metric > eps
        found = hit.any(axis=1)
        which = active[found]
        latency[which] = start + hit[found].argmax(axis=1)
        truncated[which] = False
        active = active[~found]
        start += width
        chunk_index += 1
    return latency, np.zeros(n, dtype=np.int64), truncated


def _simulate(config, trial_indices):
    keys = rng.trial_keys(config.seed.master_seed, trial_indices)
    if config.scheme is SchemeKind.SLIDING_FULL_DUPLEX:
        return _simulate_sliding(config, keys)
    return _simulate_windowed(config, keys)


def run_trial(config):
    """Simulate the single trial ``config.seed.trial_index``."""
    lat, phase, trunc = _simulate(config, np.array([config.seed.trial_index], dtype=np.uint64))
    return LatencySample(int(lat[0]), int(phase[0]), bool(trunc[0]))


def run_batch(config, trials, workers=1, levels=DEFAULT_LEVELS):
    """Simulate ``trials`` trials with indices starting at ``config.seed.trial_index``.

    ``workers`` threads share the work; the result does not depend on it.
    """
    if trials < 1:
        raise DomainError("trials must be at least 1")
    first = config.seed.trial_index
    bounds = list(range(0, trials, TRIALS_PER_TASK)) + [trials]
    tasks = [np.arange(first + lo, first + hi, dtype=np.uint64)
             for lo, hi in zip(bounds[:-1], bounds[1:])]
    if workers and workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda idx: _simulate(config, idx), tasks))
    else:
        parts = [_simulate(config, idx) for idx in tasks]
    lat, phase, trunc = (np.concatenate(p) for p in zip(*parts))
    return LatencyDistribution(lat, phase, trunc, levels)


def received_stream(config, first, last):
    """Complex samples of trial ``config.seed.trial_index`` at positions ``first..last``.

    These are the samples the engine senses (for half-duplex, what the
    sensor would see at those positions).
    """
    sc = config.scenario
    floor = sc.sensing_floor(config.scheme)
    pos = np.arange(first, last + 1)
    key = rng.trial_keys(config.seed.master_seed, np.array([config.seed.trial_index]))[0]
    return np.sqrt(_powers(pos, floor, floor + sc.pu_power)) * rng.unit_samples(key, pos)


class SlidingEnergyDetector:
    """FIFO energy detector producing one decision per pushed sample.

    Keeps a running sum of ``|r|^2`` over the last ``n_s`` samples, updated
    in O(1) per sample and re-summed from the buffer every ``resync_every``
    samples to bound floating-point drift.
    """

    def __init__(self, detector, resync_every=4096):
        self.detector = detector
        self.resync_every = resync_every
        self._buf = np.zeros(detector.n_s)
        self._head = 0
        self._count = 0
        self._sum = 0.0

    @property
    def metric(self):
        return self._sum / self.detector.n_s

    @property
    def ready(self):
        return self._count >= self.detector.n_s

    def push(self, sample):
        """Add one sample; return the decision, or ``None`` until the window fills."""
        energy = sample.real * sample.real + sample.imag * sample.imag
        self._sum += energy - self._buf[self._head]
        self._buf[self._head] = energy
        self._head = (self._head + 1) % self.detector.n_s
        self._count += 1
        if self._count % self.resync_every == 0:
            self._sum = float(math.fsum(self._buf))
        if not self.ready:
            return None
        return bool(self.metric > self.detector.threshold)


def sliding_decision_stream(stream, detector, resync_every=4096):
    """Per-sample decisions over the trailing ``n_s`` window.

    Returns a boolean array whose element ``j`` is the decision on samples
    ``j .. j + n_s - 1`` (0-based), i.e. one decision per sample from the
    ``n_s``-th on.
    """
    samples = np.asarray(stream, dtype=complex)
    if samples.size < detector.n_s:
        raise DomainError(f"stream shorter than the window ({samples.size} < {detector.n_s})")
    fifo = SlidingEnergyDetector(detector, resync_every)
    out = [fifo.push(s) for s in samples]
    return np.array(out[detector.n_s - 1:], dtype=bool)


def frame_false_alarm_rate(detector, n_frame, trials, master_seed=0):
    """Fraction of PU-free frames in which the sliding detector alarms at least once.

    Overlapping windows make this larger than the per-decision Pf; it is a
    supplementary figure, not used for the throughput axis. Streams are
    drawn from a trial-index range disjoint from the latency trials.
    """
    n_s = detector.n_s
    idx = np.arange(trials, dtype=np.uint64) + np.uint64(_H0_TRIAL_BASE)
    keys = rng.trial_keys(master_seed, idx)
    alarms = np.zeros(trials, dtype=bool)
    for lo in range(0, trials, TRIALS_PER_TASK):
        k = keys[lo:lo + TRIALS_PER_TASK]
        pos = np.arange(-n_s + 2, n_frame + 1)
        energy = rng.unit_energies(k[:, None], pos[None, :]) * detector.sensing_floor
        csum = np.zeros((k.size, pos.size + 1))
        np.cumsum(energy, axis=1, out=csum[:, 1:])
        metric = (csum[:, n_s:] - csum[:, :-n_s]) / n_s
        alarms[lo:lo + k.size] = (metric > detector.threshold).any(axis=1)
    return float(alarms.mean())


def simulate_profile_latency(profile, scheme, n_frame, trials, master_seed=0):
    """Latency of independent decisions drawn from ``profile``.

    A decision-level check on the closed forms for arbitrary (including
    synthetic) detection profiles: the first decision after arrival
    succeeds with Pd(k) for its PU sample count k, each later one with
    Pd(n_s). Only half-duplex and slotted full-duplex qualify.
    """
    scheme = SchemeKind.parse(scheme)
    if scheme is SchemeKind.SLIDING_FULL_DUPLEX:
        raise DomainError("sliding decisions are dependent; use run_batch")
    if profile.pd_full == 0.0:
        raise DomainError("Pd(n_s) = 0: latency is unbounded")
    n_s = profile.n_s
    period = n_frame if scheme is SchemeKind.HALF_DUPLEX else n_s
    keys = rng.trial_keys(master_seed, np.arange(trials, dtype=np.uint64))
    phase = np.floor(rng.uniforms(keys, 0) * period).astype(np.int64)
    first_end = _first_window_end(scheme, phase, n_s, n_frame)
    pd_first = profile.pd[np.minimum(first_end, n_s) - 1]
    hit_first = rng.uniforms(keys, 1) < pd_first
    p = profile.pd_full
    if p == 1.0:
        retries = np.ones(trials, dtype=np.int64)
    else:
        retries = np.ceil(np.log(rng.uniforms(keys, 2)) / math.log1p(-p)).astype(np.int64)
        retries = np.maximum(retries, 1)
    return np.where(hit_first, first_end, first_end + retries * period)
