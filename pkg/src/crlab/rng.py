"""Counter-based random streams keyed by ``(master_seed, trial_index)``.

Every random number used by a trial is a pure function of the master seed,
the trial index and a counter, so a trial reproduces bit-for-bit no matter
how trials are batched or spread over threads. The generator is SplitMix64
(Steele, Lea & Flood, 2014): output ``j`` of a stream with key ``K`` is
``fmix64(K + (j + 1) * GAMMA)``. Per-trial keys are derived by mixing the
trial index into the mixed master seed.

Everything is vectorised over numpy ``uint64`` arrays, which wrap on
overflow exactly as the reference C implementation does.
"""
from dataclasses import dataclass

import numpy as np

RNG_ID = "splitmix64-counter/v1"

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_TRIAL_SALT = np.uint64(0xD1B54A32D192ED03)
_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class SeedSpec:
    """Identifies one trial's random stream.

    Parameters
    ----------
    master_seed : int
        Experiment-wide seed, unsigned 64-bit.
    trial_index : int
        Index of the trial (or, for batches, of the first trial).
    """

    master_seed: int = 0
    trial_index: int = 0

    def __post_init__(self):
        for name in ("master_seed", "trial_index"):
            value = getattr(self, name)
            if not 0 <= int(value) < 2**64:
                raise ValueError(f"{name} must fit in an unsigned 64-bit integer")


def _fmix64(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def trial_keys(master_seed, trial_indices):
    """Stream keys for the given trials (uint64 array, same shape as input)."""
    idx = np.asarray(trial_indices, dtype=np.uint64)
    with np.errstate(over="ignore"):
        base = _fmix64(np.full(idx.shape, master_seed, dtype=np.uint64) + _GAMMA)
        return _fmix64(base ^ (idx * _TRIAL_SALT + _GAMMA))


def raw_bits(keys, counters):
    """SplitMix64 outputs for broadcast ``keys`` and ``counters``."""
    keys = np.asarray(keys, dtype=np.uint64)
    counters = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _fmix64(keys + (counters + np.uint64(1)) * _GAMMA)


def uniforms(keys, counters):
    """Uniform doubles on the open interval (0, 1).

    The top 53 bits are used and offset by half an ulp so that neither end
    point is ever produced.
    """
    bits = raw_bits(keys, counters) >> np.uint64(11)
    return (bits.astype(np.float64) + 0.5) * 2.0**-53


def exponentials(keys, counters):
    """Unit-mean exponential variates, ``-log(U)``."""
    return -np.log(uniforms(keys, counters))


# Counter layout inside a trial stream: counter 0 draws the arrival phase;
# sample position p (may be negative, pre-arrival) owns counters
# 2 * (p + _POS_OFFSET) for its magnitude and the next one for its phase.
_POS_OFFSET = 2**40
PHASE_COUNTER = 0


def _position_counters(positions):
    pos = np.asarray(positions, dtype=np.int64) + _POS_OFFSET
    return pos.astype(np.uint64) * np.uint64(2)


def unit_energies(keys, positions):
    """``|r|^2`` of unit-power circular complex Gaussian samples at ``positions``.

    Identical to ``abs(unit_samples(keys, positions)) ** 2`` up to rounding,
    but skips the phase draw.
    """
    return exponentials(keys, _position_counters(positions))


def unit_samples(keys, positions):
    """Unit-power circular complex Gaussian samples at ``positions``."""
    mag = _position_counters(positions)
    radius = np.sqrt(exponentials(keys, mag))
    phase = _TWO_PI * uniforms(keys, mag + np.uint64(1))
    return radius * np.exp(1j * phase)


class TrialStream:
    """Scalar view of one trial's stream."""

    def __init__(self, seed: SeedSpec):
        self.seed = seed
        self.key = trial_keys(seed.master_seed, np.array([seed.trial_index]))[0]

    def arrival_uniform(self):
        return float(uniforms(self.key, PHASE_COUNTER))

    def samples(self, positions, power=1.0):
        return np.sqrt(power) * unit_samples(self.key, positions)
