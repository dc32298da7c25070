"""Throughput and closed-form average access latency.

Latencies are in samples, counted from the first sample carrying the
primary user (PU) to the decision that detects it. All averages assume the
PU arrival is uniform over the scheme's frame cycle.
"""
from dataclasses import dataclass
import enum
import math

import numpy as np

from .errors import DivergenceError, DomainError, NonConvergenceError

SERIES_TAIL_TOL = 1e-12
SERIES_MAX_TERMS = 10**6
SERIES_FAIL_MASS = 1e-6


class SchemeKind(str, enum.Enum):
    HALF_DUPLEX = "half_duplex"
    SLOTTED_FULL_DUPLEX = "slotted_full_duplex"
    SLIDING_FULL_DUPLEX = "sliding_full_duplex"

    @property
    def full_duplex(self):
        return self is not SchemeKind.HALF_DUPLEX

    @property
    def short_name(self):
        return _SHORT_NAMES[self]

    @classmethod
    def parse(cls, name):
        """Accept the enum value or the short names ``hd``/``slotted``/``sliding``."""
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("-", "_")
        for kind, short in _SHORT_NAMES.items():
            if key in (kind.value, short):
                return kind
        raise DomainError(f"unknown scheme {name!r}")


_SHORT_NAMES = {
    SchemeKind.HALF_DUPLEX: "hd",
    SchemeKind.SLOTTED_FULL_DUPLEX: "slotted",
    SchemeKind.SLIDING_FULL_DUPLEX: "sliding",
}


@dataclass(frozen=True)
class ThroughputPoint:
    pf: float
    normalized_throughput: float
    scheme: SchemeKind


class DetectionProfile:
    """Detection probability as a function of PU samples in the window.

    ``pd[k - 1]`` is Pd(k) for k = 1..n_s; Pd(n_s) is the probability for a
    fully occupied window.
    """

    def __init__(self, pd):
        values = np.asarray(pd, dtype=float).ravel()
        if values.size == 0:
            raise DomainError("a detection profile needs at least one entry")
        if np.any((values < 0.0) | (values > 1.0)) or np.any(np.isnan(values)):
            raise DomainError("detection probabilities must lie in [0, 1]")
        self.pd = values
        self.pd.setflags(write=False)

    @classmethod
    def constant(cls, p, n_s):
        return cls(np.full(n_s, float(p)))

    @classmethod
    def from_function(cls, fn, n_s):
        return cls([fn(k) for k in range(1, n_s + 1)])

    @property
    def n_s(self):
        return self.pd.size

    @property
    def pd_full(self):
        return float(self.pd[-1])

    def pd_partial(self, k):
        if not 1 <= k <= self.n_s:
            raise DomainError(f"k must lie in [1, {self.n_s}], got {k}")
        return float(self.pd[k - 1])

    def __len__(self):
        return self.n_s

    def __repr__(self):
        return f"DetectionProfile(n_s={self.n_s}, pd_full={self.pd_full:.6g})"


def capacity_c0(snr_su_db):
    """SU capacity without the PU, ``log2(1 + SNR)`` in bits/s/Hz."""
    if snr_su_db == -math.inf:
        return 0.0
    return math.log2(1.0 + 10.0 ** (snr_su_db / 10.0))


def throughput(scheme, pf, n_s, n_frame):
    """Throughput normalised by C0 at false-alarm probability ``pf``.

    Full-duplex schemes lose only false alarms; half-duplex also loses the
    sensing slot, a factor ``(n_frame - n_s) / n_frame``.
    """
    scheme = SchemeKind.parse(scheme)
    if not 0.0 <= pf <= 1.0:
        raise DomainError(f"pf must lie in [0, 1], got {pf!r}")
    if n_s > n_frame:
        raise DomainError("n_s exceeds n_frame")
    value = 1.0 - pf
    if not scheme.full_duplex:
        value *= (n_frame - n_s) / n_frame
    return ThroughputPoint(pf=float(pf), normalized_throughput=value, scheme=scheme)


def _check_profile(profile, n_s):
    if profile.n_s != n_s:
        raise DomainError(f"profile covers n_s={profile.n_s}, expected {n_s}")


def _retry_tail(pd_full, n_first, period):
    # Expected latency given a miss at the first decision: later decisions
    # every `period` samples on full windows, detection prob pd_full each.
    return pd_full * (n_first / pd_full + period / pd_full**2)


def hd_latency_blind(n_blind, profile, n_s, n_frame):
    """Half-duplex latency when the PU arrives ``n_blind`` samples before
    the end of the blind (transmit) interval."""
    _check_profile(profile, n_s)
    if not 1 <= n_blind <= n_frame - n_s:
        raise DomainError(f"n_blind must lie in [1, {n_frame - n_s}], got {n_blind}")
    p = profile.pd_full
    if p == 0.0:
        raise DivergenceError("Pd(n_s) = 0: the PU is never detected")
    return (n_blind + n_s) + n_frame * (1.0 - p) / p


def _first_partial_latency(n_first, profile, n_s, period):
    _check_profile(profile, n_s)
    if not 1 <= n_first <= n_s:
        raise DomainError(f"n_first must lie in [1, {n_s}], got {n_first}")
    first = profile.pd_partial(n_first)
    if first == 1.0:
        return float(n_first)
    p = profile.pd_full
    if p == 0.0:
        raise DivergenceError("Pd(n_s) = 0: the PU is never detected")
    return n_first * first + (1.0 - first) * _retry_tail(p, n_first, period)


def hd_latency_sensing(n_first, profile, n_s, n_frame):
    """Half-duplex latency when the PU arrives ``n_first`` samples before
    the end of a sensing slot; retries happen once per frame."""
    return _first_partial_latency(n_first, profile, n_s, n_frame)


def hd_average_latency(profile, n_s, n_frame):
    """Half-duplex average latency over the ``n_frame`` arrival positions."""
    blind = sum(hd_latency_blind(nb, profile, n_s, n_frame) for nb in range(1, n_frame - n_s + 1))
    sensing = sum(hd_latency_sensing(nf, profile, n_s, n_frame) for nf in range(1, n_s + 1))
    return (blind + sensing) / n_frame


def slotted_fd_latency(n_first, profile, n_s):
    """Slotted full-duplex latency for arrival ``n_first`` samples before a
    block boundary; retries every ``n_s`` samples."""
    return _first_partial_latency(n_first, profile, n_s, n_s)


def slotted_fd_average_latency(profile, n_s):
    return sum(slotted_fd_latency(nf, profile, n_s) for nf in range(1, n_s + 1)) / n_s


def general_latency_series(decision_points):
    """Expected latency ``sum_k N_k p_k prod_{j<k} (1 - p_j)``.

    ``decision_points`` is an iterable (possibly infinite) of ``(N_k, p_k)``
    pairs: the latency of the k-th decision and its detection probability
    given all earlier misses. Summation stops once the undetected mass drops
    below 1e-12.
    """
    total = 0.0
    survive = 1.0
    prev = -math.inf
    seen = 0
    for n_k, p_k in decision_points:
        if n_k <= prev:
            raise DomainError("decision latencies must be strictly increasing")
        if not 0.0 <= p_k <= 1.0:
            raise DomainError(f"detection probability {p_k!r} outside [0, 1]")
        prev = n_k
        total += n_k * p_k * survive
        survive *= 1.0 - p_k
        seen += 1
        if survive < SERIES_TAIL_TOL:
            return total
        if seen >= SERIES_MAX_TERMS:
            break
    if seen == 0:
        raise DomainError("empty decision sequence")
    if survive > SERIES_FAIL_MASS:
        raise NonConvergenceError(
            f"undetected mass {survive:.3g} remains after {seen} decisions")
    return total
