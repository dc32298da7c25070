"""Energy detection: the windowed power metric, threshold calibration and
false-alarm / detection probabilities.

Signal model: noise, residual self-interference and the primary-user signal
are independent circular complex Gaussians, so a sensed sample's energy
``|r|^2`` is exponential with mean equal to the total power at that sample.
A window of ``n_s`` samples of which ``k`` carry the primary user therefore
has

    n_s * M = (floor + pu_power) * Gamma(k) + floor * Gamma(n_s - k),

which gives the chi-square false-alarm law (``k = 0``) and the exact
mixed-window detection law used by :func:`pd_analytic`.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy import integrate, special, stats as sps

from .errors import DomainError
from .latency import DetectionProfile, SchemeKind
from .stats import chi_square_inverse_sf, chi_square_sf, q_function


def db_to_linear(db):
    return 0.0 if db == -math.inf else 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class RadioScenario:
    """Powers seen by the secondary-user sensor and the frame geometry.

    Parameters
    ----------
    snr_pu_db : float
        Primary-user power over the noise floor, in dB.
    inr_db : float
        Residual self-interference over the noise floor, in dB. ``-inf``
        means perfect suppression.
    noise_power : float
        Noise floor, linear.
    n_s : int
        Sensing window length in samples.
    n_frame : int
        Secondary-user frame length in samples.
    """

    snr_pu_db: float = 0.0
    inr_db: float = -math.inf
    noise_power: float = 1.0
    n_s: int = 16
    n_frame: int = 128

    def __post_init__(self):
        if not self.noise_power > 0:
            raise DomainError("noise_power must be positive")
        if self.n_s < 1 or self.n_frame < 1:
            raise DomainError("n_s and n_frame must be positive")
        if self.n_s > self.n_frame:
            raise DomainError(f"n_s={self.n_s} exceeds n_frame={self.n_frame}")
        if math.isnan(self.snr_pu_db) or math.isnan(self.inr_db) or self.inr_db == math.inf:
            raise DomainError("snr_pu_db and inr_db must be finite (inr_db may be -inf)")

    @property
    def pu_power(self):
        return self.noise_power * db_to_linear(self.snr_pu_db)

    @property
    def inr(self):
        return db_to_linear(self.inr_db)

    @property
    def si_power(self):
        return self.noise_power * self.inr

    def sensing_floor(self, scheme):
        """Non-PU power in a sensed sample: half-duplex sensing slots carry
        no self-interference, full-duplex sensing does."""
        scheme = SchemeKind(scheme)
        if scheme.full_duplex:
            return self.noise_power + self.si_power
        return self.noise_power


@dataclass(frozen=True)
class Detector:
    """Energy detector with threshold ``threshold`` over ``n_s``-sample windows.

    ``sensing_floor`` is the total non-PU power the threshold was calibrated
    against (noise, plus residual self-interference when sensing full-duplex).
    """

    threshold: float
    n_s: int
    sensing_floor: float = 1.0

    def __post_init__(self):
        if not self.threshold >= 0:
            raise DomainError("threshold must be non-negative")
        if self.n_s < 1:
            raise DomainError("n_s must be positive")
        if not self.sensing_floor > 0:
            raise DomainError("sensing_floor must be positive")

    @classmethod
    def for_pf(cls, target_pf, n_s, sensing_floor=1.0):
        return cls(threshold_for_pf(target_pf, n_s, sensing_floor), n_s, sensing_floor)

    @classmethod
    def for_scheme(cls, scenario, scheme, *, pf=None, threshold=None):
        """Detector for ``scheme`` in ``scenario``, given either a target Pf or ε."""
        if (pf is None) == (threshold is None):
            raise DomainError("give exactly one of pf or threshold")
        floor = scenario.sensing_floor(scheme)
        if pf is not None:
            return cls.for_pf(pf, scenario.n_s, floor)
        return cls(float(threshold), scenario.n_s, floor)


def energy_metric(window):
    """Average received power ``mean(|r|^2)`` of a window of complex samples."""
    r = np.asarray(window)
    if r.size == 0:
        raise DomainError("energy_metric needs at least one sample")
    return float(np.mean(r.real**2 + r.imag**2))


def threshold_for_pf(target_pf, n_s, sensing_floor=1.0):
    """Threshold giving false-alarm probability ``target_pf`` under H0.

    Under H0, ``2 * n_s * M / floor`` is chi-square with ``2 * n_s`` degrees
    of freedom, so the calibration is exact.
    """
    if not 0.0 < target_pf < 1.0:
        raise DomainError(f"target_pf must lie in (0, 1), got {target_pf!r}")
    dof = 2 * n_s
    return sensing_floor * chi_square_inverse_sf(dof, target_pf) / dof


def pf_analytic(detector):
    """Exact false-alarm probability ``Pr(M > threshold | H0)``."""
    dof = 2 * detector.n_s
    return float(chi_square_sf(dof, dof * detector.threshold / detector.sensing_floor))


def _check_k(k, n_s):
    if int(k) != k or not 0 <= k <= n_s:
        raise DomainError(f"occupancy k must be an integer in [0, {n_s}], got {k!r}")
    return int(k)


def _gaussian_moments(detector, scenario, k):
    n_s, floor = detector.n_s, detector.sensing_floor
    busy = floor + scenario.pu_power
    mean = floor + k / n_s * scenario.pu_power
    var = (k * busy**2 + (n_s - k) * floor**2) / n_s**2
    return mean, var


def pd_gaussian(detector, scenario, k):
    """Central-limit approximation of the detection probability for a window
    holding ``k`` primary-user samples.

    The metric is treated as Gaussian with the exact mean and variance of
    the mixed window. ``k = 0`` gives the Gaussian approximation of Pf.
    """
    k = _check_k(k, detector.n_s)
    mean, var = _gaussian_moments(detector, scenario, k)
    return float(q_function((detector.threshold - mean) / math.sqrt(var)))


def _weighted_gamma_sf(x, a, k, b, m):
    """``P(a * Gamma(k) + b * Gamma(m) > x)`` for positive integer shapes."""
    if x <= 0:
        return 1.0
    if a == b:
        return float(special.gammaincc(k + m, x / a))
    # Integrate over the PU-part Gamma(k): the tail of the rest is known.
    upper = x / a
    gk = sps.gamma(k)

    def integrand(t):
        return gk.pdf(t) * special.gammaincc(m, (x - a * t) / b)

    mode = min(max(k - 1.0, 0.0), upper)
    points = [mode] if 0.0 < mode < upper else None
    body, _ = integrate.quad(integrand, 0.0, upper, points=points,
                             epsabs=1e-13, epsrel=1e-11, limit=200)
    return float(min(1.0, body + special.gammaincc(k, upper)))


def pd_analytic(detector, scenario, k):
    """Detection probability for a window holding ``k`` primary-user samples.

    Exact for the circular-Gaussian model: the tail of a two-term weighted
    Gamma sum, evaluated by one-dimensional quadrature. ``k = 0`` returns
    :func:`pf_analytic`.
    """
    k = _check_k(k, detector.n_s)
    n_s, floor = detector.n_s, detector.sensing_floor
    x = n_s * detector.threshold
    if k == 0:
        return float(special.gammaincc(n_s, x / floor))
    busy = floor + scenario.pu_power
    if k == n_s:
        return float(special.gammaincc(n_s, x / busy))
    return _weighted_gamma_sf(x, busy, k, floor, n_s - k)


def detection_profile(detector, scenario, method="exact"):
    """Tabulate Pd(k) for k = 1..n_s as a :class:`DetectionProfile`.

    ``method`` is ``"exact"`` (default) or ``"gaussian"``.
    """
    pd = {"exact": pd_analytic, "gaussian": pd_gaussian}[method]
    return DetectionProfile([pd(detector, scenario, k) for k in range(1, detector.n_s + 1)])


def decide(detector, metric):
    """True when the PU is declared present (strictly above threshold)."""
    return metric > detector.threshold
