"""Special functions and empirical summaries shared by the other modules."""
from dataclasses import dataclass, field
from fractions import Fraction
import math

import numpy as np
from scipy import special

from .errors import DomainError

DEFAULT_LEVELS = (0.95, 0.99)


def q_function(x):
    """Gaussian tail probability ``P(Z > x)`` for standard normal ``Z``.

    Evaluated as ``erfc(x / sqrt(2)) / 2`` so the upper tail keeps full
    relative precision. Accepts scalars or arrays.
    """
    return 0.5 * special.erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))[()]


def q_function_inverse(p):
    """Inverse of :func:`q_function`; raises :class:`DomainError` unless 0 < p < 1."""
    p_arr = np.asarray(p, dtype=float)
    if not np.all((p_arr > 0.0) & (p_arr < 1.0)):
        raise DomainError(f"q_function_inverse needs 0 < p < 1, got {p!r}")
    # Q^{-1}(p) = -Phi^{-1}(p); ndtri is accurate in both tails.
    return -special.ndtri(p_arr)[()]


def chi_square_cdf(dof, x):
    """CDF of the chi-square distribution with ``dof`` degrees of freedom."""
    return special.gammainc(dof / 2.0, np.maximum(np.asarray(x, dtype=float), 0.0) / 2.0)[()]


def chi_square_sf(dof, x):
    """Upper tail of the chi-square distribution."""
    return special.gammaincc(dof / 2.0, np.maximum(np.asarray(x, dtype=float), 0.0) / 2.0)[()]


def chi_square_inverse_cdf(dof, p):
    """Quantile of the chi-square distribution with ``dof`` degrees of freedom.

    Parameters
    ----------
    dof : int
        Degrees of freedom, at least 1.
    p : float
        Lower-tail probability, strictly between 0 and 1.
    """
    if int(dof) != dof or dof < 1:
        raise DomainError(f"dof must be a positive integer, got {dof!r}")
    if not 0.0 < p < 1.0:
        raise DomainError(f"chi_square_inverse_cdf needs 0 < p < 1, got {p!r}")
    return float(2.0 * special.gammaincinv(dof / 2.0, p))


def chi_square_inverse_sf(dof, q):
    """Value whose chi-square upper tail equals ``q``.

    Inverting the upper tail directly keeps precision when ``q`` is tiny,
    where ``chi_square_inverse_cdf(dof, 1 - q)`` would lose it.
    """
    if int(dof) != dof or dof < 1:
        raise DomainError(f"dof must be a positive integer, got {dof!r}")
    if not 0.0 < q < 1.0:
        raise DomainError(f"chi_square_inverse_sf needs 0 < q < 1, got {q!r}")
    return float(2.0 * special.gammainccinv(dof / 2.0, q))


@dataclass(frozen=True)
class EmpiricalSummary:
    """Mean and nearest-rank quantiles of a sample set."""

    mean: float
    count: int
    quantiles: dict = field(default_factory=dict)

    def quantile(self, level):
        return self.quantiles[level]


def nearest_rank(sorted_samples, level):
    """The ``ceil(level * n)``-th order statistic (1-based) of sorted data."""
    n = len(sorted_samples)
    # Decimal reading of the level so 0.95 * 100 ranks 95, not 96.
    rank = max(1, math.ceil(Fraction(repr(float(level))) * n))
    return sorted_samples[min(rank, n) - 1]


def summarize(samples, levels=DEFAULT_LEVELS):
    """Summarise ``samples`` by their mean and nearest-rank quantiles.

    >>> s = summarize([1, 2, 3, 4], [0.5])
    >>> s.mean, s.quantiles[0.5]
    (2.5, 2.0)
    """
    data = np.asarray(samples, dtype=float).ravel()
    if data.size == 0:
        raise DomainError("cannot summarise an empty sample set")
    for level in levels:
        if not 0.0 < level < 1.0:
            raise DomainError(f"quantile levels must lie in (0, 1), got {level!r}")
    ordered = np.sort(data)
    quantiles = {float(level): float(nearest_rank(ordered, level)) for level in levels}
    return EmpiricalSummary(mean=float(data.mean()), count=int(data.size), quantiles=quantiles)
