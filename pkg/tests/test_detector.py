import math

import numpy as np
import pytest

from crlab.detector import (Detector, RadioScenario, decide, detection_profile, energy_metric,
                            pd_analytic, pd_gaussian, pf_analytic, threshold_for_pf)
from crlab.errors import DomainError
from crlab.latency import SchemeKind

EPS_PF01 = 42.584745082980837 / 32  # mpmath chi-square(32) 0.9-quantile / 32


def mc_detection(k, n_s, floor, pu_power, eps, windows, seed):
    """Fraction of windows (k PU samples, n_s - k noise-only) whose mean energy exceeds eps.

    Draws with numpy's own generator so it shares nothing with the package.
    """
    gen = np.random.default_rng(seed)
    hits = 0
    for lo in range(0, windows, 250_000):
        m = min(250_000, windows - lo)
        e = gen.exponential(size=(m, n_s))
        e[:, :k] *= floor + pu_power
        e[:, k:] *= floor
        hits += np.count_nonzero(e.mean(axis=1) > eps)
    return hits / windows


def test_energy_metric_examples():
    assert energy_metric([0, 0, 0, 0]) == 0
    assert energy_metric([1, 1j, -1, -1j]) == 1
    with pytest.raises(DomainError):
        energy_metric([])


def test_energy_metric_law_of_large_numbers():
    gen = np.random.default_rng(1)
    w = (gen.standard_normal((1_000_000, 16)) + 1j * gen.standard_normal((1_000_000, 16))) / math.sqrt(2)
    metrics = (np.abs(w) ** 2).mean(axis=1)
    assert energy_metric(w[0]) == pytest.approx(metrics[0])
    assert metrics.mean() == pytest.approx(1.0, abs=0.002)


def test_threshold_for_pf_values():
    assert threshold_for_pf(0.1, 16, 1.0) == pytest.approx(EPS_PF01, rel=1e-10)
    assert threshold_for_pf(0.1, 16, 2.0) == pytest.approx(2 * EPS_PF01, rel=1e-10)
    near_one = [threshold_for_pf(1 - d, 16, 1.0) for d in (1e-2, 1e-4, 1e-8, 1e-15)]
    assert all(b < a for a, b in zip(near_one, near_one[1:]))
    assert near_one[-1] < 0.1 * threshold_for_pf(0.5, 16, 1.0)
    with pytest.raises(DomainError):
        threshold_for_pf(1.0, 16, 1.0)
    with pytest.raises(DomainError):
        threshold_for_pf(0.0, 16, 1.0)


@pytest.mark.parametrize("p", [0.01, 0.05, 0.1, 0.5])
@pytest.mark.parametrize("floor", [1.0, 3.7])
def test_pf_round_trip(p, floor):
    assert pf_analytic(Detector.for_pf(p, 16, floor)) == pytest.approx(p, abs=1e-9)


def test_pf_at_zero_threshold():
    assert pf_analytic(Detector(0.0, 16, 1.0)) == 1.0


def test_pf_against_monte_carlo():
    emp = mc_detection(0, 16, 1.0, 0.0, EPS_PF01, 2_000_000, seed=5)
    assert emp == pytest.approx(0.1, abs=3 * math.sqrt(0.09 / 2_000_000))


def test_pd_gaussian_examples():
    sc = RadioScenario(snr_pu_db=0.0)
    assert pd_gaussian(Detector(1.3204, 16, 1.0), sc, 0) == pytest.approx(0.1, abs=2e-5)
    assert pd_gaussian(Detector(1.2815515655446004 / 4 + 1, 16, 1.0), sc, 0) == pytest.approx(0.1, abs=1e-9)
    # k = n_s at 0 dB: mean 2, variance 1/4, argument -1.3384
    assert pd_gaussian(Detector(EPS_PF01, 16, 1.0), sc, 16) == pytest.approx(0.9096, abs=1e-4)
    # the normal tail never quite reaches 1 at threshold 0; the exact law does
    assert pd_gaussian(Detector(0.0, 16, 1.0), sc, 5) > 0.9999


def test_pd_analytic_limits():
    sc = RadioScenario(snr_pu_db=0.0)
    for k in range(17):
        assert pd_analytic(Detector(0.0, 16, 1.0), sc, k) == 1.0
    d = Detector(EPS_PF01, 16, 1.0)
    assert pd_analytic(d, sc, 0) == pytest.approx(pf_analytic(d), abs=1e-14)
    # no PU power: every k is H0
    quiet = RadioScenario(snr_pu_db=-300.0)
    assert pd_analytic(d, quiet, 7) == pytest.approx(0.1, abs=1e-9)


@pytest.mark.parametrize("k", [-1, 17, 2.5])
def test_pd_rejects_bad_occupancy(k):
    with pytest.raises(DomainError):
        pd_analytic(Detector(1.0, 16, 1.0), RadioScenario(), k)
    with pytest.raises(DomainError):
        pd_gaussian(Detector(1.0, 16, 1.0), RadioScenario(), k)


def test_pd_full_window_against_monte_carlo():
    d = Detector(EPS_PF01, 16, 1.0)
    emp = mc_detection(16, 16, 1.0, 1.0, EPS_PF01, 1_000_000, seed=8)
    assert pd_analytic(d, RadioScenario(), 16) == pytest.approx(emp, abs=0.01)


CONFIGS = [  # (k, snr_db, inr_db, target pf)
    (1, 0.0, -math.inf, 0.1), (4, 0.0, -math.inf, 0.1), (8, 0.0, -math.inf, 0.1),
    (16, 0.0, -math.inf, 0.1), (3, -3.0, 0.0, 0.05), (12, 3.0, 5.0, 0.01),
    (6, 3.0, -math.inf, 0.3), (10, -3.0, 10.0, 0.2), (2, 6.0, 2.0, 0.1),
    (15, -6.0, -math.inf, 0.05), (9, 0.0, 3.0, 0.5), (5, 10.0, 8.0, 0.02),
]


@pytest.mark.parametrize("k, snr_db, inr_db, pf", CONFIGS)
def test_pd_analytic_against_monte_carlo(k, snr_db, inr_db, pf):
    sc = RadioScenario(snr_pu_db=snr_db, inr_db=inr_db)
    d = Detector.for_scheme(sc, SchemeKind.SLOTTED_FULL_DUPLEX, pf=pf)
    emp = mc_detection(k, 16, d.sensing_floor, sc.pu_power, d.threshold, 1_000_000, seed=k)
    assert pd_analytic(d, sc, k) == pytest.approx(emp, abs=0.015)


def test_pd_monotone_in_k_snr_and_threshold():
    grid_eps = np.linspace(0.6, 2.5, 8)
    grid_snr = [-6.0, -3.0, 0.0, 3.0, 6.0]
    for eps in grid_eps:
        d = Detector(eps, 16, 1.0)
        by_snr = []
        for snr in grid_snr:
            sc = RadioScenario(snr_pu_db=snr)
            pd = [pd_analytic(d, sc, k) for k in range(17)]
            assert all(b >= a - 1e-12 for a, b in zip(pd, pd[1:]))
            by_snr.append(pd)
        by_snr = np.array(by_snr)
        assert np.all(np.diff(by_snr, axis=0) >= -1e-12)
    sc = RadioScenario()
    for k in (0, 5, 16):
        pd = [pd_analytic(Detector(e, 16, 1.0), sc, k) for e in grid_eps]
        assert all(b <= a + 1e-12 for a, b in zip(pd, pd[1:]))


def test_gaussian_pf_gap_measured_bounds():
    """The normal approximation to the chi-square tail, worst case over thresholds."""
    bounds = {16: 0.034, 32: 0.024, 64: 0.02, 128: 0.02}
    for n_s, bound in bounds.items():
        sc = RadioScenario(n_s=n_s, n_frame=max(128, n_s))
        for floor in (1.0, 2.5):
            for eps in np.linspace(0, 3 * floor, 301):
                d = Detector(eps, n_s, floor)
                assert abs(pf_analytic(d) - pd_gaussian(d, sc, 0)) <= bound


@pytest.mark.xfail(strict=True, reason="chi-square(32) is skewed enough that the normal "
                                       "approximation misses Pf by up to 0.033 at n_s=16")
def test_gaussian_pf_gap_within_002_at_ns16():
    sc = RadioScenario()
    gaps = [abs(pf_analytic(Detector(e, 16, 1.0)) - pd_gaussian(Detector(e, 16, 1.0), sc, 0))
            for e in np.linspace(0, 3, 301)]
    assert max(gaps) <= 0.02


def test_detection_profile_methods():
    d = Detector(EPS_PF01, 16, 1.0)
    exact = detection_profile(d, RadioScenario())
    approx = detection_profile(d, RadioScenario(), method="gaussian")
    assert exact.n_s == approx.n_s == 16
    assert exact.pd_full == pytest.approx(pd_analytic(d, RadioScenario(), 16))
    assert approx.pd_full == pytest.approx(0.9096, abs=1e-4)


def test_decide_is_strict():
    d = Detector(1.25, 16, 1.0)
    assert decide(d, 1.25) is False
    assert decide(d, 1.25 + 1e-12) is True
    assert decide(d, 0.0) is False


def test_scenario_floors_and_validation():
    sc = RadioScenario(inr_db=10.0)
    assert sc.sensing_floor(SchemeKind.HALF_DUPLEX) == 1.0
    assert sc.sensing_floor("sliding_full_duplex") == pytest.approx(11.0)
    assert RadioScenario().sensing_floor(SchemeKind.SLOTTED_FULL_DUPLEX) == 1.0
    with pytest.raises(DomainError):
        RadioScenario(n_s=200, n_frame=128)
    with pytest.raises(DomainError):
        RadioScenario(noise_power=0.0)
    with pytest.raises(DomainError):
        Detector.for_scheme(RadioScenario(), "hd")
