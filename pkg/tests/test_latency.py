import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from crlab.errors import DivergenceError, DomainError, NonConvergenceError
from crlab.latency import (DetectionProfile, SchemeKind, capacity_c0, general_latency_series,
                           hd_average_latency, hd_latency_blind, hd_latency_sensing,
                           slotted_fd_average_latency, slotted_fd_latency, throughput)


# Oracles: the decision-by-decision sums, truncated at 10^4 retries.
def series_blind(n_blind, p, n_s, n_frame, terms=10_000):
    return sum((n_blind + n_s + n * n_frame) * p * (1 - p) ** n for n in range(terms))


def series_first(n_first, p_first, p, period, terms=10_000):
    tail = sum((n_first + (n + 1) * period) * p * (1 - p) ** n for n in range(terms))
    return n_first * p_first + (1 - p_first) * tail


def profile_with(pd_full, n_s=16, **partial):
    pd = np.full(n_s, pd_full)
    for k, v in partial.items():
        pd[int(k[1:]) - 1] = v
    return DetectionProfile(pd)


def test_capacity():
    assert capacity_c0(0.0) == pytest.approx(1.0)
    assert capacity_c0(-math.inf) == 0.0
    assert capacity_c0(10.0) == pytest.approx(math.log2(11), rel=1e-12)
    assert capacity_c0(10.0) == pytest.approx(3.4594, abs=1e-4)


def test_throughput_examples():
    assert throughput("sliding", 0.1, 16, 128).normalized_throughput == pytest.approx(0.9)
    assert throughput(SchemeKind.SLOTTED_FULL_DUPLEX, 0.1, 16, 128).normalized_throughput == pytest.approx(0.9)
    assert throughput("hd", 0.0, 16, 128).normalized_throughput == 0.875
    for s in SchemeKind:
        assert throughput(s, 1.0, 16, 128).normalized_throughput == 0.0
    with pytest.raises(DomainError):
        throughput("hd", 1.5, 16, 128)


def test_hd_blind_examples():
    assert hd_latency_blind(10, profile_with(1.0), 16, 128) == 26
    assert hd_latency_blind(10, profile_with(0.5), 16, 128) == pytest.approx(154.0, rel=1e-12)
    assert series_blind(10, 0.5, 16, 128) == pytest.approx(154.0, rel=1e-12)
    assert hd_latency_blind(1, profile_with(0.9), 16, 128) == pytest.approx(17 + 128 / 9, rel=1e-12)
    assert series_blind(1, 0.9, 16, 128) == pytest.approx(31.2222222222, rel=1e-10)
    with pytest.raises(DivergenceError):
        hd_latency_blind(3, profile_with(0.0), 16, 128)
    with pytest.raises(DomainError):
        hd_latency_blind(113, profile_with(0.5), 16, 128)


def test_hd_sensing_examples():
    assert hd_latency_sensing(5, profile_with(0.7, k5=1.0), 16, 128) == 5
    assert hd_latency_sensing(16, profile_with(0.5), 16, 128) == pytest.approx(144.0, rel=1e-12)
    assert series_first(16, 0.5, 0.5, 128) == pytest.approx(144.0, rel=1e-12)
    assert hd_latency_sensing(8, profile_with(0.5, k8=0.0), 16, 128) == pytest.approx(264.0, rel=1e-12)
    assert series_first(8, 0.0, 0.5, 128) == pytest.approx(264.0, rel=1e-12)
    with pytest.raises(DivergenceError):
        hd_latency_sensing(3, profile_with(0.0), 16, 128)


def test_slotted_examples():
    assert slotted_fd_latency(9, profile_with(0.3, k9=1.0), 16) == 9
    assert slotted_fd_latency(16, profile_with(0.5), 16) == pytest.approx(32.0, rel=1e-12)
    assert series_first(16, 0.5, 0.5, 16) == pytest.approx(32.0, rel=1e-12)
    assert slotted_fd_latency(4, profile_with(0.8, k4=0.2), 16) == pytest.approx(20.0, rel=1e-12)
    assert series_first(4, 0.2, 0.8, 16) == pytest.approx(20.0, rel=1e-12)


def test_averages_at_certain_detection():
    ones = profile_with(1.0)
    assert hd_average_latency(ones, 16, 128) == 64.5
    assert slotted_fd_average_latency(ones, 16) == 8.5
    expected = (sum(nb + 16 for nb in range(1, 113)) + sum(range(1, 17))) / 128
    assert expected == 64.5


def test_slotted_average_constant_half():
    oracle = sum(series_first(nf, 0.5, 0.5, 16) for nf in range(1, 17)) / 16
    assert oracle == pytest.approx(24.5, rel=1e-12)
    assert slotted_fd_average_latency(DetectionProfile.constant(0.5, 16), 16) == pytest.approx(oracle, rel=1e-12)


def test_hd_average_with_ramp_profile():
    prof = DetectionProfile.from_function(lambda k: 0.9 * k / 16, 16)
    oracle = (sum(series_blind(nb, 0.9, 16, 128) for nb in range(1, 113))
              + sum(series_first(nf, 0.9 * nf / 16, 0.9, 128) for nf in range(1, 17))) / 128
    assert hd_average_latency(prof, 16, 128) == pytest.approx(oracle, rel=1e-10)


def test_average_diverges_without_detection():
    with pytest.raises(DivergenceError):
        hd_average_latency(profile_with(0.0), 16, 128)
    with pytest.raises(DivergenceError):
        slotted_fd_average_latency(profile_with(0.0), 16)


def test_general_series_examples():
    assert general_latency_series([(5, 1.0)]) == 5
    geometric = ((k, 0.5) for k in itertools.count(1))
    assert general_latency_series(geometric) == pytest.approx(2.0, abs=1e-9)
    blind = ((10 + 16 + n * 128, 0.5) for n in itertools.count())
    assert general_latency_series(blind) == pytest.approx(
        hd_latency_blind(10, profile_with(0.5), 16, 128), rel=1e-9)


def test_general_series_errors():
    with pytest.raises(DomainError):
        general_latency_series([])
    with pytest.raises(DomainError):
        general_latency_series([(3, 0.5), (3, 0.5)])
    with pytest.raises(NonConvergenceError):
        general_latency_series([(1, 0.5), (2, 0.5)])
    with pytest.raises(NonConvergenceError):
        general_latency_series((k, 1e-7) for k in itertools.count(1))


def hd_blind_points(n_blind, prof, n_s, n_frame):
    p = prof.pd_full
    return ((n_blind + n_s + n * n_frame, p) for n in itertools.count())


def first_partial_points(n_first, prof, period):
    yield n_first, prof.pd_partial(n_first)
    for n in itertools.count(1):
        yield n_first + n * period, prof.pd_full


profiles = st.builds(
    lambda full, ramp: DetectionProfile(full * np.asarray(ramp + [1.0])),
    st.floats(0.05, 1.0),
    st.lists(st.floats(0.0, 1.0), min_size=15, max_size=15).map(sorted),
)


@settings(max_examples=100, deadline=None)
@given(profiles, st.integers(1, 112), st.integers(1, 16))
def test_closed_forms_equal_series(prof, n_blind, n_first):
    assert hd_latency_blind(n_blind, prof, 16, 128) == pytest.approx(
        general_latency_series(hd_blind_points(n_blind, prof, 16, 128)), rel=1e-9)
    assert hd_latency_sensing(n_first, prof, 16, 128) == pytest.approx(
        general_latency_series(first_partial_points(n_first, prof, 128)), rel=1e-9)
    assert slotted_fd_latency(n_first, prof, 16) == pytest.approx(
        general_latency_series(first_partial_points(n_first, prof, 16)), rel=1e-9)


@settings(max_examples=60, deadline=None)
@given(profiles, st.integers(16, 512))
def test_slotted_never_slower_than_half_duplex(prof, n_frame):
    assert slotted_fd_average_latency(prof, 16) <= hd_average_latency(prof, 16, n_frame) + 1e-9


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.0, 1.0), min_size=16, max_size=16).map(sorted),
       st.floats(0.05, 0.95), st.floats(0.01, 0.5))
def test_average_latency_nonincreasing_in_pd(shape, scale, bump):
    shape = np.asarray(shape)
    shape = shape / shape[-1] if shape[-1] > 0 else np.ones(16)
    lo = DetectionProfile(scale * shape)
    hi = DetectionProfile(min(1.0, scale + bump) * shape)
    assert hd_average_latency(hi, 16, 128) <= hd_average_latency(lo, 16, 128) + 1e-9
    assert slotted_fd_average_latency(hi, 16) <= slotted_fd_average_latency(lo, 16) + 1e-9


@pytest.mark.parametrize("n_s, n_frame", [(16, 128), (8, 64), (4, 4), (32, 100)])
def test_limits_at_certain_detection(n_s, n_frame):
    ones = DetectionProfile.constant(1.0, n_s)
    hd = (sum(nb + n_s for nb in range(1, n_frame - n_s + 1)) + sum(range(1, n_s + 1))) / n_frame
    assert hd_average_latency(ones, n_s, n_frame) == pytest.approx(hd)
    assert slotted_fd_average_latency(ones, n_s) == pytest.approx((n_s + 1) / 2)
    near = DetectionProfile.constant(1 - 1e-9, n_s)
    assert hd_average_latency(near, n_s, n_frame) == pytest.approx(hd, rel=1e-6)


def test_profile_validation_and_access():
    prof = DetectionProfile.from_function(lambda k: k / 16, 16)
    assert prof.pd_full == 1.0 and prof.pd_partial(4) == 0.25 and len(prof) == 16
    with pytest.raises(DomainError):
        prof.pd_partial(0)
    with pytest.raises(DomainError):
        DetectionProfile([0.5, 1.2])
    with pytest.raises(DomainError):
        hd_average_latency(prof, 8, 128)


def test_scheme_parsing():
    assert SchemeKind.parse("hd") is SchemeKind.HALF_DUPLEX
    assert SchemeKind.parse("sliding-full-duplex") is SchemeKind.SLIDING_FULL_DUPLEX
    assert not SchemeKind.HALF_DUPLEX.full_duplex
    with pytest.raises(DomainError):
        SchemeKind.parse("duplex")
