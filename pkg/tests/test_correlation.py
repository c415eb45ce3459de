import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pilotcs.correlation import (
    CorrelationProfile,
    correlation_profile,
    correlation_profile_naive,
    crosscorr_all_lags,
    crosscorr_naive,
    periodic_crosscorr,
    sarwate_lhs,
    welch_bound,
)
from pilotcs.seqgen import PeriodicSequence, SequenceFamily, fzc_family, fzc_sequence, gold_family, kasami_family, msequence_family

from conftest import random_sequence


def test_zero_lag_autocorrelation_is_energy(rng):
    a = random_sequence(20, rng)
    assert periodic_crosscorr(a, a, 0) == pytest.approx(1.0, abs=1e-14)


def test_fzc3_lag1_is_zero():
    a = fzc_sequence(1, 3)
    expected = (np.exp(-2j * np.pi / 3) + np.exp(2j * np.pi / 3) + 1) / 3
    assert abs(expected) < 1e-15
    assert abs(periodic_crosscorr(a, a, 1)) < 1e-15


def test_lag_periodicity(rng):
    a, b = random_sequence(11, rng), random_sequence(11, rng)
    for lag in range(-11, 11):
        assert periodic_crosscorr(a, b, lag) == pytest.approx(periodic_crosscorr(a, b, lag + 11), abs=1e-14)


def test_period_mismatch(rng):
    with pytest.raises(ValueError, match="period"):
        periodic_crosscorr(random_sequence(5, rng), random_sequence(6, rng), 0)
    with pytest.raises(ValueError, match="period"):
        crosscorr_all_lags(random_sequence(5, rng), random_sequence(6, rng))


def test_definition_convention():
    # theta(a, b)(l) = sum_k a(k) conj(b(k+l)): a delta at 0 against a delta at 2 peaks at l = 2
    a = PeriodicSequence([1, 0, 0, 0, 0])
    b = PeriodicSequence([0, 0, 1j, 0, 0])
    c = crosscorr_all_lags(a, b)
    np.testing.assert_allclose(c, [0, 0, -1j, 0, 0], atol=1e-15)


@pytest.mark.parametrize("M", [8, 15, 64, 255])
def test_fast_matches_naive(M, rng):
    a, b = random_sequence(M, rng), random_sequence(M, rng)
    fast = crosscorr_all_lags(a, b)
    np.testing.assert_allclose(fast, crosscorr_naive(a, b), atol=1e-10, rtol=0)
    for lag in (0, 1, M // 2, M - 1):
        assert fast[lag] == pytest.approx(periodic_crosscorr(a, b, lag), abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(M=st.integers(2, 64), seed=st.integers(0, 2 ** 32 - 1))
def test_cauchy_schwarz_and_conjugate_symmetry(M, seed):
    rng = np.random.default_rng(seed)
    a, b = random_sequence(M, rng), random_sequence(M, rng)
    ab = crosscorr_all_lags(a, b)
    ba = crosscorr_all_lags(b, a)
    assert np.all(np.abs(ab) <= 1 + 1e-12)
    for lag in range(M):
        assert abs(ab[lag] - np.conj(ba[(-lag) % M])) < 1e-12


@pytest.mark.parametrize("T, M", [(2, 15), (4, 8), (5, 31)])
def test_profile_matches_naive(T, M, rng):
    seqs = [random_sequence(M, rng) for _ in range(T)]
    fast, slow = correlation_profile(seqs), correlation_profile_naive(seqs)
    assert fast.theta_a == pytest.approx(slow.theta_a, abs=1e-12)
    assert fast.theta_c == pytest.approx(slow.theta_c, abs=1e-12)
    assert (fast.family_size, fast.period) == (T, M)


def test_profile_fzc255():
    prof = correlation_profile(fzc_family(255))
    assert prof.theta_a < 1e-12
    assert prof.theta_c == pytest.approx(1 / math.sqrt(255), abs=1e-12)


def test_profile_single_member():
    prof = correlation_profile([fzc_sequence(1, 15)])
    assert prof.theta_c is None and prof.theta_a < 1e-12


def test_profile_gold5_naive_oracle():
    prof = correlation_profile_naive(gold_family(5))
    assert prof.theta_a == pytest.approx(9 / 31, abs=1e-12)
    assert prof.theta_c == pytest.approx(9 / 31, abs=1e-12)


@pytest.mark.parametrize("M", [15, 35, 255])
def test_sarwate_equality_fzc(M):
    lhs = sarwate_lhs(correlation_profile(fzc_family(M)))
    assert lhs == pytest.approx(1 / M ** 2, rel=1e-12)


def test_sarwate_zero_profile_infeasible():
    prof = CorrelationProfile(0.0, 0.0, 3, 15)
    assert sarwate_lhs(prof) == 0.0 < 1 / 15 ** 2


def test_sarwate_gold5():
    prof = correlation_profile(gold_family(5))
    expected = (9 / 31) ** 2 / 31 + 30 / (31 * 32) * ((9 / 31) ** 2 / 31)
    assert sarwate_lhs(prof) == pytest.approx(expected, rel=1e-12)
    assert sarwate_lhs(prof) >= 1 / 31 ** 2


def test_sarwate_needs_two():
    with pytest.raises(ValueError):
        sarwate_lhs(CorrelationProfile(0.0, None, 1, 15))


@pytest.mark.parametrize("family", [
    lambda: fzc_family(15), lambda: fzc_family(63), lambda: gold_family(5), lambda: gold_family(6),
    lambda: kasami_family(4), lambda: kasami_family(8), lambda: msequence_family(7)])
def test_sarwate_holds_for_every_family(family):
    fam = family()
    prof = correlation_profile(fam)
    assert sarwate_lhs(prof) >= 1 / fam.period ** 2 - 1e-12


def test_family_profile_consistent():
    fam = kasami_family(6)
    prof = correlation_profile_naive(fam)
    assert fam.theta_a == pytest.approx(prof.theta_a, abs=1e-12)
    assert fam.theta_c == pytest.approx(prof.theta_c, abs=1e-12)


def test_welch_examples():
    assert welch_bound(255, 510) == pytest.approx(math.sqrt(255 / 129795), abs=1e-15)
    assert welch_bound(255, 510) == pytest.approx(0.0443, abs=1e-4)
    assert welch_bound(40, 40) == 0.0
    assert welch_bound(1, 2) == 1.0


@pytest.mark.parametrize("M, N", [(10, 5), (0, 4), (1, 1)])
def test_welch_errors(M, N):
    with pytest.raises(ValueError):
        welch_bound(M, N)
