import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from primeperiod import correlation as corr
from primeperiod.errors import (
    NoLinearSegmentError,
    NoMinimumError,
    WindowTooSmallError,
    ZeroVarianceError,
)
from primeperiod.telegraph import ModelTelegraphParams, TelegraphSignal

from oracles import acf_double_loop


def sig(values, start=0):
    return TelegraphSignal(start, np.array(values))


def full_acf(values, max_lag):
    s = sig(values)
    return corr.autocorrelation(s, -1, len(values), max_lag)


def series(values):
    v = np.asarray(values, dtype=float)
    return corr.AutocorrelationSeries(np.arange(v.size), v, (0, 0), 1.0)


def test_alternating_signal():
    n = 40
    c = full_acf([(-1) ** k for k in range(n)], 15).values
    # even lags: both subsets balanced, exactly 1; odd lags: subsets of odd
    # length carry means +-1/(n - tau), so C = -1 + 1/(n - tau)^2
    for tau, value in enumerate(c):
        expected = 1.0 if tau % 2 == 0 else -1.0 + 1.0 / (n - tau) ** 2
        assert value == pytest.approx(expected, abs=1e-14)


def test_square_wave_matches_brute_force_and_tends_to_limits():
    for periods in (3, 50):
        v = [1, 1, -1, -1] * periods
        c = full_acf(v, 3).values
        np.testing.assert_allclose(c, acf_double_loop(v, 3), atol=1e-12)
    # long record: C(1) -> 0, C(2) -> -1
    assert abs(c[1]) < 0.01 and abs(c[2] + 1) < 0.01


def test_constant_signal_zero_variance():
    with pytest.raises(ZeroVarianceError):
        full_acf([1] * 20, 3)


def test_window_checks():
    s = sig([1, -1] * 10, start=5)
    with pytest.raises(WindowTooSmallError):
        corr.autocorrelation(s, 4, 25, 10)
    with pytest.raises(ValueError):
        corr.autocorrelation(s, 3, 25, 2)


def test_window_is_open_interval():
    s = sig([1, -1, -1, 1, 1, 1, -1, 1, -1, -1], start=2)
    a = corr.autocorrelation(s, 3, 10, 2)
    np.testing.assert_allclose(a.values, acf_double_loop(s.values[2:8].tolist(), 2), atol=1e-12)
    assert a.window == (3, 10)


@settings(max_examples=200)
@given(st.lists(st.sampled_from([1, -1]), min_size=2, max_size=64).filter(lambda v: len(set(v)) == 2))
def test_brute_force_equivalence(v):
    max_lag = (len(v) - 1) // 2
    c = full_acf(v, max_lag)
    np.testing.assert_allclose(c.values, acf_double_loop(v, max_lag), rtol=0, atol=1e-12)
    assert c.values[0] == 1.0


@given(st.lists(st.sampled_from([1, -1]), min_size=4, max_size=64).filter(lambda v: len(set(v)) == 2))
def test_sign_flip_invariance(v):
    s = sig(v)
    max_lag = (len(v) - 1) // 2
    a = corr.autocorrelation(s, -1, len(v), max_lag)
    b = corr.autocorrelation(s.flipped(), -1, len(v), max_lag)
    assert np.array_equal(a.values, b.values)


@given(st.lists(st.sampled_from([1, -1]), min_size=4, max_size=64).filter(lambda v: len(set(v)) == 2))
def test_unnormalized_covariance_bounded(v):
    # Cauchy-Schwarz on the shifted subsets: |cov| <= 1 for +-1 data
    a = full_acf(v, (len(v) - 1) // 2)
    assert np.all(np.abs(a.values * a.variance_at_zero) <= 1 + 1e-12)


def test_normalized_acf_can_exceed_one_on_short_unbalanced_windows():
    # the subset means differ from the full-window mean, so |C| <= 1 is not
    # guaranteed; smallest counterexample
    c = full_acf([1, -1, 1, -1, 1], 2).values
    assert c[1] == pytest.approx(-25 / 24)


def test_model_curve_examples():
    for q in (0.0, 0.25, 0.5, 0.9):
        assert corr.model_autocorrelation(q, 7.0, 0.0) == 1.0
    tau = np.linspace(0, 9.99, 50)
    np.testing.assert_allclose(corr.model_autocorrelation(0.5, 10.0, tau), 1 - tau / 10, atol=1e-15)
    assert np.all(corr.model_autocorrelation(0.5, 10.0, np.linspace(10, 60, 40)) == 0.0)
    assert corr.model_autocorrelation(0.25, 10.0, 10.0) == pytest.approx(-0.5, abs=1e-15)


@pytest.mark.parametrize("q", [0.0, 0.25, 0.5, 0.75])
def test_model_knot_continuity(q):
    T = 3.7
    for n in range(1, 7):
        left = corr.model_autocorrelation_piece(q, T, n * T, n)
        right = corr.model_autocorrelation_piece(q, T, n * T, n + 1)
        assert abs(left - right) <= 1e-12
        assert left == pytest.approx((2 * q - 1) ** n, abs=1e-12)


def test_model_curve_validation():
    with pytest.raises(ValueError):
        corr.model_autocorrelation(0.2, 0.0, 1.0)
    with pytest.raises(ValueError):
        corr.model_autocorrelation(0.2, 1.0, -1.0)


def _z(ens, analytic):
    diff = np.abs(ens.values - analytic)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(diff <= 1e-12, 0.0, diff / ens.stderr)


def test_ensemble_no_flips():
    ens = corr.ensemble_model_acf(ModelTelegraphParams(10, length=80), 0.0, 100, 20, seed=3)
    assert np.all(ens.values == 1.0)


@pytest.mark.parametrize("flip, q", [(1.0, 0.0), (0.75, 0.25)])
def test_ensemble_matches_model(flip, q):
    params = ModelTelegraphParams(10, q, length=150)
    ens = corr.ensemble_model_acf(params, flip, 2000, 40, seed=11)
    analytic = corr.model_autocorrelation(q, 10, np.arange(41))
    assert _z(ens, analytic).max() <= 3


def test_ensemble_validation():
    with pytest.raises(ValueError):
        corr.ensemble_model_acf(ModelTelegraphParams(10), 0.5, 99, 5, seed=0)


def test_rescale():
    s = series(np.cos(np.arange(30) * np.pi / 5))
    same = corr.rescale(s, 1, 1)
    np.testing.assert_array_equal(same.values, s.values)
    assert same.normalized
    stretched = corr.rescale(s, 2, 1)
    assert int(np.argmin(stretched.values[:15])) == 10
    assert not corr.rescale(s, 1, 0.5).normalized
    with pytest.raises(ValueError):
        corr.rescale(s, 0, 1)


def test_first_minimum_and_spectral_on_triangle_wave():
    c = series(corr.model_autocorrelation(0.0, 10.0, np.arange(201)))
    fm = corr.estimate_period(c, corr.FIRST_MINIMUM)
    sp = corr.estimate_period(c, corr.SPECTRAL)
    assert fm.T_hat == 10 and fm.uncertainty >= 1
    assert sp.T_hat == pytest.approx(10.0, abs=0.1) and sp.uncertainty >= 1
    assert fm.T0 == pytest.approx(math.exp(1.0))


def test_monotone_decay_has_no_minimum():
    c = series(corr.model_autocorrelation(0.5, 10.0, np.arange(100)))
    with pytest.raises(NoMinimumError):
        corr.estimate_period(c, corr.FIRST_MINIMUM)


def test_prominence_filters_shallow_dips():
    v = np.concatenate((np.linspace(1, 0.5, 6), [0.49, 0.5, 0.45, 0.3], np.linspace(0.2, -0.5, 8), np.linspace(-0.4, 0.5, 10)))
    c = series(v)
    est = corr.estimate_period(c, corr.FIRST_MINIMUM, smoothing_window=1, prominence=0.02)
    assert est.T_hat == 17
    assert corr.estimate_period(c, corr.FIRST_MINIMUM, smoothing_window=1, prominence=0.001).T_hat == 6


def test_unknown_method():
    with pytest.raises(ValueError):
        corr.estimate_period(series([1, 0, -1, 0, 1]), "peaks")


def test_smooth_requires_odd_window():
    with pytest.raises(ValueError):
        corr.smooth([1, 2, 3], 2)


def test_recover_fundamental_period():
    assert corr.recover_fundamental_period(0.0, 10) == 1.0
    assert corr.recover_fundamental_period(10 * math.log(8), 10) == pytest.approx(8.0, rel=1e-14)


def test_linear_decay_endpoint():
    assert corr.linear_decay_endpoint(series(1 - np.arange(10) / 10)) == 9
    assert corr.linear_decay_endpoint(series(corr.model_autocorrelation(0.25, 6.0, np.arange(30)))) == 6
    with pytest.raises(NoLinearSegmentError):
        corr.linear_decay_endpoint(series([1, 0, 1, 0, 1]))
    with pytest.raises(ValueError):
        corr.linear_decay_endpoint(corr.rescale(series([1, 0.5, 0]), 1, 0.5))


def test_discrepancy_flag():
    a = corr.PeriodEstimate(10, 1, corr.FIRST_MINIMUM, 1, 10)
    assert not corr.estimates_disagree(a, corr.PeriodEstimate(12, 1, corr.SPECTRAL, 1, 10))
    assert corr.estimates_disagree(a, corr.PeriodEstimate(13, 1, corr.SPECTRAL, 1, 10))


def test_csv(tmp_path):
    from primeperiod.csvio import read_csv

    _, header, rows = read_csv(corr.to_csv(series([1.0, 0.5]), tmp_path / "a.csv"))
    assert header == ["tau", "c"] and rows == [["0", "1.0"], ["1", "0.5"]]
