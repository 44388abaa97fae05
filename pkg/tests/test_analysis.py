import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spinchannel import InsufficientWindow, ModelParams, NoRevivalFound
from spinchannel.analysis import (
    analytic_large_lambda_fidelity,
    brute_force_large_lambda_fidelity,
    closed_form_large_lambda_fidelity,
    derivative_peak,
    fidelity_difference_scan,
    gaussian_rate,
    rate_scan,
    revival_period,
    series_for,
)
from spinchannel.channel import exact_series


def test_gaussian_rate_recovers_exact_rate():
    t = np.linspace(0, 1, 21)
    fit = gaussian_rate(t, np.exp(-0.3 * t**2))
    assert fit.rate == pytest.approx(0.3, rel=1e-12)
    assert fit.residual < 1e-12
    assert fit.n_points == 12  # exp(-0.3 t^2) >= 0.9 up to t = 0.55


def test_gaussian_rate_window_stops_at_threshold():
    t = np.linspace(0, 2, 41)
    v = np.exp(-t**2)
    fit = gaussian_rate(t, v, threshold=0.9)
    assert fit.window[1] <= np.sqrt(-np.log(0.9)) + 1e-12
    assert fit.n_points == int(np.sum(v >= 0.9))


def test_gaussian_rate_normalizes_initial_value():
    t = np.linspace(0, 0.5, 11)
    fit = gaussian_rate(t, 0.98 * np.exp(-0.2 * t**2))
    assert fit.rate == pytest.approx(0.2, rel=1e-12)


def test_gaussian_rate_needs_points():
    t = np.linspace(0, 5, 11)
    with pytest.raises(InsufficientWindow):
        gaussian_rate(t, np.exp(-10 * t**2))
    with pytest.raises(ValueError):
        gaussian_rate(t, t[:-1])


def test_derivative_peak():
    lam = np.linspace(0, 2, 21)
    rates = np.arctan(10 * (lam - 1.2))
    d, peak, prom, flat = derivative_peak(lam, rates)
    assert peak == pytest.approx(1.2)
    assert prom > 0 and not flat
    _, _, prom0, flat0 = derivative_peak(lam, 0.4 * lam)
    assert flat0 and prom0 == pytest.approx(0.0, abs=1e-12)


def test_short_time_rate_matches_weak_coupling_order():
    # the rate scales as eps^2 at fixed field
    times = np.linspace(0, 1.0, 11)
    r = []
    for eps in (0.02, 0.04):
        p = ModelParams(n_qubits=4, lam=1.0, epsilon=eps)
        r.append(gaussian_rate(times, series_for(p, times)).rate)
    assert r[1] / r[0] == pytest.approx(4.0, rel=0.01)


def test_rate_scan_records_failures():
    times = np.linspace(0, 200, 5)
    scan = rate_scan(ModelParams(n_qubits=3, epsilon=0.5), [0.5, 1.0], times)
    assert np.isnan(scan.rates).all()
    assert set(scan.errors) == {0.5, 1.0}
    assert all(v.startswith("InsufficientWindow") for v in scan.errors.values())


def test_rate_scan_exact_and_sampled_agree_roughly():
    p = ModelParams(n_qubits=5, epsilon=0.1)
    times = np.linspace(0, 4, 17)
    grid = [0.6, 1.0, 1.4]
    ex = rate_scan(p, grid, times)
    sm = rate_scan(p, grid, times, n_samples=600, seed=4)
    assert np.allclose(ex.rates, sm.rates, rtol=0.15)
    assert list(ex.lambda_grid) == grid


@pytest.mark.parametrize("n", [1, 2, 5])
def test_large_field_forms_agree(n):
    t = np.linspace(0, 40, 33)
    a = analytic_large_lambda_fidelity(n, 0.1, t)
    b = closed_form_large_lambda_fidelity(n, 0.1, t)
    c = brute_force_large_lambda_fidelity(n, 0.1, t)
    assert np.abs(a - b).max() <= 1e-12
    assert np.abs(a - c).max() <= 1e-12


def test_large_field_limit_of_full_model():
    t = np.linspace(0, 30, 7)
    F, _ = exact_series(ModelParams(n_qubits=4, lam=1e4, epsilon=0.1), t)
    assert np.abs(F - closed_form_large_lambda_fidelity(4, 0.1, t)).max() <= 1e-4


def test_revival_of_cosine():
    t = np.linspace(0, 20, 401)
    rev = revival_period(t, np.cos(0.5 * t) ** 2)
    assert rev.period == pytest.approx(2 * np.pi, abs=1e-3)
    assert rev.perfect


def test_revival_imperfect_and_missing():
    t = np.linspace(0, 20, 401)
    rev = revival_period(t, 0.6 + 0.4 * np.cos(t) * np.exp(-0.1 * t))
    # damping shifts the maximum to tan(t) = -0.1
    assert rev.period == pytest.approx(2 * np.pi - np.arctan(0.1), abs=1e-3)
    assert not rev.perfect
    with pytest.raises(NoRevivalFound):
        revival_period(t, np.exp(-t))
    with pytest.raises(NoRevivalFound):
        revival_period(t[:2], t[:2])


def test_revival_at_strong_field():
    # polarized environment: cos(eps t / 2)^(2n) revives at t = 2 pi / eps
    t = np.linspace(0, 80, 321)
    F, _ = exact_series(ModelParams(n_qubits=3, lam=1e4, epsilon=0.1), t)
    rev = revival_period(t, F)
    assert rev.period == pytest.approx(2 * np.pi / 0.1, rel=1e-3)


def test_difference_scan_shapes():
    scan = fidelity_difference_scan(ModelParams(n_qubits=3, epsilon=0.3), [0, 1, 2], [0.5, 1.0, 1.5], 2.0)
    assert set(scan.differences) == {(0, 1), (0, 2), (1, 2)}
    for key, d in scan.differences.items():
        assert np.allclose(d, np.abs(scan.fidelities[key[0]] - scan.fidelities[key[1]]))
        assert scan.peaks[key] in scan.lambda_grid
    with pytest.raises(ValueError):
        fidelity_difference_scan(ModelParams(n_qubits=3), [1], [1.0], 1.0)


@settings(max_examples=30, deadline=None)
@given(rate=st.floats(1e-3, 5.0), npts=st.integers(5, 40))
def test_property_gaussian_fit_exact(rate, npts):
    t = np.linspace(0, np.sqrt(-np.log(0.95) / rate), npts)
    assert gaussian_rate(t, np.exp(-rate * t**2)).rate == pytest.approx(rate, rel=1e-9)
