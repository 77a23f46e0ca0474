import numpy as np
import pytest
from scipy.signal import lombscargle as scipy_lombscargle

from rating_dynamics.errors import PeriodicityError
from rating_dynamics.periodicity import default_grid, dominant_period, lomb_scargle, series_in_years
from rating_dynamics.timeseries import RatingSeries
from synthetic import sinusoid

GRID = np.round(np.arange(0.1, 10.0 + 1e-9, 0.01), 10)


def test_injected_peak():
    t, y = sinusoid()
    pg = lomb_scargle(t, y, GRID)
    assert abs(pg.frequencies[np.argmax(pg.powers)] - 2.0) <= 0.01 + 1e-12


def test_matches_scipy():
    rng = np.random.default_rng(7)
    t = np.sort(rng.uniform(0, 5, 50))
    y = rng.normal(size=50)
    pg = lomb_scargle(t, y, GRID)
    yc = y - y.mean()
    ref = scipy_lombscargle(t, yc, 2 * np.pi * GRID) / (yc @ yc / yc.size)
    assert np.allclose(pg.powers, ref, rtol=1e-9, atol=1e-12)


def test_zero_signal():
    pg = lomb_scargle(np.arange(10.0), np.zeros(10), GRID)
    assert np.all(pg.powers == 0)


def test_two_points():
    pg = lomb_scargle([0.0, 1.0], [1.0, -1.0], GRID)
    assert np.all(np.isfinite(pg.powers)) and np.all(pg.powers >= 0)


@pytest.mark.parametrize("t, y, f", [
    ([0.0, 0.0], [1.0, 2.0], GRID),
    ([0.0], [1.0], GRID),
    ([0.0, 1.0], [1.0, 2.0], np.array([1.0, 0.5])),
    ([0.0, 1.0], [1.0, 2.0], np.array([0.0, 0.5])),
])
def test_bad_input(t, y, f):
    with pytest.raises(PeriodicityError):
        lomb_scargle(t, y, f)


@pytest.mark.parametrize("shift", [-3.7, 0.25, 1e3])
def test_translation_invariance(shift):
    t, y = sinusoid(seed=2)
    a = lomb_scargle(t, y, GRID).powers
    b = lomb_scargle(t + shift, y, GRID).powers
    assert np.max(np.abs(a - b)) < 1e-9


def test_amplitude_scaling_leaves_normalized_powers():
    rng = np.random.default_rng(4)
    t = np.sort(rng.uniform(0, 5, 60))
    y = rng.normal(size=60)
    a = lomb_scargle(t, y, GRID).powers
    b = lomb_scargle(t, 7.5 * y, GRID).powers
    assert np.allclose(a, b, rtol=1e-12)
    assert np.argmax(a) == np.argmax(b)


def test_uniform_sampling_matches_dft_peak():
    n = 64
    t = np.arange(n) / 8.0
    rng = np.random.default_rng(1)
    y = np.cos(2 * np.pi * 1.375 * t + 0.4) + 0.3 * rng.normal(size=n)
    freqs = np.arange(1, n // 2) / (n / 8.0)
    pg = lomb_scargle(t, y, freqs)
    dft = np.abs(np.fft.rfft(y - y.mean()))[1:n // 2]
    assert np.argmax(pg.powers) == np.argmax(dft)


@pytest.mark.parametrize("span, n, lo, hi, step", [(5.0, 100, 0.2, 10.0, 0.04), (1.0, 10, 1.0, 5.0, 0.2)])
def test_default_grid(span, n, lo, hi, step):
    g = default_grid(np.linspace(0, span, n))
    assert g[0] == pytest.approx(lo) and g[-1] == pytest.approx(hi)
    assert np.allclose(np.diff(g), step)


def test_default_grid_single_time():
    with pytest.raises(PeriodicityError):
        default_grid([2.0, 2.0, 2.0])


def test_dominant_period_positive_control():
    t, y = sinusoid()
    pg = lomb_scargle(t, y, GRID)
    rep = dominant_period(pg, t, y, 999, seed=0)
    assert rep.p_value <= 0.01
    assert rep.period * rep.frequency == pytest.approx(1.0)
    assert rep.p_value == 1 / 1000


def test_dominant_period_zero_series():
    t = np.arange(10.0)
    y = np.zeros(10)
    rep = dominant_period(lomb_scargle(t, y, GRID), t, y, 999)
    assert rep.p_value == 1.0


def test_p_value_definition_and_determinism():
    rng = np.random.default_rng(11)
    t = np.sort(rng.uniform(0, 4, 40))
    y = rng.normal(size=40)
    pg = lomb_scargle(t, y, GRID)
    a = dominant_period(pg, t, y, 199, seed=5)
    b = dominant_period(pg, t, y, 199, seed=5)
    assert a == b
    count = round(a.p_value * 200) - 1
    assert a.p_value == (1 + count) / 200


def test_permutations_minimum():
    t, y = sinusoid()
    with pytest.raises(PeriodicityError):
        dominant_period(lomb_scargle(t, y, GRID), t, y, 10)


def test_series_in_years():
    s = RatingSeries([100, 100 + 31_557_600], [2.0, 4.0])
    t, y = series_in_years(s)
    assert t.tolist() == [0.0, 1.0] and y.tolist() == [-1.0, 1.0]
