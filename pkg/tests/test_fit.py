import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rating_dynamics.errors import FitError
from rating_dynamics.fit import fit_oscillator, fit_power_law, model_ratings
from rating_dynamics.ingest import review_counts
from rating_dynamics.optimize import SimplexOptions
from rating_dynamics.oscillator import evaluate
from rating_dynamics.periodicity import SECONDS_PER_YEAR
from rating_dynamics.timeseries import RatingSeries
from synthetic import TRUE, oscillator_series

TROY_TOP30 = [76, 62, 38, 37, 34, 29, 28, 26, 23, 23, 23, 22, 21, 21, 19,
              18, 17, 16, 15, 15, 14, 13, 13, 12, 12, 12, 12, 11, 11, 11]
# ordinary least squares of log(count) on log(rank), evaluated independently at 40 digits
TROY_SLOPE = -0.58712046015296597164
TROY_INTERCEPT = 4.4456419641358829652
TROY_R2 = 0.9779588301295325004


def test_power_law_exact():
    r = np.arange(1, 51)
    fit = fit_power_law(1000.0 * r ** -1.2)
    assert fit.slope == pytest.approx(-1.2, abs=1e-10)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-10)
    assert fit.intercept == pytest.approx(np.log(1000.0), abs=1e-10)
    assert fit.n == 50


def test_power_law_flat():
    fit = fit_power_law([7, 7, 7, 7])
    assert fit.slope == 0.0 and fit.r_squared == 0.0


def test_power_law_troy_oracle():
    fit = fit_power_law(TROY_TOP30)
    assert fit.slope == pytest.approx(TROY_SLOPE, abs=1e-9)
    assert fit.intercept == pytest.approx(TROY_INTERCEPT, abs=1e-9)
    assert fit.r_squared == pytest.approx(TROY_R2, abs=1e-9)
    assert fit.slope < 0 and fit.r_squared > 0.9


def test_power_law_fixture_head_matches_table(city_dataset):
    counts = [c for _, c in review_counts(city_dataset("troy"))[:30]]
    assert counts == TROY_TOP30


@settings(max_examples=100)
@given(st.lists(st.integers(1, 10_000), min_size=2, max_size=60), st.floats(1e-3, 1e3))
def test_power_law_scale_covariant(counts, scale):
    counts = sorted(counts, reverse=True)
    a = fit_power_law(counts)
    b = fit_power_law([scale * c for c in counts])
    assert b.slope == pytest.approx(a.slope, abs=1e-12)
    assert b.r_squared == pytest.approx(a.r_squared, abs=1e-12)
    assert b.intercept == pytest.approx(a.intercept + np.log(scale), abs=1e-9)
    assert 0.0 <= a.r_squared <= 1.0


def test_power_law_rejects_bad_counts():
    with pytest.raises(FitError):
        fit_power_law([5])
    with pytest.raises(FitError):
        fit_power_law([5, 0])


@pytest.fixture(scope="module")
def clean_fit():
    return fit_oscillator(oscillator_series())


def test_noiseless_recovery(clean_fit):
    p = clean_fit.params
    for name in ("c", "k", "q", "omega"):
        assert getattr(p, name) == pytest.approx(getattr(TRUE, name), rel=0.05), name
    assert clean_fit.baseline == pytest.approx(3.5, abs=1e-6)
    assert p.m == 1.0


def test_sse_not_above_any_start(clean_fit):
    assert clean_fit.starts
    assert all(clean_fit.sse <= sse for _, sse in clean_fit.starts)


def test_sse_matches_model(clean_fit):
    s = oscillator_series()
    t = (s.times - s.times[0]) / SECONDS_PER_YEAR
    resid = clean_fit.baseline + evaluate(clean_fit.params, t)[0] - s.stars
    assert clean_fit.sse == pytest.approx(float(resid @ resid), abs=1e-9)


def test_baseline_absorbs_shift():
    stars = np.array([4, 3, 5, 4, 2, 4, 5, 3, 4, 4, 1, 5, 3, 4, 5, 2], dtype=float)
    times = 1_200_000_000 + 86400 * np.cumsum(np.arange(1, 17) * 7)
    opts = SimplexOptions(n_starts=3)
    a = fit_oscillator(RatingSeries(times, stars), opts=opts)
    b = fit_oscillator(RatingSeries(times, stars + 1.0), opts=opts)
    for name in ("c", "k", "q", "omega", "x0", "v0"):
        assert getattr(b.params, name) == pytest.approx(getattr(a.params, name), abs=1e-9)
    assert b.baseline == pytest.approx(a.baseline + 1.0, abs=1e-9)
    assert b.sse == pytest.approx(a.sse, abs=1e-9)


def test_constant_series():
    s = RatingSeries(86400 * np.arange(20), np.full(20, 4.0))
    fit = fit_oscillator(s)
    assert fit.params.q == 0.0 and fit.sse == 0.0 and fit.baseline == 4.0


def test_fit_deterministic():
    s = oscillator_series(noise=0.1, seed=3)
    opts = SimplexOptions(n_starts=2)
    assert fit_oscillator(s, opts=opts) == fit_oscillator(s, opts=opts)


def test_fit_respects_bounds():
    s = oscillator_series(noise=0.1, seed=1)
    fit = fit_oscillator(s, bounds={"omega": (2.0, 3.0), "q": (-0.5, 0.5)}, opts=SimplexOptions(n_starts=2))
    assert 2.0 <= fit.params.omega <= 3.0
    assert -0.5 - 1e-12 <= fit.params.q <= 0.5 + 1e-12


def test_fit_rejects_bad_input():
    with pytest.raises(FitError):
        fit_oscillator(RatingSeries(np.arange(5), np.ones(5)))
    with pytest.raises(FitError):
        fit_oscillator(RatingSeries(np.zeros(10), np.arange(10.0)))
    with pytest.raises(FitError):
        fit_oscillator(oscillator_series(), bounds={"c": (1.0, 0.5)})


def test_model_ratings_clamped(clean_fit):
    s = oscillator_series()
    vals = model_ratings(clean_fit, s.times)
    assert np.all((vals >= 1) & (vals <= 5))


def test_report_is_json_ready(clean_fit):
    d = clean_fit.as_dict("x")
    assert set(d) >= {"business_id", "params", "sse", "iterations", "converged", "baseline"}
    json.dumps(d)
