import math
import warnings

import numpy as np
import pytest

from rating_dynamics.errors import OscillatorError
from rating_dynamics.oscillator import (
    OscillatorParams,
    Regime,
    classify,
    closed_form,
    empirical_amplitude,
    energy,
    envelope_peaks,
    evaluate,
    resonant_form,
    simulate_rk4,
    steady_state_amplitude,
)

EXAMPLE = OscillatorParams(m=1, c=1, k=1, q=10, omega=5)
# 10 / sqrt(601), evaluated at 40 digits
REF_AMPLITUDE = 0.40790850822400209164


def random_params(rng):
    """Non-resonant draws spread over all damped/undamped regimes."""
    while True:
        p = OscillatorParams(
            m=rng.uniform(0.5, 2.0), c=rng.choice([0.0, rng.uniform(0.0, 3.0)]),
            k=rng.uniform(0.5, 4.0), q=rng.uniform(-5, 5), omega=rng.uniform(0.0, 4.0),
            x0=rng.uniform(-2, 2), v0=rng.uniform(-2, 2))
        if classify(p) is not Regime.RESONANT:
            return p


@pytest.mark.parametrize("params, regime", [
    (dict(m=1, c=1, k=1, q=10, omega=5), Regime.UNDERDAMPED),
    (dict(m=1, c=0, k=1, q=10, omega=1), Regime.RESONANT),
    (dict(m=1, c=3, k=1), Regime.OVERDAMPED),
    (dict(m=1, c=2, k=1), Regime.CRITICALLY_DAMPED),
    (dict(m=1, c=0, k=1, q=10, omega=2), Regime.UNDAMPED),
    (dict(m=1, c=0, k=1, q=0, omega=1), Regime.UNDAMPED),
])
def test_classify(params, regime):
    assert classify(OscillatorParams(**params)) is regime


def test_classify_relative_tolerance():
    # c^2 differs from 4mk only by rounding
    c = 2 * math.sqrt(0.3 * 0.7)
    assert classify(OscillatorParams(m=0.3, c=c, k=0.7)) is Regime.CRITICALLY_DAMPED


@pytest.mark.parametrize("field, value", [("m", 0.0), ("k", -1.0), ("c", -0.1), ("omega", -1.0), ("q", math.nan)])
def test_params_validated(field, value):
    with pytest.raises(OscillatorError):
        OscillatorParams(**{field: value})


def test_closed_form_textbook():
    x, v = closed_form(OscillatorParams(x0=1), math.pi)
    assert x == pytest.approx(-1, abs=1e-15) and v == pytest.approx(0, abs=1e-15)
    x, _ = closed_form(OscillatorParams(v0=1), math.pi / 2)
    assert x == pytest.approx(1, abs=1e-15)


def test_closed_form_rejects_resonance():
    with pytest.raises(OscillatorError):
        closed_form(OscillatorParams(q=1, omega=1), 1.0)


def test_resonant_examples():
    p = OscillatorParams(m=1, k=1, c=0, q=2, omega=1)
    x, _ = resonant_form(p, 2 * math.pi)
    assert x == pytest.approx(0, abs=1e-12)
    x, _ = resonant_form(p, math.pi / 2)
    assert x == pytest.approx(math.pi / 2, abs=1e-12)
    with pytest.raises(OscillatorError):
        resonant_form(OscillatorParams(q=0, omega=1), 1.0)


@pytest.mark.parametrize("p", [
    OscillatorParams(m=2, k=3, q=1.5, omega=math.sqrt(1.5), x0=0.3, v0=-0.2),
    OscillatorParams(m=1, k=1, q=2, omega=1),
])
def test_resonant_form_solves_ode(p):
    # central differences of x against the ODE residual
    t = np.linspace(0.5, 20, 200)
    h = 1e-4
    xp, _ = resonant_form(p, t + h)
    x, v = resonant_form(p, t)
    xm, _ = resonant_form(p, t - h)
    acc = (xp - 2 * x + xm) / h ** 2
    resid = p.m * acc + p.k * x - p.q * np.cos(p.omega * t)
    assert np.max(np.abs(resid)) < 1e-4 * max(1.0, np.max(np.abs(x)))
    assert np.allclose(v, (xp - xm) / (2 * h), atol=1e-6)
    x0, v0 = resonant_form(p, 0.0)
    assert (x0, v0) == pytest.approx((p.x0, p.v0), abs=1e-15)


@pytest.mark.parametrize("seed", range(10))
def test_closed_form_solves_ode(seed):
    p = random_params(np.random.default_rng(seed))
    t = np.linspace(0.1, 10, 300)
    h = 1e-4
    xp, _ = closed_form(p, t + h)
    x, v = closed_form(p, t)
    xm, _ = closed_form(p, t - h)
    acc = (xp - 2 * x + xm) / h ** 2
    resid = p.m * acc + p.c * v + p.k * x - p.q * np.cos(p.omega * t)
    assert np.max(np.abs(resid)) < 1e-3
    assert closed_form(p, 0.0) == pytest.approx((p.x0, p.v0), abs=1e-13)


def test_steady_state_amplitude():
    assert steady_state_amplitude(EXAMPLE) == pytest.approx(REF_AMPLITUDE, rel=1e-15)
    assert steady_state_amplitude(OscillatorParams(c=1, q=0, omega=3)) == 0.0
    assert steady_state_amplitude(OscillatorParams(c=0.7, k=2.5, q=3, omega=0)) == pytest.approx(3 / 2.5)
    with pytest.raises(OscillatorError):
        steady_state_amplitude(OscillatorParams(q=1, omega=1))


def test_rk4_unit_oscillator():
    traj = simulate_rk4(OscillatorParams(x0=1), 10.0, 1e-3)
    assert len(traj) == 10001
    assert np.array_equal(traj.t, 1e-3 * np.arange(10001))
    assert np.max(np.abs(traj.x - np.cos(traj.t))) < 1e-9


def test_rk4_example_amplitude():
    traj = simulate_rk4(EXAMPLE, 100.0, 1e-3)
    assert empirical_amplitude(traj, 50.0) == pytest.approx(REF_AMPLITUDE, rel=0.01)


@pytest.mark.parametrize("seed", range(5))
def test_damped_free_motion_decays(seed):
    rng = np.random.default_rng(seed)
    p = OscillatorParams(m=1, c=rng.uniform(0.1, 3), k=rng.uniform(0.5, 3), x0=rng.uniform(-1, 1), v0=rng.uniform(-1, 1))
    traj = simulate_rk4(p, 50.0, 1e-2)
    assert abs(traj.x[-1]) < abs(p.x0) + abs(p.v0)


@pytest.mark.parametrize("seed", range(3))
def test_boundedness(seed):
    rng = np.random.default_rng(100 + seed)
    p = OscillatorParams(m=1, c=rng.uniform(0.2, 1), k=rng.uniform(0.5, 3), q=rng.uniform(-3, 3),
                         omega=rng.uniform(0.1, 3), x0=rng.uniform(-1, 1), v0=rng.uniform(-1, 1))
    traj = simulate_rk4(p, 1000.0, 1e-2)
    bound = max(abs(p.x0) + abs(p.v0) / p.natural_frequency, 2 * steady_state_amplitude(p)) * 1.1
    assert np.max(np.abs(traj.x)) <= bound


def test_energy_conserved():
    p = OscillatorParams(m=1.3, k=2.1, x0=0.7, v0=-0.4)
    traj = simulate_rk4(p, 100.0, 1e-3)
    e = energy(p, traj.x, traj.v)
    assert np.max(np.abs(e - e[0])) / e[0] < 1e-8


def test_rk4_fourth_order():
    p = OscillatorParams(m=1, c=0.3, k=2, q=1, omega=1.7, x0=0.5, v0=0.1)
    errs = []
    for h in (0.1, 0.05):
        traj = simulate_rk4(p, 10.0, h)
        errs.append(np.max(np.abs(traj.x - closed_form(p, traj.t)[0])))
    assert 8 <= errs[0] / errs[1] <= 32


def test_rk4_warns_on_coarse_step():
    with pytest.warns(RuntimeWarning):
        simulate_rk4(OscillatorParams(k=100), 1.0, 0.1)


def test_rk4_rejects_bad_arguments():
    with pytest.raises(OscillatorError):
        simulate_rk4(OscillatorParams(), 0.0, 1e-3)
    with pytest.raises(OscillatorError):
        simulate_rk4(OscillatorParams(), 1.0, -1e-3)


def test_rk4_divergence_reported():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        with pytest.raises(OscillatorError, match="step"):
            simulate_rk4(OscillatorParams(k=1e6, x0=1), 1000.0, 0.5)


def test_resonant_envelope_slope():
    p = OscillatorParams(m=1, c=0, k=1, q=2, omega=1)
    traj = simulate_rk4(p, 200.0, 1e-2)
    t_pk, amp = envelope_peaks(traj, 2 * math.pi / p.omega)
    assert np.all(np.diff(amp) > 0)
    slope = np.polyfit(t_pk, amp, 1)[0]
    assert slope == pytest.approx(p.q / (2 * math.sqrt(p.m * p.k)), rel=0.02)


def test_evaluate_dispatch():
    p = OscillatorParams(q=2, omega=1)
    assert evaluate(p, 1.0) == resonant_form(p, 1.0)
    p = OscillatorParams(c=1, q=2, omega=1)
    assert evaluate(p, 1.0) == closed_form(p, 1.0)
