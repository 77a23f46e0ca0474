import numpy as np
import pytest
from scipy.optimize import minimize

from rating_dynamics.errors import FitError
from rating_dynamics.optimize import SimplexOptions, nelder_mead


def rosenbrock(p):
    x, y = p
    return (1 - x) ** 2 + 100 * (y - x * x) ** 2


def test_quadratic():
    res = nelder_mead(lambda x: (x[0] - 3) ** 2, [0.0])
    assert res.x[0] == pytest.approx(3, abs=1e-6) and res.converged


def test_rosenbrock():
    res = nelder_mead(rosenbrock, [-1.2, 1.0])
    assert np.allclose(res.x, [1, 1], atol=1e-4)


def test_abs():
    res = nelder_mead(lambda x: abs(x[0]), [5.0])
    assert abs(res.x[0]) < 1e-6


def test_matches_scipy_on_smooth_problem():
    f = lambda p: (p[0] - 0.5) ** 2 + 3 * (p[1] + 1.5) ** 2 + (p[2] - 2) ** 4 + p[0] * p[1] * 0.1
    ours = nelder_mead(f, [0.0, 0.0, 0.0])
    ref = minimize(f, [0.0, 0.0, 0.0], method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 20000, "maxfev": 40000})
    assert ours.fun <= ref.fun + 1e-10
    assert np.allclose(ours.x[:2], ref.x[:2], atol=1e-4)


@pytest.mark.parametrize("seed", range(10))
def test_never_worse_than_start(seed):
    rng = np.random.default_rng(seed)
    start = rng.normal(size=3) * 3
    f = lambda p: float(np.sum(np.sin(3 * p)) + 0.1 * p @ p)
    res = nelder_mead(f, start, SimplexOptions(max_iterations=50))
    assert res.fun <= f(start)


def test_iteration_cap_reports_not_converged():
    res = nelder_mead(rosenbrock, [-1.2, 1.0], SimplexOptions(max_iterations=5))
    assert res.iterations == 5 and not res.converged


def test_non_finite_values_are_avoided():
    f = lambda p: np.nan if p[0] < 0 else (p[0] - 1) ** 2
    res = nelder_mead(f, [0.05])
    assert res.x[0] == pytest.approx(1, abs=1e-6)


def test_non_finite_start_rejected():
    with pytest.raises(FitError):
        nelder_mead(lambda p: np.inf, [0.0])


def test_options_validated():
    with pytest.raises(FitError):
        SimplexOptions(initial_scale=0)
    with pytest.raises(FitError):
        SimplexOptions(n_starts=0)


def test_deterministic():
    a = nelder_mead(rosenbrock, [-1.2, 1.0])
    b = nelder_mead(rosenbrock, [-1.2, 1.0])
    assert np.array_equal(a.x, b.x) and a.iterations == b.iterations
