"""Parameter estimation.

* :func:`fit_power_law` - rank/size least squares on log-log axes.
* :func:`fit_oscillator` - the oscillator model fitted to a rating series.

The oscillator fit fixes ``m = 1`` (only the ratios c/m, k/m, q/m are
identifiable) and works in years. For fixed ``(c, k, omega)`` the solution
is linear in ``(x0, v0, q)`` and in the long-run mean, so those are solved
by least squares inside the objective and Nelder-Mead only searches the
three nonlinear parameters.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import lsq_linear

from .errors import FitError, OscillatorError
from .oscillator import OscillatorParams, evaluate
from .optimize import SimplexOptions, nelder_mead
from .periodicity import SECONDS_PER_YEAR, lomb_scargle

MIN_POINTS = 8

DEFAULT_BOUNDS = {
    "c": (0.0, 10.0),
    "k": (0.0025, 400.0),
    "omega": (0.05, 20.0),
    "q": (-50.0, 50.0),
    "x0": (-4.0, 4.0),
    "v0": (-50.0, 50.0),
}

_NONLINEAR = ("c", "k", "omega")
_LINEAR = ("x0", "v0", "q")


@dataclass(frozen=True)
class PowerLawFit:
    slope: float
    intercept: float
    r_squared: float
    n: int

    def as_dict(self):
        return {"slope": self.slope, "intercept": self.intercept,
                "r_squared": self.r_squared, "n": self.n}


@dataclass(frozen=True)
class OscillatorFit:
    params: OscillatorParams
    sse: float
    iterations: int
    converged: bool
    baseline: float
    origin: int = 0
    starts: tuple = field(default=(), repr=False)

    def as_dict(self, business_id=None):
        return {
            "business_id": business_id,
            "params": self.params.as_dict(),
            "sse": self.sse,
            "iterations": self.iterations,
            "converged": self.converged,
            "baseline": self.baseline,
            "origin_timestamp": self.origin,
        }


def fit_power_law(ranked_counts):
    """OLS of ``log(count)`` on ``log(rank)`` for ranks ``1..n``.

    ``r_squared`` is 0 when the log counts have no variance.
    """
    y = np.asarray(ranked_counts, dtype=float)
    if y.ndim != 1 or y.size < 2:
        raise FitError("need at least two counts")
    if np.any(~np.isfinite(y)) or np.any(y <= 0):
        raise FitError("counts must be positive")
    lx = np.log(np.arange(1, y.size + 1, dtype=float))
    ly = np.log(y)
    xm, ym = lx.mean(), ly.mean()
    dx, dy = lx - xm, ly - ym
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    slope = float(dx @ dy) / sxx
    intercept = ym - slope * xm
    if syy == 0.0:
        r2 = 0.0
    else:
        resid = dy - slope * dx
        r2 = 1.0 - float(resid @ resid) / syy
        r2 = min(1.0, max(0.0, r2))
    return PowerLawFit(slope, float(intercept), r2, int(y.size))


# -- bounded coordinate maps -------------------------------------------------

def _sigmoid(u):
    if u >= 0:
        return 1.0 / (1.0 + math.exp(-u))
    e = math.exp(u)
    return e / (1.0 + e)


def _to_bounded(u, lo, hi):
    s = _sigmoid(u)
    if lo > 0:
        return math.exp(math.log(lo) + (math.log(hi) - math.log(lo)) * s)
    return lo + (hi - lo) * s


def _from_bounded(v, lo, hi):
    if lo > 0:
        s = (math.log(v) - math.log(lo)) / (math.log(hi) - math.log(lo))
    else:
        s = (v - lo) / (hi - lo)
    s = min(max(s, 1e-9), 1 - 1e-9)
    return math.log(s / (1 - s))


def _check_bounds(bounds):
    merged = dict(DEFAULT_BOUNDS)
    merged.update(bounds or {})
    for name, (lo, hi) in merged.items():
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise FitError(f"bad bounds for {name}: {(lo, hi)}")
    if merged["k"][0] <= 0:
        raise FitError("k must be bounded away from zero")
    if merged["c"][0] < 0 or merged["omega"][0] < 0:
        raise FitError("c and omega bounds must be nonnegative")
    return merged


# -- variable-projection objective --------------------------------------------

class _Problem:
    def __init__(self, t, y, bounds):
        self.t = t
        self.y = y
        self.bounds = bounds
        self.lin_lo = np.array([bounds[n][0] for n in _LINEAR] + [-np.inf])
        self.lin_hi = np.array([bounds[n][1] for n in _LINEAR] + [np.inf])

    def nonlinear(self, u):
        return tuple(_to_bounded(ui, *self.bounds[n]) for ui, n in zip(u, _NONLINEAR))

    def design(self, c, k, w):
        t = self.t
        h1 = evaluate(OscillatorParams(1.0, c, k, 0.0, w, 1.0, 0.0), t)[0]
        h2 = evaluate(OscillatorParams(1.0, c, k, 0.0, w, 0.0, 1.0), t)[0]
        g = evaluate(OscillatorParams(1.0, c, k, 1.0, w, 0.0, 0.0), t)[0]
        return np.column_stack([h1, h2, g, np.ones_like(t)])

    def solve(self, c, k, w):
        """Best ``(x0, v0, q, offset)`` for fixed nonlinear parameters and its SSE."""
        X = self.design(c, k, w)
        if not np.all(np.isfinite(X)):
            return None, math.inf
        beta, *_ = np.linalg.lstsq(X, self.y, rcond=None)
        if np.any(beta < self.lin_lo) or np.any(beta > self.lin_hi):
            beta = lsq_linear(X, self.y, bounds=(self.lin_lo, self.lin_hi), method="bvls").x
        r = X @ beta - self.y
        return beta, float(r @ r)

    def objective(self, u):
        try:
            return self.solve(*self.nonlinear(u))[1]
        except OscillatorError:
            return math.inf


def _spectral_peaks(t, y, lo, hi, count=3):
    """Angular frequencies (rad/year) of the strongest periodogram maxima in ``[lo, hi]``."""
    span = float(t[-1] - t[0])
    fmin = max(lo / (2 * np.pi), 0.25 / span)
    fmax = min(hi / (2 * np.pi), t.size / (2.0 * span))
    if fmax <= fmin:
        return []
    freqs = np.arange(fmin, fmax, 1.0 / (10.0 * span))
    if freqs.size < 3:
        return []
    pw = lomb_scargle(t, y, freqs).powers
    interior = np.flatnonzero((pw[1:-1] >= pw[:-2]) & (pw[1:-1] > pw[2:])) + 1
    best = interior[np.argsort(-pw[interior], kind="stable")][:count]
    return [2 * np.pi * float(freqs[i]) for i in best]


def _initial_guesses(t, y, bounds, n_starts, rng):
    (clo, chi), (klo, khi), (wlo, whi) = (bounds[n] for n in _NONLINEAR)
    peaks = _spectral_peaks(t, y, wlo, whi)
    c_init = min(max(0.1, clo + 0.01 * (chi - clo)), chi)
    guesses = []
    pairs = [(0, 1), (1, 0), (0, 0), (0, 2), (2, 0), (1, 2), (2, 1), (1, 1), (2, 2)]
    for i, j in pairs:
        if i < len(peaks) and j < len(peaks):
            w, w0 = peaks[i], peaks[j]
            k = w0 * w0 * (1.03 if i == j else 1.0)
            guesses.append((c_init, k, w))
    while len(guesses) < n_starts:
        guesses.append((
            clo + (chi - clo) * rng.uniform(0.0, 0.1),
            math.exp(rng.uniform(math.log(klo), math.log(khi))),
            math.exp(rng.uniform(math.log(max(wlo, 1e-6)), math.log(whi))),
        ))
    guesses = guesses[:n_starts]
    jittered = []
    for c, k, w in guesses:
        jitter = np.exp(rng.normal(0.0, 0.02, size=3))
        jittered.append((
            min(max(c * jitter[0], clo), chi),
            min(max(k * jitter[1], klo), khi),
            min(max(w * jitter[2], wlo), whi),
        ))
    return jittered


def fit_oscillator(series, bounds=None, opts=None):
    """Fit ``x'' + c x' + k x = q cos(omega t)`` to a rating series.

    Parameters
    ----------
    series : RatingSeries
        At least 8 points spanning a positive time.
    bounds : dict, optional
        ``name -> (lo, hi)`` for any of c, k, omega, q, x0, v0; missing
        entries fall back to :data:`DEFAULT_BOUNDS`.
    opts : SimplexOptions, optional
        ``n_starts`` seeded starting points are tried; the best SSE wins.

    Returns
    -------
    OscillatorFit
        ``params.m`` is 1 and time is measured in years from the first
        review. ``baseline`` is the fitted long-run mean, so the model
        rating is ``baseline + x(t)`` and ``sse`` is the squared error of
        that against the stars.
    """
    opts = opts or SimplexOptions()
    bounds = _check_bounds(bounds)
    times = np.asarray(series.times)
    stars = np.asarray(series.stars, dtype=float)
    n = times.size
    if n < MIN_POINTS:
        raise FitError(f"need at least {MIN_POINTS} points, got {n}")
    if times[-1] <= times[0]:
        raise FitError("series spans no time")

    t = (times - times[0]) / SECONDS_PER_YEAR
    total = float(stars.sum())
    mean = total / n
    # exact for integer (and dyadic) stars, so shifting all stars leaves y unchanged
    y = (n * stars - total) / n

    if not np.any(y):
        mid = {name: 0.5 * (lo + hi) for name, (lo, hi) in bounds.items()}
        params = OscillatorParams(1.0, mid["c"], mid["k"], 0.0, mid["omega"], 0.0, 0.0)
        return OscillatorFit(params, 0.0, 0, True, mean, int(times[0]))

    problem = _Problem(t, y, bounds)
    rng = np.random.default_rng(opts.seed)
    best = None
    starts = []
    total_iterations = 0
    for guess in _initial_guesses(t, y, bounds, opts.n_starts, rng):
        u0 = np.array([_from_bounded(v, *bounds[nm]) for v, nm in zip(guess, _NONLINEAR)])
        f0 = problem.objective(u0)
        if not math.isfinite(f0):
            continue
        c0, k0, w0 = problem.nonlinear(u0)
        beta0, _ = problem.solve(c0, k0, w0)
        starts.append((OscillatorParams(1.0, c0, k0, float(beta0[2]), w0,
                                        float(beta0[0]), float(beta0[1])), f0))
        res = nelder_mead(problem.objective, u0, opts)
        total_iterations += res.iterations
        if best is None or res.fun < best.fun:
            best = res
    if best is None:
        raise FitError("objective is not finite at any starting point")

    c, k, w = problem.nonlinear(best.x)
    beta, sse = problem.solve(c, k, w)
    x0, v0, q, offset = (float(b) for b in beta)
    params = OscillatorParams(1.0, c, k, q, w, x0, v0)
    return OscillatorFit(params, sse, total_iterations, best.converged, mean + offset,
                         int(times[0]), tuple(starts))


def model_ratings(fit, times):
    """Model rating ``baseline + x(t)`` at epoch-second ``times``, clamped to [1, 5].

    Clamping happens only here; the fitted dynamics are unclamped.
    """
    t = (np.asarray(times) - fit.origin) / SECONDS_PER_YEAR
    x = evaluate(fit.params, t)[0]
    return np.clip(fit.baseline + x, 1.0, 5.0)
