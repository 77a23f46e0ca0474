"""Derivative-free minimization with the Nelder-Mead simplex."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FitError

REFLECT, EXPAND, CONTRACT, SHRINK = 1.0, 2.0, 0.5, 0.5


@dataclass(frozen=True)
class SimplexOptions:
    initial_scale: float = 0.1
    max_iterations: int = 5000
    f_tolerance: float = 1e-12
    x_tolerance: float = 1e-10
    seed: int = 0
    n_starts: int = 8

    def __post_init__(self):
        if not self.initial_scale > 0:
            raise FitError("initial_scale must be positive")
        if self.max_iterations < 1:
            raise FitError("max_iterations must be at least 1")
        if not (self.f_tolerance > 0 and self.x_tolerance > 0):
            raise FitError("tolerances must be positive")
        if self.n_starts < 1:
            raise FitError("n_starts must be at least 1")


@dataclass(frozen=True)
class MinimizeResult:
    x: np.ndarray
    fun: float
    iterations: int
    converged: bool


def nelder_mead(objective, start, opts=None):
    """Minimize ``objective`` from ``start``.

    The initial simplex is ``start`` plus ``initial_scale`` along each axis.
    Stops once the spread of vertex values is below ``f_tolerance`` and the
    largest vertex distance from the best is below ``x_tolerance`` (both
    are required: a simplex straddling a minimum symmetrically has equal
    vertex values long before it has shrunk), or after ``max_iterations``.
    ``converged`` is True only for the tolerance exit.
    Non-finite objective values are treated as +inf.
    """
    opts = opts or SimplexOptions()
    x0 = np.atleast_1d(np.asarray(start, dtype=float)).copy()
    if x0.ndim != 1 or x0.size < 1:
        raise FitError("start must be a nonempty vector")
    d = x0.size

    def f(x):
        val = float(objective(x))
        return val if math.isfinite(val) else math.inf

    f0 = f(x0)
    if not math.isfinite(f0):
        raise FitError("objective is not finite at the start point")

    sim = np.empty((d + 1, d))
    sim[0] = x0
    for i in range(d):
        sim[i + 1] = x0
        sim[i + 1, i] += opts.initial_scale
    fs = np.empty(d + 1)
    fs[0] = f0
    for i in range(1, d + 1):
        fs[i] = f(sim[i])

    iterations = 0
    converged = False
    while True:
        order = np.argsort(fs, kind="stable")
        sim, fs = sim[order], fs[order]
        if fs[-1] - fs[0] < opts.f_tolerance and np.max(np.abs(sim[1:] - sim[0])) < opts.x_tolerance:
            converged = True
            break
        if iterations >= opts.max_iterations:
            break
        iterations += 1

        centroid = sim[:-1].mean(axis=0)
        worst = sim[-1]
        xr = centroid + REFLECT * (centroid - worst)
        fr = f(xr)
        if fr < fs[0]:
            xe = centroid + EXPAND * (xr - centroid)
            fe = f(xe)
            if fe < fr:
                sim[-1], fs[-1] = xe, fe
            else:
                sim[-1], fs[-1] = xr, fr
            continue
        if fr < fs[-2]:
            sim[-1], fs[-1] = xr, fr
            continue
        if fr < fs[-1]:
            xc = centroid + CONTRACT * (xr - centroid)
            fc = f(xc)
            if fc <= fr:
                sim[-1], fs[-1] = xc, fc
                continue
        else:
            xc = centroid + CONTRACT * (worst - centroid)
            fc = f(xc)
            if fc < fs[-1]:
                sim[-1], fs[-1] = xc, fc
                continue
        best = sim[0].copy()
        for i in range(1, d + 1):
            sim[i] = best + SHRINK * (sim[i] - best)
            fs[i] = f(sim[i])

    return MinimizeResult(sim[0].copy(), float(fs[0]), iterations, converged)
