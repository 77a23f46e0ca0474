"""Forced damped oscillator ``m x'' + c x' + k x = q cos(omega t)``.

``x`` is the deviation of a business's rating from its long-run mean.
Closed-form solutions cover every regime; :func:`simulate_rk4` integrates
the same system numerically with the classical fourth-order scheme.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import OscillatorError

REL_TOL = 1e-12


class Regime(str, enum.Enum):
    UNDAMPED = "Undamped"
    UNDERDAMPED = "Underdamped"
    CRITICALLY_DAMPED = "CriticallyDamped"
    OVERDAMPED = "Overdamped"
    RESONANT = "Resonant"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class OscillatorParams:
    m: float = 1.0
    c: float = 0.0
    k: float = 1.0
    q: float = 0.0
    omega: float = 0.0
    x0: float = 0.0
    v0: float = 0.0

    def __post_init__(self):
        for name in ("m", "c", "k", "q", "omega", "x0", "v0"):
            if not math.isfinite(getattr(self, name)):
                raise OscillatorError(f"{name} must be finite")
        if not self.m > 0:
            raise OscillatorError(f"m must be positive, got {self.m}")
        if not self.k > 0:
            raise OscillatorError(f"k must be positive, got {self.k}")
        if self.c < 0:
            raise OscillatorError(f"c must be nonnegative, got {self.c}")
        if self.omega < 0:
            raise OscillatorError(f"omega must be nonnegative, got {self.omega}")

    @property
    def natural_frequency(self):
        return math.sqrt(self.k / self.m)

    def as_dict(self):
        return {name: getattr(self, name) for name in ("m", "c", "k", "q", "omega", "x0", "v0")}


@dataclass(frozen=True)
class Trajectory:
    step: float
    t: np.ndarray
    x: np.ndarray
    v: np.ndarray

    def __len__(self):
        return self.t.size


def _close(a, b, rel=REL_TOL):
    return abs(a - b) <= rel * max(abs(a), abs(b))


def classify(p):
    """Regime of a parameter set. Total and exclusive."""
    if p.c == 0:
        if p.q != 0 and _close(p.omega, p.natural_frequency):
            return Regime.RESONANT
        return Regime.UNDAMPED
    disc, crit = p.c * p.c, 4.0 * p.m * p.k
    if _close(disc, crit):
        return Regime.CRITICALLY_DAMPED
    return Regime.UNDERDAMPED if disc < crit else Regime.OVERDAMPED


def _particular_coefficients(p):
    """``(A, B)`` of the steady response ``A cos(wt) + B sin(wt)``."""
    if p.q == 0:
        return 0.0, 0.0
    detune = p.k - p.m * p.omega ** 2
    damp = p.c * p.omega
    denom = detune * detune + damp * damp
    if denom == 0:
        raise OscillatorError("resonant parameters have no bounded particular solution")
    return p.q * detune / denom, p.q * damp / denom


def _homogeneous(p, regime, a, b, t):
    """Free response with ``x(0) = a``, ``x'(0) = b``; returns ``(x, v)``."""
    gamma = p.c / (2.0 * p.m)
    if regime is Regime.CRITICALLY_DAMPED:
        decay = np.exp(-gamma * t)
        slope = b + gamma * a
        x = decay * (a + slope * t)
        v = decay * (slope - gamma * (a + slope * t))
        return x, v
    w2 = p.k / p.m - gamma * gamma
    if regime is Regime.OVERDAMPED:
        mu = math.sqrt(-w2)
        # e^{-gt} cosh(mu t) and e^{-gt} sinh(mu t) without overflow
        ep, em = np.exp((mu - gamma) * t), np.exp(-(mu + gamma) * t)
        ch, sh = 0.5 * (ep + em), 0.5 * (ep - em)
        bb = (b + gamma * a) / mu
        x = a * ch + bb * sh
        v = (bb * mu - gamma * a) * ch + (a * mu - gamma * bb) * sh
        return x, v
    w = math.sqrt(w2)
    decay = np.exp(-gamma * t)
    cs, sn = np.cos(w * t), np.sin(w * t)
    bb = (b + gamma * a) / w
    x = decay * (a * cs + bb * sn)
    v = decay * ((bb * w - gamma * a) * cs - (a * w + gamma * bb) * sn)
    return x, v


def closed_form(p, t):
    """Exact ``(x, v)`` at time(s) ``t`` for a non-resonant parameter set.

    Scalar ``t`` gives floats, array ``t`` gives arrays.
    """
    regime = classify(p)
    if regime is Regime.RESONANT:
        raise OscillatorError("closed_form does not handle resonance; use resonant_form")
    scalar = np.ndim(t) == 0
    t = np.asarray(t, dtype=float)
    A, B = _particular_coefficients(p)
    w = p.omega
    xh, vh = _homogeneous(p, regime, p.x0 - A, p.v0 - B * w, t)
    x = xh + A * np.cos(w * t) + B * np.sin(w * t)
    v = vh - A * w * np.sin(w * t) + B * w * np.cos(w * t)
    if scalar:
        return float(x), float(v)
    return x, v


def resonant_form(p, t):
    """Exact ``(x, v)`` for undamped forcing at the natural frequency.

    The forced term ``q t sin(wt) / (2 sqrt(mk))`` grows without bound.
    """
    if classify(p) is not Regime.RESONANT:
        raise OscillatorError("resonant_form requires c = 0, q != 0 and omega = sqrt(k/m)")
    scalar = np.ndim(t) == 0
    t = np.asarray(t, dtype=float)
    w0 = p.natural_frequency
    g = p.q / (2.0 * math.sqrt(p.m * p.k))
    cs, sn = np.cos(w0 * t), np.sin(w0 * t)
    x = p.x0 * cs + (p.v0 / w0) * sn + g * t * sn
    v = -p.x0 * w0 * sn + p.v0 * cs + g * (sn + w0 * t * cs)
    if scalar:
        return float(x), float(v)
    return x, v


def evaluate(p, t):
    """Exact solution in any regime."""
    if classify(p) is Regime.RESONANT:
        return resonant_form(p, t)
    return closed_form(p, t)


def steady_state_amplitude(p):
    """Long-run amplitude ``q / sqrt((k - m w^2)^2 + (c w)^2)``."""
    if p.q == 0:
        return 0.0
    detune = p.k - p.m * p.omega ** 2
    denom = math.hypot(detune, p.c * p.omega)
    if p.c == 0 and _close(p.omega, p.natural_frequency) or denom == 0:
        raise OscillatorError("steady-state amplitude is unbounded at resonance")
    return abs(p.q) / denom


def energy(p, x, v):
    return 0.5 * p.m * np.asarray(v) ** 2 + 0.5 * p.k * np.asarray(x) ** 2


def simulate_rk4(p, t_end, h):
    """Integrate with classical RK4 at fixed step ``h`` from ``(0, x0, v0)``.

    Samples are taken at ``t = i*h`` for ``i = 0..N`` with ``N = round(t_end/h)``.
    Warns when ``h * sqrt(k/m) >= 0.5``.
    """
    if not (t_end > 0 and h > 0):
        raise OscillatorError("t_end and h must be positive")
    if h > t_end:
        raise OscillatorError(f"step {h} exceeds t_end {t_end}")
    if h * p.natural_frequency >= 0.5:
        warnings.warn(f"step {h} is coarse for natural frequency {p.natural_frequency:.4g}",
                      RuntimeWarning, stacklevel=2)
    n = int(round(t_end / h))
    inv_m = 1.0 / p.m
    c, k, q, w = p.c, p.k, p.q, p.omega
    cos = math.cos
    xs = np.empty(n + 1)
    vs = np.empty(n + 1)
    x, v = float(p.x0), float(p.v0)
    xs[0], vs[0] = x, v
    half = 0.5 * h
    sixth = h / 6.0
    for i in range(n):
        t = i * h
        f0 = q * cos(w * t)
        fh = q * cos(w * (t + half))
        f1 = q * cos(w * (t + h))
        a1 = (f0 - c * v - k * x) * inv_m
        x2, v2 = x + half * v, v + half * a1
        a2 = (fh - c * v2 - k * x2) * inv_m
        x3, v3 = x + half * v2, v + half * a2
        a3 = (fh - c * v3 - k * x3) * inv_m
        x4, v4 = x + h * v3, v + h * a3
        a4 = (f1 - c * v4 - k * x4) * inv_m
        x = x + sixth * (v + 2.0 * v2 + 2.0 * v3 + v4)
        v = v + sixth * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        if not (math.isfinite(x) and math.isfinite(v)):
            raise OscillatorError(f"non-finite state at step {i + 1}")
        xs[i + 1] = x
        vs[i + 1] = v
    return Trajectory(h, np.arange(n + 1) * h, xs, vs)


def envelope_peaks(traj, period):
    """Max ``|x|`` inside each complete window of length ``period``; returns ``(t_peak, peak)``."""
    per = max(1, int(round(period / traj.step)))
    nwin = (len(traj) - 1) // per
    tp, xp = [], []
    for j in range(nwin):
        seg = np.abs(traj.x[j * per:(j + 1) * per + 1])
        i = int(np.argmax(seg))
        tp.append(traj.t[j * per + i])
        xp.append(seg[i])
    return np.array(tp), np.array(xp)


def empirical_amplitude(traj, t_from):
    """Half the peak-to-peak excursion of ``x`` for ``t >= t_from``."""
    sel = traj.x[traj.t >= t_from]
    if sel.size == 0:
        raise OscillatorError("no samples after t_from")
    return 0.5 * float(sel.max() - sel.min())
