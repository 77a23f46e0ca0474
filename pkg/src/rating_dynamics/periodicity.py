"""Lomb-Scargle spectra of irregularly sampled rating series and a permutation
test for the significance of the strongest peak.

Times are in years and frequencies in cycles per year throughout.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PeriodicityError
from .timeseries import SECONDS_PER_DAY

SECONDS_PER_YEAR = 365.25 * SECONDS_PER_DAY
OVERSAMPLING = 5


@dataclass(frozen=True)
class Periodogram:
    frequencies: np.ndarray
    powers: np.ndarray

    def __len__(self):
        return self.frequencies.size


@dataclass(frozen=True)
class PeakReport:
    frequency: float
    period: float
    power: float
    p_value: float
    n_permutations: int
    seed: int

    def as_dict(self):
        return {
            "frequency": self.frequency,
            "period_years": self.period,
            "power": self.power,
            "p_value": self.p_value,
            "n_permutations": self.n_permutations,
            "seed": self.seed,
        }


def series_in_years(series):
    """``(t, y)`` with ``t`` in years since the first review and ``y`` the demeaned stars."""
    t = (series.times - series.times[0]) / SECONDS_PER_YEAR if len(series) else np.empty(0)
    y = series.stars - series.stars.mean() if len(series) else np.empty(0)
    return np.asarray(t, dtype=float), y


class _Basis:
    """Per-frequency cos/sin design at the tau-shifted times.

    Depends only on the sample times, so one basis serves the observed
    series and every permutation of it.
    """

    def __init__(self, t, freqs):
        w = 2.0 * np.pi * freqs[:, None]
        wt = w * (t[None, :] - t.mean())
        tau_arg = np.arctan2(np.sin(2 * wt).sum(axis=1), np.cos(2 * wt).sum(axis=1)) / 2.0
        phase = wt - tau_arg[:, None]
        self.cos = np.cos(phase)
        self.sin = np.sin(phase)
        cc = (self.cos ** 2).sum(axis=1)
        ss = (self.sin ** 2).sum(axis=1)
        # a vanishing sum means that quadrature carries no information
        tiny = 1e-12 * t.size
        self.inv_cc = np.where(cc > tiny, 1.0 / np.where(cc > tiny, cc, 1.0), 0.0)
        self.inv_ss = np.where(ss > tiny, 1.0 / np.where(ss > tiny, ss, 1.0), 0.0)

    def powers(self, y):
        """Powers for ``y`` of shape (n,) or (n, r); normalized by ``2 var(y)``."""
        yc = y - y.mean(axis=0)
        var = (yc ** 2).mean(axis=0)
        yc_cos = self.cos @ yc
        yc_sin = self.sin @ yc
        if yc.ndim == 1:
            raw = yc_cos ** 2 * self.inv_cc + yc_sin ** 2 * self.inv_ss
        else:
            raw = yc_cos ** 2 * self.inv_cc[:, None] + yc_sin ** 2 * self.inv_ss[:, None]
        scale = np.where(var > 0, 2.0 * np.where(var > 0, var, 1.0), np.inf)
        return raw / scale


def _validate(t, y, freqs):
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    freqs = np.asarray(freqs, dtype=float)
    if t.ndim != 1 or t.shape != y.shape:
        raise PeriodicityError("t and y must be 1-d arrays of equal length")
    if t.size < 2 or np.unique(t).size < 2:
        raise PeriodicityError("need at least two distinct sample times")
    if freqs.ndim != 1 or freqs.size == 0:
        raise PeriodicityError("frequency grid is empty")
    if np.any(freqs <= 0) or np.any(np.diff(freqs) <= 0):
        raise PeriodicityError("frequency grid must be positive and strictly increasing")
    return t, y, freqs


def lomb_scargle(t, y, freqs):
    """Normalized Lomb-Scargle periodogram.

    For each frequency ``f`` with ``w = 2 pi f`` and offset ``tau`` solving
    ``tan(2 w tau) = sum sin(2 w t) / sum cos(2 w t)``::

        P(f) = [ (sum y cos w(t-tau))^2 / sum cos^2 w(t-tau)
               + (sum y sin w(t-tau))^2 / sum sin^2 w(t-tau) ] / (2 var(y))

    ``y`` is re-centered internally. An all-constant ``y`` has zero power
    everywhere.
    """
    t, y, freqs = _validate(t, y, freqs)
    basis = _Basis(t, freqs)
    return Periodogram(freqs.copy(), basis.powers(y))


def default_grid(t):
    """Frequencies from ``1/T`` to ``n/(2T)`` in steps of ``1/(5T)``."""
    t = np.asarray(t, dtype=float)
    if t.size < 2:
        raise PeriodicityError("need at least two samples for a frequency grid")
    span = float(t.max() - t.min())
    if span <= 0:
        raise PeriodicityError("series has zero time span")
    fmin = 1.0 / span
    fmax = t.size / (2.0 * span)
    step = 1.0 / (OVERSAMPLING * span)
    count = int(np.floor((fmax - fmin) / step + 1e-9)) + 1
    return fmin + step * np.arange(max(count, 1))


def dominant_period(pg, t, y, n_permutations=999, seed=0):
    """Strongest peak of ``pg`` with a permutation p-value.

    ``y`` is shuffled against fixed ``t`` ``n_permutations`` times, each
    replicate drawing from its own child of ``SeedSequence(seed)``;
    ``p = (1 + #{max permuted power >= observed}) / (1 + n_permutations)``.
    """
    if len(pg) == 0:
        raise PeriodicityError("empty periodogram")
    if n_permutations < 99:
        raise PeriodicityError("n_permutations must be at least 99")
    t, y, freqs = _validate(t, y, pg.frequencies)
    i = int(np.argmax(pg.powers))
    f, pmax = float(freqs[i]), float(pg.powers[i])
    if pmax <= 0:
        return PeakReport(f, 1.0 / f, pmax, 1.0, n_permutations, seed)

    basis = _Basis(t, freqs)
    children = np.random.SeedSequence(seed).spawn(n_permutations)
    exceed = 0
    batch = 128
    for start in range(0, n_permutations, batch):
        block = children[start:start + batch]
        Y = np.column_stack([np.random.default_rng(s).permutation(y) for s in block])
        maxima = basis.powers(Y).max(axis=0)
        exceed += int(np.count_nonzero(maxima >= pmax * (1 - 1e-12)))
    p = (1 + exceed) / (1 + n_permutations)
    return PeakReport(f, 1.0 / f, pmax, p, n_permutations, seed)
