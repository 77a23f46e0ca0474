"""Rating series, running and yearly averages, and a tail-window convergence test."""
from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Optional

import numpy as np

from .errors import SeriesError

SECONDS_PER_DAY = 86400


@dataclass(frozen=True)
class RatingSeries:
    """Time-ordered ``(timestamp, stars)`` points; ``business_id`` is None for aggregates."""

    times: np.ndarray
    stars: np.ndarray
    business_id: Optional[str] = None

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.int64)
        stars = np.asarray(self.stars, dtype=float)
        if times.shape != stars.shape or times.ndim != 1:
            raise SeriesError("times and stars must be 1-d arrays of equal length")
        if times.size and np.any(np.diff(times) < 0):
            raise SeriesError("timestamps must be nondecreasing")
        times.setflags(write=False)
        stars.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "stars", stars)

    def __len__(self):
        return self.times.size


@dataclass(frozen=True)
class RunningAverage:
    times: np.ndarray
    means: np.ndarray

    def __len__(self):
        return self.times.size


@dataclass(frozen=True)
class ConvergenceEstimate:
    limit: float
    converged: bool
    tail_range: float
    tail_fraction: float
    epsilon: float


def rating_series(ds, business_id=None):
    """Series for one business, or the aggregate of every review when ``business_id`` is None."""
    if business_id is None:
        reviews = ds.reviews
    else:
        if business_id not in ds:
            raise SeriesError(f"unknown business_id {business_id!r}")
        reviews = ds.reviews_for(business_id)
    times = np.fromiter((r.timestamp for r in reviews), dtype=np.int64, count=len(reviews))
    stars = np.fromiter((r.stars for r in reviews), dtype=float, count=len(reviews))
    return RatingSeries(times, stars, business_id)


def _as_series(reviews):
    if isinstance(reviews, RatingSeries):
        return reviews
    reviews = list(reviews)
    return RatingSeries([r.timestamp for r in reviews], [r.stars for r in reviews])


def running_average(reviews):
    """Cumulative mean of stars; one output point per input point.

    Accepts a RatingSeries or a time-ordered sequence of Review records.
    """
    s = _as_series(reviews)
    n = np.arange(1, len(s) + 1)
    means = np.cumsum(s.stars) / n
    return RunningAverage(s.times.copy(), means)


def yearly_average(reviews):
    """``{year: (mean stars, count)}`` by UTC calendar year; empty years omitted."""
    s = _as_series(reviews)
    sums, counts = {}, {}
    for ts, star in zip(s.times.tolist(), s.stars.tolist()):
        year = datetime.fromtimestamp(ts, tz=timezone.utc).year
        sums[year] = sums.get(year, 0.0) + star
        counts[year] = counts.get(year, 0) + 1
    return {y: (sums[y] / counts[y], counts[y]) for y in sorted(counts)}


def convergence_value(ra, tail_fraction=0.2, epsilon=0.05):
    """Summarize the final ``tail_fraction`` of a running average.

    ``limit`` is the mean of the tail, ``tail_range`` its max minus min, and
    the series counts as converged when ``tail_range < epsilon``.
    """
    if not 0 < tail_fraction <= 1:
        raise SeriesError(f"tail_fraction must be in (0, 1], got {tail_fraction!r}")
    if not epsilon > 0:
        raise SeriesError(f"epsilon must be positive, got {epsilon!r}")
    if len(ra) == 0:
        raise SeriesError("cannot estimate convergence of an empty series")
    k = max(1, math.ceil(tail_fraction * len(ra) - 1e-9))
    tail = ra.means[-k:]
    spread = float(tail.max() - tail.min())
    return ConvergenceEstimate(float(tail.mean()), spread < epsilon, spread, tail_fraction, epsilon)


def moving_average(series, window_days=90):
    """Trailing time-window mean: each point becomes the mean of stars in ``(t - window, t]``."""
    s = series
    if window_days <= 0:
        raise SeriesError("window must be positive")
    t = s.times
    csum = np.concatenate([[0.0], np.cumsum(s.stars)])
    lo = np.searchsorted(t, t - window_days * SECONDS_PER_DAY, side="right")
    hi = np.searchsorted(t, t, side="right")
    return RatingSeries(t.copy(), (csum[hi] - csum[lo]) / (hi - lo), s.business_id)


def points_per_year(series):
    counts = {}
    for ts in series.times.tolist():
        year = datetime.fromtimestamp(ts, tz=timezone.utc).year
        counts[year] = counts.get(year, 0) + 1
    return dict(sorted(counts.items()))


def iso8601(ts):
    return datetime.fromtimestamp(int(ts), tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
