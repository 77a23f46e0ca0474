"""Synthetic city datasets rebuilt from checked-in table metadata.

Each fixture reproduces the reference review counts of the most-reviewed
businesses and, where a yearly-average table exists, the yearly means
exactly (integer star sums over chosen counts). Everything else (the
untabled tail of businesses, review dates, individual star values,
coordinates) is drawn from a seeded generator, so rebuilding a fixture is
byte-for-byte deterministic.
"""
from __future__ import annotations

import json
import math
from importlib import resources
from pathlib import Path

import numpy as np

from .ingest import Business, Dataset, Review, dump_dataset, normalize_name, parse_date, sort_reviews

STAR_SPREAD = 1.1
TAIL_EXPONENT = 0.9


def load_metadata():
    text = resources.files("rating_dynamics").joinpath("data/fixtures.json").read_text(encoding="utf-8")
    return json.loads(text)


def cities():
    return tuple(load_metadata()["cities"])


def _tail_counts(n, total, cap, exponent=TAIL_EXPONENT):
    """``n`` nonincreasing integers in ``[1, cap]`` summing to ``total``, shaped like a power law."""
    if not n <= total <= n * cap:
        raise ValueError(f"cannot place {total} reviews on {n} businesses capped at {cap}")
    shape = np.arange(1, n + 1, dtype=float) ** -exponent
    lo, hi = 0.0, float(total)
    for _ in range(200):
        scale = 0.5 * (lo + hi)
        s = int(np.clip(np.floor(scale * shape / shape[0] * cap), 1, cap).sum())
        if s > total:
            hi = scale
        else:
            lo = scale
    counts = np.clip(np.floor(lo * shape / shape[0] * cap), 1, cap).astype(int)
    i = 0
    while counts.sum() < total:
        if counts[i] < cap and (i == 0 or counts[i] < counts[i - 1]):
            counts[i] += 1
        i = (i + 1) % n
    return sorted(counts.tolist(), reverse=True)


def _stars_with_sum(n, total, rng):
    """``n`` star values in 1..5 with an exact sum, spread around the mean."""
    mu = total / n
    levels = np.arange(1, 6)
    p = np.exp(-0.5 * ((levels - mu) / STAR_SPREAD) ** 2)
    stars = rng.choice(levels, size=n, p=p / p.sum())
    diff = int(total - stars.sum())
    while diff != 0:
        if diff > 0:
            idx = np.flatnonzero(stars < 5)
            stars[rng.choice(idx)] += 1
            diff -= 1
        else:
            idx = np.flatnonzero(stars > 1)
            stars[rng.choice(idx)] -= 1
            diff += 1
    return stars.tolist()


def _yearly_plan(city, meta, review_total):
    """``{year: (star_sum, count)}`` for the fixture."""
    if "yearly" in city:
        return {int(y): (e["sum"], e["count"]) for y, e in city["yearly"].items()}
    shares = meta["year_shares"]
    years = sorted(int(y) for y in shares)
    raw = np.array([shares[str(y)] for y in years]) * review_total
    counts = np.maximum(np.floor(raw).astype(int), 1)
    order = np.argsort(-(raw - np.floor(raw)), kind="stable")
    j = 0
    while counts.sum() < review_total:
        counts[order[j % len(years)]] += 1
        j += 1
    while counts.sum() > review_total:
        counts[int(np.argmax(counts))] -= 1
    target = city["target_mean"]
    return {y: (int(round(target * c)), int(c)) for y, c in zip(years, counts)}


def build_fixture(name):
    """Build the named city fixture as a Dataset."""
    meta = load_metadata()
    try:
        city = meta["cities"][name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(meta['cities'])}") from None
    rng = np.random.default_rng(city["seed"])
    top = city["top"]
    n_tail = city["n_businesses"] - len(top)
    cap = top[-1][1] - 1
    top_total = sum(c for _, c in top)

    if "yearly" in city:
        review_total = sum(e["count"] for e in city["yearly"].values())
        tail = _tail_counts(n_tail, review_total - top_total, cap)
    else:
        # continue the table's decay for the untabled businesses
        last = top[-1][1]
        guess = [max(1, min(cap, int(last * ((len(top) + r) / len(top)) ** -1.5))) for r in range(1, n_tail + 1)]
        tail = _tail_counts(n_tail, sum(guess), cap)
        review_total = top_total + sum(tail)

    names = [n for n, _ in top] + [f"{city['label'].split(',')[0]} Listing {len(top) + i + 1:03d}"
                                   for i in range(n_tail)]
    counts = [c for _, c in top] + tail

    lat0, lon0 = city["center"]
    km_lat = 1.0 / 111.195
    km_lon = km_lat / math.cos(math.radians(lat0))
    businesses = []
    for rank, nm in enumerate(names):
        spread_km = 0.4 + 2.0 * rank / len(names)
        dy, dx = rng.normal(0.0, spread_km, size=2)
        businesses.append(Business(
            id=f"{name}-{rank + 1:04d}",
            name=nm,
            canonical_name=normalize_name(nm),
            latitude=round(lat0 + dy * km_lat, 6),
            longitude=round(lon0 + dx * km_lon, 6),
            categories=frozenset({"Restaurants"}),
        ))

    plan = _yearly_plan(city, meta, review_total)
    slots = np.repeat(np.arange(len(businesses)), counts)
    rng.shuffle(slots)
    reviews = []
    cursor = 0
    for year in sorted(plan):
        star_sum, count = plan[year]
        stars = _stars_with_sum(count, star_sum, rng)
        start = parse_date(f"{year}-01-01")
        days = 366 if year % 4 == 0 and (year % 100 != 0 or year % 400 == 0) else 365
        offsets = np.sort(rng.integers(0, days, size=count))
        for off, star in zip(offsets.tolist(), stars):
            bid = businesses[slots[cursor]].id
            reviews.append(Review(bid, start + 86400 * off, int(star)))
            cursor += 1
    return Dataset(tuple(businesses), tuple(sort_reviews(reviews)))


def write_fixture(name, out_dir):
    """Write ``<name>_business.jsonl`` and ``<name>_reviews.jsonl`` into ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ds = build_fixture(name)
    bpath = out_dir / f"{name}_business.jsonl"
    rpath = out_dir / f"{name}_reviews.jsonl"
    dump_dataset(ds, bpath, rpath)
    return bpath, rpath
