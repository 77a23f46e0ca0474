"""Parsing of JSON-lines business/review files into an immutable Dataset.

Business line::

    {"business_id": str, "name": str, "latitude": num, "longitude": num,
     "categories": [str]}

Review line::

    {"business_id": str, "stars": int, "date": "YYYY-MM-DD"}

An integer ``"timestamp"`` (seconds since the epoch, UTC) on a review line
takes precedence over ``"date"``. Unknown keys are ignored.
"""
from __future__ import annotations

import calendar
import json
import math
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import IO, Iterable, Union

from .errors import IngestError

EARTH_RADIUS_KM = 6371.0

_DATE_RE = re.compile(r"^(\d{4})-(\d{2})-(\d{2})$")
_PUNCT_RE = re.compile(r"[^\w\s]", re.UNICODE)
_SPACE_RE = re.compile(r"\s+", re.UNICODE)

LineSource = Union[str, Path, IO[str], Iterable[str]]


@dataclass(frozen=True)
class Business:
    id: str
    name: str
    canonical_name: str
    latitude: float
    longitude: float
    categories: frozenset = frozenset()


@dataclass(frozen=True)
class Review:
    business_id: str
    timestamp: int
    stars: int


@dataclass(frozen=True)
class IngestReport:
    accepted: int = 0
    rejected: int = 0
    reasons: dict = field(default_factory=dict)

    def as_dict(self):
        return {"accepted": self.accepted, "rejected": self.rejected,
                "reasons": dict(sorted(self.reasons.items()))}


@dataclass(frozen=True)
class Provenance:
    business_source: str = ""
    review_source: str = ""
    businesses: IngestReport = IngestReport()
    reviews: IngestReport = IngestReport()

    def as_dict(self):
        return {
            "business_source": self.business_source,
            "review_source": self.review_source,
            "businesses": self.businesses.as_dict(),
            "reviews": self.reviews.as_dict(),
        }


@dataclass(frozen=True)
class Dataset:
    """Businesses and their reviews.

    Reviews are held in ascending timestamp order, ties kept in
    (business_id, input sequence) order. Provenance does not take part in
    equality, so a round-tripped dataset compares equal to the original.
    """

    businesses: tuple = ()
    reviews: tuple = ()
    provenance: Provenance = field(default=Provenance(), compare=False)

    def __post_init__(self):
        index = {}
        for b in self.businesses:
            if b.id in index:
                raise IngestError(f"duplicate business_id {b.id!r}")
            index[b.id] = b
        for r in self.reviews:
            if r.business_id not in index:
                raise IngestError(f"unresolvable business_id {r.business_id!r}")
        object.__setattr__(self, "_index", index)

    def business(self, business_id):
        return self._index[business_id]

    def __contains__(self, business_id):
        return business_id in self._index

    def reviews_for(self, business_id):
        """Reviews of one business in timestamp order."""
        return tuple(r for r in self.reviews if r.business_id == business_id)

    def subset(self, business_ids):
        keep = set(business_ids)
        return Dataset(
            businesses=tuple(b for b in self.businesses if b.id in keep),
            reviews=tuple(r for r in self.reviews if r.business_id in keep),
            provenance=self.provenance,
        )


def normalize_name(raw):
    """Canonical form of a business name.

    NFKD-folds diacritics, lowercases, strips punctuation and collapses
    whitespace. ``normalize_name(normalize_name(s)) == normalize_name(s)``.
    """
    text = unicodedata.normalize("NFKD", raw)
    text = "".join(ch for ch in text if not unicodedata.combining(ch))
    text = text.casefold()
    text = _PUNCT_RE.sub("", text).replace("_", "")
    text = _SPACE_RE.sub(" ", text).strip()
    # casefold can expand characters into new decomposable sequences
    return unicodedata.normalize("NFC", text)


def haversine_km(lat1, lon1, lat2, lon2):
    phi1, phi2 = math.radians(lat1), math.radians(lat2)
    dphi = phi2 - phi1
    dlmb = math.radians(lon2 - lon1)
    a = math.sin(dphi / 2) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlmb / 2) ** 2
    return 2 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(a)))


def parse_date(text):
    """Map ``YYYY-MM-DD`` to epoch seconds at 00:00:00 UTC."""
    m = _DATE_RE.match(text)
    if not m:
        raise ValueError(f"bad date {text!r}")
    y, mo, d = (int(g) for g in m.groups())
    datetime(y, mo, d)  # range check
    return calendar.timegm((y, mo, d, 0, 0, 0))


def format_date(timestamp):
    return datetime.fromtimestamp(timestamp, tz=timezone.utc).strftime("%Y-%m-%d")


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _is_int(value):
    if isinstance(value, bool):
        return False
    if isinstance(value, int):
        return True
    return isinstance(value, float) and value.is_integer()


def _business_from(obj):
    for key in ("business_id", "name", "latitude", "longitude"):
        if key not in obj:
            raise ValueError(f"missing required field {key!r}")
    bid, name = obj["business_id"], obj["name"]
    if not isinstance(bid, str) or not bid:
        raise ValueError("business_id must be a nonempty string")
    if not isinstance(name, str):
        raise ValueError("name must be a string")
    lat, lon = obj["latitude"], obj["longitude"]
    if not (_is_number(lat) and _is_number(lon)):
        raise ValueError("coordinates must be numbers")
    if not (-90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0):
        raise ValueError("coordinate out of range")
    cats = obj.get("categories") or []
    if not isinstance(cats, list) or not all(isinstance(c, str) for c in cats):
        raise ValueError("categories must be a list of strings")
    return Business(bid, name, normalize_name(name), float(lat), float(lon), frozenset(cats))


def _review_from(obj):
    for key in ("business_id", "stars"):
        if key not in obj:
            raise ValueError(f"missing required field {key!r}")
    if "timestamp" in obj:
        ts = obj["timestamp"]
        if not _is_int(ts):
            raise ValueError("timestamp must be an integer")
        ts = int(ts)
    elif "date" in obj:
        if not isinstance(obj["date"], str):
            raise ValueError("date must be a string")
        ts = parse_date(obj["date"])
    else:
        raise ValueError("missing required field 'date'")
    stars = obj["stars"]
    if not _is_int(stars):
        raise ValueError("stars must be an integer")
    if not 1 <= stars <= 5:
        raise ValueError("stars out of range")
    bid = obj["business_id"]
    if not isinstance(bid, str) or not bid:
        raise ValueError("business_id must be a nonempty string")
    return Review(bid, ts, int(stars))


def _open_lines(source):
    if isinstance(source, (str, Path)):
        path = Path(source)
        try:
            with open(path, encoding="utf-8") as fh:
                return str(path), fh.read().splitlines()
        except OSError as exc:
            raise IngestError(f"cannot read {path}: {exc.strerror or exc}", source=str(path)) from exc
    name = getattr(source, "name", "<stream>")
    return str(name), [line.rstrip("\n") for line in source]


def _parse_lines(lines, source, convert, strict, reasons, seen_ids=None):
    accepted = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"malformed JSON ({exc.msg})") from None
            if not isinstance(obj, dict):
                raise ValueError("malformed JSON (expected an object)")
            record = convert(obj)
            if seen_ids is not None:
                if record.id in seen_ids:
                    raise ValueError(f"duplicate business_id {record.id!r}")
                seen_ids.add(record.id)
        except ValueError as exc:
            msg = str(exc)
            if strict:
                raise IngestError(msg, source=source, line=lineno) from None
            key = msg.split(" (")[0] if msg.startswith("malformed JSON") else msg
            if key.startswith("duplicate business_id"):
                key = "duplicate business_id"
            reasons[key] += 1
            continue
        accepted.append((lineno, record))
    return accepted


def parse_dataset(business_stream, review_stream, policy="strict"):
    """Parse business and review JSON-lines into a validated Dataset.

    Parameters
    ----------
    business_stream, review_stream : path, open text file or iterable of lines
    policy : {"strict", "lenient"}
        ``strict`` raises IngestError on the first bad line, naming source
        and line number. ``lenient`` skips bad lines and tallies the reasons
        in ``dataset.provenance``.
    """
    if policy not in ("strict", "lenient"):
        raise ValueError(f"unknown policy {policy!r}")
    strict = policy == "strict"

    bsrc, blines = _open_lines(business_stream)
    rsrc, rlines = _open_lines(review_stream)

    breasons = Counter()
    businesses = [rec for _, rec in _parse_lines(blines, bsrc, _business_from, strict, breasons, set())]
    ids = {b.id for b in businesses}

    rreasons = Counter()
    reviews = []
    for lineno, rec in _parse_lines(rlines, rsrc, _review_from, strict, rreasons):
        if rec.business_id not in ids:
            if strict:
                raise IngestError(f"unresolvable business_id {rec.business_id!r}", source=rsrc, line=lineno)
            rreasons["unresolvable business_id"] += 1
            continue
        reviews.append(rec)

    provenance = Provenance(
        business_source=bsrc,
        review_source=rsrc,
        businesses=IngestReport(len(businesses), sum(breasons.values()), dict(breasons)),
        reviews=IngestReport(len(reviews), sum(rreasons.values()), dict(rreasons)),
    )
    return Dataset(tuple(businesses), tuple(sort_reviews(reviews)), provenance)


def sort_reviews(reviews):
    """Stable sort by (timestamp, business_id); input order breaks remaining ties."""
    return sorted(reviews, key=lambda r: (r.timestamp, r.business_id))


def load_dataset(business_path, review_path, policy="strict"):
    return parse_dataset(Path(business_path), Path(review_path), policy=policy)


def business_to_json(b):
    return json.dumps({
        "business_id": b.id,
        "name": b.name,
        "latitude": b.latitude,
        "longitude": b.longitude,
        "categories": sorted(b.categories),
    }, ensure_ascii=False)


def review_to_json(r):
    return json.dumps({
        "business_id": r.business_id,
        "stars": r.stars,
        "date": format_date(r.timestamp),
        "timestamp": r.timestamp,
    })


def dump_dataset(ds, business_path, review_path):
    """Write a Dataset back out as two JSON-lines files."""
    with open(business_path, "w", encoding="utf-8", newline="\n") as fh:
        for b in ds.businesses:
            fh.write(business_to_json(b) + "\n")
    with open(review_path, "w", encoding="utf-8", newline="\n") as fh:
        for r in ds.reviews:
            fh.write(review_to_json(r) + "\n")


def filter_by_radius(ds, center, radius_km):
    """Keep businesses within ``radius_km`` (haversine) of ``center`` and their reviews."""
    lat0, lon0 = center
    if not (-90.0 <= lat0 <= 90.0 and -180.0 <= lon0 <= 180.0):
        raise IngestError(f"center out of range: {center!r}")
    if not radius_km > 0:
        raise IngestError(f"radius must be positive, got {radius_km!r}")
    keep = [b.id for b in ds.businesses
            if haversine_km(lat0, lon0, b.latitude, b.longitude) <= radius_km]
    return ds.subset(keep)


def review_counts(ds):
    """Businesses ranked by number of reviews.

    Returns a list of ``(Business, count)``, descending by count with ties
    broken by canonical name, then id. Businesses without reviews are
    included at the tail with count 0.
    """
    counts = Counter(r.business_id for r in ds.reviews)
    ranked = [(b, counts.get(b.id, 0)) for b in ds.businesses]
    ranked.sort(key=lambda bc: (-bc[1], bc[0].canonical_name, bc[0].id))
    return ranked


def merge_duplicates(ds, max_distance_m=50.0):
    """Merge businesses sharing a canonical name and lying within ``max_distance_m``.

    The first business (in dataset order) of each group survives; reviews of
    the others are re-pointed to it.
    """
    survivors = []
    alias = {}
    for b in ds.businesses:
        target = None
        for s in survivors:
            if (s.canonical_name == b.canonical_name
                    and haversine_km(s.latitude, s.longitude, b.latitude, b.longitude) * 1000.0 <= max_distance_m):
                target = s
                break
        if target is None:
            survivors.append(b)
            alias[b.id] = b.id
        else:
            alias[b.id] = target.id
    if len(survivors) == len(ds.businesses):
        return ds
    reviews = [Review(alias[r.business_id], r.timestamp, r.stars) for r in ds.reviews]
    return Dataset(tuple(survivors), tuple(sort_reviews(reviews)), ds.provenance)
