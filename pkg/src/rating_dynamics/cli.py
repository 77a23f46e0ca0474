"""Command-line front end.

Every analysis command reads a business/review JSON-lines pair, writes its
artifacts into ``--out`` and finishes with ``manifest.json``. Set
``RATING_DYNAMICS_LOG`` (e.g. ``DEBUG``) to change the log level.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .errors import RatingDynamicsError
from .export import (
    json_text,
    periodogram_rows,
    run_manifest,
    running_average_rows,
    trajectory_rows,
    write_heat_grid_csv,
    write_heat_grid_pgm,
    write_json,
    write_table,
    yearly_rows,
)
from .fit import fit_oscillator, fit_power_law, model_ratings
from .fixtures import cities, write_fixture
from .ingest import filter_by_radius, load_dataset, merge_duplicates, review_counts
from .optimize import SimplexOptions
from .oscillator import OscillatorParams, classify, simulate_rk4, steady_state_amplitude
from .periodicity import default_grid, dominant_period, lomb_scargle, series_in_years
from .spatial import bbox_area_km2, build_heat_grid, clark_evans, points_bbox
from .timeseries import (
    convergence_value,
    iso8601,
    moving_average,
    points_per_year,
    rating_series,
    running_average,
    yearly_average,
)

log = logging.getLogger("rating_dynamics")

EXIT_USAGE = 2
EXIT_IO = 9


class UsageError(RatingDynamicsError):
    exit_code = EXIT_USAGE


# -- argument helpers ---------------------------------------------------------

def _center(text):
    try:
        lat, lon = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LAT,LON, got {text!r}") from None
    return lat, lon


def _bbox(text):
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        vals = ()
    if len(vals) != 4:
        raise argparse.ArgumentTypeError(f"expected LAT_MIN,LAT_MAX,LON_MIN,LON_MAX, got {text!r}")
    return vals


def _dataset_args(p):
    p.add_argument("--business", required=True, type=Path, help="business JSON-lines file")
    p.add_argument("--reviews", required=True, type=Path, help="review JSON-lines file")
    p.add_argument("--center", type=_center, help="LAT,LON for a radius filter")
    p.add_argument("--radius", type=float, help="radius filter in km (requires --center)")
    p.add_argument("--policy", choices=("strict", "lenient"), default="strict")
    p.add_argument("--merge-duplicates", action="store_true",
                   help="merge businesses with equal canonical names within 50 m")


def _common_args(p, formats=("csv", "json")):
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=formats, default=formats[0])


def _oscillator_args(p):
    for name, default in (("m", 1.0), ("c", 1.0), ("k", 1.0), ("q", 10.0),
                          ("omega", 5.0), ("x0", 0.0), ("v0", 0.0)):
        p.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float, default=default)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rating-dynamics",
        description="Review-rating dynamics: rankings, averages, oscillator model, spectra, heat maps.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fixtures", help="regenerate the synthetic city fixtures")
    p.add_argument("--city", action="append", choices=cities() + ("all",),
                   help="city to write (repeatable, default all)")
    _common_args(p, formats=("json",))

    p = sub.add_parser("top", help="businesses ranked by review count")
    _dataset_args(p)
    _common_args(p)
    p.add_argument("--limit", type=int, default=30)

    p = sub.add_parser("powerlaw", help="log-log rank/count fit")
    _dataset_args(p)
    _common_args(p)
    p.add_argument("--limit", type=int, help="fit only the top N businesses")

    p = sub.add_parser("avg", help="aggregate running average and convergence")
    _dataset_args(p)
    _common_args(p)
    p.add_argument("--tail-fraction", type=float, default=0.2)
    p.add_argument("--epsilon", type=float, default=0.05)

    p = sub.add_parser("yearly", help="yearly mean rating and count")
    _dataset_args(p)
    _common_args(p)

    p = sub.add_parser("heatmap", help="Gaussian heat grid and Clark-Evans index")
    _dataset_args(p)
    _common_args(p, formats=("csv", "pgm"))
    p.add_argument("--nx", type=int, default=64)
    p.add_argument("--ny", type=int, default=64)
    p.add_argument("--bandwidth", type=float, default=0.25, help="kernel sigma in km")
    p.add_argument("--weight", choices=("count", "stars"), default="count",
                   help="weight by review count or by average stars")
    p.add_argument("--bbox", type=_bbox, help="LAT_MIN,LAT_MAX,LON_MIN,LON_MAX (default: data extent)")
    p.add_argument("--top", type=int, default=20, help="most-reviewed businesses used for Clark-Evans")

    p = sub.add_parser("periodogram", help="Lomb-Scargle spectrum of one business")
    _dataset_args(p)
    _common_args(p)
    p.add_argument("--business-id", help="default: the most-reviewed business")
    p.add_argument("--permutations", type=int, default=999)

    p = sub.add_parser("fit", help="fit the oscillator model to one business")
    _dataset_args(p)
    _common_args(p, formats=("json",))
    p.add_argument("--business-id", help="default: the most-reviewed business")
    p.add_argument("--smooth", action="store_true", help="fit a trailing 90-day moving average")
    p.add_argument("--starts", type=int, default=8)

    p = sub.add_parser("simulate", help="RK4 trajectory of the oscillator")
    _oscillator_args(p)
    _common_args(p)
    p.add_argument("--t-end", type=float, default=100.0)
    p.add_argument("--step", type=float, default=1e-3)

    p = sub.add_parser("classify", help="regime of a parameter set")
    _oscillator_args(p)
    _common_args(p, formats=("json",))
    return parser


# -- commands -----------------------------------------------------------------

def _load(args):
    ds = load_dataset(args.business, args.reviews, policy=args.policy)
    if args.merge_duplicates:
        ds = merge_duplicates(ds)
    if args.radius is not None or args.center is not None:
        if args.radius is None or args.center is None:
            raise UsageError("--center and --radius must be given together")
        ds = filter_by_radius(ds, args.center, args.radius)
    log.info("loaded %d businesses, %d reviews", len(ds.businesses), len(ds.reviews))
    return ds


def _ext(args):
    return "json" if args.format == "json" else "csv"


def _pick_business(ds, business_id):
    if business_id:
        return business_id
    ranked = review_counts(ds)
    if not ranked or ranked[0][1] == 0:
        raise UsageError("dataset has no reviews")
    return ranked[0][0].id


def cmd_top(args):
    ds = _load(args)
    ranked = review_counts(ds)[: max(args.limit, 0)]
    for b, n in ranked:
        print(f"{b.name}, {n}")
    out = args.out / f"top.{_ext(args)}"
    write_table(out, ["rank", "business_id", "name", "count"],
                [(i + 1, b.id, b.name, n) for i, (b, n) in enumerate(ranked)], args.format)
    return [out], {"limit": args.limit}


def cmd_powerlaw(args):
    ds = _load(args)
    counts = [n for _, n in review_counts(ds) if n > 0]
    if args.limit:
        counts = counts[: args.limit]
    fit = fit_power_law(counts)
    print(f"slope={fit.slope:.6g} intercept={fit.intercept:.6g} r_squared={fit.r_squared:.6g} n={fit.n}")
    table = args.out / f"rank_counts.{_ext(args)}"
    write_table(table, ["rank", "count"], [(i + 1, c) for i, c in enumerate(counts)], args.format)
    summary = write_json(args.out / "powerlaw.json", fit.as_dict())
    return [table, summary], {"limit": args.limit}


def cmd_avg(args):
    ds = _load(args)
    ra = running_average(rating_series(ds))
    table = args.out / f"running_average.{_ext(args)}"
    write_table(table, ["timestamp_iso8601", "cumulative_mean"], running_average_rows(ra), args.format)
    outputs = [table]
    if len(ra):
        est = convergence_value(ra, args.tail_fraction, args.epsilon)
        print(f"limit={est.limit:.6f} converged={est.converged} tail_range={est.tail_range:.6g}")
        outputs.append(write_json(args.out / "convergence.json", {
            "limit": est.limit, "converged": est.converged, "tail_range": est.tail_range,
            "tail_fraction": est.tail_fraction, "epsilon": est.epsilon, "n": len(ra),
        }))
    return outputs, {"tail_fraction": args.tail_fraction, "epsilon": args.epsilon}


def cmd_yearly(args):
    ds = _load(args)
    ya = yearly_average(rating_series(ds))
    for year, (mean, count) in ya.items():
        print(f"{year}, {mean:.11f}, {count}")
    out = args.out / f"yearly.{_ext(args)}"
    write_table(out, ["year", "mean", "count"], yearly_rows(ya), args.format)
    return [out], {}


def cmd_heatmap(args):
    ds = _load(args)
    if not ds.businesses:
        raise UsageError("dataset has no businesses")
    ranked = review_counts(ds)
    if args.weight == "count":
        weights = {b.id: float(n) for b, n in ranked}
    else:
        sums = {}
        for r in ds.reviews:
            sums.setdefault(r.business_id, []).append(r.stars)
        weights = {bid: sum(v) / len(v) for bid, v in sums.items()}
    bbox = args.bbox or points_bbox([b.latitude for b in ds.businesses], [b.longitude for b in ds.businesses])
    points = [(b.latitude, b.longitude, weights.get(b.id, 0.0)) for b in ds.businesses]
    grid = build_heat_grid(points, bbox, args.nx, args.ny, args.bandwidth)
    outputs = [write_heat_grid_csv(args.out / "heatmap.csv", grid)]
    if args.format == "pgm":
        outputs.append(write_heat_grid_pgm(args.out / "heatmap.pgm", grid))
    top = [b for b, n in ranked[: args.top] if n > 0]
    cluster = {"top": args.top, "n": len(top)}
    if len(top) >= 2:
        ci = clark_evans([(b.latitude, b.longitude) for b in top], bbox_area_km2(bbox))
        cluster.update(R=ci.R, area_km2=ci.area, mean_nn_km=ci.mean_nn_km, expected_nn_km=ci.expected_nn_km)
        print(f"Clark-Evans R={ci.R:.4f} over the {len(top)} most-reviewed businesses")
    outputs.append(write_json(args.out / "cluster.json", cluster))
    params = {"nx": args.nx, "ny": args.ny, "bandwidth_km": args.bandwidth, "weight": args.weight,
              "bbox": list(bbox), "top": args.top}
    return outputs, params


def cmd_periodogram(args):
    ds = _load(args)
    bid = _pick_business(ds, args.business_id)
    series = rating_series(ds, bid)
    t, y = series_in_years(series)
    pg = lomb_scargle(t, y, default_grid(t))
    peak = dominant_period(pg, t, y, args.permutations, args.seed)
    print(f"{bid}: peak {peak.frequency:.4f} cycles/year (period {peak.period:.3f} y), p={peak.p_value:.4f}")
    table = args.out / f"periodogram.{_ext(args)}"
    write_table(table, ["frequency_cpy", "power"], periodogram_rows(pg), args.format)
    report = peak.as_dict()
    report["business_id"] = bid
    report["points_per_year"] = points_per_year(series)
    summary = write_json(args.out / "peak.json", report)
    return [table, summary], {"business_id": bid, "permutations": args.permutations}


def cmd_fit(args):
    ds = _load(args)
    bid = _pick_business(ds, args.business_id)
    series = rating_series(ds, bid)
    if args.smooth:
        series = moving_average(series, 90)
    result = fit_oscillator(series, opts=SimplexOptions(seed=args.seed, n_starts=args.starts))
    p = result.params
    print(f"{bid}: c={p.c:.4g} k={p.k:.4g} q={p.q:.4g} omega={p.omega:.4g} sse={result.sse:.4g} "
          f"regime={classify(p)}")
    report = result.as_dict(bid)
    report["regime"] = str(classify(p))
    report["smoothing_days"] = 90 if args.smooth else 0
    summary = write_json(args.out / "fit.json", report)
    model = model_ratings(result, series.times)
    table = write_table(args.out / "fit_model.csv", ["timestamp_iso8601", "observed", "model"],
                        [(iso8601(ts), s, m) for ts, s, m in
                         zip(series.times.tolist(), series.stars.tolist(), model.tolist())])
    return [summary, table], {"business_id": bid, "smooth": args.smooth, "starts": args.starts}


def _params(args):
    return OscillatorParams(args.m, args.c, args.k, args.q, args.omega, args.x0, args.v0)


def cmd_simulate(args):
    p = _params(args)
    traj = simulate_rk4(p, args.t_end, args.step)
    out = args.out / f"trajectory.{_ext(args)}"
    write_table(out, ["t", "x", "v"], trajectory_rows(traj), args.format)
    print(f"{len(traj)} samples, regime {classify(p)}")
    return [out], {"params": p.as_dict(), "t_end": args.t_end, "step": args.step}


def cmd_classify(args):
    p = _params(args)
    regime = classify(p)
    print(regime)
    info = {"params": p.as_dict(), "regime": str(regime)}
    try:
        info["steady_state_amplitude"] = steady_state_amplitude(p)
    except RatingDynamicsError:
        info["steady_state_amplitude"] = None
    out = write_json(args.out / "classify.json", info)
    return [out], {"params": p.as_dict()}


def cmd_fixtures(args):
    chosen = args.city or ["all"]
    names = cities() if "all" in chosen else tuple(dict.fromkeys(chosen))
    outputs = []
    for name in names:
        bpath, rpath = write_fixture(name, args.out)
        outputs += [bpath, rpath]
        print(f"{name}: {bpath} {rpath}")
    return outputs, {"cities": list(names)}


COMMANDS = {
    "fixtures": cmd_fixtures,
    "top": cmd_top,
    "powerlaw": cmd_powerlaw,
    "avg": cmd_avg,
    "yearly": cmd_yearly,
    "heatmap": cmd_heatmap,
    "periodogram": cmd_periodogram,
    "fit": cmd_fit,
    "simulate": cmd_simulate,
    "classify": cmd_classify,
}


def _inputs(args):
    return [p for p in (getattr(args, "business", None), getattr(args, "reviews", None)) if p is not None]


OUTPUT_NAMES = frozenset({
    "manifest.json", "top.csv", "top.json", "rank_counts.csv", "rank_counts.json", "powerlaw.json",
    "running_average.csv", "running_average.json", "convergence.json", "yearly.csv", "yearly.json",
    "heatmap.csv", "heatmap.pgm", "cluster.json", "periodogram.csv", "periodogram.json", "peak.json",
    "fit.json", "fit_model.csv", "trajectory.csv", "trajectory.json", "classify.json",
})


def _guard_outputs(args):
    out = args.out.resolve()
    for src in _inputs(args):
        src = src.resolve()
        if src.parent == out and src.name in OUTPUT_NAMES:
            raise UsageError(f"output would overwrite input {src}; choose another --out")


def run(argv=None):
    args = build_parser().parse_args(argv)
    _guard_outputs(args)
    args.out.mkdir(parents=True, exist_ok=True)
    outputs, params = COMMANDS[args.command](args)
    manifest = run_manifest(args.command, params, args.seed, _inputs(args), outputs, args.out)
    (args.out / "manifest.json").write_text(json_text(manifest), encoding="utf-8")
    return 0


def main(argv=None):
    level = os.environ.get("RATING_DYNAMICS_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(argv)
    except RatingDynamicsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
