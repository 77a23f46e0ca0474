"""Review-count heat grid over a city and the Clark-Evans clustering ratio.

Writes heatmap.pgm into the directory given as the first argument
(default: the current directory); any PGM viewer can open it.
"""
import sys
from pathlib import Path

from rating_dynamics import build_heat_grid, clark_evans, review_counts
from rating_dynamics.export import write_heat_grid_pgm
from rating_dynamics.fixtures import build_fixture
from rating_dynamics.spatial import bbox_area_km2, points_bbox

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(".")
ds = build_fixture("seattle")
ranked = review_counts(ds)
bbox = points_bbox([b.latitude for b in ds.businesses], [b.longitude for b in ds.businesses])
grid = build_heat_grid([(b.latitude, b.longitude, n) for b, n in ranked], bbox, 48, 48, 0.3)
print(f"grid mass {grid.total:.6f} vs {len(ds.reviews)} reviews")
path = write_heat_grid_pgm(out / "heatmap.pgm", grid)
print(f"wrote {path}")

top = [(b.latitude, b.longitude) for b, _ in ranked[:20]]
ci = clark_evans(top, bbox_area_km2(bbox))
print(f"Clark-Evans R for the 20 most-reviewed: {ci.R:.3f} "
      f"({'clustered' if ci.R < 1 else 'dispersed'}; 1 means uniform)")
