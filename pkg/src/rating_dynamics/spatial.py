"""Gaussian heat grids over a lat/lon box and the Clark-Evans aggregation ratio.

Both work in a local equirectangular plane: kilometres east and north of a
reference point, ``x = R * dlon * cos(lat_ref)``, ``y = R * dlat``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import SpatialError
from .ingest import EARTH_RADIUS_KM

TRUNCATE_SIGMAS = 3.0


@dataclass(frozen=True)
class HeatGrid:
    """Cell weights on an ``ny x nx`` grid.

    ``cells[0]`` is the northernmost row and ``cells[:, 0]`` the westernmost
    column, i.e. image orientation.
    """

    bbox: tuple
    nx: int
    ny: int
    cells: np.ndarray
    bandwidth: float

    @property
    def total(self):
        return float(self.cells.sum())


@dataclass(frozen=True)
class ClusterIndex:
    R: float
    n: int
    area: float
    mean_nn_km: float
    expected_nn_km: float


def project(lat, lon, lat_ref, lon_ref):
    """Equirectangular ``(x_km, y_km)`` about ``(lat_ref, lon_ref)``."""
    lat = np.asarray(lat, dtype=float)
    lon = np.asarray(lon, dtype=float)
    kx = EARTH_RADIUS_KM * math.cos(math.radians(lat_ref)) * math.pi / 180.0
    ky = EARTH_RADIUS_KM * math.pi / 180.0
    return (lon - lon_ref) * kx, (lat - lat_ref) * ky


def _check_bbox(bbox):
    lat_min, lat_max, lon_min, lon_max = (float(v) for v in bbox)
    if not (lat_min < lat_max and lon_min < lon_max):
        raise SpatialError(f"empty bounding box {bbox!r}")
    if not (-90 <= lat_min and lat_max <= 90 and -180 <= lon_min and lon_max <= 180):
        raise SpatialError(f"bounding box out of range {bbox!r}")
    return lat_min, lat_max, lon_min, lon_max


def bbox_area_km2(bbox):
    """Area of the box in the projection about its centre."""
    lat_min, lat_max, lon_min, lon_max = _check_bbox(bbox)
    lat_c = 0.5 * (lat_min + lat_max)
    width = EARTH_RADIUS_KM * math.cos(math.radians(lat_c)) * math.radians(lon_max - lon_min)
    height = EARTH_RADIUS_KM * math.radians(lat_max - lat_min)
    return width * height


def cell_centers(bbox, nx, ny):
    """Projected ``(X, Y)`` km coordinates of the cell centres, shape ``(ny, nx)``."""
    lat_min, lat_max, lon_min, lon_max = _check_bbox(bbox)
    lat_c, lon_c = 0.5 * (lat_min + lat_max), 0.5 * (lon_min + lon_max)
    dlon = (lon_max - lon_min) / nx
    dlat = (lat_max - lat_min) / ny
    lons = lon_min + dlon * (np.arange(nx) + 0.5)
    lats = lat_max - dlat * (np.arange(ny) + 0.5)
    x, _ = project(lat_c, lons, lat_c, lon_c)
    _, y = project(lats, lon_c, lat_c, lon_c)
    return np.meshgrid(x, y)


def build_heat_grid(points, bbox, nx, ny, bandwidth_km):
    """Spread each point's weight over nearby cells with a truncated Gaussian.

    Parameters
    ----------
    points : iterable of (lat, lon, weight)
        Weights must be nonnegative and points inside ``bbox``.
    bbox : (lat_min, lat_max, lon_min, lon_max)
    nx, ny : int
        Columns (west to east) and rows (north to south).
    bandwidth_km : float
        Kernel standard deviation; the kernel is cut at 3 sigma.

    Each deposit is renormalized over the cells it reaches, so the grid
    total equals the total input weight. A point whose kernel reaches no
    cell centre deposits everything into the cell containing it.
    """
    lat_min, lat_max, lon_min, lon_max = _check_bbox(bbox)
    nx, ny = int(nx), int(ny)
    if nx < 1 or ny < 1:
        raise SpatialError("nx and ny must be at least 1")
    if not bandwidth_km > 0:
        raise SpatialError(f"bandwidth must be positive, got {bandwidth_km!r}")
    pts = np.asarray(list(points), dtype=float).reshape(-1, 3)
    if np.any(pts[:, 2] < 0) or not np.all(np.isfinite(pts)):
        raise SpatialError("weights must be finite and nonnegative")
    inside = ((pts[:, 0] >= lat_min) & (pts[:, 0] <= lat_max)
              & (pts[:, 1] >= lon_min) & (pts[:, 1] <= lon_max))
    if not np.all(inside):
        bad = pts[np.argmin(inside)]
        raise SpatialError(f"point ({bad[0]}, {bad[1]}) lies outside the bounding box")

    X, Y = cell_centers(bbox, nx, ny)
    lat_c, lon_c = 0.5 * (lat_min + lat_max), 0.5 * (lon_min + lon_max)
    px, py = project(pts[:, 0], pts[:, 1], lat_c, lon_c)
    cutoff2 = (TRUNCATE_SIGMAS * bandwidth_km) ** 2
    inv2s2 = 1.0 / (2.0 * bandwidth_km ** 2)
    cells = np.zeros((ny, nx))
    for (lat, lon, wgt), x, y in zip(pts, px, py):
        if wgt == 0:
            continue
        d2 = (X - x) ** 2 + (Y - y) ** 2
        kern = np.where(d2 <= cutoff2, np.exp(-d2 * inv2s2), 0.0)
        mass = kern.sum()
        if mass > 0:
            cells += wgt * (kern / mass)
        else:
            col = min(int((lon - lon_min) / (lon_max - lon_min) * nx), nx - 1)
            row = min(int((lat_max - lat) / (lat_max - lat_min) * ny), ny - 1)
            cells[row, col] += wgt
    return HeatGrid((lat_min, lat_max, lon_min, lon_max), nx, ny, cells, float(bandwidth_km))


def clark_evans_xy(xy_km, area_km2):
    """Clark-Evans ratio for planar points in km.

    ``R = mean nearest-neighbour distance / (0.5 * sqrt(area / n))``. No
    edge correction, so R is biased upward for points near the boundary.
    """
    xy = np.asarray(xy_km, dtype=float).reshape(-1, 2)
    n = xy.shape[0]
    if n < 2:
        raise SpatialError("need at least two points")
    if not area_km2 > 0:
        raise SpatialError(f"area must be positive, got {area_km2!r}")
    dist, _ = cKDTree(xy).query(xy, k=2)
    mean_nn = float(dist[:, 1].mean())
    expected = 0.5 * math.sqrt(area_km2 / n)
    return ClusterIndex(mean_nn / expected, n, float(area_km2), mean_nn, expected)


def clark_evans(points, area_km2):
    """Clark-Evans ratio for ``(lat, lon)`` points, projected about their mean position."""
    pts = np.asarray(list(points), dtype=float).reshape(-1, 2)
    if pts.shape[0] < 2:
        raise SpatialError("need at least two points")
    lat_ref, lon_ref = float(pts[:, 0].mean()), float(pts[:, 1].mean())
    x, y = project(pts[:, 0], pts[:, 1], lat_ref, lon_ref)
    return clark_evans_xy(np.column_stack([x, y]), area_km2)


def points_bbox(lats, lons, pad_fraction=0.05):
    """Bounding box around the points, padded by ``pad_fraction`` of each span."""
    lats = np.asarray(lats, dtype=float)
    lons = np.asarray(lons, dtype=float)
    if lats.size == 0:
        raise SpatialError("no points")
    dlat = max(float(lats.max() - lats.min()), 1e-3)
    dlon = max(float(lons.max() - lons.min()), 1e-3)
    return (max(float(lats.min()) - pad_fraction * dlat, -90.0),
            min(float(lats.max()) + pad_fraction * dlat, 90.0),
            max(float(lons.min()) - pad_fraction * dlon, -180.0),
            min(float(lons.max()) + pad_fraction * dlon, 180.0))
