"""Plot-ready file writers (CSV, JSON, PGM) and run manifests.

All writers produce byte-stable output: fixed float formatting, sorted JSON
keys, ``\\n`` line endings.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
from pathlib import Path

import numpy as np

from .timeseries import iso8601


def fmt(value):
    """Floats with 17 significant digits, everything else via ``str``."""
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def _write_text(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def table_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, header, rows):
    return _write_text(path, table_text(header, rows))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj


def json_text(obj):
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_json(path, obj):
    return _write_text(path, json_text(obj))


def write_table(path, header, rows, fmt_name="csv"):
    """CSV, or a JSON list of records when ``fmt_name == "json"``."""
    if fmt_name == "json":
        return write_json(path, [dict(zip(header, row)) for row in rows])
    return write_csv(path, header, rows)


# -- module-specific layouts -------------------------------------------------

def running_average_rows(ra):
    return [(iso8601(t), m) for t, m in zip(ra.times.tolist(), ra.means.tolist())]


def yearly_rows(ya):
    return [(year, mean, count) for year, (mean, count) in ya.items()]


def trajectory_rows(traj):
    return zip(traj.t.tolist(), traj.x.tolist(), traj.v.tolist())


def periodogram_rows(pg):
    return zip(pg.frequencies.tolist(), pg.powers.tolist())


def heat_grid_csv(grid):
    """Matrix CSV, north row first, with the grid geometry in ``#`` header lines."""
    lat_min, lat_max, lon_min, lon_max = grid.bbox
    lines = [
        f"# bbox lat_min={fmt(lat_min)} lat_max={fmt(lat_max)} lon_min={fmt(lon_min)} lon_max={fmt(lon_max)}",
        f"# nx={grid.nx} ny={grid.ny} bandwidth_km={fmt(grid.bandwidth)}",
        "# rows run north to south, columns west to east",
    ]
    for row in grid.cells:
        lines.append(",".join(fmt(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def write_heat_grid_csv(path, grid):
    return _write_text(path, heat_grid_csv(grid))


def heat_grid_pgm(grid):
    """Plain PGM (P2), cells scaled linearly so the largest maps to 255."""
    peak = float(grid.cells.max()) if grid.cells.size else 0.0
    if peak > 0:
        levels = np.rint(grid.cells / peak * 255.0).astype(int)
    else:
        levels = np.zeros_like(grid.cells, dtype=int)
    lines = ["P2", f"# bandwidth_km={fmt(grid.bandwidth)}", f"{grid.nx} {grid.ny}", "255"]
    lines += [" ".join(str(v) for v in row) for row in levels.tolist()]
    return "\n".join(lines) + "\n"


def write_heat_grid_pgm(path, grid):
    return _write_text(path, heat_grid_pgm(grid))


def read_heat_grid_csv(path):
    """Inverse of :func:`write_heat_grid_csv`; returns ``(meta, cells)``."""
    meta = {}
    rows = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            for token in line[1:].split():
                if "=" in token:
                    key, val = token.split("=", 1)
                    meta[key] = float(val)
        elif line.strip():
            rows.append([float(v) for v in line.split(",")])
    return meta, np.array(rows)


# -- manifests ----------------------------------------------------------------

def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def run_manifest(command, parameters, seed, inputs, outputs, out_dir):
    """Manifest recording inputs, parameters, seed and output hashes.

    Output paths are stored relative to ``out_dir`` and no wall-clock time is
    recorded, so identical runs give identical manifests.
    """
    out_dir = Path(out_dir)
    return {
        "command": command,
        "parameters": parameters,
        "seed": seed,
        "inputs": [{"path": str(p), "sha256": sha256_file(p)} for p in inputs],
        "outputs": [{"path": Path(p).relative_to(out_dir).as_posix(), "sha256": sha256_file(p)}
                    for p in outputs],
    }
