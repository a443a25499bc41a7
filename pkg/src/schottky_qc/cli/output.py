"""Artifact writers: CSV tables with round-trip floats, SVG renders of the chart on a fixed
viewBox, and the run manifest."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import platform
from importlib import metadata
from pathlib import Path

import numpy as np

VIEWBOX = 1000.0  # SVG user units; the chart window maps onto [0, VIEWBOX]²


def _cell(v) -> str:
    """Shortest decimal that round-trips (repr) for floats; plain text otherwise."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (complex, np.complexfloating)):
        raise TypeError("split complex values into real and imaginary columns")
    return str(v)


def csv_text(rows: list[dict], columns: list[str] | None = None) -> str:
    if columns is None:
        columns = []
        for r in rows:
            columns.extend(k for k in r if k not in columns)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c, "")) for c in columns])
    return buf.getvalue()


def matrix_text(M: np.ndarray) -> str:
    return "".join(",".join(repr(float(v)) for v in row) + "\n" for row in np.atleast_2d(M))


class Artifacts:
    """Collects files written into one output directory and their digests."""

    def __init__(self, out_dir: str | Path):
        self.dir = Path(out_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.files: dict[str, str] = {}

    def write(self, name: str, text: str) -> Path:
        p = self.dir / name
        p.write_text(text)
        self.files[name] = hashlib.sha256(text.encode()).hexdigest()
        return p

    def csv(self, name: str, rows: list[dict], columns=None) -> Path:
        return self.write(name, csv_text(rows, columns))

    def manifest(self, command: str, options: dict, scene, summary: dict,
                 checks: dict | None = None) -> Path:
        doc = {
            "command": command,
            "options": options,
            "scene": None if scene is None else scene.doc,
            "scene_sha256": None if scene is None else scene.digest,
            "seed": options.get("seed"),
            "versions": versions(),
            "summary": summary,
            "checks": checks or {},
            "outputs": dict(sorted(self.files.items())),
        }
        text = json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"
        p = self.dir / "manifest.json"
        p.write_text(text)
        return p


def versions() -> dict:
    out = {"python": platform.python_version()}
    for pkg in ("artifact", "numpy", "scipy", "shapely", "numba", "clarabel", "jsonschema", "click"):
        try:
            out[pkg] = metadata.version(pkg)
        except metadata.PackageNotFoundError:
            out[pkg] = None
    return out


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        v = float(x)
        return v if np.isfinite(v) else str(v)
    if isinstance(x, (complex, np.complexfloating)):
        return [_jsonable(x.real), _jsonable(x.imag)]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    return x


# ---------------------------------------------------------------------------------------
# SVG


class Canvas:
    """Chart window (x0, x1, y0, y1) mapped onto a square viewBox, y pointing up.
    Non-square windows are centered and padded to a square."""

    def __init__(self, window, title: str = ""):
        x0, x1, y0, y1 = map(float, window)
        side = max(x1 - x0, y1 - y0)
        cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
        self.x0, self.y1 = cx - side / 2, cy + side / 2
        self.scale = VIEWBOX / side
        self.items: list[str] = []
        self.title = title

    def xy(self, z) -> tuple[float, float]:
        return (z.real - self.x0) * self.scale, (self.y1 - z.imag) * self.scale

    def circle(self, center: complex, radius: float, stroke="#000", fill="none", width=1.0):
        x, y = self.xy(center)
        self.items.append(f'<circle cx="{x:.4f}" cy="{y:.4f}" r="{radius * self.scale:.4f}" '
                          f'stroke="{stroke}" fill="{fill}" stroke-width="{width:g}"/>')

    def polyline(self, pts, closed=False, stroke="#000", fill="none", width=1.0):
        pts = np.asarray(pts, complex)
        pts = pts[np.isfinite(pts)]
        if pts.size < 2:
            return
        coords = " ".join(f"{x:.4f},{y:.4f}" for x, y in (self.xy(z) for z in pts))
        tag = "polygon" if closed else "polyline"
        self.items.append(f'<{tag} points="{coords}" stroke="{stroke}" fill="{fill}" '
                          f'stroke-width="{width:g}"/>')

    def dot(self, z: complex, r_px: float = 3.0, fill="#c00"):
        x, y = self.xy(z)
        self.items.append(f'<circle cx="{x:.4f}" cy="{y:.4f}" r="{r_px:g}" fill="{fill}"/>')

    def text(self, z: complex, s: str, size=14):
        x, y = self.xy(z)
        self.items.append(f'<text x="{x:.4f}" y="{y:.4f}" font-size="{size}">{s}</text>')

    def svg(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {VIEWBOX:g} {VIEWBOX:g}" '
                f'width="{VIEWBOX:g}" height="{VIEWBOX:g}">\n')
        title = f"<title>{self.title}</title>\n" if self.title else ""
        body = "\n".join(self.items)
        return head + title + '<rect width="100%" height="100%" fill="#fff"/>\n' + body + "\n</svg>\n"


def depth_color(depth: int, max_depth: int) -> str:
    t = depth / max(1, max_depth)
    r, g, b = int(30 + 200 * t), int(80 + 60 * (1 - t)), int(200 - 170 * t)
    return f"#{r:02x}{g:02x}{b:02x}"


def fit_window(points, pad: float = 0.08) -> tuple[float, float, float, float]:
    p = np.asarray(points, complex)
    p = p[np.isfinite(p)]
    if p.size == 0:
        return (-1.0, 1.0, -1.0, 1.0)
    x0, x1, y0, y1 = p.real.min(), p.real.max(), p.imag.min(), p.imag.max()
    side = max(x1 - x0, y1 - y0, 1e-9) * (1 + 2 * pad)
    cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
    return (cx - side / 2, cx + side / 2, cy - side / 2, cy + side / 2)


__all__ = ["Artifacts", "Canvas", "VIEWBOX", "csv_text", "depth_color", "fit_window",
           "matrix_text", "versions"]
