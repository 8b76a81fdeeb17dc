"""File formats: polygon documents (JSON), fit traces (CSV), SVG overlays.

Every writer is deterministic: identical input gives identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geometry import CartesianPolygon, GeometryError, Point

SCHEMA_VERSION = 1


class FormatError(ValueError):
    pass


@dataclass(frozen=True)
class Style:
    stroke: str = "#1f4fd1"
    fill: str = "none"
    width: float = 1.5
    opacity: float = 1.0
    dash: str | None = None


TARGET_STYLE = Style(stroke="#1f4fd1", fill="#1f4fd1", opacity=0.25)
PRED_STYLE = Style(stroke="#d62728")


def read_polygons(path) -> list[tuple[str, CartesianPolygon, Point | None]]:
    """Load a polygon document as ``(id, polygon, origin-or-None)`` triples.

    Raises ``FormatError`` naming the offending polygon id.
    """
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict) or doc.get("schema_version") != SCHEMA_VERSION:
        raise FormatError(f"{path}: schema_version must be {SCHEMA_VERSION}")
    polys = doc.get("polygons")
    if not isinstance(polys, list):
        raise FormatError(f"{path}: 'polygons' must be a list")
    out = []
    for n, entry in enumerate(polys):
        pid = str(entry.get("id", n)) if isinstance(entry, dict) else str(n)
        if not isinstance(entry, dict) or "vertices" not in entry:
            raise FormatError(f"polygon {pid}: missing 'vertices'")
        verts = entry["vertices"]
        if not isinstance(verts, list) or len(verts) < 3:
            raise FormatError(f"polygon {pid}: vertices must have length >= 3")
        try:
            arr = np.array(verts, dtype=float)
            if arr.shape != (len(verts), 2):
                raise ValueError("each vertex must be an [x, y] pair")
            poly = CartesianPolygon(arr)
        except (ValueError, TypeError) as exc:
            raise FormatError(f"polygon {pid}: {exc}") from exc
        origin = entry.get("origin")
        if origin is not None:
            if not (isinstance(origin, list) and len(origin) == 2):
                raise FormatError(f"polygon {pid}: origin must be an [x, y] pair")
            origin = Point(float(origin[0]), float(origin[1]))
        out.append((pid, poly, origin))
    return out


def write_polygons(items, path) -> None:
    """Write ``(id, polygon)`` or ``(id, polygon, origin)`` items."""
    polys = []
    for item in items:
        pid, poly = item[0], item[1]
        entry = {"id": str(pid), "vertices": [[float(x), float(y)] for x, y in poly.vertices]}
        if len(item) > 2 and item[2] is not None:
            entry["origin"] = [float(item[2][0]), float(item[2][1])]
        polys.append(entry)
    doc = {"schema_version": SCHEMA_VERSION, "polygons": polys}
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def _g12(x: float) -> str:
    return f"{x:.12g}"


def write_trace_csv(trace, path) -> None:
    lines = ["iter,origin_loss,iou_loss,smooth_loss,total"]
    for rec in trace.records:
        b = rec.loss
        lines.append(",".join([str(rec.iteration), _g12(b.origin), _g12(b.polar_iou), _g12(b.smoothness), _g12(b.total)]))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_profile_csv(rows, path) -> None:
    """Rows of ``(id, ray, angle, radius)``."""
    lines = ["id,ray,angle,radius"]
    lines += [f"{pid},{j},{a:.17g},{r:.17g}" for pid, j, a, r in rows]
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _num(x: float) -> str:
    s = f"{x:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def render_svg(shapes, path, size: int = 512) -> None:
    """Standalone SVG with one closed path per polygon.

    The y axis is flipped so the picture keeps mathematical orientation.
    """
    if shapes:
        pts = np.concatenate([p.vertices for p, _ in shapes])
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        span = np.maximum(hi - lo, 1e-9)
        lo = lo - 0.05 * span
        hi = hi + 0.05 * span
    else:
        lo, hi = np.zeros(2), np.ones(2)
    w, h = hi - lo
    vb = f"{_num(lo[0])} {_num(-hi[1])} {_num(w)} {_num(h)}"
    stroke_scale = max(w, h) / size
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{_num(size * h / w)}" viewBox="{vb}">',
    ]
    for poly, style in shapes:
        style = style or Style()
        coords = [f"{_num(x)},{_num(-y)}" for x, y in poly.vertices]
        d = "M " + " L ".join(coords) + " Z"
        attrs = [
            f'd="{d}"',
            f'fill="{style.fill}"',
            f'stroke="{style.stroke}"',
            f'stroke-width="{_num(style.width * stroke_scale)}"',
        ]
        if style.fill != "none":
            attrs.append(f'fill-opacity="{_num(style.opacity)}"')
        if style.dash:
            attrs.append(f'stroke-dasharray="{style.dash}"')
        out.append(f"<path {' '.join(attrs)}/>")
    out.append("</svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")


__all__ = [
    "FormatError",
    "GeometryError",
    "Style",
    "read_polygons",
    "write_polygons",
    "write_trace_csv",
    "write_profile_csv",
    "render_svg",
]
