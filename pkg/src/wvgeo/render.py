"""SVG rendering: Bloch-sphere scenes (orthographic) and star-angle heatmaps.

Output is a plain string with fixed-precision coordinates, so repeated runs
produce identical bytes.
"""

from __future__ import annotations

import math

import numpy as np

from .blochgeo import SceneGraph
from .errors import ValidationError

_SIZE = 1000
_CENTER = 500.0
_RADIUS = 450.0

_ARC_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _fmt(x: float) -> str:
    return format(x, ".2f")


def view_frame(view_axis) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Right-handed (e1, e2, v) frame with v toward the viewer."""
    v = np.asarray(view_axis, dtype=float)
    if v.shape != (3,) or float(np.linalg.norm(v)) < 1e-12:
        raise ValidationError("view axis must be a nonzero 3-vector")
    v = v / float(np.linalg.norm(v))
    up = np.array([0.0, 0.0, 1.0]) if abs(v[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    e1 = np.cross(up, v)
    e1 /= float(np.linalg.norm(e1))
    e2 = np.cross(v, e1)
    return e1, e2, v


def _project(p: np.ndarray, frame) -> tuple[float, float, float]:
    e1, e2, v = frame
    return (
        _CENTER + _RADIUS * float(np.dot(p, e1)),
        _CENTER - _RADIUS * float(np.dot(p, e2)),
        float(np.dot(p, v)),
    )


def _polyline_runs(samples: np.ndarray, frame) -> tuple[list[list[tuple[float, float]]], list[list[tuple[float, float]]]]:
    """Split an arc into front (visible) and back (hidden) pixel runs."""
    front: list[list[tuple[float, float]]] = []
    back: list[list[tuple[float, float]]] = []
    current: list[tuple[float, float]] = []
    current_front = None
    for p in samples:
        x, y, depth = _project(np.asarray(p, dtype=float), frame)
        is_front = depth >= 0.0
        if current_front is None or is_front == current_front:
            current.append((x, y))
        else:
            (front if current_front else back).append(current)
            current = [current[-1], (x, y)] if current else [(x, y)]
        current_front = is_front
    if current:
        (front if current_front else back).append(current)
    return front, back


def scene_to_svg(scene: SceneGraph, view_axis=(1.0, 0.0, 0.0)) -> str:
    """Orthographic Bloch-sphere drawing; hidden-arc segments are dashed."""
    frame = view_frame(view_axis)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_SIZE} {_SIZE}">',
        f'<rect width="{_SIZE}" height="{_SIZE}" fill="white"/>',
        f'<circle cx="{_fmt(_CENTER)}" cy="{_fmt(_CENTER)}" r="{_fmt(_RADIUS)}" '
        'fill="none" stroke="#888888" stroke-width="2"/>',
    ]
    for i, a in enumerate(scene.arcs):
        color = _ARC_COLORS[i % len(_ARC_COLORS)]
        front, back = _polyline_runs(a.samples, frame)
        for run in back:
            pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in run)
            parts.append(
                f'<polyline points="{pts}" fill="none" stroke="{color}" '
                'stroke-width="2" stroke-dasharray="6,6" opacity="0.6"/>'
            )
        for run in front:
            pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in run)
            parts.append(
                f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="3"/>'
            )
    for p in scene.points:
        x, y, depth = _project(np.asarray(p.xyz, dtype=float), frame)
        fill = "#000000" if depth >= 0 else "#999999"
        parts.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="7" fill="{fill}"/>')
        parts.append(
            f'<text x="{_fmt(x + 12)}" y="{_fmt(y - 8)}" font-size="30" '
            f'font-family="sans-serif">{_escape(p.label)}</text>'
        )
    for i, t in enumerate(scene.triangles):
        omega = "undefined" if math.isnan(t.omega) else format(t.omega, ".6g")
        parts.append(
            f'<text x="20" y="{40 + 34 * i}" font-size="26" font-family="sans-serif">'
            f"&#937;({','.join(_escape(v) for v in t.verts)}) = {omega}</text>"
        )
    parts.append(
        f'<text x="20" y="{_SIZE - 20}" font-size="22" font-family="sans-serif">'
        f"{_escape(scene.caption)}</text>"
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


# Five-stop blue-to-yellow map for the heatmaps.
_STOPS = (
    (0.00, (13, 8, 135)),
    (0.25, (126, 3, 168)),
    (0.50, (204, 71, 120)),
    (0.75, (248, 149, 64)),
    (1.00, (240, 249, 33)),
)


def _colormap(t: float) -> str:
    t = min(1.0, max(0.0, t))
    for (t0, c0), (t1, c1) in zip(_STOPS, _STOPS[1:]):
        if t <= t1:
            w = 0.0 if t1 == t0 else (t - t0) / (t1 - t0)
            rgb = tuple(round(a + w * (b - a)) for a, b in zip(c0, c1))
            return f"#{rgb[0]:02x}{rgb[1]:02x}{rgb[2]:02x}"
    return "#f0f921"


def heatmap_to_svg(
    row_values,
    col_values,
    matrix: np.ndarray,
    overlays: dict[str, tuple[str, list[float], list[float]]] | None = None,
    title: str = "",
    vmin: float = 0.0,
    vmax: float = 180.0,
) -> str:
    """Heatmap of matrix[row, col] with optional (col, row)-coordinate overlays.

    Rows map to the vertical axis (first row at the bottom), columns to the
    horizontal axis. Overlays are named curves {name: (color, xs, ys)} with
    xs in column units and ys in row units.
    """
    rows = list(row_values)
    cols = list(col_values)
    mat = np.asarray(matrix, dtype=float)
    if mat.shape != (len(rows), len(cols)):
        raise ValidationError("matrix shape does not match the label vectors")
    left, top, width, height = 90.0, 60.0, 860.0, 860.0
    x0, x1 = float(cols[0]), float(cols[-1])
    y0, y1 = float(rows[0]), float(rows[-1])

    def px(c: float) -> float:
        return left + (c - x0) / (x1 - x0) * width if x1 > x0 else left

    def py(r: float) -> float:
        return top + height - ((r - y0) / (y1 - y0) * height if y1 > y0 else 0.0)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_SIZE} {_SIZE}">',
        f'<rect width="{_SIZE}" height="{_SIZE}" fill="white"/>',
        f'<text x="{_fmt(left)}" y="36" font-size="28" font-family="sans-serif">{_escape(title)}</text>',
    ]
    cell_w = width / len(cols)
    cell_h = height / len(rows)
    for i in range(len(rows)):
        for j in range(len(cols)):
            t = (mat[i, j] - vmin) / (vmax - vmin) if vmax > vmin else 0.0
            x = left + j * cell_w
            y = top + height - (i + 1) * cell_h
            parts.append(
                f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(cell_w + 0.5)}" '
                f'height="{_fmt(cell_h + 0.5)}" fill="{_colormap(t)}"/>'
            )
    for k, (name, (color, xs, ys)) in enumerate((overlays or {}).items()):
        pts = " ".join(
            f"{_fmt(px(float(x)))},{_fmt(py(float(y)))}" for x, y in zip(xs, ys)
        )
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="3"/>'
        )
        parts.append(
            f'<text x="{_fmt(left + width - 220 + 120 * k)}" y="{_fmt(top - 8)}" font-size="22" '
            f'font-family="sans-serif" fill="{color}">{_escape(name)}</text>'
        )
    parts.append(
        f'<text x="{_fmt(left + width / 2)}" y="{_SIZE - 12}" font-size="24" '
        'font-family="sans-serif">xi (rad)</text>'
    )
    parts.append(
        f'<text x="16" y="{_fmt(top + height / 2)}" font-size="24" '
        'font-family="sans-serif" transform="rotate(-90 16 '
        f'{_fmt(top + height / 2)})">theta (rad)</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
