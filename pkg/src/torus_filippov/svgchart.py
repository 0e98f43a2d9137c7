"""Direct SVG rendering of (u, v)-chart pictures, no plotting dependency.

Curves and region shadings live on the torus chart [0, 2pi)^2; paths are
split wherever they wrap around a chart seam.  Output is deterministic text.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import chart_coordinates

SIZE = 640
MARGIN = 46
TWO_PI = 2.0 * math.pi

KIND_COLORS = {
    "horizontal_circle": "#1f77b4",
    "meridian_section": "#2ca02c",
    "sphere_circle": "#9467bd",
    "polyline": "#d62728",
}
REGION_COLORS = {"sliding": "#aec7e8", "escaping": "#ff9896", "tangency": "#333333", "crossing": "#ffdd57"}
MODE_COLORS = {"free+": "#1f77b4", "free-": "#2ca02c", "slide": "#d62728"}


def _to_px(u: float, v: float) -> tuple[float, float]:
    span = SIZE - 2 * MARGIN
    x = MARGIN + span * (u / TWO_PI)
    y = SIZE - MARGIN - span * (v / TWO_PI)
    return x, y


def _path(uv: np.ndarray, color: str, width: float = 1.5, close: bool = False) -> str:
    """Polyline path element(s), split at chart seams."""
    pts = np.asarray(uv, dtype=float)
    if close and len(pts) > 1:
        pts = np.vstack([pts, pts[:1]])
    pieces: list[list[tuple[float, float]]] = [[]]
    prev = None
    for u, v in pts:
        if prev is not None and (abs(u - prev[0]) > math.pi or abs(v - prev[1]) > math.pi):
            pieces.append([])
        pieces[-1].append(_to_px(u, v))
        prev = (u, v)
    out = []
    for piece in pieces:
        if len(piece) < 2:
            continue
        d = "M " + " L ".join(f"{x:.3f} {y:.3f}" for x, y in piece)
        out.append(f'<path d="{d}" fill="none" stroke="{color}" stroke-width="{width}"/>')
    return "\n".join(out)


def _frame(title: str) -> list[str]:
    span = SIZE - 2 * MARGIN
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        f'<rect width="{SIZE}" height="{SIZE}" fill="white"/>',
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{span}" height="{span}" '
        'fill="none" stroke="#888" stroke-width="1"/>',
        f'<text x="{SIZE // 2}" y="{MARGIN - 14}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{title}</text>',
        f'<text x="{SIZE // 2}" y="{SIZE - 10}" text-anchor="middle" '
        'font-family="sans-serif" font-size="12">u</text>',
        f'<text x="14" y="{SIZE // 2}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="12" transform="rotate(-90 14 {SIZE // 2})">v</text>',
    ]
    return parts


def classification_svg(classification, torus) -> str:
    """Chart rendering of a tangency classification's components."""
    parts = _frame(f"tangency set: {classification.case.value}")
    for comp in classification.components:
        if hasattr(comp, "uv"):
            parts.append(_path(comp.uv, KIND_COLORS["polyline"], close=True))
        else:
            uv = chart_coordinates(comp.sample(256), torus)
            parts.append(_path(uv, KIND_COLORS.get(comp.kind, "#000"), close=True))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def regions_svg(u: np.ndarray, v: np.ndarray, kinds) -> str:
    """Cell shading of the region map on the chart."""
    parts = _frame("surface regions")
    n_u, n_v = kinds.shape
    span = SIZE - 2 * MARGIN
    cell_w = span / n_u
    cell_h = span / n_v
    for i in range(n_u):
        for j in range(n_v):
            color = REGION_COLORS.get(kinds[i, j].value, "#ffffff")
            x = MARGIN + span * (u[i] / TWO_PI)
            y = SIZE - MARGIN - span * (v[j] / TWO_PI) - cell_h
            parts.append(
                f'<rect x="{x:.3f}" y="{y:.3f}" width="{cell_w:.3f}" height="{cell_h:.3f}" '
                f'fill="{color}" stroke="none"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def trajectory_svg(trajectory, torus) -> str:
    """Chart rendering of a hybrid trajectory, colored by mode."""
    parts = _frame("trajectory (u, v) chart")
    for seg in trajectory.segments:
        uv = chart_coordinates(seg.points, torus)
        parts.append(_path(uv, MODE_COLORS[seg.mode.value], width=1.2))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
