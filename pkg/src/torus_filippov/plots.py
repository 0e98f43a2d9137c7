"""Matplotlib figure rendering for the CLI report path.

Figures mirror the SVG chart content: tangency components, region maps, and
trajectories drawn on the (u, v) chart of the torus, written to files next to
the delimited outputs.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import ListedColormap
from matplotlib.patches import Patch

from .geometry import chart_coordinates

_TWO_PI = 2.0 * math.pi

_KIND_COLORS = {
    "horizontal_circle": "tab:blue",
    "meridian_section": "tab:green",
    "sphere_circle": "tab:purple",
    "polyline": "tab:red",
}
_MODE_COLORS = {"free+": "tab:blue", "free-": "tab:green", "slide": "tab:red"}
_REGION_ORDER = ["sliding", "escaping", "tangency", "crossing"]
_REGION_COLORS = ["#aec7e8", "#ff9896", "#333333", "#ffdd57"]


def _chart_axes(title: str):
    fig, ax = plt.subplots(figsize=(6.0, 6.0))
    ax.set_xlim(0.0, _TWO_PI)
    ax.set_ylim(0.0, _TWO_PI)
    ax.set_xlabel("u")
    ax.set_ylabel("v")
    ax.set_title(title)
    ax.set_aspect("equal")
    return fig, ax


def _plot_wrapped(ax, uv: np.ndarray, close: bool = False, **kwargs):
    pts = np.asarray(uv, dtype=float)
    if close and len(pts) > 1:
        pts = np.vstack([pts, pts[:1]])
    breaks = np.nonzero(np.any(np.abs(np.diff(pts, axis=0)) > math.pi, axis=1))[0]
    start = 0
    for b in np.append(breaks + 1, len(pts)):
        if b - start >= 2:
            ax.plot(pts[start:b, 0], pts[start:b, 1], **kwargs)
            kwargs.pop("label", None)
        start = b


def figure_classification(classification, torus):
    fig, ax = _chart_axes(f"tangency set: {classification.case.value}")
    seen = set()
    for comp in classification.components:
        if hasattr(comp, "uv"):
            kind = "polyline"
            uv = comp.uv
        else:
            kind = comp.kind
            uv = chart_coordinates(comp.sample(256), torus)
        label = None if kind in seen else kind
        seen.add(kind)
        _plot_wrapped(ax, uv, close=True, color=_KIND_COLORS[kind], lw=1.5, label=label)
    if seen:
        ax.legend(loc="upper right", fontsize=8)
    return fig


def figure_regions(u: np.ndarray, v: np.ndarray, kinds):
    fig, ax = _chart_axes("surface regions")
    codes = np.vectorize(lambda k: _REGION_ORDER.index(k.value))(kinds)
    du = u[1] - u[0] if len(u) > 1 else _TWO_PI
    dv = v[1] - v[0] if len(v) > 1 else _TWO_PI
    edges_u = np.append(u, u[-1] + du)
    edges_v = np.append(v, v[-1] + dv)
    ax.pcolormesh(
        edges_u,
        edges_v,
        codes.T,
        cmap=ListedColormap(_REGION_COLORS),
        vmin=-0.5,
        vmax=3.5,
        shading="flat",
    )
    present = sorted({int(c) for c in codes.ravel()})
    ax.legend(
        handles=[Patch(facecolor=_REGION_COLORS[i], label=_REGION_ORDER[i]) for i in present],
        loc="upper right",
        fontsize=8,
    )
    return fig


def figure_trajectory(trajectory, torus):
    fig, ax = _chart_axes("trajectory (u, v) chart")
    seen = set()
    for seg in trajectory.segments:
        uv = chart_coordinates(seg.points, torus)
        mode = seg.mode.value
        label = None if mode in seen else mode
        seen.add(mode)
        _plot_wrapped(ax, uv, color=_MODE_COLORS[mode], lw=1.0, label=label)
    if seen:
        ax.legend(loc="upper right", fontsize=8)
    return fig


def save_figure(fig, path: str, dpi: int = 150) -> None:
    fig.savefig(path, dpi=dpi, bbox_inches="tight")
    plt.close(fig)
