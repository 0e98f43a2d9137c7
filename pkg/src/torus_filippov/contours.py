"""Zero-curve extraction for the tangency function on the torus chart.

Evaluates g(u, v) = X+h(torus_point(u, v)) on a periodic grid and extracts
the closed curves of {g = 0} by marching squares with linear interpolation.
Two departures from the textbook algorithm are needed because g is a product
of low-degree factors rather than a generic level function:

* transversal self-crossings of {g = 0} (where g and grad g vanish together)
  show up as ambiguous saddle cells; those are detected by a Newton search
  for the critical point and resolved straight through, so each analytic
  branch stays one closed curve instead of being rerouted;
* even-multiplicity curves (g touches zero without changing sign) produce no
  sign changes at all; a second pass locates interior extrema of g along
  grid edges whose refined value is zero to tolerance.

Vertices are Newton-projected onto {g = 0} before being mapped to ambient
space, and loops are returned in decreasing order of ambient length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ._poly import Poly3
from .errors import GridTooCoarseError
from .fields import PiecewiseSystem, lie_derivative_poly
from .geometry import TorusSpec, torus_point

# fraction of a cell by which grid nodes are offset; keeps the axis-aligned
# curves of the analytic cases away from both nodes and cell centers
_NODE_OFFSET = 0.25

_GRAZE_PREFILTER = 1e-2   # relative |g| gate for candidate grazing edges
_GRAZE_MODEL_GATE = 1e-4  # relative gate on the Hermite-model extremum
_GRAZE_ACCEPT = 1e-7      # relative |g| at a refined extremum to accept
_CROSSING_ACCEPT = 1e-7   # relative |g| at a critical point to call it a crossing


@dataclass(frozen=True)
class DegenerateEverywhereTangent:
    """X+h vanishes identically: the whole torus is tangency points."""


@dataclass
class ContourPolyline:
    """One closed zero curve: chart vertices, ambient vertices, arc length."""

    uv: np.ndarray
    points: np.ndarray
    grazing: bool = False
    length: float = field(init=False)

    def __post_init__(self):
        closed = np.vstack([self.points, self.points[:1]])
        self.length = float(np.sum(np.linalg.norm(np.diff(closed, axis=0), axis=1)))


class _Compiled:
    """Batched evaluator for [g, dF/dx, dF/dy, dF/dz] at ambient points."""

    def __init__(self, polys: list[Poly3]):
        exps: list[tuple[int, int, int]] = []
        cols: list[int] = []
        coeffs: list[float] = []
        for col, poly in enumerate(polys):
            for key, c in poly.terms.items():
                exps.append(key)
                cols.append(col)
                coeffs.append(c)
        self.n_out = len(polys)
        self.exps = np.array(exps, dtype=float) if exps else np.zeros((0, 3))
        self.weights = np.zeros((len(exps), self.n_out))
        self.weights[np.arange(len(exps)), cols] = coeffs

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        p = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.exps.shape[0] == 0:
            return np.zeros((p.shape[0], self.n_out))
        mono = np.prod(p[:, None, :] ** self.exps[None, :, :], axis=2)
        return mono @ self.weights


class _ChartField:
    """g and its chart gradient (g_u, g_v) from the ambient polynomial."""

    def __init__(self, poly: Poly3, torus: TorusSpec):
        self.torus = torus
        gx, gy, gz = poly.gradient()
        self.eval = _Compiled([poly, gx, gy, gz])

    def value_grad(self, u, v):
        """Arrays g, g_u, g_v at chart points (broadcast over u, v)."""
        uu, vv = np.broadcast_arrays(
            np.atleast_1d(np.asarray(u, dtype=float)), np.atleast_1d(np.asarray(v, dtype=float))
        )
        shape = uu.shape
        uu = uu.ravel()
        vv = vv.ravel()
        pts = torus_point(uu, vv, self.torus).reshape(-1, 3)
        vals = self.eval(pts)
        g = vals[:, 0]
        grad = vals[:, 1:4]
        R, r = self.torus.R, self.torus.r
        ring = R + r * np.cos(vv)
        cu, su = np.cos(uu), np.sin(uu)
        cv, sv = np.cos(vv), np.sin(vv)
        pu = np.stack([-ring * su, ring * cu, np.zeros_like(ring)], axis=-1)
        pv = np.stack([-r * sv * cu, -r * sv * su, r * cv], axis=-1)
        gu = np.sum(grad * pu, axis=-1)
        gv = np.sum(grad * pv, axis=-1)
        return g.reshape(shape), gu.reshape(shape), gv.reshape(shape)

    def value(self, u, v):
        return self.value_grad(u, v)[0]


def _newton_project(fieldf: _ChartField, u, v, steps: int = 2):
    """Newton steps toward {g = 0} along the chart gradient (vectorized)."""
    uu = np.array(u, dtype=float)
    vv = np.array(v, dtype=float)
    for _ in range(steps):
        g, gu, gv = fieldf.value_grad(uu, vv)
        norm2 = gu * gu + gv * gv
        scale = np.where(norm2 > 0.0, g / np.where(norm2 > 0.0, norm2, 1.0), 0.0)
        uu = uu - scale * gu
        vv = vv - scale * gv
    return uu, vv


def _grad_at(fieldf: _ChartField, u: float, v: float) -> tuple[float, float]:
    _, gu, gv = fieldf.value_grad(u, v)
    return float(gu[0]), float(gv[0])


def _critical_point(fieldf: _ChartField, u0: float, v0: float, h: float):
    """Newton search for grad g = 0 from (u0, v0); Hessian by differencing."""
    u, v = float(u0), float(v0)
    step = 1e-6
    H = np.eye(2)
    for _ in range(20):
        gu, gv = _grad_at(fieldf, u, v)
        gu_du, gv_du = _grad_at(fieldf, u + step, v)
        gu_dv, gv_dv = _grad_at(fieldf, u, v + step)
        H = np.array(
            [
                [(gu_du - gu) / step, (gu_dv - gu) / step],
                [(gv_du - gv) / step, (gv_dv - gv) / step],
            ]
        )
        H = 0.5 * (H + H.T)
        try:
            delta = np.linalg.solve(H, np.array([gu, gv]))
        except np.linalg.LinAlgError:
            return None
        u -= float(delta[0])
        v -= float(delta[1])
        if abs(u - u0) > 2.0 * h or abs(v - v0) > 2.0 * h:
            return None
        if float(np.hypot(*delta)) < 1e-12:
            break
    g = float(fieldf.value(u, v)[0])
    return u, v, g, H


def _saddle_directions(H: np.ndarray):
    """The two line directions of {d^T H d = 0} for an indefinite 2x2 H."""
    evals, evecs = np.linalg.eigh(H)
    if not (evals[0] < 0.0 < evals[1]):
        return None
    slope = math.sqrt(evals[1] / -evals[0])
    d1 = evecs @ np.array([1.0, slope])
    d2 = evecs @ np.array([1.0, -slope])
    return d1 / np.linalg.norm(d1), d2 / np.linalg.norm(d2)


def numerical_tangency_contours(
    sys: PiecewiseSystem, n_u: int = 256, n_v: int = 256
) -> list[ContourPolyline] | DegenerateEverywhereTangent:
    """Closed zero curves of X+h on the torus, longest first."""
    if n_u < 16 or n_v < 16:
        raise GridTooCoarseError(f"need at least 16 cells per dimension, got {n_u}x{n_v}")

    poly = lie_derivative_poly(sys.exterior, sys.torus, 1)
    coeff_scale = max(1.0, float(np.max(np.abs(sys.A))))
    if poly.is_zero(tol=1e-12 * coeff_scale):
        return DegenerateEverywhereTangent()

    fieldf = _ChartField(poly, sys.torus)
    du = 2.0 * math.pi / n_u
    dv = 2.0 * math.pi / n_v
    u_nodes = (np.arange(n_u) + _NODE_OFFSET) * du
    v_nodes = (np.arange(n_v) + _NODE_OFFSET) * dv
    G, Gu, Gv = fieldf.value_grad(u_nodes[:, None], v_nodes[None, :])
    scale = float(np.max(np.abs(G)))
    if scale == 0.0:
        return DegenerateEverywhereTangent()

    pos = G > 0.0  # exact zeros count as the negative side; offset avoids them
    # edge keys: ("u", i, j) joins (i, j)-(i+1, j); ("v", i, j) joins (i, j)-(i, j+1)
    crossings: dict[tuple, tuple[float, float]] = {}
    grazing_nodes: dict[tuple, tuple[float, float]] = {}

    u_change = pos != np.roll(pos, -1, axis=0)
    v_change = pos != np.roll(pos, -1, axis=1)

    g_right = np.roll(G, -1, axis=0)
    g_up = np.roll(G, -1, axis=1)
    for i, j in zip(*np.nonzero(u_change)):
        g0, g1 = G[i, j], g_right[i, j]
        t = g0 / (g0 - g1)
        crossings[("u", int(i), int(j))] = (u_nodes[i] + t * du, v_nodes[j])
    for i, j in zip(*np.nonzero(v_change)):
        g0, g1 = G[i, j], g_up[i, j]
        t = g0 / (g0 - g1)
        crossings[("v", int(i), int(j))] = (u_nodes[i], v_nodes[j] + t * dv)

    _collect_grazing(
        fieldf, G, Gu, Gv, u_nodes, v_nodes, du, dv, u_change, v_change, scale, grazing_nodes
    )

    segments = _build_segments(
        fieldf, G, pos, crossings, grazing_nodes, u_nodes, v_nodes, du, dv, scale
    )
    loops = _walk_loops(segments)

    out: list[ContourPolyline] = []
    for keys in loops:
        grazing = keys[0] in grazing_nodes
        uv = np.array([grazing_nodes[k] if k in grazing_nodes else crossings[k] for k in keys])
        if not grazing:
            uu, vv = _newton_project(fieldf, uv[:, 0], uv[:, 1])
            uv = np.stack([uu, vv], axis=-1)
        uv = np.mod(uv, 2.0 * math.pi)
        pts = torus_point(uv[:, 0], uv[:, 1], sys.torus)
        out.append(ContourPolyline(uv=uv, points=pts, grazing=grazing))
    out.sort(key=lambda c: -c.length)
    return out


def _collect_grazing(fieldf, G, Gu, Gv, u_nodes, v_nodes, du, dv, u_change, v_change, scale, found):
    """Edges where g has an interior extremum that touches zero."""
    small = np.minimum(np.abs(G), np.abs(np.roll(G, -1, axis=0))) < _GRAZE_PREFILTER * scale
    cand_u = (~u_change) & small & (np.signbit(Gu) != np.signbit(np.roll(Gu, -1, axis=0)))
    small_v = np.minimum(np.abs(G), np.abs(np.roll(G, -1, axis=1))) < _GRAZE_PREFILTER * scale
    cand_v = (~v_change) & small_v & (np.signbit(Gv) != np.signbit(np.roll(Gv, -1, axis=1)))

    def refine(axis, i, j):
        if axis == "u":
            g0, g1 = G[i, j], G[(i + 1) % G.shape[0], j]
            d0 = Gu[i, j] * du
            d1 = Gu[(i + 1) % G.shape[0], j] * du
            at = lambda t: (u_nodes[i] + t * du, v_nodes[j])
            deriv_index = 1
        else:
            g0, g1 = G[i, j], G[i, (j + 1) % G.shape[1]]
            d0 = Gv[i, j] * dv
            d1 = Gv[i, (j + 1) % G.shape[1]] * dv
            at = lambda t: (u_nodes[i], v_nodes[j] + t * dv)
            deriv_index = 2
        t_ext, val_model = _hermite_extremum(g0, g1, d0, d1)
        if t_ext is None or abs(val_model) > _GRAZE_MODEL_GATE * scale:
            return None

        def phi(t):
            u, v = at(t)
            return float(fieldf.value_grad(u, v)[deriv_index][0])

        p0, p1 = phi(0.0), phi(1.0)
        if p0 == 0.0 or p1 == 0.0 or np.sign(p0) == np.sign(p1):
            return None
        t_star = brentq(phi, 0.0, 1.0, xtol=1e-13)
        u, v = at(t_star)
        if abs(float(fieldf.value(u, v)[0])) > _GRAZE_ACCEPT * scale:
            return None
        return (u, v)

    for i, j in zip(*np.nonzero(cand_u)):
        hit = refine("u", int(i), int(j))
        if hit is not None:
            found[("u", int(i), int(j))] = hit
    for i, j in zip(*np.nonzero(cand_v)):
        hit = refine("v", int(i), int(j))
        if hit is not None:
            found[("v", int(i), int(j))] = hit


def _hermite_extremum(g0, g1, d0, d1):
    """Interior extremum (t, value) of the cubic Hermite model, if any."""
    # H(t) = a t^3 + b t^2 + c t + d on [0, 1]
    a = 2.0 * (g0 - g1) + d0 + d1
    b = 3.0 * (g1 - g0) - 2.0 * d0 - d1
    c = d0
    disc = b * b - 3.0 * a * c
    if disc < 0.0:
        return None, None
    roots = []
    if abs(a) < 1e-300:
        if b != 0.0:
            roots = [-c / (2.0 * b)]
    else:
        sq = math.sqrt(disc)
        roots = [(-b + sq) / (3.0 * a), (-b - sq) / (3.0 * a)]
    best = None
    for t in roots:
        if 0.0 < t < 1.0:
            val = ((a * t + b) * t + c) * t + g0
            if best is None or abs(val) < abs(best[1]):
                best = (t, val)
    if best is None:
        return None, None
    return best


def _build_segments(fieldf, G, pos, crossings, grazing_nodes, u_nodes, v_nodes, du, dv, scale):
    """Pair edge nodes within each cell into contour segments."""
    n_u, n_v = G.shape
    cell_nodes: dict[tuple[int, int], dict[str, list[tuple]]] = {}

    def register(key, kind_map):
        axis, i, j = key
        if axis == "u":
            cells = [(i, j), (i, (j - 1) % n_v)]
            sides = ["S" if c == (i, j) else "N" for c in cells]
        else:
            cells = [(i, j), ((i - 1) % n_u, j)]
            sides = ["W" if c == (i, j) else "E" for c in cells]
        for cell, side in zip(cells, sides):
            cell_nodes.setdefault(cell, {"odd": [], "graze": []})[kind_map].append((side, key))

    for key in crossings:
        register(key, "odd")
    for key in grazing_nodes:
        register(key, "graze")

    segments: list[tuple[tuple, tuple]] = []
    for (ci, cj), groups in sorted(cell_nodes.items()):
        for kind, nodes in (("odd", groups["odd"]), ("graze", groups["graze"])):
            if len(nodes) == 2:
                segments.append((nodes[0][1], nodes[1][1]))
            elif len(nodes) == 4:
                segments.extend(
                    _resolve_four(fieldf, G, pos, nodes, ci, cj, u_nodes, v_nodes, du, dv, scale,
                                  crossings if kind == "odd" else grazing_nodes)
                )
            # 1 or 3 nodes: degenerate detection; the walk drops open chains
    return segments


def _resolve_four(fieldf, G, pos, nodes, ci, cj, u_nodes, v_nodes, du, dv, scale, positions):
    """Disambiguate a cell crossed twice: true crossing vs saddle level set."""
    by_side = {side: key for side, key in nodes}
    center_u = u_nodes[ci] + 0.5 * du
    center_v = v_nodes[cj] + 0.5 * dv
    crit = _critical_point(fieldf, center_u, center_v, max(du, dv))
    if crit is not None and abs(crit[2]) <= _CROSSING_ACCEPT * scale:
        dirs = _saddle_directions(crit[3])
        if dirs is not None:
            pairing = _pair_by_directions(by_side, positions, crit[0], crit[1], dirs)
            if pairing is not None:
                return pairing
        # fall back to the axis-aligned straight-through resolution
        if set(by_side) == {"N", "S", "E", "W"}:
            return [(by_side["S"], by_side["N"]), (by_side["W"], by_side["E"])]
    # genuine saddle: join each isolated corner's two adjacent edges, using
    # the center sign to pick which diagonal pair is isolated
    g_center = float(fieldf.value(center_u, center_v)[0])
    center_pos = g_center > 0.0
    sw = pos[ci, cj]
    if set(by_side) == {"N", "S", "E", "W"}:
        if sw == center_pos:
            return [(by_side["S"], by_side["E"]), (by_side["N"], by_side["W"])]
        return [(by_side["S"], by_side["W"]), (by_side["N"], by_side["E"])]
    # irregular configuration: pair nodes by proximity as a last resort
    keys = [key for _, key in nodes]
    return [(keys[0], keys[1]), (keys[2], keys[3])]


def _pair_by_directions(by_side, positions, cu, cv, dirs):
    """Assign the four edge nodes to the two branch directions through (cu, cv)."""
    buckets: dict[int, list] = {0: [], 1: []}
    for side, key in by_side.items():
        u, v = positions[key]
        w = np.array([u - cu, v - cv])
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return None
        w /= norm
        scores = [abs(float(w @ d)) for d in dirs]
        buckets[int(np.argmax(scores))].append(key)
    if len(buckets[0]) == 2 and len(buckets[1]) == 2:
        return [tuple(buckets[0]), tuple(buckets[1])]
    return None


def _walk_loops(segments):
    """Chain segments into closed loops of edge keys (deterministic order)."""
    adjacency: dict[tuple, list[tuple]] = {}
    for a, b in segments:
        adjacency.setdefault(a, []).append(b)
        adjacency.setdefault(b, []).append(a)

    visited: set[tuple] = set()
    loops: list[list[tuple]] = []
    for start in sorted(adjacency):
        if start in visited or len(adjacency[start]) != 2:
            continue
        loop = [start]
        visited.add(start)
        prev, cur = start, min(adjacency[start])
        closed = False
        while True:
            if cur == start:
                closed = True
                break
            if cur in visited or len(adjacency.get(cur, ())) != 2:
                break
            loop.append(cur)
            visited.add(cur)
            nxt = [k for k in adjacency[cur] if k != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
        if closed and len(loop) >= 4:
            loops.append(loop)
    return loops
