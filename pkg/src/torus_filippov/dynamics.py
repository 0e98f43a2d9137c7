"""Hybrid trajectories: exact linear free flight plus on-surface sliding.

Free flight uses the closed form x(t) = exp(M t) x0 (the fields are linear,
so all integration error is moved into event location); the first root of
h(x(t)) is bracketed by dense sampling and refined by bisection, with a
secondary minimum search catching grazing contacts.  Sliding integrates the
smooth extension (X+ + X-)/2 with fixed-step RK4, re-projecting every step
onto the torus along grad h.  The simulator alternates the two, classifying
each surface contact by the sign table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.linalg import expm

from .errors import DegenerateOmegaError, FilippovConsistencyError
from .fields import (
    EPS_SIGN,
    LinearField,
    PiecewiseSystem,
    _classify_from_derivatives,
    RegionKind,
    lie_derivative_h,
    require_inelastic,
)
from .geometry import (
    CANONICAL,
    EPS_SURFACE,
    TorusSpec,
    h_gradient,
    h_value,
    require_on_surface,
)

GRAZE_THRESHOLD = 1e-10
EVENT_DT_TOL = 1e-12


class SegmentMode(Enum):
    FREE_EXTERIOR = "free+"
    FREE_INTERIOR = "free-"
    SLIDING = "slide"


class TerminalEvent(Enum):
    REACHED_TMAX = "reached_tmax"
    HIT_SURFACE = "hit_surface"
    DEGENERATE_STOP = "degenerate_stop"


@dataclass
class TrajectorySegment:
    mode: SegmentMode
    t_start: float
    t_end: float
    times: np.ndarray
    points: np.ndarray
    terminal_event: TerminalEvent
    nondeterministic: bool = False

    @property
    def end_point(self) -> np.ndarray:
        return self.points[-1]


@dataclass
class Trajectory:
    segments: list[TrajectorySegment]
    system: PiecewiseSystem
    diagnostics: list[str] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Free flight
# ---------------------------------------------------------------------------

def free_flight(
    X: LinearField,
    x0,
    t_max: float,
    torus: TorusSpec = CANONICAL,
    side: int | None = None,
) -> TrajectorySegment:
    """Propagate x(t) = exp(M t) x0 until the surface event or t_max."""
    if t_max < 0.0:
        raise ValueError("t_max must be >= 0")
    p0 = np.asarray(x0, dtype=float)
    h0 = h_value(p0, torus)
    if side is None:
        side = 1 if h0 >= 0.0 else -1
    mode = SegmentMode.FREE_EXTERIOR if side > 0 else SegmentMode.FREE_INTERIOR

    if t_max == 0.0:
        return TrajectorySegment(
            mode=mode,
            t_start=0.0,
            t_end=0.0,
            times=np.array([0.0]),
            points=p0[None, :].copy(),
            terminal_event=TerminalEvent.REACHED_TMAX,
        )

    M = X.matrix
    norm = float(np.linalg.norm(M, 2))
    step = min(0.01, 0.1 / norm) if norm > 0.0 else 0.01
    n = max(1, int(math.ceil(t_max / step)))
    times = np.linspace(0.0, t_max, n + 1)

    def flow(t: float) -> np.ndarray:
        return expm(M * t) @ p0

    points = np.array([flow(t) for t in times])
    hs = h_value(points, torus)

    # ignore the on-surface start when departing from the switching manifold
    k0 = 0
    while k0 < len(hs) and abs(hs[k0]) <= 1e-12:
        k0 += 1

    def h_of_t(t: float) -> float:
        return h_value(flow(t), torus)

    event_t = None
    for k in range(k0, len(hs) - 1):
        a, b = hs[k], hs[k + 1]
        if b == 0.0:
            event_t = times[k + 1]
            break
        if a * b < 0.0:
            event_t = _bisect_root(h_of_t, times[k], times[k + 1])
            break
        if k + 2 < len(hs) and abs(b) < abs(a) and abs(b) <= abs(hs[k + 2]):
            graze = _refine_grazing(X, p0, torus, times[k], times[k + 2])
            if graze is not None:
                event_t = graze
                break

    if event_t is None:
        return TrajectorySegment(
            mode=mode,
            t_start=0.0,
            t_end=t_max,
            times=times,
            points=points,
            terminal_event=TerminalEvent.REACHED_TMAX,
        )

    keep = times < event_t - EVENT_DT_TOL
    seg_times = np.append(times[keep], event_t)
    seg_points = np.vstack([points[keep], flow(event_t)])
    return TrajectorySegment(
        mode=mode,
        t_start=0.0,
        t_end=float(event_t),
        times=seg_times,
        points=seg_points,
        terminal_event=TerminalEvent.HIT_SURFACE,
    )


def _bisect_root(f, lo: float, hi: float) -> float:
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    for _ in range(200):
        if hi - lo < EVENT_DT_TOL:
            break
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0.0:
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    # one Newton polish in t pushes |h| at the event to rounding level
    t = 0.5 * (lo + hi)
    dt = min(1e-7, 0.5 * (hi - lo) + 1e-13)
    slope = (f(t + dt) - f(t - dt)) / (2.0 * dt)
    if slope != 0.0 and math.isfinite(slope):
        t_new = t - f(t) / slope
        if lo - 1e-9 <= t_new <= hi + 1e-9:
            t = t_new
    return t


def _refine_grazing(X, p0, torus, t_lo, t_hi):
    """Locate a touch of h = 0 without sign change inside [t_lo, t_hi]."""
    M = X.matrix

    def dh(t: float) -> float:
        x = expm(M * t) @ p0
        return float(np.dot(h_gradient(x, torus), M @ x))

    a, b = dh(t_lo), dh(t_hi)
    if a == 0.0:
        t_ext = t_lo
    elif b == 0.0 or a * b > 0.0:
        return None
    else:
        t_ext = _bisect_root(dh, t_lo, t_hi)
    if abs(h_value(expm(M * t_ext) @ p0, torus)) < GRAZE_THRESHOLD:
        return t_ext
    return None


# ---------------------------------------------------------------------------
# Sliding
# ---------------------------------------------------------------------------

def _project_to_torus(p: np.ndarray, torus: TorusSpec) -> np.ndarray:
    for _ in range(2):
        hv = h_value(p, torus)
        if hv == 0.0:
            return p
        g = h_gradient(p, torus)
        p = p - (hv / float(np.dot(g, g))) * g
    return p


def slide_flow(sys: PiecewiseSystem, p0, t_max: float) -> TrajectorySegment:
    """Integrate the sliding extension on the torus with RK4 + projection."""
    require_inelastic(sys)
    p = require_on_surface(p0, sys.torus).astype(float)
    if t_max < 0.0:
        raise ValueError("t_max must be >= 0")
    omega = sys.omega

    if omega == 0.0:
        return TrajectorySegment(
            mode=SegmentMode.SLIDING,
            t_start=0.0,
            t_end=0.0,
            times=np.array([0.0]),
            points=p[None, :].copy(),
            terminal_event=TerminalEvent.DEGENERATE_STOP,
        )
    if t_max == 0.0:
        return TrajectorySegment(
            mode=SegmentMode.SLIDING,
            t_start=0.0,
            t_end=0.0,
            times=np.array([0.0]),
            points=p[None, :].copy(),
            terminal_event=TerminalEvent.REACHED_TMAX,
        )

    mean = 0.5 * (sys.A + sys.B)
    n_steps = max(1, int(math.ceil(t_max * abs(omega) / 1e-3)))
    dt = t_max / n_steps

    times = np.empty(n_steps + 1)
    points = np.empty((n_steps + 1, 3))
    times[0] = 0.0
    points[0] = p
    exterior = sys.A
    escaping = False
    for k in range(n_steps):
        p = _rk4_step(mean, p, dt)
        p = _project_to_torus(p, sys.torus)
        times[k + 1] = (k + 1) * dt
        points[k + 1] = p
        if not escaping:
            lp = float(np.dot(h_gradient(p, sys.torus), exterior @ p))
            if lp > EPS_SIGN:
                escaping = True
    times[-1] = t_max

    return TrajectorySegment(
        mode=SegmentMode.SLIDING,
        t_start=0.0,
        t_end=t_max,
        times=times,
        points=points,
        terminal_event=TerminalEvent.REACHED_TMAX,
        nondeterministic=escaping,
    )


def _rk4_step(mat: np.ndarray, p: np.ndarray, dt: float) -> np.ndarray:
    k1 = mat @ p
    k2 = mat @ (p + 0.5 * dt * k1)
    k3 = mat @ (p + 0.5 * dt * k2)
    k4 = mat @ (p + dt * k3)
    return p + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


# ---------------------------------------------------------------------------
# Hybrid simulation
# ---------------------------------------------------------------------------

def simulate(sys: PiecewiseSystem, x0, t_max: float) -> Trajectory:
    """Alternate free flight and sliding from x0 for model time t_max."""
    require_inelastic(sys)
    if t_max < 0.0:
        raise ValueError("t_max must be >= 0")
    p = np.asarray(x0, dtype=float)
    segments: list[TrajectorySegment] = []
    diagnostics: list[str] = []

    t = 0.0
    side_hint: int | None = None
    while True:
        remaining = t_max - t
        hv = h_value(p, sys.torus)

        if abs(hv) < EPS_SURFACE:
            lp = lie_derivative_h(sys.exterior, p, sys.torus, 1)
            lm = lie_derivative_h(sys.interior, p, sys.torus, 1)
            region = _classify_from_derivatives(lp, lm)
            if region is RegionKind.CROSSING:
                raise FilippovConsistencyError(
                    f"crossing region reached on an inelastic run at {p.tolist()}"
                )
            if region is RegionKind.TANGENCY:
                depart = _fold_departure(sys, p, side_hint)
                if depart is not None:
                    seg = free_flight(
                        sys.exterior if depart > 0 else sys.interior,
                        p,
                        remaining,
                        sys.torus,
                        side=depart,
                    )
                else:
                    seg = slide_flow(sys, p, remaining)
            else:
                if region is RegionKind.ESCAPING:
                    diagnostics.append("NonDeterministicEscape")
                seg = slide_flow(sys, p, remaining)
                if seg.nondeterministic and "NonDeterministicEscape" not in diagnostics:
                    diagnostics.append("NonDeterministicEscape")
        else:
            side = 1 if hv > 0.0 else -1
            seg = free_flight(
                sys.exterior if side > 0 else sys.interior, p, remaining, sys.torus, side=side
            )

        seg.times = seg.times + t
        seg.t_start += t
        seg.t_end += t
        segments.append(seg)
        t = seg.t_end
        p = seg.end_point
        side_hint = {SegmentMode.FREE_EXTERIOR: 1, SegmentMode.FREE_INTERIOR: -1}.get(seg.mode)

        if seg.terminal_event is not TerminalEvent.HIT_SURFACE:
            break
        if t >= t_max - EVENT_DT_TOL:
            break
        if len(segments) > 10_000:
            raise FilippovConsistencyError("segment budget exceeded; simulation is not advancing")

    return Trajectory(segments=segments, system=sys, diagnostics=diagnostics)


def _fold_departure(sys: PiecewiseSystem, p, side_hint: int | None) -> int | None:
    """Side whose quadratic contact indicates departure, if any."""
    d2_ext = lie_derivative_h(sys.exterior, p, sys.torus, 2)
    d2_int = lie_derivative_h(sys.interior, p, sys.torus, 2)
    ext_departs = d2_ext > EPS_SIGN
    int_departs = d2_int < -EPS_SIGN
    if side_hint is not None and side_hint > 0 and ext_departs:
        return 1
    if side_hint is not None and side_hint < 0 and int_departs:
        return -1
    if side_hint is None:
        if ext_departs:
            return 1
        if int_departs:
            return -1
    return None


# ---------------------------------------------------------------------------
# Orbit closure (executable form of the closed-trajectory theorem)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitClosure:
    closed: bool
    measured_period: float
    return_gap: float


def orbit_closure_check(sys: PiecewiseSystem, p0) -> OrbitClosure:
    """Integrate one predicted sliding period and measure the actual return."""
    require_inelastic(sys)
    start = require_on_surface(p0, sys.torus).astype(float)
    omega = sys.omega
    if omega == 0.0:
        raise DegenerateOmegaError("omega = 0: no sliding period to measure")

    predicted = 2.0 * math.pi / abs(omega)
    mean = 0.5 * (sys.A + sys.B)
    dt = 1e-3 / abs(omega)

    def advance(p: np.ndarray, step: float) -> np.ndarray:
        return _project_to_torus(_rk4_step(mean, p, step), sys.torus)

    p = start.copy()
    t = 0.0
    swept = 0.0
    target = 2.0 * math.pi
    t_cap = 1.5 * predicted
    while t < t_cap:
        q = advance(p, dt)
        delta = math.atan2(p[0] * q[1] - p[1] * q[0], p[0] * q[0] + p[1] * q[1])
        if abs(swept) + abs(delta) >= target:
            break
        swept += delta
        p, t = q, t + dt
    else:
        return OrbitClosure(closed=False, measured_period=float("nan"), return_gap=float("inf"))

    # refine the section return inside the final step by bisection on the substep
    lo, hi = 0.0, dt
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        q = advance(p, mid)
        delta = math.atan2(p[0] * q[1] - p[1] * q[0], p[0] * q[0] + p[1] * q[1])
        if abs(swept + delta) >= target:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-15 * max(1.0, dt):
            break
    t_star = 0.5 * (lo + hi)
    end = advance(p, t_star)
    measured = t + t_star
    gap = float(np.linalg.norm(end - start))
    closed = gap < 1e-6 and abs(measured - predicted) / predicted < 1e-6
    return OrbitClosure(closed=closed, measured_period=measured, return_gap=gap)
