"""The Filippov sliding field on the torus and its inelastic closed form.

On the switching surface the sliding dynamics is the convex combination

    Zs(p) = (X-h(p) X+(p) - X+h(p) X-(p)) / (X-h(p) - X+h(p)).

For an inelastic linear pair the denominator identity X-h = -X+h collapses
this to the arithmetic mean (X+ + X-)/2, which by the coefficient relations
is the rigid rotation (-w y, w x, 0) with w = (a21 + b21)/2.  Its trajectories
are the horizontal circles of the torus; for w != 0 they are closed with
period 2 pi / |w|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDenominatorError, DegenerateOmegaError
from .fields import EPS_SIGN, PiecewiseSystem, lie_derivative_h, require_inelastic
from .geometry import require_on_surface


def filippov_sliding(sys: PiecewiseSystem, p, eps: float = EPS_SIGN) -> np.ndarray:
    """Convex-combination sliding vector at a non-tangent surface point."""
    q = require_on_surface(p, sys.torus)
    lp = lie_derivative_h(sys.exterior, q, sys.torus, 1)
    lm = lie_derivative_h(sys.interior, q, sys.torus, 1)
    den = lm - lp
    if abs(den) < eps:
        raise DegenerateDenominatorError(
            f"|X-h - X+h| = {abs(den):.3e} < {eps} at {q.tolist()} (tangency point)"
        )
    return (lm * sys.exterior(q) - lp * sys.interior(q)) / den


@dataclass(frozen=True)
class SlidingClosedForm:
    """Rigid-rotation form (-w y, w x, 0) of the inelastic sliding field."""

    omega: float

    def __call__(self, p) -> np.ndarray:
        q = np.asarray(p, dtype=float)
        out = np.empty_like(q)
        out[..., 0] = -self.omega * q[..., 1]
        out[..., 1] = self.omega * q[..., 0]
        out[..., 2] = 0.0
        return out

    @property
    def period(self) -> float:
        if self.omega == 0.0:
            raise DegenerateOmegaError("omega = 0: the sliding field has no period")
        return 2.0 * math.pi / abs(self.omega)


def sliding_closed_form(sys: PiecewiseSystem) -> SlidingClosedForm:
    """Closed form of the sliding field; also the smooth extension through tangencies."""
    require_inelastic(sys)
    return SlidingClosedForm(omega=sys.omega)


@dataclass(frozen=True)
class ClosedOrbit:
    """One horizontal-circle orbit of the sliding field."""

    z_level: float
    radius: float
    period: float
    orientation: int


def sliding_orbit_through(sys: PiecewiseSystem, p) -> ClosedOrbit:
    """The closed sliding orbit through a torus point (requires omega != 0)."""
    require_inelastic(sys)
    q = require_on_surface(p, sys.torus)
    omega = sys.omega
    if omega == 0.0:
        raise DegenerateOmegaError("omega = 0: every torus point is a sliding equilibrium")
    return ClosedOrbit(
        z_level=float(q[2]),
        radius=float(math.hypot(q[0], q[1])),
        period=2.0 * math.pi / abs(omega),
        orientation=1 if omega > 0 else -1,
    )
