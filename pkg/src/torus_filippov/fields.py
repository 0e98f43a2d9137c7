"""Linear vector fields over the switching torus.

A field is X(p) = M p for a real 3x3 matrix M.  The pair (interior X-,
exterior X+) is *inelastic* over the torus when X+h = -X-h identically on the
surface, which reduces to eight coefficient relations; ``derive_inelastic_b``
produces the unique interior matrix (up to its free b21 entry) from a given
exterior one.  This module also computes iterated Lie derivatives of h
exactly, splits X+h into its degree-2 part and (|p|^2 + 3)-multiple part, and
classifies surface points into sliding/escaping/crossing/tangency and contact
points into fold/cusp/higher order.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._poly import Poly3
from .errors import NotInelasticError
from .geometry import CANONICAL, TorusSpec, h_gradient, h_poly, require_on_surface

EPS_SIGN = 1e-9
EPS_COEFF = 1e-12


class LinearField:
    """Vector field X(p) = M p for a fixed 3x3 matrix."""

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        m = np.array(matrix, dtype=float)
        if m.shape != (3, 3):
            raise ValueError(f"linear field needs a 3x3 matrix, got shape {m.shape}")
        m.setflags(write=False)
        self.matrix = m

    def __call__(self, p) -> np.ndarray:
        q = np.asarray(p, dtype=float)
        return q @ self.matrix.T

    def __eq__(self, other) -> bool:
        return isinstance(other, LinearField) and np.array_equal(self.matrix, other.matrix)

    def __repr__(self) -> str:
        return f"LinearField({self.matrix.tolist()})"


@dataclass(frozen=True)
class PiecewiseSystem:
    """Interior field X- (h < 0), exterior field X+ (h > 0), and their torus."""

    interior: LinearField
    exterior: LinearField
    torus: TorusSpec = CANONICAL

    @property
    def A(self) -> np.ndarray:
        return self.exterior.matrix

    @property
    def B(self) -> np.ndarray:
        return self.interior.matrix

    @property
    def omega(self) -> float:
        """Angular velocity (a21 + b21)/2 of the inelastic sliding rotation."""
        return float(0.5 * (self.A[1, 0] + self.B[1, 0]))

    def mean_field(self, p) -> np.ndarray:
        """(X+ + X-)/2, the smooth extension of the sliding field."""
        q = np.asarray(p, dtype=float)
        return 0.5 * (q @ self.A.T + q @ self.B.T)


def derive_inelastic_b(A, b21: float) -> np.ndarray:
    """Interior matrix making (A, B) inelastic, with the free entry b21."""
    a = np.asarray(A, dtype=float)
    if a.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {a.shape}")
    b21 = float(b21)
    return np.array(
        [
            [-a[0, 0], -a[0, 1] - a[1, 0] - b21, -a[0, 2]],
            [b21, -a[1, 1], -a[1, 2]],
            [-a[2, 0], -a[2, 1], -a[2, 2]],
        ]
    )


def inelastic_system(A, b21: float, torus: TorusSpec = CANONICAL) -> PiecewiseSystem:
    """Piecewise system with exterior A and the derived inelastic interior."""
    return PiecewiseSystem(
        interior=LinearField(derive_inelastic_b(A, b21)),
        exterior=LinearField(A),
        torus=torus,
    )


def is_inelastic(sys: PiecewiseSystem, tol: float = EPS_COEFF) -> bool:
    """Coefficient-level check of X+h = -X-h on the torus.

    Checks the eight relations the identity reduces to, not sampled values.
    """
    a, b = sys.A, sys.B
    relations = (
        b[0, 0] + a[0, 0],
        b[1, 1] + a[1, 1],
        b[2, 2] + a[2, 2],
        (b[0, 1] + b[1, 0]) + (a[0, 1] + a[1, 0]),
        (b[0, 2] + b[2, 0]) + (a[0, 2] + a[2, 0]),
        (b[1, 2] + b[2, 1]) + (a[1, 2] + a[2, 1]),
        b[0, 2] + a[0, 2],
        b[1, 2] + a[1, 2],
    )
    return all(abs(r) <= tol for r in relations)


def require_inelastic(sys: PiecewiseSystem) -> None:
    if not is_inelastic(sys):
        raise NotInelasticError("fields do not satisfy the inelastic coefficient relations")


# ---------------------------------------------------------------------------
# Lie derivatives of h
# ---------------------------------------------------------------------------

_LIE_CACHE: dict[tuple[bytes, float, float, int], Poly3] = {}


def lie_derivative_poly(X: LinearField, torus: TorusSpec = CANONICAL, order: int = 1) -> Poly3:
    """The polynomial X^order h, built by exact symbolic differentiation."""
    if order < 1:
        raise ValueError("order must be >= 1")
    key = (X.matrix.tobytes(), torus.R, torus.r, order)
    cached = _LIE_CACHE.get(key)
    if cached is not None:
        return cached
    if order == 1:
        base = h_poly(torus)
    else:
        base = lie_derivative_poly(X, torus, order - 1)
    rows = [Poly3.linear(X.matrix[i]) for i in range(3)]
    out = Poly3()
    for i, partial in enumerate(base.gradient()):
        out = out + rows[i] * partial
    _LIE_CACHE[key] = out
    return out


def lie_derivative_h(X: LinearField, p, torus: TorusSpec = CANONICAL, order: int = 1):
    """X^order h(p) for order in {1, 2, 3}, evaluated exactly."""
    if order not in (1, 2, 3):
        raise ValueError(f"order must be 1, 2 or 3, got {order}")
    if order == 1:
        # <M p, grad h(p)>, vectorized; identical to the symbolic polynomial
        q = np.asarray(p, dtype=float)
        out = np.sum(X(q) * h_gradient(q, torus), axis=-1)
        return float(out) if q.ndim == 1 else out
    return lie_derivative_poly(X, torus, order)(p)


# ---------------------------------------------------------------------------
# Decomposition of X+h into q2 + 4(S + 3) Q2
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadraticForm:
    """c_xx x^2 + c_yy y^2 + c_zz z^2 + c_xy xy + c_xz xz + c_yz yz."""

    xx: float
    yy: float
    zz: float
    xy: float
    xz: float
    yz: float

    def __call__(self, p):
        q = np.asarray(p, dtype=float)
        x, y, z = q[..., 0], q[..., 1], q[..., 2]
        out = (
            self.xx * x * x
            + self.yy * y * y
            + self.zz * z * z
            + self.xy * x * y
            + self.xz * x * z
            + self.yz * y * z
        )
        return float(out) if q.ndim == 1 else out

    def is_zero(self, tol: float = EPS_COEFF) -> bool:
        return all(abs(c) <= tol for c in (self.xx, self.yy, self.zz, self.xy, self.xz, self.yz))

    def coefficients(self) -> dict[str, float]:
        return {"xx": self.xx, "yy": self.yy, "zz": self.zz, "xy": self.xy, "xz": self.xz, "yz": self.yz}


def q2_q4_decompose(A) -> tuple[QuadraticForm, QuadraticForm]:
    """Split X+h into (q2, Q2) with X+h = q2 + 4 (|p|^2 + 3) Q2.

    q2 carries the full -32[...] factor; Q2 is the symmetric form p^T A p.
    Both are exact in the matrix entries.
    """
    a = np.asarray(A, dtype=float)
    if a.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {a.shape}")
    q2 = QuadraticForm(
        xx=-32.0 * a[0, 0],
        yy=-32.0 * a[1, 1],
        zz=0.0,
        xy=-32.0 * (a[0, 1] + a[1, 0]),
        xz=-32.0 * a[0, 2],
        yz=-32.0 * a[1, 2],
    )
    big_q2 = QuadraticForm(
        xx=a[0, 0],
        yy=a[1, 1],
        zz=a[2, 2],
        xy=a[0, 1] + a[1, 0],
        xz=a[0, 2] + a[2, 0],
        yz=a[1, 2] + a[2, 1],
    )
    return q2, big_q2


# ---------------------------------------------------------------------------
# Region and tangency-order classification
# ---------------------------------------------------------------------------

class RegionKind(Enum):
    CROSSING = "crossing"
    SLIDING = "sliding"
    ESCAPING = "escaping"
    TANGENCY = "tangency"


def classify_region(sys: PiecewiseSystem, p, eps: float = EPS_SIGN) -> RegionKind:
    """Sign-table classification of a surface point.

    Sliding: X+h < 0 < X-h.  Escaping: X-h < 0 < X+h.  Crossing: same signs.
    Anything within eps of a vanishing derivative is a tangency point.
    """
    q = require_on_surface(p, sys.torus)
    lp = lie_derivative_h(sys.exterior, q, sys.torus, 1)
    lm = lie_derivative_h(sys.interior, q, sys.torus, 1)
    return _classify_from_derivatives(lp, lm, eps)


def _classify_from_derivatives(lp: float, lm: float, eps: float = EPS_SIGN) -> RegionKind:
    if lp < -eps and lm > eps:
        return RegionKind.SLIDING
    if lp > eps and lm < -eps:
        return RegionKind.ESCAPING
    if lp * lm > eps * eps:
        return RegionKind.CROSSING
    return RegionKind.TANGENCY


def region_grid(sys: PiecewiseSystem, n_u: int, n_v: int, eps: float = EPS_SIGN):
    """Region kinds over the (u, v) grid u_i = 2 pi i / n_u, v_j = 2 pi j / n_v.

    Returns (u, v, kinds) with kinds an (n_u, n_v) array of RegionKind.
    """
    from .geometry import torus_point

    u = 2.0 * np.pi * np.arange(n_u) / n_u
    v = 2.0 * np.pi * np.arange(n_v) / n_v
    pts = torus_point(u[:, None], v[None, :], sys.torus)
    lp = lie_derivative_h(sys.exterior, pts, sys.torus, 1)
    lm = lie_derivative_h(sys.interior, pts, sys.torus, 1)
    kinds = np.full(lp.shape, RegionKind.TANGENCY, dtype=object)
    kinds[(lp < -eps) & (lm > eps)] = RegionKind.SLIDING
    kinds[(lp > eps) & (lm < -eps)] = RegionKind.ESCAPING
    crossing = (lp * lm > eps * eps) & (kinds == RegionKind.TANGENCY)
    kinds[crossing] = RegionKind.CROSSING
    return u, v, kinds


class ContactKind(Enum):
    NOT_TANGENT = "not_tangent"
    FOLD = "fold"
    CUSP = "cusp"
    HIGHER_ORDER = "higher_order"


@dataclass(frozen=True)
class TangencyOrder:
    """Contact order of one field with the torus at a surface point."""

    kind: ContactKind
    derivatives: tuple[float, float, float]


def tangency_order(X: LinearField, p, torus: TorusSpec = CANONICAL, eps: float = EPS_SIGN) -> TangencyOrder:
    """Fold (Xh = 0, X^2h != 0), cusp (X^2h = 0 too, X^3h != 0), or beyond."""
    q = require_on_surface(p, torus)
    d1 = lie_derivative_h(X, q, torus, 1)
    d2 = lie_derivative_h(X, q, torus, 2)
    d3 = lie_derivative_h(X, q, torus, 3)
    if abs(d1) > eps:
        kind = ContactKind.NOT_TANGENT
    elif abs(d2) > eps:
        kind = ContactKind.FOLD
    elif abs(d3) > eps:
        kind = ContactKind.CUSP
    else:
        kind = ContactKind.HIGHER_ORDER
    return TangencyOrder(kind=kind, derivatives=(float(d1), float(d2), float(d3)))
