"""Classification of the tangency set {X+h = 0} on the canonical torus.

For an inelastic pair, X+h = q2 + 4(|p|^2 + 3) Q2 with both parts determined
by the exterior matrix.  When the coefficient pattern matches one of the
analytically solved families, the tangency set is an exact finite union of
horizontal circles, meridian sections, and torus/sphere circles; anything
else is handled by the numerical contour extractor.  Matching uses absolute
tolerance 1e-12 on the matrix entries (inputs are exact; the tolerance only
absorbs serialization rounding).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .contours import ContourPolyline, DegenerateEverywhereTangent, numerical_tangency_contours
from .errors import CanonicalTorusRequiredError
from .fields import EPS_COEFF, PiecewiseSystem, require_inelastic
from .geometry import (
    CurveComponent,
    horizontal_section,
    plane_section_from_linear_form,
    sphere_section,
)

DEDUP_HAUSDORFF = 1e-7


class TangencyCase(Enum):
    SKEW_Q4_ZERO = "SkewQ4Zero"
    XZ_CASE = "XZCase"
    YZ_CASE = "YZCase"
    Q4_ONLY_LINEAR = "Q4OnlyLinear"
    Q2_ONLY_LINEAR = "Q2OnlyLinear"
    Z_SQUARED = "ZSquared"
    PLANAR_QUADRATIC = "PlanarQuadratic"
    NUMERICAL_FALLBACK = "NumericalFallback"
    # not one of the published families: the zero field is tangent everywhere
    EVERYWHERE_TANGENT = "EverywhereTangent"


@dataclass(frozen=True)
class TangencyClassification:
    case: TangencyCase
    components: tuple
    gamma: float | None = None

    @property
    def component_count(self) -> int:
        return len(self.components)


def match_tangency_case(A, tol: float = EPS_COEFF) -> TangencyCase:
    """Which analytic family the exterior matrix falls into, if any."""
    a = np.asarray(A, dtype=float)

    def zero(x) -> bool:
        return abs(x) <= tol

    a11, a12, a13 = a[0]
    a21, a22, a23 = a[1]
    a31, a32, a33 = a[2]
    core = zero(a11) and zero(a22) and zero(a12 + a21)

    if core and all(zero(x) for x in (a33, a13, a23, a31, a32)):
        return TangencyCase.EVERYWHERE_TANGENT
    if core and zero(a33) and zero(a13 + a31) and zero(a23 + a32):
        return TangencyCase.SKEW_Q4_ZERO
    if core and zero(a33) and zero(a23) and zero(a32) and not zero(a13 + a31):
        return TangencyCase.XZ_CASE
    if core and zero(a33) and zero(a13) and zero(a31) and not zero(a23 + a32):
        return TangencyCase.YZ_CASE
    if core and zero(a33) and zero(a31) and zero(a32):
        return TangencyCase.Q2_ONLY_LINEAR
    if core and zero(a33) and zero(a13) and zero(a23):
        return TangencyCase.Q4_ONLY_LINEAR
    if core and all(zero(x) for x in (a13, a23, a31, a32)) and not zero(a33):
        return TangencyCase.Z_SQUARED
    if all(zero(x) for x in (a33, a13, a23, a31, a32)) and not core:
        return TangencyCase.PLANAR_QUADRATIC
    return TangencyCase.NUMERICAL_FALLBACK


def classify_tangency_set(
    sys: PiecewiseSystem, n_u: int = 256, n_v: int = 256, tol: float = EPS_COEFF
) -> TangencyClassification:
    """Exact components for a matched family, contour polylines otherwise."""
    require_inelastic(sys)
    if not sys.torus.is_canonical:
        raise CanonicalTorusRequiredError(
            "tangency classification uses section formulas of the R=2, r=1 torus"
        )
    a = sys.A
    case = match_tangency_case(a, tol)
    a13, a23 = a[0, 2], a[1, 2]
    a31, a32 = a[2, 0], a[2, 1]

    if case is TangencyCase.EVERYWHERE_TANGENT:
        return TangencyClassification(case=case, components=())

    if case is TangencyCase.NUMERICAL_FALLBACK:
        polylines = numerical_tangency_contours(sys, n_u, n_v)
        if isinstance(polylines, DegenerateEverywhereTangent):
            return TangencyClassification(case=TangencyCase.EVERYWHERE_TANGENT, components=())
        return TangencyClassification(case=case, components=tuple(polylines))

    components: list[CurveComponent] = []
    gamma: float | None = None
    if case is TangencyCase.SKEW_Q4_ZERO:
        components += horizontal_section(0.0, sys.torus)
        components += plane_section_from_linear_form(a31, a32, sys.torus)
    elif case is TangencyCase.XZ_CASE:
        components += horizontal_section(0.0, sys.torus)
        gamma = (5.0 * a13 - 3.0 * a31) / (a13 + a31)
        components += sphere_section(gamma, sys.torus)
        components += plane_section_from_linear_form(1.0, 0.0, sys.torus)
    elif case is TangencyCase.YZ_CASE:
        components += horizontal_section(0.0, sys.torus)
        gamma = (5.0 * a23 - 3.0 * a32) / (a23 + a32)
        components += sphere_section(gamma, sys.torus)
        components += plane_section_from_linear_form(0.0, 1.0, sys.torus)
    elif case is TangencyCase.Q2_ONLY_LINEAR:
        components += horizontal_section(0.0, sys.torus)
        gamma = 5.0
        components += sphere_section(gamma, sys.torus)
        components += plane_section_from_linear_form(a13, a23, sys.torus)
    elif case is TangencyCase.Q4_ONLY_LINEAR:
        components += horizontal_section(0.0, sys.torus)
        components += plane_section_from_linear_form(a31, a32, sys.torus)
    elif case is TangencyCase.Z_SQUARED:
        components += horizontal_section(0.0, sys.torus)
    elif case is TangencyCase.PLANAR_QUADRATIC:
        gamma = 5.0
        components += sphere_section(gamma, sys.torus)
        for p, q in _quadratic_lines(a[0, 0], a[1, 1], a[0, 1] + a[1, 0], tol):
            components += plane_section_from_linear_form(p, q, sys.torus)

    return TangencyClassification(case=case, components=tuple(_dedup(components)), gamma=gamma)


def _quadratic_lines(a11: float, a22: float, c: float, tol: float) -> list[tuple[float, float]]:
    """Lines p*x + q*y = 0 where a11 x^2 + a22 y^2 + c xy vanishes."""
    norm = max(a11 * a11, a22 * a22, c * c, abs(a11 * a22), 1e-300)
    if abs(a11) > tol:
        disc = c * c - 4.0 * a11 * a22
        if abs(disc) <= 1e-9 * norm:
            alpha = -c / (2.0 * a11)
            return [(1.0, -alpha)]
        if disc < 0.0:
            return []
        root = np.sqrt(disc)
        alphas = [(-c + root) / (2.0 * a11), (-c - root) / (2.0 * a11)]
        return [(1.0, -alpha) for alpha in alphas]
    if abs(a22) > tol:
        disc = c * c - 4.0 * a22 * a11
        if abs(disc) <= 1e-9 * norm:
            beta = -c / (2.0 * a22)
            return [(beta, -1.0)]
        if disc < 0.0:
            return []
        root = np.sqrt(disc)
        betas = [(-c + root) / (2.0 * a22), (-c - root) / (2.0 * a22)]
        return [(beta, -1.0) for beta in betas]
    if abs(c) > tol:
        return [(1.0, 0.0), (0.0, 1.0)]
    return []


def hausdorff_distance(points_a: np.ndarray, points_b: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two sampled point sets."""
    a = np.atleast_2d(points_a)
    b = np.atleast_2d(points_b)
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=-1)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def _dedup(components: list[CurveComponent]) -> list[CurveComponent]:
    kept: list[CurveComponent] = []
    samples: list[np.ndarray] = []
    for comp in components:
        pts = comp.sample(128)
        if any(hausdorff_distance(pts, other) < DEDUP_HAUSDORFF for other in samples):
            continue
        kept.append(comp)
        samples.append(pts)
    return kept


__all__ = [
    "TangencyCase",
    "TangencyClassification",
    "classify_tangency_set",
    "match_tangency_case",
    "numerical_tangency_contours",
    "ContourPolyline",
    "DegenerateEverywhereTangent",
    "hausdorff_distance",
]
