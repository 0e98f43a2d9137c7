"""The switching torus as an implicit and parameterized surface.

The torus with major radius R and minor radius r is the zero set of

    h(x, y, z) = (x^2 + y^2 + z^2 + R^2 - r^2)^2 - 4 R^2 (x^2 + y^2),

negative inside the solid ring and positive outside.  For the canonical
R=2, r=1 torus this module also provides the exact intersection curves with
vertical planes through the z-axis, horizontal planes, and origin-centered
spheres; those closed forms use constants specialized to R=2, r=1, so they
refuse other tori (numerical contouring covers the general case).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._poly import Poly3
from .errors import CanonicalTorusRequiredError, NotOnSurfaceError

EPS_SURFACE = 1e-9

TILDE = "tilde"
BAR = "bar"


@dataclass(frozen=True)
class TorusSpec:
    """Major/minor radii of the switching torus, 0 < r < R."""

    R: float = 2.0
    r: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.r < self.R):
            raise ValueError(f"torus radii must satisfy 0 < r < R, got R={self.R}, r={self.r}")

    @classmethod
    def canonical(cls) -> "TorusSpec":
        return cls(2.0, 1.0)

    @property
    def is_canonical(self) -> bool:
        return self.R == 2.0 and self.r == 1.0

    @property
    def ring_constant(self) -> float:
        """R^2 - r^2, the constant added to |p|^2 inside h."""
        return self.R * self.R - self.r * self.r


CANONICAL = TorusSpec(2.0, 1.0)


def h_value(p, torus: TorusSpec = CANONICAL):
    """Implicit function of the torus at p; zero exactly on the surface."""
    q = np.asarray(p, dtype=float)
    x, y, z = q[..., 0], q[..., 1], q[..., 2]
    s = x * x + y * y + z * z
    rho2 = x * x + y * y
    out = (s + torus.ring_constant) ** 2 - 4.0 * torus.R**2 * rho2
    return float(out) if q.ndim == 1 else out


def h_gradient(p, torus: TorusSpec = CANONICAL):
    """Gradient of h; on the canonical torus (4x(S-5), 4y(S-5), 4z(S+3))."""
    q = np.asarray(p, dtype=float)
    x, y, z = q[..., 0], q[..., 1], q[..., 2]
    s = x * x + y * y + z * z
    k = torus.ring_constant
    four_r2 = 4.0 * torus.R**2
    gx = 4.0 * x * (s + k) - 2.0 * four_r2 * x
    gy = 4.0 * y * (s + k) - 2.0 * four_r2 * y
    gz = 4.0 * z * (s + k)
    return np.stack([gx, gy, gz], axis=-1)


def h_poly(torus: TorusSpec = CANONICAL) -> Poly3:
    """h as an exact polynomial, for symbolic Lie-derivative work."""
    x = Poly3.variable(0)
    y = Poly3.variable(1)
    z = Poly3.variable(2)
    s = x * x + y * y + z * z
    inner = s + Poly3.constant(torus.ring_constant)
    return inner * inner - (4.0 * torus.R**2) * (x * x + y * y)


def torus_point(u, v, torus: TorusSpec = CANONICAL) -> np.ndarray:
    """Point(s) ((R + r cos v) cos u, (R + r cos v) sin u, r sin v)."""
    uu = np.asarray(u, dtype=float)
    vv = np.asarray(v, dtype=float)
    ring = torus.R + torus.r * np.cos(vv)
    pts = np.stack(
        [ring * np.cos(uu), ring * np.sin(uu), torus.r * np.sin(vv) * np.ones_like(uu)],
        axis=-1,
    )
    return pts


def chart_coordinates(p, torus: TorusSpec = CANONICAL) -> np.ndarray:
    """(u, v) in [0, 2pi)^2 for points on (or near) the torus surface."""
    q = np.asarray(p, dtype=float)
    x, y, z = q[..., 0], q[..., 1], q[..., 2]
    rho = np.hypot(x, y)
    u = np.mod(np.arctan2(y, x), 2.0 * math.pi)
    v = np.mod(np.arctan2(z, rho - torus.R), 2.0 * math.pi)
    return np.stack([u, v], axis=-1)


def require_on_surface(p, torus: TorusSpec = CANONICAL, eps: float = EPS_SURFACE) -> np.ndarray:
    q = np.asarray(p, dtype=float)
    hv = h_value(q, torus)
    if np.any(np.abs(hv) >= eps):
        raise NotOnSurfaceError(f"point {q.tolist()} has |h| = {np.max(np.abs(hv)):.3e} >= {eps}")
    return q


def _require_canonical(torus: TorusSpec, what: str) -> None:
    if not torus.is_canonical:
        raise CanonicalTorusRequiredError(
            f"{what} uses closed forms specialized to the R=2, r=1 torus; "
            f"got R={torus.R}, r={torus.r} (use numerical contouring instead)"
        )


# ---------------------------------------------------------------------------
# Curve components
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HorizontalCircle:
    """Circle of the given radius in the plane z = const, centered on the z-axis."""

    z: float
    radius: float

    kind = "horizontal_circle"

    def sample(self, n: int = 64) -> np.ndarray:
        t = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
        return np.stack(
            [self.radius * np.cos(t), self.radius * np.sin(t), np.full_like(t, self.z)], axis=-1
        )

    def distance(self, pts) -> np.ndarray:
        q = np.atleast_2d(np.asarray(pts, dtype=float))
        rho = np.hypot(q[:, 0], q[:, 1])
        return np.hypot(rho - self.radius, q[:, 2] - self.z)

    def parameters(self) -> dict:
        return {"z": self.z, "radius": self.radius}


@dataclass(frozen=True)
class MeridianSection:
    """One meridian circle cut by the vertical plane through the z-axis.

    ``plane_angle`` is the plane's direction angle in [0, pi); ``side`` picks
    the half-plane ("tilde" along +(cos, sin, 0), "bar" along the opposite).
    In the plane's intrinsic (arc-length, z) coordinates the section is the
    circle of radius ``minor_radius`` centered ``major_radius`` from the axis;
    ``semi_axes`` carries the (horizontal, z) semi-axes of the ellipse this
    circle projects to on the dominant coordinate plane.
    """

    plane_angle: float
    side: str
    center: tuple[float, float, float]
    semi_axes: tuple[float, float]
    major_radius: float = 2.0
    minor_radius: float = 1.0

    kind = "meridian_section"

    @classmethod
    def pair(cls, plane_angle: float, torus: TorusSpec = CANONICAL) -> tuple["MeridianSection", "MeridianSection"]:
        theta = float(plane_angle) % math.pi
        direction = np.array([math.cos(theta), math.sin(theta), 0.0])
        projected = torus.r * max(abs(direction[0]), abs(direction[1]))
        out = []
        for side, sign in ((TILDE, 1.0), (BAR, -1.0)):
            center = tuple(sign * torus.R * direction)
            out.append(
                cls(
                    plane_angle=theta,
                    side=side,
                    center=center,
                    semi_axes=(projected, torus.r),
                    major_radius=torus.R,
                    minor_radius=torus.r,
                )
            )
        return out[0], out[1]

    @property
    def _direction(self) -> np.ndarray:
        sign = 1.0 if self.side == TILDE else -1.0
        return sign * np.array([math.cos(self.plane_angle), math.sin(self.plane_angle), 0.0])

    def sample(self, n: int = 64) -> np.ndarray:
        t = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
        center = np.asarray(self.center)
        d = self._direction
        zhat = np.array([0.0, 0.0, 1.0])
        return (
            center[None, :]
            + self.minor_radius * np.cos(t)[:, None] * d[None, :]
            + self.minor_radius * np.sin(t)[:, None] * zhat[None, :]
        )

    def distance(self, pts) -> np.ndarray:
        q = np.atleast_2d(np.asarray(pts, dtype=float))
        center = np.asarray(self.center)
        d = self._direction
        normal = np.array([-d[1], d[0], 0.0])
        rel = q - center[None, :]
        off = rel @ normal
        in_plane_s = rel @ d
        in_plane_z = rel[:, 2]
        ring = np.hypot(in_plane_s, in_plane_z)
        return np.hypot(ring - self.minor_radius, off)

    def parameters(self) -> dict:
        return {
            "plane_angle": self.plane_angle,
            "side": self.side,
            "center": list(self.center),
            "semi_axes": list(self.semi_axes),
        }


@dataclass(frozen=True)
class SphereCircle:
    """Horizontal circle where the torus meets the sphere |p|^2 = gamma."""

    gamma: float
    z_sign: int
    z: float
    radius: float

    kind = "sphere_circle"

    def sample(self, n: int = 64) -> np.ndarray:
        return HorizontalCircle(self.z, self.radius).sample(n)

    def distance(self, pts) -> np.ndarray:
        return HorizontalCircle(self.z, self.radius).distance(pts)

    def parameters(self) -> dict:
        return {"gamma": self.gamma, "z_sign": self.z_sign, "z": self.z, "radius": self.radius}


CurveComponent = HorizontalCircle | MeridianSection | SphereCircle


# ---------------------------------------------------------------------------
# Exact sections of the canonical torus
# ---------------------------------------------------------------------------

def plane_section(plane_angle: float, torus: TorusSpec = CANONICAL) -> list[MeridianSection]:
    """Both meridian circles cut by the vertical plane at ``plane_angle``."""
    _require_canonical(torus, "plane_section")
    tilde, bar = MeridianSection.pair(plane_angle, torus)
    return [tilde, bar]


def plane_section_from_linear_form(a: float, b: float, torus: TorusSpec = CANONICAL) -> list[MeridianSection]:
    """Meridian pair on the plane a*x + b*y = 0 (requires (a, b) != (0, 0))."""
    if a == 0.0 and b == 0.0:
        raise ValueError("linear form a*x + b*y = 0 needs a nonzero coefficient")
    # plane direction is orthogonal to (a, b) in the xy-plane
    theta = math.atan2(a, -b) % math.pi
    return plane_section(theta, torus)


def horizontal_section(c: float, torus: TorusSpec = CANONICAL) -> list[HorizontalCircle]:
    """Circles where the plane z = c meets the canonical torus."""
    _require_canonical(torus, "horizontal_section")
    c = float(c)
    if abs(c) > 1.0:
        return []
    if abs(c) == 1.0:
        return [HorizontalCircle(z=c, radius=2.0)]
    w = math.sqrt(1.0 - c * c)
    return [HorizontalCircle(z=c, radius=2.0 + w), HorizontalCircle(z=c, radius=2.0 - w)]


def sphere_section(gamma: float, torus: TorusSpec = CANONICAL) -> list[SphereCircle]:
    """Circles where the sphere |p|^2 = gamma meets the canonical torus.

    Empty for gamma outside [1, 9]; a single circle at z = 0 for the boundary
    values (the two cutting planes coincide there); otherwise the pair at
    z = +-sqrt(-(gamma - 9)(gamma - 1))/4 with radius (gamma + 3)/4.
    """
    _require_canonical(torus, "sphere_section")
    g = float(gamma)
    if g < 1.0 or g > 9.0:
        return []
    radius = (g + 3.0) / 4.0
    if g == 1.0 or g == 9.0:
        return [SphereCircle(gamma=g, z_sign=1, z=0.0, radius=radius)]
    z = math.sqrt(-(g - 9.0) * (g - 1.0)) / 4.0
    return [
        SphereCircle(gamma=g, z_sign=1, z=z, radius=radius),
        SphereCircle(gamma=g, z_sign=-1, z=-z, radius=radius),
    ]
