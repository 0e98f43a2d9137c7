"""Genericity membership and topological equivalence of sliding fields.

Two inelastic systems whose coefficient patterns fall in the analytically
classified tangency families and whose sliding rotations are nonzero have the
same orbit foliation: the horizontal circles of the torus.  Their sliding
fields are then topologically equivalent, via the identity when the rotation
senses agree and via the reflection (x, y, z) -> (x, -y, z) when they are
opposite.

The literal genericity set also asks for hyperbolic singularities of both
matrices, but every classified family forces a zero eigenvalue of the
exterior matrix, so that conjunction is empty; both the strict reading and
the relaxed one (family membership + nonzero rotation) are reported, and the
relaxed one drives the default equivalence verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .fields import PiecewiseSystem, require_inelastic
from .geometry import torus_point
from .sliding import sliding_orbit_through
from .tangency import TangencyCase, match_tangency_case

EPS_EIG = 1e-9


class Orientation(Enum):
    SAME = "SameOrientation"
    REVERSED = "Reversed"
    NOT_APPLICABLE = "NotApplicable"


class Homeomorphism(Enum):
    IDENTITY = "Identity"
    REFLECTION_Y = "ReflectionY"


@dataclass(frozen=True)
class GenericityReport:
    in_lemma_case: bool
    case_label: str
    hyperbolic_interior: bool
    hyperbolic_exterior: bool
    omega: float
    omega_nonzero: bool
    in_frak_z_strict: bool
    in_frak_z_relaxed: bool
    eigenvalues_interior: tuple[complex, ...]
    eigenvalues_exterior: tuple[complex, ...]


def _is_hyperbolic(matrix: np.ndarray, eps: float = EPS_EIG) -> tuple[bool, tuple[complex, ...]]:
    eigs = np.linalg.eigvals(matrix)
    eigs = tuple(sorted((complex(e) for e in eigs), key=lambda z: (z.real, z.imag)))
    return bool(all(abs(e.real) > eps for e in eigs)), eigs


def genericity_report(sys: PiecewiseSystem) -> GenericityReport:
    """Family membership, spectra, and strict/relaxed genericity flags."""
    require_inelastic(sys)
    case = match_tangency_case(sys.A)
    if case is TangencyCase.EVERYWHERE_TANGENT:
        in_case, label = True, "degenerate"
    elif case is TangencyCase.NUMERICAL_FALLBACK:
        in_case, label = False, case.value
    else:
        in_case, label = True, case.value

    hyp_int, eig_int = _is_hyperbolic(sys.B)
    hyp_ext, eig_ext = _is_hyperbolic(sys.A)
    omega = sys.omega
    nonzero = omega != 0.0
    # the degenerate zero tangency function has no sliding structure at all
    usable_case = in_case and case is not TangencyCase.EVERYWHERE_TANGENT
    relaxed = usable_case and nonzero
    strict = relaxed and hyp_int and hyp_ext
    return GenericityReport(
        in_lemma_case=in_case,
        case_label=label,
        hyperbolic_interior=hyp_int,
        hyperbolic_exterior=hyp_ext,
        omega=float(omega),
        omega_nonzero=nonzero,
        in_frak_z_strict=strict,
        in_frak_z_relaxed=relaxed,
        eigenvalues_interior=eig_int,
        eigenvalues_exterior=eig_ext,
    )


@dataclass(frozen=True)
class EquivalenceReport:
    equivalent: bool
    orientation_relation: Orientation
    homeomorphism_descriptor: Homeomorphism | None
    orbit_match_error: float | None
    conjugacy_residual: float | None
    genericity_1: GenericityReport
    genericity_2: GenericityReport


def reflect_y(p) -> np.ndarray:
    q = np.array(p, dtype=float)
    q[..., 1] = -q[..., 1]
    return q


def conjugacy_residual(sys1: PiecewiseSystem, sys2: PiecewiseSystem, n_samples: int = 64) -> float:
    """Max mismatch between the mapped sliding field of sys1 and its conjugate.

    The map is the identity when the rotation senses agree and the
    y-reflection otherwise; it must carry the rotation of angular velocity
    omega_1 to the rotation of angular velocity +-omega_1, so this compares
    D(map) Zs_1(p) against that target rotation at map(p).
    """
    same = (sys1.omega >= 0.0) == (sys2.omega >= 0.0)
    u = 2.0 * math.pi * np.arange(n_samples) / n_samples
    v = 2.0 * math.pi * ((np.arange(n_samples) * 7) % n_samples) / n_samples
    pts = torus_point(u, v)
    z1 = np.stack([-sys1.omega * pts[:, 1], sys1.omega * pts[:, 0], np.zeros(n_samples)], axis=-1)
    if same:
        mapped_pts, mapped_field = pts, z1
        target_omega = sys1.omega
    else:
        mapped_pts, mapped_field = reflect_y(pts), reflect_y(z1)
        target_omega = -sys1.omega
    target = np.stack(
        [-target_omega * mapped_pts[:, 1], target_omega * mapped_pts[:, 0], np.zeros(n_samples)],
        axis=-1,
    )
    return float(np.max(np.abs(mapped_field - target)))


def equivalence_check(
    sys1: PiecewiseSystem, sys2: PiecewiseSystem, strict: bool = False, n_orbits: int = 64
) -> EquivalenceReport:
    """Equivalence verdict for two inelastic systems' sliding fields."""
    require_inelastic(sys1)
    require_inelastic(sys2)
    rep1 = genericity_report(sys1)
    rep2 = genericity_report(sys2)
    ok1 = rep1.in_frak_z_strict if strict else rep1.in_frak_z_relaxed
    ok2 = rep2.in_frak_z_strict if strict else rep2.in_frak_z_relaxed
    if not (ok1 and ok2 and rep1.omega_nonzero and rep2.omega_nonzero):
        return EquivalenceReport(
            equivalent=False,
            orientation_relation=Orientation.NOT_APPLICABLE,
            homeomorphism_descriptor=None,
            orbit_match_error=None,
            conjugacy_residual=None,
            genericity_1=rep1,
            genericity_2=rep2,
        )

    same = (sys1.omega > 0.0) == (sys2.omega > 0.0)
    homeo = Homeomorphism.IDENTITY if same else Homeomorphism.REFLECTION_Y

    # push sampled orbits of sys1 through the map and compare circles
    rng_u = 2.0 * math.pi * np.arange(n_orbits) / n_orbits
    rng_v = 2.0 * math.pi * ((np.arange(n_orbits) * 11) % n_orbits) / n_orbits
    error = 0.0
    for u, v in zip(rng_u, rng_v):
        p = torus_point(u, v)
        orbit1 = sliding_orbit_through(sys1, p)
        image = p if same else reflect_y(p)
        orbit2 = sliding_orbit_through(sys2, image)
        # coaxial horizontal circles: Hausdorff distance in closed form
        error = max(
            error,
            math.hypot(orbit1.radius - orbit2.radius, orbit1.z_level - orbit2.z_level),
        )

    residual = conjugacy_residual(sys1, sys2)
    return EquivalenceReport(
        equivalent=True,
        orientation_relation=Orientation.SAME if same else Orientation.REVERSED,
        homeomorphism_descriptor=homeo,
        orbit_match_error=error,
        conjugacy_residual=residual,
        genericity_1=rep1,
        genericity_2=rep2,
    )
