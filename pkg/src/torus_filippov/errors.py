"""Exception types shared across the package."""

from __future__ import annotations


class TorusFilippovError(Exception):
    """Base class for all package-specific errors."""


class NotOnSurfaceError(TorusFilippovError):
    """A point required to lie on the switching torus does not."""


class CanonicalTorusRequiredError(TorusFilippovError):
    """Exact section formulas are only available for the R=2, r=1 torus.

    Callers working with other tori should fall back to numerical contouring.
    """


class NotInelasticError(TorusFilippovError):
    """Operation requires an inelastic pair of fields."""


class DegenerateDenominatorError(TorusFilippovError):
    """Filippov combination hit a vanishing denominator (tangency point)."""


class DegenerateOmegaError(TorusFilippovError):
    """Sliding angular velocity is zero; every torus point is an equilibrium."""


class GridTooCoarseError(TorusFilippovError):
    """Contour or region grid below the minimum supported resolution."""


class FilippovConsistencyError(TorusFilippovError):
    """Internal consistency violated, e.g. a crossing region on an inelastic run."""
