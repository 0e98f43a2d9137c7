"""Piecewise-linear vector fields with a torus switching manifold.

Library surface: torus geometry and exact section curves, inelastic field
pairs and their Lie derivatives, the Filippov sliding field and its closed
form, tangency-set classification (analytic families plus a numerical
contour fallback), hybrid trajectory simulation, and topological-equivalence
checks.  The ``torus-filippov`` CLI exposes the same operations on JSON/CSV
files.
"""

from .dynamics import (
    OrbitClosure,
    SegmentMode,
    TerminalEvent,
    Trajectory,
    TrajectorySegment,
    free_flight,
    orbit_closure_check,
    simulate,
    slide_flow,
)
from .equivalence import (
    EquivalenceReport,
    GenericityReport,
    Homeomorphism,
    Orientation,
    conjugacy_residual,
    equivalence_check,
    genericity_report,
)
from .errors import (
    CanonicalTorusRequiredError,
    DegenerateDenominatorError,
    DegenerateOmegaError,
    FilippovConsistencyError,
    GridTooCoarseError,
    NotInelasticError,
    NotOnSurfaceError,
    TorusFilippovError,
)
from .fields import (
    ContactKind,
    LinearField,
    PiecewiseSystem,
    QuadraticForm,
    RegionKind,
    TangencyOrder,
    classify_region,
    derive_inelastic_b,
    inelastic_system,
    is_inelastic,
    lie_derivative_h,
    q2_q4_decompose,
    region_grid,
    tangency_order,
)
from .geometry import (
    CANONICAL,
    CurveComponent,
    HorizontalCircle,
    MeridianSection,
    SphereCircle,
    TorusSpec,
    chart_coordinates,
    h_gradient,
    h_value,
    horizontal_section,
    plane_section,
    sphere_section,
    torus_point,
)
from .sliding import (
    ClosedOrbit,
    SlidingClosedForm,
    filippov_sliding,
    sliding_closed_form,
    sliding_orbit_through,
)
from .tangency import (
    ContourPolyline,
    DegenerateEverywhereTangent,
    TangencyCase,
    TangencyClassification,
    classify_tangency_set,
    hausdorff_distance,
    match_tangency_case,
    numerical_tangency_contours,
)

__version__ = "0.1.0"
