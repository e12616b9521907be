"""Conformal map projections with circular graticules, distortion
analysis, an optimal-distortion field solver, and inversive-geometry
tools, plus a GeoJSON/SVG command line."""

from .chebyshev import (
    RegionMesh,
    ScalarField,
    build_cap_mesh,
    build_region_mesh,
    chebyshev_vs_projection,
    discretization_allowance,
    distortion_ratio,
    solve_log_scale,
)
from .darboux import (
    Triangle,
    apollonius_circle,
    find_inversion,
    image_triangle_sides,
    intersect_generalized,
    inversions_for_sides,
    lagrange_constraints_to_triangles,
)
from .distortion import (
    DilatationSample,
    DistortionReport,
    conformality_defect,
    dilatation_analytic,
    dilatation_fd,
    directional_dilatations,
    distortion_report,
)
from .geometry import (
    GeneralizedCircle,
    Inversion,
    MobiusTransform,
    PlanePoint,
    SpherePoint,
    circle_fit,
    image_of_circle,
    invert_point,
    mobius_apply,
    normalize_longitude,
    spherical_polygon_area,
    stereographic_project,
    stereographic_unproject,
)
from .lagrange import (
    GraticuleCurveFit,
    LagrangeProjectionSpec,
    centered_stereographic,
    graticule_image,
    lambert_power,
    project,
    unproject,
)
from .schwarzian import (
    AnalyticSample,
    SchwarzianResult,
    is_mobius,
    mobius_deviation,
    schwarzian,
    schwarzian_cocycle_residual,
)
from .surfaces import (
    SPHERE,
    GaussSphereMapping,
    SurfaceOfRevolution,
    conformal_latitude,
    gauss_scale,
    isometric_coordinate,
    parallel_radius,
)

__version__ = "0.1.0"
