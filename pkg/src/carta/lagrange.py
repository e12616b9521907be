"""Conformal projections sending every meridian and parallel to a circle.

The family is built in three steps: stereographic projection from the
North pole onto the equator plane, the polar power map
(rho, omega) -> (rho^c, c omega), and an optional inversion or Mobius
post-transform in the image plane.  Spheroid input latitudes are replaced
by conformal latitudes first, so the composite stays conformal.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BranchOverflow,
    CartaError,
    OriginSingularity,
    OutsideImage,
    ProjectionPole,
)
from .geometry import (
    POLE_COLATITUDE_EPS,
    GeneralizedCircle,
    Inversion,
    MobiusTransform,
    PlanePoint,
    SpherePoint,
    circle_fit,
    invert_point,
    normalize_longitude,
    stereographic_project,
)
from .surfaces import (
    SPHERE,
    SurfaceOfRevolution,
    conformal_latitude,
    inverse_conformal_latitude,
)

# Samples closer than this (radians) to a singular point of the projection
# are dropped when tracing graticule curves; any sub-arc determines the
# image circle, and staying off the singularities keeps the fit
# well-conditioned.
SAMPLE_CLEARANCE = 1e-3


@dataclass(frozen=True)
class LagrangeProjectionSpec:
    """Projection exponent, central meridian, optional post-transform.

    The exponent c is restricted to (0, 2]: beyond 2 the image of the full
    sphere self-overlaps and the map stops being injective.
    """

    exponent: float
    central_meridian: float = 0.0
    post_transform: Inversion | MobiusTransform | None = None
    surface: SurfaceOfRevolution = SPHERE

    def __post_init__(self):
        if not (0.0 < self.exponent <= 2.0):
            raise ValueError(f"exponent {self.exponent} outside (0, 2]")
        object.__setattr__(
            self, "central_meridian", normalize_longitude(self.central_meridian)
        )

    def projection(self):
        """The forward map as a plain callable SpherePoint -> PlanePoint."""
        return lambda p: project(self, p)


def _power(w: complex, c: float) -> complex:
    """Principal-branch power map in polar form; fixes the origin."""
    if c == 1.0:
        return w
    rho = abs(w)
    if rho == 0.0:
        return 0.0j
    return rho**c * cmath.exp(1j * c * math.atan2(w.imag, w.real))


def lambert_power(z: PlanePoint, c: float) -> PlanePoint:
    """Polar power map (rho, omega) -> (rho^c, c omega) about the origin."""
    if z.x == 0.0 and z.y == 0.0 and c != 1.0:
        raise OriginSingularity("power map with c != 1 is singular at the origin")
    return PlanePoint.from_complex(_power(z.as_complex(), c))


def _apply_post(spec: LagrangeProjectionSpec, w: complex) -> complex:
    post = spec.post_transform
    if post is None:
        return w
    if isinstance(post, Inversion):
        q = invert_point(post, PlanePoint.from_complex(w))
        return q.as_complex()
    return post.apply_complex(w)


def project(spec: LagrangeProjectionSpec, p: SpherePoint) -> PlanePoint:
    """Forward projection of a sphere (or spheroid) point."""
    lat = p.latitude
    if not spec.surface.is_sphere:
        lat = conformal_latitude(spec.surface.eccentricity, lat)
    if math.pi / 2 - lat < POLE_COLATITUDE_EPS:
        raise ProjectionPole("the projection center has no image")
    dlon = normalize_longitude(p.longitude - spec.central_meridian)
    omega = spec.exponent * dlon
    if abs(omega) > math.pi + 1e-12:
        raise BranchOverflow(
            f"longitude {p.longitude} leaves the single-branch window for c={spec.exponent}"
        )
    rho = math.tan(math.pi / 4 + lat / 2)
    if rho == 0.0:
        w = 0.0j
    else:
        w = rho**spec.exponent * cmath.exp(1j * omega)
    return PlanePoint.from_complex(_apply_post(spec, w))


def unproject(spec: LagrangeProjectionSpec, q: PlanePoint) -> SpherePoint:
    """Inverse projection; raises OutsideImage off the principal branch."""
    w = q.as_complex()
    post = spec.post_transform
    if post is not None:
        if isinstance(post, Inversion):
            w = invert_point(post, q).as_complex()  # inversions are involutive
        else:
            w = post.inverse().apply_complex(w)
    c = spec.exponent
    rho_c = abs(w)
    if rho_c == 0.0:
        lat = -math.pi / 2
        lon = spec.central_meridian
    else:
        omega = math.atan2(w.imag, w.real)
        if abs(omega) > c * math.pi + 1e-12:
            raise OutsideImage(f"angle {omega} outside the image sector of c={c}")
        rho = rho_c ** (1.0 / c)
        chi = 2.0 * math.atan(rho) - math.pi / 2
        lat = chi
        lon = normalize_longitude(omega / c + spec.central_meridian)
    if not spec.surface.is_sphere:
        lat = inverse_conformal_latitude(spec.surface.eccentricity, lat)
    return SpherePoint(lat, lon)


def centered_stereographic(center: SpherePoint) -> LagrangeProjectionSpec:
    """Stereographic projection re-centred on an arbitrary sphere point.

    A rotation of the sphere conjugates to a Mobius map of the image
    plane, so the oblique aspect stays inside the projection family as
    exponent 1 plus a Mobius post-transform; ``center`` maps to the
    origin.
    """
    v = center.unit_vector()
    target = np.array([0.0, 0.0, -1.0])
    axis = np.cross(v, target)
    s = float(np.linalg.norm(axis))
    cos_angle = float(v @ target)
    if s < 1e-15:
        if cos_angle > 0:  # already the South pole
            return LagrangeProjectionSpec(exponent=1.0)
        rot = np.diag([1.0, -1.0, -1.0])  # North pole: half turn about x
    else:
        k = axis / s
        kx = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
        angle = math.atan2(s, cos_angle)
        rot = np.eye(3) + math.sin(angle) * kx + (1 - math.cos(angle)) * (kx @ kx)

    anchors = [
        SpherePoint(0.0, 0.0),
        SpherePoint(0.0, math.pi / 2),
        SpherePoint(math.pi / 4, -math.pi / 3),
        SpherePoint(-math.pi / 5, 2.0),
    ]
    sources, targets = [], []
    for p in anchors:
        image = SpherePoint.from_vector(rot @ p.unit_vector())
        if p.colatitude < 1e-6 or image.colatitude < 1e-6:
            continue
        sources.append(stereographic_project(p).as_complex())
        targets.append(stereographic_project(image).as_complex())
        if len(sources) == 3:
            break
    mobius = MobiusTransform.from_point_triples(tuple(sources), tuple(targets))
    return LagrangeProjectionSpec(exponent=1.0, post_transform=mobius)


# -- graticule tracing --------------------------------------------------------


@dataclass(frozen=True)
class GraticuleCurveFit:
    """Fitted image of one meridian or parallel."""

    curve_id: str
    image: GeneralizedCircle
    rms_residual: float
    diameter: float
    samples_used: int

    @property
    def relative_residual(self) -> float:
        return self.rms_residual / self.diameter if self.diameter > 0 else math.inf


def _singular_preimages(spec: LagrangeProjectionSpec) -> list[np.ndarray]:
    """Unit vectors of sphere points whose image is singular."""
    points = [np.array([0.0, 0.0, 1.0])]  # projection center
    post = spec.post_transform
    singular_plane = None
    if isinstance(post, Inversion):
        singular_plane = post.pole
    elif isinstance(post, MobiusTransform) and abs(post.c) > 1e-14:
        singular_plane = PlanePoint.from_complex(-post.d / post.c)
    if singular_plane is not None:
        bare = LagrangeProjectionSpec(
            exponent=spec.exponent,
            central_meridian=spec.central_meridian,
            surface=spec.surface,
        )
        try:
            points.append(unproject(bare, singular_plane).unit_vector())
        except (CartaError, ValueError):
            pass  # the singular point is outside the image: nothing to avoid
    return points


def graticule_image(
    spec: LagrangeProjectionSpec,
    lat_step: float,
    lon_step: float,
    samples_per_curve: int = 64,
) -> list[GraticuleCurveFit]:
    """Project every graticule curve and fit a generalized circle to it.

    Curves running through a singular point (projection center, inversion
    pole) are clipped around it rather than failed; curves entirely
    outside the branch window are skipped.
    """
    if samples_per_curve < 8:
        raise ValueError("need at least 8 samples per curve")
    if not (0.0 < lat_step < math.pi / 2) or not (0.0 < lon_step <= math.pi):
        raise ValueError("graticule steps out of range")
    n_parallel_half = int(math.floor((math.pi / 2 - 1e-9) / lat_step))
    if 2 * n_parallel_half + 1 < 2:
        raise ValueError("lat_step yields fewer than 2 parallels")
    k_min = int(math.floor(-math.pi / lon_step)) + 1
    k_max = int(math.floor(math.pi / lon_step))
    meridian_lons = [k * lon_step for k in range(k_min, k_max + 1)]
    if len(meridian_lons) < 2:
        raise ValueError("lon_step yields fewer than 2 meridians")

    c = spec.exponent
    avoid = _singular_preimages(spec)
    results: list[GraticuleCurveFit] = []

    def fit_curve(curve_id: str, candidates: list[SpherePoint]):
        images = []
        for p in candidates:
            v = p.unit_vector()
            if any(np.linalg.norm(v - s) < SAMPLE_CLEARANCE for s in avoid):
                continue
            try:
                images.append(project(spec, p))
            except CartaError:
                continue
        if len(images) < 8:
            return  # fully clipped curve
        xs = [q.x for q in images]
        ys = [q.y for q in images]
        diameter = math.hypot(max(xs) - min(xs), max(ys) - min(ys))
        curve, residual = circle_fit(images)
        results.append(
            GraticuleCurveFit(curve_id, curve, residual, diameter, len(images))
        )

    # parallels: clip longitudes to the branch window when c > 1
    half_window = min(math.pi, (math.pi - SAMPLE_CLEARANCE) / c)
    for k in range(-n_parallel_half, n_parallel_half + 1):
        lat = k * lat_step
        dlons = np.linspace(-half_window, half_window, samples_per_curve)
        pts = [
            SpherePoint(lat, normalize_longitude(d + spec.central_meridian))
            for d in dlons
        ]
        fit_curve(f"parallel lat={math.degrees(lat):+.1f}", pts)

    # meridians: skip those outside the branch window entirely
    lat_hi = math.pi / 2 - SAMPLE_CLEARANCE
    for lon in meridian_lons:
        dlon = normalize_longitude(lon - spec.central_meridian)
        if abs(c * dlon) > math.pi:
            continue
        lats = np.linspace(-math.pi / 2, lat_hi, samples_per_curve)
        pts = [SpherePoint(lat, lon) for lat in lats]
        fit_curve(f"meridian lon={math.degrees(normalize_longitude(lon)):+.1f}", pts)

    return results
