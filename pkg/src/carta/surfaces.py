"""Surfaces of revolution (sphere, spheroid) and their conformal coordinates.

The spheroid is an ellipse of revolution with semi-major axis 1 and
eccentricity e; latitudes are geodetic.  All evaluators are singular at the
poles and clip their domain to |lat| <= pi/2 - 1e-8.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import PoleDegenerate

POLE_LATITUDE_MARGIN = 1e-8


def _check_latitude(latitude: float) -> None:
    if abs(latitude) > math.pi / 2 - POLE_LATITUDE_MARGIN:
        raise PoleDegenerate(f"latitude {latitude} too close to a pole")


@dataclass(frozen=True)
class SurfaceOfRevolution:
    """Unit sphere (e = 0) or spheroid of eccentricity e in [0, 1)."""

    eccentricity: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.eccentricity < 1.0):
            raise ValueError(f"eccentricity {self.eccentricity} outside [0, 1)")

    @property
    def kind(self) -> str:
        return "sphere" if self.eccentricity == 0.0 else "spheroid"

    @property
    def is_sphere(self) -> bool:
        return self.eccentricity == 0.0

    def meridian_factor(self, latitude: float) -> float:
        """ds/dlat: metres of meridian arc per radian of latitude."""
        e2 = self.eccentricity**2
        if e2 == 0.0:
            return 1.0
        w2 = 1.0 - e2 * math.sin(latitude) ** 2
        return (1.0 - e2) / w2**1.5

    def parallel_radius(self, latitude: float) -> float:
        """Distance from the surface point to the rotation axis."""
        _check_latitude(latitude)
        if self.is_sphere:
            return math.cos(latitude)
        e2 = self.eccentricity**2
        return math.cos(latitude) / math.sqrt(1.0 - e2 * math.sin(latitude) ** 2)

    def gaussian_curvature(self, latitude: float) -> float:
        """1/(M N), the product of the principal curvatures; 1 on the sphere."""
        e2 = self.eccentricity**2
        if e2 == 0.0:
            return 1.0
        w2 = 1.0 - e2 * math.sin(latitude) ** 2
        return w2 * w2 / (1.0 - e2)


SPHERE = SurfaceOfRevolution(0.0)


def parallel_radius(surface: SurfaceOfRevolution, latitude: float) -> float:
    """Distance from the surface point to the rotation axis.

    cos(lat) on the sphere, cos(lat)/sqrt(1 - e^2 sin^2 lat) on the spheroid.
    """
    return surface.parallel_radius(latitude)


def isometric_coordinate(surface: SurfaceOfRevolution, latitude: float) -> float:
    """Isothermal latitude: integral of (meridian arc element)/q from 0.

    Closed forms: asinh(tan lat) for the sphere, minus the eccentricity
    correction e*atanh(e sin lat) for the spheroid.  Strictly increasing
    and odd in the latitude.
    """
    _check_latitude(latitude)
    sigma = math.asinh(math.tan(latitude))
    e = surface.eccentricity
    if e > 0.0:
        sigma -= e * math.atanh(e * math.sin(latitude))
    return sigma


def gudermannian(x: float) -> float:
    """Inverse of the sphere isometric coordinate: gd(x) = atan(sinh x)."""
    return math.atan(math.sinh(x))


def conformal_latitude(eccentricity: float, latitude: float) -> float:
    """Sphere latitude chi making the spheroid->sphere substitution conformal.

    Defined by equal isometric coordinates: tan(pi/4 + chi/2) =
    tan(pi/4 + lat/2) ((1 - e sin lat)/(1 + e sin lat))^(e/2).  Odd in the
    latitude; the identity when e = 0.  Exact at both poles.
    """
    if not (0.0 <= eccentricity < 1.0):
        raise ValueError(f"eccentricity {eccentricity} outside [0, 1)")
    if eccentricity == 0.0 or latitude == 0.0:
        return latitude
    if abs(latitude) >= math.pi / 2 - POLE_LATITUDE_MARGIN:
        return math.copysign(math.pi / 2, latitude)
    surface = SurfaceOfRevolution(eccentricity)
    return gudermannian(isometric_coordinate(surface, latitude))


def inverse_conformal_latitude(eccentricity: float, chi: float) -> float:
    """Geodetic latitude with the given conformal latitude (fixed point)."""
    if eccentricity == 0.0:
        return chi
    if abs(chi) >= math.pi / 2 - POLE_LATITUDE_MARGIN:
        return math.copysign(math.pi / 2, chi)
    e = eccentricity
    t = math.tan(math.pi / 4 + chi / 2)
    phi = chi
    for _ in range(50):
        s = e * math.sin(phi)
        new = 2.0 * math.atan(t * ((1.0 + s) / (1.0 - s)) ** (e / 2.0)) - math.pi / 2
        if abs(new - phi) < 1e-15:
            return new
        phi = new
    return phi


@dataclass(frozen=True)
class GaussSphereMapping:
    """Conformal spheroid-to-sphere reduction with stationary scale.

    The spheroid (a = 1, eccentricity e) is mapped conformally onto a
    sphere of radius R by matching isometric coordinates up to an affine
    map: sigma_sphere(psi) = alpha * sigma_spheroid(lat) + ln K, with
    longitudes scaled by the same alpha.  The constants are fixed so the
    point scale equals 1 at the central latitude with vanishing first and
    second derivatives there, which keeps the similarity ratio constant
    along a meridian to third order.
    """

    eccentricity: float
    central_latitude: float

    # derived constants, filled in __post_init__
    alpha: float = 0.0
    sphere_radius: float = 0.0
    log_k: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.eccentricity < 1.0):
            raise ValueError("eccentricity outside [0, 1)")
        _check_latitude(self.central_latitude)
        e2 = self.eccentricity**2
        ep2 = e2 / (1.0 - e2)
        phi0 = self.central_latitude
        alpha = math.sqrt(1.0 + ep2 * math.cos(phi0) ** 4)
        psi0 = math.asin(math.sin(phi0) / alpha)
        surface = SurfaceOfRevolution(self.eccentricity)
        log_k = math.asinh(math.tan(psi0)) - alpha * isometric_coordinate(surface, phi0)
        radius = parallel_radius(surface, phi0) / (alpha * math.cos(psi0))
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "sphere_radius", radius)
        object.__setattr__(self, "log_k", log_k)

    def sphere_latitude(self, latitude: float) -> float:
        """Latitude on the auxiliary sphere for a spheroid latitude."""
        if self.eccentricity == 0.0:
            return latitude
        surface = SurfaceOfRevolution(self.eccentricity)
        return gudermannian(self.alpha * isometric_coordinate(surface, latitude) + self.log_k)


def gauss_scale(mapping: GaussSphereMapping, latitude: float) -> float:
    """Pointwise similarity ratio of the spheroid->sphere conformal map."""
    _check_latitude(latitude)
    if mapping.eccentricity == 0.0:
        return 1.0
    surface = SurfaceOfRevolution(mapping.eccentricity)
    psi = mapping.sphere_latitude(latitude)
    return (
        mapping.sphere_radius
        * mapping.alpha
        * math.cos(psi)
        / parallel_radius(surface, latitude)
    )
