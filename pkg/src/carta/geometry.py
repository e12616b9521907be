"""Inversive geometry in the plane, the stereographic sphere-plane bridge,
spherical polygon areas, and a least-squares generalized-circle fit.

Conventions used throughout the package:

* the sphere is the unit sphere; latitude in [-pi/2, pi/2], longitude
  normalized to (-pi, pi];
* the stereographic projection is centred at the North pole and maps onto
  the equator plane, so the South pole goes to the origin and the equator
  to the unit circle;
* a "generalized circle" is a circle or a straight line, the class of
  curves preserved by Mobius transformations and inversions.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .errors import (
    DegeneratePolygon,
    DegenerateTransform,
    InsufficientPoints,
    PointAtInfinity,
    PoleSingularity,
    ProjectionPole,
)

TWO_PI = 2.0 * math.pi

# Points closer to the North pole than this (in colatitude) cannot be
# projected stereographically.
POLE_COLATITUDE_EPS = 1e-12

# Curvature below which a fitted circle is reported as a line.
LINE_CURVATURE_EPS = 1e-10


def normalize_longitude(lon: float) -> float:
    """Wrap a longitude into the half-open interval (-pi, pi]."""
    lon = math.fmod(lon, TWO_PI)
    if lon <= -math.pi:
        lon += TWO_PI
    elif lon > math.pi:
        lon -= TWO_PI
    return lon


@dataclass(frozen=True)
class SpherePoint:
    """Position on the unit sphere, latitude/longitude in radians."""

    latitude: float
    longitude: float

    def __post_init__(self):
        if not (-math.pi / 2 <= self.latitude <= math.pi / 2):
            raise ValueError(f"latitude {self.latitude} outside [-pi/2, pi/2]")
        object.__setattr__(self, "longitude", normalize_longitude(self.longitude))

    @classmethod
    def from_degrees(cls, lat_deg: float, lon_deg: float) -> "SpherePoint":
        return cls(math.radians(lat_deg), math.radians(lon_deg))

    @property
    def colatitude(self) -> float:
        return math.pi / 2 - self.latitude

    def unit_vector(self) -> np.ndarray:
        cl = math.cos(self.latitude)
        return np.array(
            [cl * math.cos(self.longitude), cl * math.sin(self.longitude), math.sin(self.latitude)]
        )

    @classmethod
    def from_vector(cls, v: Sequence[float]) -> "SpherePoint":
        x, y, z = v
        r = math.sqrt(x * x + y * y + z * z)
        lat = math.asin(max(-1.0, min(1.0, z / r)))
        return cls(lat, math.atan2(y, x))

    def chord_distance(self, other: "SpherePoint") -> float:
        return float(np.linalg.norm(self.unit_vector() - other.unit_vector()))


@dataclass(frozen=True)
class PlanePoint:
    """Point of the image plane in rectangular coordinates."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite plane point ({self.x}, {self.y})")

    @classmethod
    def from_complex(cls, z: complex) -> "PlanePoint":
        return cls(z.real, z.imag)

    def as_complex(self) -> complex:
        return complex(self.x, self.y)

    def distance(self, other: "PlanePoint") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class GeneralizedCircle:
    """Circle, or straight line as the infinite-radius degenerate case.

    Circles carry ``center`` and ``radius``; lines carry a unit ``normal``
    and signed ``offset`` so the line is ``{p : normal . p = offset}``.
    """

    kind: Literal["circle", "line"]
    center: PlanePoint | None = None
    radius: float | None = None
    normal: tuple[float, float] | None = None
    offset: float | None = None

    def __post_init__(self):
        if self.kind == "circle":
            if self.center is None or self.radius is None or self.radius <= 0:
                raise ValueError("circle needs a center and a positive radius")
        elif self.kind == "line":
            if self.normal is None or self.offset is None:
                raise ValueError("line needs a normal and an offset")
            nx, ny = self.normal
            norm = math.hypot(nx, ny)
            if abs(norm - 1.0) > 1e-12:
                raise ValueError("line normal must be a unit vector")
        else:
            raise ValueError(f"unknown kind {self.kind!r}")

    @classmethod
    def circle(cls, center: PlanePoint, radius: float) -> "GeneralizedCircle":
        return cls(kind="circle", center=center, radius=radius)

    @classmethod
    def line(cls, normal: tuple[float, float], offset: float) -> "GeneralizedCircle":
        nx, ny = normal
        norm = math.hypot(nx, ny)
        if norm < 1e-300:
            raise ValueError("zero line normal")
        return cls(kind="line", normal=(nx / norm, ny / norm), offset=offset / norm)

    def distance_to(self, p: PlanePoint) -> float:
        """Orthogonal distance from ``p`` to the curve."""
        if self.kind == "circle":
            return abs(p.distance(self.center) - self.radius)
        nx, ny = self.normal
        return abs(nx * p.x + ny * p.y - self.offset)

    def point_at(self, t: float) -> PlanePoint:
        """Parametric point: angle ``t`` on a circle, arc length on a line."""
        if self.kind == "circle":
            return PlanePoint(
                self.center.x + self.radius * math.cos(t),
                self.center.y + self.radius * math.sin(t),
            )
        nx, ny = self.normal
        return PlanePoint(self.offset * nx - t * ny, self.offset * ny + t * nx)


@dataclass(frozen=True)
class MobiusTransform:
    """Plane map z -> (a z + b) / (c z + d), stored normalized to det = 1."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        scale = max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))
        if scale == 0.0 or abs(det) <= 1e-12 * scale * scale:
            raise DegenerateTransform(f"determinant {det} too close to zero")
        s = cmath.sqrt(det)
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, complex(getattr(self, name)) / s)

    @classmethod
    def identity(cls) -> "MobiusTransform":
        return cls(1, 0, 0, 1)

    def determinant(self) -> complex:
        return self.a * self.d - self.b * self.c

    def apply_complex(self, z: complex) -> complex:
        den = self.c * z + self.d
        if abs(den) < 1e-14:
            raise PointAtInfinity(f"point {z} maps to infinity")
        return (self.a * z + self.b) / den

    def __call__(self, z: complex) -> complex:
        return self.apply_complex(z)

    def compose(self, other: "MobiusTransform") -> "MobiusTransform":
        """Return self after other: (self . other)(z) = self(other(z))."""
        return MobiusTransform(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "MobiusTransform":
        return MobiusTransform(self.d, -self.b, -self.c, self.a)

    @classmethod
    def from_point_triples(
        cls,
        sources: tuple[complex, complex, complex],
        targets: tuple[complex, complex, complex],
    ) -> "MobiusTransform":
        """The unique Mobius map sending three points to three points."""

        def to_standard(z1, z2, z3):
            # sends z1, z2, z3 to 0, 1, infinity
            return np.array(
                [[z2 - z3, -z1 * (z2 - z3)], [z2 - z1, -z3 * (z2 - z1)]], dtype=complex
            )

        u = to_standard(*sources)
        w = to_standard(*targets)
        m = np.array([[w[1, 1], -w[0, 1]], [-w[1, 0], w[0, 0]]]) @ u
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])


@dataclass(frozen=True)
class Inversion:
    """Inversion p -> pole + k (p - pole) / |p - pole|^2 with power k != 0."""

    pole: PlanePoint
    power: float

    def __post_init__(self):
        if self.power == 0.0 or not math.isfinite(self.power):
            raise ValueError("inversion power must be finite and non-zero")


def invert_point(inv: Inversion, p: PlanePoint) -> PlanePoint:
    """Apply an inversion to a point; involutive away from the pole."""
    dx = p.x - inv.pole.x
    dy = p.y - inv.pole.y
    r2 = dx * dx + dy * dy
    if math.sqrt(r2) < 1e-14:
        raise PoleSingularity("point at the inversion pole")
    s = inv.power / r2
    return PlanePoint(inv.pole.x + s * dx, inv.pole.y + s * dy)


def mobius_apply(m: MobiusTransform, z: PlanePoint) -> PlanePoint:
    """Apply a Mobius transform to a plane point."""
    return PlanePoint.from_complex(m.apply_complex(z.as_complex()))


# -- exact circle images -----------------------------------------------------
#
# A generalized circle is the zero set of  A|z|^2 + B z + conj(B z) + C
# with A, C real.  Mobius substitution z = (d w - b)/(a - c w) turns one
# such form into another, which gives the exact image without sampling.


def _hermitian_of(c: GeneralizedCircle) -> tuple[float, complex, float]:
    if c.kind == "circle":
        z0 = c.center.as_complex()
        return 1.0, -z0.conjugate(), abs(z0) ** 2 - c.radius**2
    nx, ny = c.normal
    nu = complex(nx, ny)
    return 0.0, nu.conjugate(), -2.0 * c.offset


def _hermitian_to_circle(A: float, B: complex, C: float) -> GeneralizedCircle:
    scale = max(abs(A), abs(B), abs(C))
    if abs(A) < 1e-12 * scale:
        nu = B.conjugate()
        mag = abs(nu)
        return GeneralizedCircle.line((nu.real / mag, nu.imag / mag), -C / (2.0 * mag))
    center = -B.conjugate() / A
    r2 = abs(center) ** 2 - C / A
    if r2 <= 0.0:
        raise ValueError("image is an imaginary circle (invalid input)")
    return GeneralizedCircle.circle(PlanePoint.from_complex(center), math.sqrt(r2))


def _hermitian_mobius(
    coeffs: tuple[complex, complex, complex, complex],
    herm: tuple[float, complex, float],
) -> tuple[float, complex, float]:
    a, b, c, d = coeffs
    A, B, C = herm
    A2 = A * abs(d) ** 2 - 2.0 * (B * d * c.conjugate()).real + C * abs(c) ** 2
    B2 = (
        -A * d * b.conjugate()
        + B * d * a.conjugate()
        + B.conjugate() * b.conjugate() * c
        - C * c * a.conjugate()
    )
    C2 = A * abs(b) ** 2 - 2.0 * (B * b * a.conjugate()).real + C * abs(a) ** 2
    return A2, B2, C2


def _conjugate_circle(c: GeneralizedCircle) -> GeneralizedCircle:
    # image under z -> conj(z), i.e. reflection across the x-axis
    if c.kind == "circle":
        return GeneralizedCircle.circle(PlanePoint(c.center.x, -c.center.y), c.radius)
    nx, ny = c.normal
    return GeneralizedCircle.line((nx, -ny), c.offset)


def image_of_circle(
    transform: Inversion | MobiusTransform, c: GeneralizedCircle
) -> GeneralizedCircle:
    """Exact image of a generalized circle under an inversion or Mobius map.

    A circle through the pole of the transform comes out as a line and
    vice versa; the kind switch is a normal result, not an error.
    """
    if isinstance(transform, MobiusTransform):
        herm = _hermitian_of(c)
        coeffs = (transform.a, transform.b, transform.c, transform.d)
        return _hermitian_to_circle(*_hermitian_mobius(coeffs, herm))
    # inversion = conjugation followed by the Mobius map
    #   u -> pole + k / (u - conj(pole))
    p = transform.pole.as_complex()
    k = transform.power
    herm = _hermitian_of(_conjugate_circle(c))
    coeffs = (p, k - abs(p) ** 2, 1.0 + 0.0j, -p.conjugate())
    return _hermitian_to_circle(*_hermitian_mobius(coeffs, herm))


# -- stereographic bridge -----------------------------------------------------


def stereographic_project(p: SpherePoint) -> PlanePoint:
    """North-pole stereographic projection onto the equator plane.

    Image radius is cot(theta/2) = tan(pi/4 + lat/2) with theta the
    colatitude; the South pole maps to the origin.
    """
    if p.colatitude < POLE_COLATITUDE_EPS:
        raise ProjectionPole("the North pole has no stereographic image")
    rho = math.tan(math.pi / 4 + p.latitude / 2)
    return PlanePoint(rho * math.cos(p.longitude), rho * math.sin(p.longitude))


def stereographic_unproject(q: PlanePoint) -> SpherePoint:
    """Inverse stereographic projection; the origin returns the South pole."""
    rho = math.hypot(q.x, q.y)
    lat = 2.0 * math.atan(rho) - math.pi / 2
    return SpherePoint(lat, math.atan2(q.y, q.x))


# -- spherical polygon area ----------------------------------------------------


def spherical_polygon_area(vertices: Sequence[SpherePoint]) -> float:
    """Area (steradians) of a simple great-circle polygon via angle excess.

    Vertices are traversed with the interior on the left; the result is
    sum(interior angles) - (n - 2) pi, computed from signed turning angles
    on unit 3-vectors, which stays stable near the poles.
    """
    n = len(vertices)
    if n < 3:
        raise DegeneratePolygon("polygon needs at least 3 vertices")
    v = np.array([p.unit_vector() for p in vertices])
    nxt = np.roll(v, -1, axis=0)
    chord = np.linalg.norm(nxt - v, axis=1)
    anti = np.linalg.norm(nxt + v, axis=1)
    if np.any(chord < 1e-12):
        raise DegeneratePolygon("repeated consecutive vertices")
    if np.any(anti < 1e-9):
        raise DegeneratePolygon("antipodal consecutive vertices")

    # tangent at each vertex of the outgoing edge: (v x next) x v
    edge_normal = np.cross(v, nxt)
    t_out = np.cross(edge_normal, v)
    t_out /= np.linalg.norm(t_out, axis=1)[:, None]
    # tangent of arrival at the NEXT vertex along the same edge
    t_in_next = np.cross(edge_normal, nxt)
    t_in_next /= np.linalg.norm(t_in_next, axis=1)[:, None]
    t_in = np.roll(t_in_next, 1, axis=0)

    cross = np.cross(t_in, t_out)
    turn = np.arctan2(np.einsum("ij,ij->i", cross, v), np.einsum("ij,ij->i", t_in, t_out))
    return float(TWO_PI - np.sum(turn))


# -- least-squares generalized circle fit ---------------------------------------
#
# Pratt's algebraic fit: minimize sum (A|p|^2 + B x + C y + D)^2 subject to
# B^2 + C^2 - 4 A D = 1.  Handles the line limit (A -> 0) gracefully and is
# exact on exact data, which makes it usable as the oracle side of the
# circle-image tests.

_PRATT_CONSTRAINT = np.array(
    [
        [0.0, 0.0, 0.0, -2.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [-2.0, 0.0, 0.0, 0.0],
    ]
)


def circle_fit(points: Sequence[PlanePoint]) -> tuple[GeneralizedCircle, float]:
    """Fit a generalized circle; returns (curve, rms orthogonal distance).

    Degenerates to a line when the fitted curvature magnitude is below
    1e-10; raises InsufficientPoints for < 3 points or coincident data.
    """
    if len(points) < 3:
        raise InsufficientPoints(f"need at least 3 points, got {len(points)}")
    xy = np.array([[p.x, p.y] for p in points], dtype=float)
    centroid = xy.mean(axis=0)
    shifted = xy - centroid
    scale = math.sqrt(float(np.mean(np.sum(shifted**2, axis=1))))
    if scale < 1e-14:
        raise InsufficientPoints("all points coincide")
    u = shifted / scale

    zz = np.sum(u**2, axis=1)
    design = np.column_stack([zz, u[:, 0], u[:, 1], np.ones(len(u))])
    scatter = design.T @ design
    eigvals, eigvecs = np.linalg.eig(np.linalg.solve(_PRATT_CONSTRAINT, scatter))

    best = None
    for i in range(4):
        lam = eigvals[i]
        if abs(lam.imag) > 1e-8 * (1.0 + abs(lam)):
            continue
        vec = np.real(eigvecs[:, i])
        q = float(vec @ _PRATT_CONSTRAINT @ vec)
        if q <= 1e-14:
            continue
        lam = lam.real
        if lam < -1e-9:
            continue
        if best is None or lam < best[0]:
            best = (lam, vec / math.sqrt(q))
    if best is None:
        raise InsufficientPoints("degenerate configuration: no real fit")
    A, B, C, D = best[1]

    A, B, C, D = (float(v) for v in (A, B, C, D))
    cx0, cy0 = float(centroid[0]), float(centroid[1])

    curvature = 2.0 * abs(A) / scale
    if curvature < LINE_CURVATURE_EPS:
        # B^2 + C^2 = 1 under the constraint once A ~ 0
        mag = math.hypot(B, C)
        normal = (B / mag, C / mag)
        offset = scale * (-D / mag) + normal[0] * cx0 + normal[1] * cy0
        fitted = GeneralizedCircle.line(normal, offset)
    else:
        cx, cy = -B / (2.0 * A), -C / (2.0 * A)
        radius_u = math.sqrt(max(cx * cx + cy * cy - D / A, 0.0))
        fitted = GeneralizedCircle.circle(
            PlanePoint(cx0 + scale * cx, cy0 + scale * cy),
            scale * radius_u,
        )
    residuals = np.array([fitted.distance_to(p) for p in points])
    return fitted, float(math.sqrt(np.mean(residuals**2)))
