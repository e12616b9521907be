"""Exception types shared across the toolkit."""


class CartaError(Exception):
    """Base class for all errors raised by this package."""


# -- plane / sphere geometry ------------------------------------------------

class PoleSingularity(CartaError):
    """A point coincides with the pole of an inversion."""


class PointAtInfinity(CartaError):
    """A Mobius transform was evaluated at (or too close to) its pole."""


class DegenerateTransform(CartaError):
    """Mobius coefficients with a vanishing determinant."""


class ProjectionPole(CartaError):
    """Stereographic projection evaluated at its center (the North pole)."""


class DegeneratePolygon(CartaError):
    """Spherical polygon with repeated or antipodal consecutive vertices."""


class InsufficientPoints(CartaError):
    """Too few (or coincident) points for a circle fit."""


# -- surfaces of revolution --------------------------------------------------

class PoleDegenerate(CartaError):
    """Surface evaluator called at a rotation-axis pole."""


# -- projection family -------------------------------------------------------

class OriginSingularity(CartaError):
    """Power map z -> z^c evaluated at the origin with c != 1."""


class BranchOverflow(CartaError):
    """Recentred longitude leaves the single-branch window of the power map."""


class OutsideImage(CartaError):
    """Plane point outside the image of the projection."""


# -- distortion --------------------------------------------------------------

class DomainEdge(CartaError):
    """Finite-difference probe left the projection domain."""


class EmptyRegion(CartaError):
    """An operation over a region received no sample points."""


# -- region meshes / optimal-scale solve ---------------------------------

class DegenerateBoundary(CartaError):
    """Region boundary with fewer than three distinct vertices."""


class SelfIntersectingBoundary(CartaError):
    """Region boundary polyline crosses itself."""


class RegionTooSmall(CartaError):
    """Mesh spacing too coarse for the region (fewer than 9 interior nodes)."""


class DisconnectedRegion(CartaError):
    """Meshed region splits into several grid components."""


class NoConvergence(CartaError):
    """Field solve failed to reach the residual tolerance."""


# -- triangle inversion solver ---------------------------------------------

class PoleOnVertex(CartaError):
    """Inversion pole coincides with a triangle vertex."""


class CoincidentPoints(CartaError):
    """Distinct points were required but coincide."""


class DegenerateTriangle(CartaError):
    """Collinear or zero-area triangle."""


class InfeasibleAngles(CartaError):
    """Requested subtended angle is not attainable on the locus."""


# -- schwarzian --------------------------------------------------------------

class CriticalPoint(CartaError):
    """|f'| below threshold: Schwarzian derivative undefined."""
