"""Numerical Schwarzian derivative S(f) = f'''/f' - (3/2)(f''/f')^2.

S vanishes exactly on Mobius transformations, so it classifies a
transition map between two charts as circle-preserving or not.  All
derivatives come from complex central differences with Richardson
extrapolation; before the third-derivative stage the map is post-composed
with the Mobius transform built from its own estimated 2-jet, which leaves
S unchanged while cancelling the catastrophic f'''/f' vs (f''/f')^2
subtraction near poles.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import CriticalPoint
from .geometry import PlanePoint

ComplexMap = Callable[[complex], complex]

DEFAULT_PROBE_STEP = 5e-3
CRITICAL_DERIVATIVE = 1e-10

# ratio of the derivative-stage step to the jet-stage step; larger steps
# are safe on the normalized map and push down the roundoff floor
_STAGE_STEP_RATIO = 12.0


@dataclass(frozen=True)
class AnalyticSample:
    """A complex-differentiable map with an evaluation point and probe step."""

    map: ComplexMap
    point: complex
    step: float = DEFAULT_PROBE_STEP

    def __post_init__(self):
        if isinstance(self.point, PlanePoint):
            object.__setattr__(self, "point", self.point.as_complex())
        if not (0.0 < self.step <= 5e-2):
            raise ValueError(f"probe step {self.step} out of range")


@dataclass(frozen=True)
class SchwarzianResult:
    value: complex
    error_bound: float


def _jet(f: ComplexMap, z: complex, h: float) -> tuple[complex, complex, complex]:
    """(f, f', f'') at z, order-4 central differences on f - f(z)."""
    f0 = f(z)
    gp, gm = f(z + h) - f0, f(z - h) - f0
    gph, gmh = f(z + h / 2) - f0, f(z - h / 2) - f0
    d1 = (4.0 * (gph - gmh) / h - (gp - gm) / (2.0 * h)) / 3.0
    d2 = (4.0 * (gph + gmh) / (h / 2) ** 2 - (gp + gm) / h**2) / 3.0
    return f0, d1, d2


def _richardson6(by_step: dict[float, complex]) -> tuple[complex, complex]:
    """(order-6 value, order-4 value at the finest pair) from three dyadic
    step estimates keyed 1, 0.5, 0.25."""
    r_coarse = (4.0 * by_step[0.5] - by_step[1.0]) / 3.0
    r_fine = (4.0 * by_step[0.25] - by_step[0.5]) / 3.0
    return (16.0 * r_fine - r_coarse) / 15.0, r_fine


def schwarzian(sample: AnalyticSample) -> SchwarzianResult:
    """Schwarzian derivative with an error bound from the extrapolation gaps."""
    f, z, h = sample.map, sample.point, sample.step
    f0, f1, f2 = _jet(f, z, h)
    if abs(f1) < CRITICAL_DERIVATIVE:
        raise CriticalPoint(f"|f'({z})| = {abs(f1)} below {CRITICAL_DERIVATIVE}")

    # Mobius normalization from the 2-jet: F = w + (S/6) w^3 + O(w^4)
    half_curve = f2 / (2.0 * f1)

    def normalized(w: complex) -> complex:
        v = f(z + w) - f0
        return v / (f1 + half_curve * v)

    big_h = _STAGE_STEP_RATIO * h
    vals = {s: normalized(s * big_h) for s in (2, 1, 0.5, 0.25, -0.25, -0.5, -1, -2)}
    d1 = {
        s: (vals[s] - vals[-s]) / (2.0 * s * big_h) for s in (1, 0.5, 0.25)
    }
    d2 = {
        s: (vals[s] + vals[-s]) / (s * big_h) ** 2 for s in (1, 0.5, 0.25)
    }
    d3 = {
        s: (vals[2 * s] - 2 * vals[s] + 2 * vals[-s] - vals[-2 * s])
        / (2.0 * (s * big_h) ** 3)
        for s in (1, 0.5, 0.25)
    }
    g1, g1_coarse = _richardson6(d1)
    g2, g2_coarse = _richardson6(d2)
    g3, g3_coarse = _richardson6(d3)
    if abs(g1) < CRITICAL_DERIVATIVE:
        raise CriticalPoint("normalized map is critical at the sample point")

    value = g3 / g1 - 1.5 * (g2 / g1) ** 2
    # first-order propagation of the order-6 vs order-4 gaps, plus a
    # roundoff floor (the gaps alone underestimate noise-dominated error):
    # each normalized value carries the evaluation noise of f scaled by
    # 1/f', and the finest stencil divides it by powers of the step
    e1, e2, e3 = abs(g1 - g1_coarse), abs(g2 - g2_coarse), abs(g3 - g3_coarse)
    noise = 2.3e-16 * (abs(f0) + abs(f1) * (1.0 + 2.0 * big_h)) / abs(f1)
    e3 += 800.0 * noise / big_h**3
    e2 += 120.0 * noise / big_h**2
    error = (
        e3 / abs(g1)
        + 3.0 * abs(g2) / abs(g1) ** 2 * e2
        + (abs(g3) / abs(g1) ** 2 + 3.0 * abs(g2) ** 2 / abs(g1) ** 3) * e1
    )
    return SchwarzianResult(value, error)


def derivative(f: ComplexMap, z: complex, h: float = DEFAULT_PROBE_STEP) -> complex:
    """First derivative by order-6 Richardson central differences."""
    d1 = {s: (f(z + s * h) - f(z - s * h)) / (2.0 * s * h) for s in (1, 0.5, 0.25)}
    return _richardson6(d1)[0]


def schwarzian_cocycle_residual(
    f: ComplexMap, g: ComplexMap, z: complex, h: float = DEFAULT_PROBE_STEP
) -> float:
    """Violation of S(f.g)(z) = S(f)(g(z)) g'(z)^2 + S(g)(z)."""
    gz = g(z)
    gp = derivative(g, z, h)
    if abs(gp) < CRITICAL_DERIVATIVE:
        raise CriticalPoint("g is critical at the chaining point")
    s_f = schwarzian(AnalyticSample(f, gz, h)).value
    s_g = schwarzian(AnalyticSample(g, z, h)).value
    s_fg = schwarzian(AnalyticSample(lambda w: f(g(w)), z, h)).value
    return abs(s_fg - (s_f * gp * gp + s_g))


def mobius_deviation(
    f: ComplexMap,
    sample_points: Sequence[complex],
    h: float = DEFAULT_PROBE_STEP,
) -> float:
    """max |S(f)| over the admissible sample points.

    Points where f is critical are skipped; at least five must remain.
    A deviation below 1e-6 is the working verdict that f is a Mobius map,
    i.e. that it preserves circles.
    """
    deviations = []
    for z in sample_points:
        try:
            deviations.append(abs(schwarzian(AnalyticSample(f, z, h)).value))
        except CriticalPoint:
            continue
    if len(deviations) < 5:
        raise CriticalPoint(
            f"only {len(deviations)} admissible sample points (need 5)"
        )
    return max(deviations)


MOBIUS_DEVIATION_TOL = 1e-6


def is_mobius(f: ComplexMap, sample_points: Sequence[complex], h: float = DEFAULT_PROBE_STEP) -> bool:
    """Circle-preservation verdict: deviation below the working tolerance."""
    return mobius_deviation(f, sample_points, h) < MOBIUS_DEVIATION_TOL
