"""Minimal SVG 1.1 writer for projected maps.

Graticule images are emitted as native <circle> and <line> primitives
rather than polylines: the rendered file itself exhibits that the curves
are exact circles.  Output is deterministic; an optional header timestamp
is off by default.
"""

from __future__ import annotations

import math
from datetime import datetime, timezone
from typing import Sequence

from .geojson_io import format_float as fmt
from .geometry import GeneralizedCircle
from .lagrange import GraticuleCurveFit


def _line_endpoints(curve: GeneralizedCircle, bounds) -> tuple | None:
    """Clip an infinite line to a rectangle; None when it misses."""
    x0, y0, x1, y1 = bounds
    nx, ny = curve.normal
    d = curve.offset
    points = []
    for xv in (x0, x1):
        if abs(ny) > 1e-15:
            yv = (d - nx * xv) / ny
            if y0 - 1e-9 <= yv <= y1 + 1e-9:
                points.append((xv, yv))
    for yv in (y0, y1):
        if abs(nx) > 1e-15:
            xv = (d - ny * yv) / nx
            if x0 - 1e-9 <= xv <= x1 + 1e-9:
                points.append((xv, yv))
    unique = []
    for p in points:
        if not any(math.hypot(p[0] - q[0], p[1] - q[1]) < 1e-9 for q in unique):
            unique.append(p)
    if len(unique) < 2:
        return None
    return unique[0], unique[1]


def render_svg(
    path: str,
    curves: Sequence[GraticuleCurveFit],
    feature_lines: Sequence[Sequence[tuple[float, float]]] = (),
    bounds: tuple[float, float, float, float] | None = None,
    timestamp: bool = False,
) -> None:
    """Write an SVG map: graticule primitives plus projected feature paths.

    ``bounds`` is (xmin, ymin, xmax, ymax) in projection coordinates; when
    omitted it is taken from the feature paths and circle boxes.
    """
    if bounds is None:
        xs, ys = [], []
        for line in feature_lines:
            for x, y in line:
                xs.append(x)
                ys.append(y)
        for fit in curves:
            if fit.image.kind == "circle" and fit.image.radius < 1e3:
                xs += [fit.image.center.x - fit.image.radius, fit.image.center.x + fit.image.radius]
                ys += [fit.image.center.y - fit.image.radius, fit.image.center.y + fit.image.radius]
        if not xs:
            xs, ys = [-1.0, 1.0], [-1.0, 1.0]
        bounds = (min(xs), min(ys), max(xs), max(ys))
    x0, y0, x1, y1 = bounds
    pad = 0.05 * max(x1 - x0, y1 - y0, 1e-9)
    x0, y0, x1, y1 = x0 - pad, y0 - pad, x1 + pad, y1 + pad
    width, height = x1 - x0, y1 - y0
    stroke = max(width, height) / 400.0

    # SVG y grows downward: flip y when writing, so the viewBox lives in
    # (x, -y) coordinates
    view = f"{fmt(x0)} {fmt(-y1)} {fmt(width)} {fmt(height)}"
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{view}" '
        f'width="800" height="{fmt(800.0 * height / width)}">',
    ]
    if timestamp:
        parts.append(f"<!-- generated {datetime.now(timezone.utc).isoformat()} -->")
    parts.append(
        f'<g fill="none" stroke="#3366aa" stroke-width="{fmt(stroke)}">'
    )
    clip = (x0, y0, x1, y1)
    for fit in curves:
        label = (
            f"{fit.curve_id}: rms residual {fmt(fit.rms_residual)}"
            f" over diameter {fmt(fit.diameter)}"
        )
        if fit.image.kind == "circle":
            parts.append(
                f'<circle cx="{fmt(fit.image.center.x)}" cy="{fmt(-fit.image.center.y)}" '
                f'r="{fmt(fit.image.radius)}"><title>{label}</title></circle>'
            )
        else:
            ends = _line_endpoints(fit.image, clip)
            if ends is None:
                continue
            (ax, ay), (bx, by) = ends
            parts.append(
                f'<line x1="{fmt(ax)}" y1="{fmt(-ay)}" x2="{fmt(bx)}" y2="{fmt(-by)}">'
                f"<title>{label}</title></line>"
            )
    parts.append("</g>")
    if feature_lines:
        parts.append(
            f'<g fill="none" stroke="#aa3322" stroke-width="{fmt(1.5 * stroke)}">'
        )
        for line in feature_lines:
            if len(line) < 2:
                continue
            coords = " ".join(f"{fmt(x)},{fmt(-y)}" for x, y in line)
            parts.append(f'<polyline points="{coords}"/>')
        parts.append("</g>")
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(parts))
        handle.write("\n")
