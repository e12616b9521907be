"""Command line: project GeoJSON, trace graticules, report distortion,
solve the optimal-scale field, and find triangle inversions.

Angles in flags and files are degrees; everything internal is radians.
Exit codes: 0 success (including valid negative answers), 2 config
validation, 3 input parse failure, 4 projection-domain error, 5 solver
non-convergence, 6 degenerate input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

from . import geojson_io
from .chebyshev import (
    build_cap_mesh,
    build_region_mesh,
    discretization_allowance,
    distortion_ratio,
    solve_log_scale,
)
from .distortion import dilatation_analytic, distortion_report
from .darboux import Triangle, find_inversion, image_triangle_sides, inversions_for_sides
from .errors import (
    BranchOverflow,
    CartaError,
    CoincidentPoints,
    DegenerateBoundary,
    DegeneratePolygon,
    DegenerateTriangle,
    DisconnectedRegion,
    DomainEdge,
    EmptyRegion,
    InfeasibleAngles,
    InsufficientPoints,
    NoConvergence,
    OriginSingularity,
    OutsideImage,
    PoleDegenerate,
    PoleOnVertex,
    PointAtInfinity,
    PoleSingularity,
    ProjectionPole,
    RegionTooSmall,
    SelfIntersectingBoundary,
)
from .geojson_io import GeoJsonError, format_float as fmt
from .geometry import Inversion, PlanePoint, SpherePoint
from .lagrange import (
    LagrangeProjectionSpec,
    centered_stereographic,
    graticule_image,
    project,
)
from .surfaces import SPHERE, SurfaceOfRevolution
from .svg_render import render_svg

EXIT_CONFIG = 2
EXIT_PARSE = 3
EXIT_DOMAIN = 4
EXIT_CONVERGENCE = 5
EXIT_DEGENERATE = 6

_DOMAIN_ERRORS = (
    ProjectionPole,
    PoleSingularity,
    PointAtInfinity,
    BranchOverflow,
    OutsideImage,
    OriginSingularity,
    DomainEdge,
    PoleDegenerate,
    EmptyRegion,
)
_DEGENERATE_ERRORS = (
    DegenerateTriangle,
    DegenerateBoundary,
    SelfIntersectingBoundary,
    RegionTooSmall,
    DisconnectedRegion,
    DegeneratePolygon,
    CoincidentPoints,
    InfeasibleAngles,
    PoleOnVertex,
    InsufficientPoints,
)


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


@dataclass
class JobConfig:
    """Validated run parameters; construction fails fast on bad values."""

    subcommand: str
    exponent: float = 1.0
    central_meridian_deg: float = 0.0
    inversion_pole: tuple[float, float] | None = None
    inversion_power: float | None = None
    centered_on: tuple[float, float] | None = None
    eccentricity: float = 0.0
    region_path: str | None = None
    cap_deg: float | None = None
    delta_deg: float | None = None
    lat_step_deg: float = 15.0
    lon_step_deg: float = 15.0
    samples: int = 64
    tolerance: float | None = None
    out_path: str | None = None
    svg_path: str | None = None
    report_path: str | None = None
    svg_timestamp: bool = False
    source: tuple[float, ...] | None = None
    target: tuple[float, ...] | None = None
    target_sides: tuple[float, float, float] | None = None
    projection_requested: bool = False
    outputs: dict = field(default_factory=dict)

    def validate(self) -> None:
        if not (0.0 < self.exponent <= 2.0):
            raise CliError(EXIT_CONFIG, f"--exponent {self.exponent} outside (0, 2]")
        if not (-180.0 <= self.central_meridian_deg <= 180.0):
            raise CliError(EXIT_CONFIG, "--central-meridian outside [-180, 180]")
        if not (0.0 <= self.eccentricity < 1.0):
            raise CliError(EXIT_CONFIG, f"--eccentricity {self.eccentricity} outside [0, 1)")
        if (self.inversion_pole is None) != (self.inversion_power is None):
            raise CliError(
                EXIT_CONFIG, "--inversion-pole and --inversion-power go together"
            )
        if self.inversion_power is not None and self.inversion_power == 0.0:
            raise CliError(EXIT_CONFIG, "--inversion-power must be non-zero")
        if self.centered_on is not None and (
            self.inversion_pole is not None or self.exponent != 1.0
        ):
            raise CliError(
                EXIT_CONFIG, "--centered-on implies exponent 1 and no inversion flags"
            )
        if self.delta_deg is not None and self.delta_deg <= 0:
            raise CliError(EXIT_CONFIG, "--delta-deg must be positive")
        if self.cap_deg is not None and not (0.0 < self.cap_deg < 90.0):
            raise CliError(EXIT_CONFIG, f"--cap-deg {self.cap_deg} outside (0, 90)")
        if self.tolerance is not None and self.tolerance <= 0:
            raise CliError(EXIT_CONFIG, "--tolerance must be positive")
        if not (0.0 < self.lat_step_deg < 90.0):
            raise CliError(EXIT_CONFIG, "--lat-step outside (0, 90)")
        if not (0.0 < self.lon_step_deg <= 180.0):
            raise CliError(EXIT_CONFIG, "--lon-step outside (0, 180]")
        if self.samples < 8:
            raise CliError(EXIT_CONFIG, "--samples must be at least 8")

    def spec(self) -> LagrangeProjectionSpec:
        if self.centered_on is not None:
            return centered_stereographic(
                SpherePoint.from_degrees(self.centered_on[0], self.centered_on[1])
            )
        post = None
        if self.inversion_pole is not None:
            post = Inversion(
                PlanePoint(self.inversion_pole[0], self.inversion_pole[1]),
                self.inversion_power,
            )
        surface = SPHERE if self.eccentricity == 0.0 else SurfaceOfRevolution(self.eccentricity)
        return LagrangeProjectionSpec(
            exponent=self.exponent,
            central_meridian=math.radians(self.central_meridian_deg),
            post_transform=post,
            surface=surface,
        )


def _parse_pair(text: str, flag: str) -> tuple[float, float]:
    try:
        parts = [float(v) for v in text.split(",")]
    except ValueError:
        raise CliError(EXIT_CONFIG, f"{flag} expects comma-separated numbers")
    if len(parts) != 2:
        raise CliError(EXIT_CONFIG, f"{flag} expects exactly two numbers")
    return parts[0], parts[1]


def _parse_floats(text: str, count: int, flag: str) -> tuple[float, ...]:
    try:
        parts = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise CliError(EXIT_CONFIG, f"{flag} expects comma-separated numbers")
    if len(parts) != count:
        raise CliError(EXIT_CONFIG, f"{flag} expects {count} numbers, got {len(parts)}")
    return parts


def _load_geojson(path: str) -> dict:
    try:
        return geojson_io.load(path)
    except FileNotFoundError:
        raise CliError(EXIT_CONFIG, f"input file not found: {path}")
    except (json.JSONDecodeError, GeoJsonError, UnicodeDecodeError) as exc:
        raise CliError(EXIT_PARSE, f"cannot parse {path}: {exc}")


def _region_mesh(config: JobConfig):
    delta = math.radians(config.delta_deg if config.delta_deg is not None else 1.0)
    if config.cap_deg is not None:
        return build_cap_mesh(math.radians(config.cap_deg), delta)
    if config.region_path is None:
        raise CliError(EXIT_CONFIG, "need --region or --cap-deg")
    region = _load_geojson(config.region_path)
    try:
        boundary = geojson_io.region_polyline(region)
    except GeoJsonError as exc:
        raise CliError(EXIT_PARSE, str(exc))
    return build_region_mesh(boundary, delta)


def _write_report(config: JobConfig, lines: list[str]) -> str:
    text = "\n".join(lines) + "\n"
    if config.report_path:
        config.outputs[config.report_path] = text
    return text


def _flush_outputs(config: JobConfig) -> None:
    """All file writing happens here, after every computation succeeded."""
    for path, content in config.outputs.items():
        if callable(content):
            content(path)
        else:
            with open(path, "w", encoding="utf-8") as handle:
                handle.write(content)


# -- subcommands ---------------------------------------------------------------


def run_project(config: JobConfig) -> str:
    spec = config.spec()
    data = _load_geojson(config.region_path)
    positions = geojson_io.all_positions(data)
    if config.out_path is None and config.svg_path is None:
        raise CliError(EXIT_CONFIG, "project needs --out and/or --svg")

    def mapper(lon_deg: float, lat_deg: float):
        if not (-90.0 <= lat_deg <= 90.0):
            raise CliError(EXIT_PARSE, f"latitude {lat_deg} outside [-90, 90]")
        try:
            q = project(spec, SpherePoint.from_degrees(lat_deg, lon_deg))
        except _DOMAIN_ERRORS as exc:
            raise CliError(
                EXIT_DOMAIN,
                f"cannot project coordinate ({fmt(lon_deg)}, {fmt(lat_deg)}): {exc}",
            )
        return q.x, q.y

    projected = geojson_io.map_positions(data, mapper)
    if config.out_path:
        config.outputs[config.out_path] = geojson_io.dumps(projected) + "\n"

    curves = graticule_image(
        spec,
        math.radians(config.lat_step_deg),
        math.radians(config.lon_step_deg),
        config.samples,
    )
    if config.svg_path:
        feature_lines = _feature_lines(projected)
        svg_path = config.svg_path
        config.outputs[svg_path] = lambda p: render_svg(
            p, curves, feature_lines, timestamp=config.svg_timestamp
        )

    lines = [
        "project report",
        f"exponent: {fmt(config.exponent)}",
        f"central-meridian-deg: {fmt(config.central_meridian_deg)}",
        f"coordinates-projected: {len(positions)}",
        f"graticule-curves: {len(curves)}",
    ]
    worst = max((c.relative_residual for c in curves), default=0.0)
    lines.append(f"worst-relative-residual: {fmt(worst)}")
    return _write_report(config, lines)


def _feature_lines(projected: dict) -> list[list[tuple[float, float]]]:
    lines = []
    for geom in geojson_io._geometries(projected):
        kind = geom["type"]
        coords = geom.get("coordinates", [])
        if kind == "LineString":
            lines.append([tuple(p[:2]) for p in coords])
        elif kind in ("MultiLineString", "Polygon"):
            for part in coords:
                lines.append([tuple(p[:2]) for p in part])
        elif kind == "MultiPolygon":
            for poly in coords:
                for part in poly:
                    lines.append([tuple(p[:2]) for p in part])
    return lines


def run_graticule(config: JobConfig) -> str:
    spec = config.spec()
    curves = graticule_image(
        spec,
        math.radians(config.lat_step_deg),
        math.radians(config.lon_step_deg),
        config.samples,
    )
    if config.svg_path:
        config.outputs[config.svg_path] = lambda p: render_svg(
            p, curves, timestamp=config.svg_timestamp
        )
    lines = [
        "graticule report",
        f"exponent: {fmt(config.exponent)}",
        f"curves: {len(curves)}",
    ]
    for fit in curves:
        if fit.image.kind == "circle":
            shape = (
                f"circle center=({fmt(fit.image.center.x)}, {fmt(fit.image.center.y)})"
                f" radius={fmt(fit.image.radius)}"
            )
        else:
            shape = (
                f"line normal=({fmt(fit.image.normal[0])}, {fmt(fit.image.normal[1])})"
                f" offset={fmt(fit.image.offset)}"
            )
        lines.append(
            f"{fit.curve_id} | {shape} | rms={fmt(fit.rms_residual)}"
            f" diameter={fmt(fit.diameter)} relative={fmt(fit.relative_residual)}"
        )
    return _write_report(config, lines)


def run_distortion(config: JobConfig) -> str:
    spec = config.spec()
    mesh = _region_mesh(config)
    report = distortion_report(spec, mesh.node_points())
    if config.out_path:
        by_point = {id(s.point): s for s in report.samples}
        collection = geojson_io.point_feature_collection(
            [s.point for s in report.samples],
            lambda p: {
                "m": by_point[id(p)].m,
                "conformality_defect": by_point[id(p)].conformality_defect,
            },
        )
        config.outputs[config.out_path] = geojson_io.dumps(collection) + "\n"
    lines = [
        "distortion report",
        f"exponent: {fmt(config.exponent)}",
        f"samples: {len(report.samples)}",
        f"m-min: {fmt(report.m_min)}",
        f"m-max: {fmt(report.m_max)}",
        f"ratio: {fmt(report.ratio)}",
        f"worst-conformality-defect: {fmt(max(s.conformality_defect for s in report.samples))}",
    ]
    return _write_report(config, lines)


def run_chebyshev(config: JobConfig) -> str:
    mesh = _region_mesh(config)
    field = solve_log_scale(mesh)
    ratio_optimal = distortion_ratio(field)
    allowance = (
        config.tolerance if config.tolerance is not None else discretization_allowance(mesh)
    )
    lines = [
        "chebyshev report",
        f"mesh-kind: {mesh.kind}",
        f"delta-deg: {fmt(math.degrees(mesh.delta))}",
        f"nodes: {mesh.node_count}",
        f"interior-nodes: {mesh.interior_count}",
        f"u-min: {fmt(float(field.values.min()))}",
        f"ratio-optimal: {fmt(ratio_optimal)}",
        f"allowance: {fmt(allowance)}",
    ]
    wants_projection = (
        config.centered_on is not None
        or config.inversion_pole is not None
        or config.exponent != 1.0
        or config.projection_requested
    )
    if wants_projection:
        spec = config.spec()
        regular = []
        for p in mesh.node_points():
            try:
                regular.append(dilatation_analytic(spec, p))
            except CartaError:
                continue
        if not regular:
            raise CliError(EXIT_DOMAIN, "projection is singular on the whole region")
        ratio_projection = max(regular) / min(regular)
        gap = ratio_projection - ratio_optimal
        if gap > allowance:
            verdict = "projection-suboptimal"
        elif gap >= -allowance:
            verdict = "optimal-matches-projection"
        else:
            verdict = "optimality-violated"
        lines += [
            f"ratio-projection: {fmt(ratio_projection)}",
            f"gap: {fmt(gap)}",
            f"verdict: {verdict}",
        ]
    if config.out_path:
        points = mesh.node_points()
        values = mesh.node_values(field.values)
        u_by_point = dict(zip((id(p) for p in points), values))
        collection = geojson_io.point_feature_collection(
            points,
            lambda p: {"u": float(u_by_point[id(p)]), "m": math.exp(float(u_by_point[id(p)]))},
        )
        config.outputs[config.out_path] = geojson_io.dumps(collection) + "\n"
    return _write_report(config, lines)


def run_darboux(config: JobConfig) -> str:
    if config.source is None:
        raise CliError(EXIT_CONFIG, "darboux needs --source")
    sx = config.source
    source = Triangle(
        PlanePoint(sx[0], sx[1]), PlanePoint(sx[2], sx[3]), PlanePoint(sx[4], sx[5])
    )
    if config.target is not None:
        tx = config.target
        target = Triangle(
            PlanePoint(tx[0], tx[1]), PlanePoint(tx[2], tx[3]), PlanePoint(tx[4], tx[5])
        )
        target_sides = target.sides()
        solutions = find_inversion(source, target)
    elif config.target_sides is not None:
        target_sides = config.target_sides
        if min(target_sides) <= 0:
            raise CliError(EXIT_CONFIG, "--target-sides must be positive")
        solutions = inversions_for_sides(source, target_sides)
    else:
        raise CliError(EXIT_CONFIG, "darboux needs --target or --target-sides")

    lines = ["darboux report", f"solutions: {len(solutions)}"]
    if not solutions:
        lines.append("no inversion exists (the pole loci do not intersect)")
    for inv in solutions:
        achieved = image_triangle_sides(inv, source)
        errs = tuple(abs(x - y) / y for x, y in zip(achieved, target_sides))
        lines.append(
            f"inversion pole=({fmt(inv.pole.x)}, {fmt(inv.pole.y)})"
            f" power={fmt(inv.power)}"
            f" side-errors=({fmt(errs[0])}, {fmt(errs[1])}, {fmt(errs[2])})"
        )
    return _write_report(config, lines)


# -- argument wiring ------------------------------------------------------------


def _add_projection_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--exponent", type=float, default=1.0)
    sub.add_argument("--central-meridian", type=float, default=0.0, metavar="DEG")
    sub.add_argument("--inversion-pole", metavar="X,Y")
    sub.add_argument("--inversion-power", type=float)
    sub.add_argument("--centered-on", metavar="LAT,LON")
    sub.add_argument("--eccentricity", type=float, default=0.0)


def _add_output_flags(sub: argparse.ArgumentParser, svg: bool = True) -> None:
    sub.add_argument("--out", metavar="PATH")
    sub.add_argument("--report", metavar="PATH")
    if svg:
        sub.add_argument("--svg", metavar="PATH")
        sub.add_argument("--svg-timestamp", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="carta",
        description="Conformal projections with circular graticules and distortion tools",
    )
    subs = parser.add_subparsers(dest="subcommand", required=True)

    p = subs.add_parser("project", help="project GeoJSON and draw the graticule")
    _add_projection_flags(p)
    p.add_argument("--region", required=True, metavar="PATH")
    p.add_argument("--lat-step", type=float, default=15.0, metavar="DEG")
    p.add_argument("--lon-step", type=float, default=15.0, metavar="DEG")
    p.add_argument("--samples", type=int, default=64)
    _add_output_flags(p)

    p = subs.add_parser("graticule", help="fit circles to all graticule images")
    _add_projection_flags(p)
    p.add_argument("--lat-step", type=float, default=15.0, metavar="DEG")
    p.add_argument("--lon-step", type=float, default=15.0, metavar="DEG")
    p.add_argument("--samples", type=int, default=64)
    _add_output_flags(p)

    p = subs.add_parser("distortion", help="dilatation extrema over a region")
    _add_projection_flags(p)
    p.add_argument("--region", metavar="PATH")
    p.add_argument("--cap-deg", type=float)
    p.add_argument("--delta-deg", type=float, default=1.0)
    _add_output_flags(p, svg=False)

    p = subs.add_parser("chebyshev", help="optimal-distortion field of a region")
    _add_projection_flags(p)
    p.add_argument("--region", metavar="PATH")
    p.add_argument("--cap-deg", type=float)
    p.add_argument("--delta-deg", type=float, default=0.25)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--compare-projection", action="store_true")
    _add_output_flags(p, svg=False)

    p = subs.add_parser("darboux", help="inversion carrying one triangle to another")
    p.add_argument("--source", required=True, metavar="X1,Y1,X2,Y2,X3,Y3")
    p.add_argument("--target", metavar="X1,Y1,X2,Y2,X3,Y3")
    p.add_argument("--target-sides", metavar="A,B,C")
    _add_output_flags(p, svg=False)

    return parser


def _config_from_args(args: argparse.Namespace) -> JobConfig:
    config = JobConfig(subcommand=args.subcommand)
    for name in (
        "exponent",
        "eccentricity",
        "delta_deg",
        "cap_deg",
        "tolerance",
        "samples",
        "svg_timestamp",
        "inversion_power",
    ):
        if hasattr(args, name):
            value = getattr(args, name)
            if value is not None:
                setattr(config, name, value)
    if getattr(args, "central_meridian", None) is not None:
        config.central_meridian_deg = args.central_meridian
    if getattr(args, "lat_step", None) is not None:
        config.lat_step_deg = args.lat_step
    if getattr(args, "lon_step", None) is not None:
        config.lon_step_deg = args.lon_step
    if getattr(args, "inversion_pole", None) is not None:
        config.inversion_pole = _parse_pair(args.inversion_pole, "--inversion-pole")
    if getattr(args, "centered_on", None) is not None:
        config.centered_on = _parse_pair(args.centered_on, "--centered-on")
    config.region_path = getattr(args, "region", None)
    config.out_path = getattr(args, "out", None)
    config.svg_path = getattr(args, "svg", None)
    config.report_path = getattr(args, "report", None)
    if getattr(args, "source", None) is not None:
        config.source = _parse_floats(args.source, 6, "--source")
    if getattr(args, "target", None) is not None:
        config.target = _parse_floats(args.target, 6, "--target")
    if getattr(args, "target_sides", None) is not None:
        config.target_sides = _parse_floats(args.target_sides, 3, "--target-sides")
    config.projection_requested = bool(getattr(args, "compare_projection", False))
    return config


_RUNNERS = {
    "project": run_project,
    "graticule": run_graticule,
    "distortion": run_distortion,
    "chebyshev": run_chebyshev,
    "darboux": run_darboux,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = _config_from_args(args)
    try:
        config.validate()
        text = _RUNNERS[config.subcommand](config)
        _flush_outputs(config)
    except CliError as exc:
        print(f"carta: {exc}", file=sys.stderr)
        return exc.code
    except NoConvergence as exc:
        print(f"carta: no convergence: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except _DEGENERATE_ERRORS as exc:
        print(f"carta: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except _DOMAIN_ERRORS as exc:
        print(f"carta: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"carta: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
