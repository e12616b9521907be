"""GeoJSON ingestion and emission (RFC 7946: [longitude, latitude] degrees).

Writing goes through a small serializer of our own so every float is
printed with exactly 15 significant digits: byte-identical output for
identical inputs is part of the command-line contract.
"""

from __future__ import annotations

import json
import math
from typing import Callable, Sequence

from .geometry import SpherePoint


class GeoJsonError(ValueError):
    """Structurally invalid GeoJSON input."""


def format_float(x: float) -> str:
    """Fixed 15-significant-digit decimal form used in all outputs."""
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"non-finite value {x} in output")
    out = format(float(x), ".15g")
    return "-0" if out == "-0" else out


def dumps(obj) -> str:
    """Serialize JSON with deterministic float formatting."""
    pieces: list[str] = []
    _write(obj, pieces)
    return "".join(pieces)


def _write(obj, pieces: list[str]) -> None:
    if obj is None:
        pieces.append("null")
    elif obj is True:
        pieces.append("true")
    elif obj is False:
        pieces.append("false")
    elif isinstance(obj, str):
        pieces.append(json.dumps(obj))
    elif isinstance(obj, int):
        pieces.append(str(obj))
    elif isinstance(obj, float):
        pieces.append(format_float(obj))
    elif isinstance(obj, dict):
        pieces.append("{")
        for i, (key, value) in enumerate(obj.items()):
            if i:
                pieces.append(", ")
            pieces.append(json.dumps(str(key)))
            pieces.append(": ")
            _write(value, pieces)
        pieces.append("}")
    elif isinstance(obj, (list, tuple)):
        pieces.append("[")
        for i, value in enumerate(obj):
            if i:
                pieces.append(", ")
            _write(value, pieces)
        pieces.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj)}")


def load(path: str) -> dict:
    with open(path, encoding="utf-8") as handle:
        data = json.load(handle)
    if not isinstance(data, dict) or "type" not in data:
        raise GeoJsonError("input is not a GeoJSON object")
    return data


def write(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(dumps(obj))
        handle.write("\n")


def _geometries(obj: dict):
    kind = obj.get("type")
    if kind == "FeatureCollection":
        for feature in obj.get("features", []):
            yield from _geometries(feature)
    elif kind == "Feature":
        geom = obj.get("geometry")
        if geom is not None:
            yield from _geometries(geom)
    elif kind == "GeometryCollection":
        for geom in obj.get("geometries", []):
            yield from _geometries(geom)
    elif kind in ("Point", "MultiPoint", "LineString", "MultiLineString", "Polygon", "MultiPolygon"):
        yield obj
    else:
        raise GeoJsonError(f"unsupported GeoJSON type {kind!r}")


def _positions(coords):
    """Yield [lon, lat] leaves of a nested coordinate array."""
    if not isinstance(coords, (list, tuple)):
        raise GeoJsonError("malformed coordinates")
    if coords and isinstance(coords[0], (int, float)):
        if len(coords) < 2:
            raise GeoJsonError("coordinate with fewer than 2 numbers")
        yield coords
    else:
        for item in coords:
            yield from _positions(item)


def region_polyline(obj: dict) -> list[SpherePoint]:
    """Closed boundary polyline from the first usable geometry.

    A Polygon contributes its exterior ring; a LineString is taken as an
    implicitly closed ring.
    """
    for geom in _geometries(obj):
        if geom["type"] == "Polygon":
            rings = geom.get("coordinates") or []
            if not rings:
                continue
            return [_to_sphere(pos) for pos in rings[0]]
        if geom["type"] == "MultiPolygon":
            polys = geom.get("coordinates") or []
            if not polys or not polys[0]:
                continue
            return [_to_sphere(pos) for pos in polys[0][0]]
        if geom["type"] == "LineString":
            return [_to_sphere(pos) for pos in geom.get("coordinates", [])]
    raise GeoJsonError("no polygon or line boundary found in input")


def _to_sphere(position) -> SpherePoint:
    if not isinstance(position, (list, tuple)) or len(position) < 2:
        raise GeoJsonError(f"malformed position {position!r}")
    lon, lat = float(position[0]), float(position[1])
    if not (-90.0 <= lat <= 90.0):
        raise GeoJsonError(f"latitude {lat} outside [-90, 90]")
    return SpherePoint.from_degrees(lat, lon)


def all_positions(obj: dict) -> list[tuple[float, float]]:
    """Every (lon, lat) pair appearing in the object, in document order."""
    out = []
    for geom in _geometries(obj):
        for pos in _positions(geom.get("coordinates", [])):
            out.append((float(pos[0]), float(pos[1])))
    return out


def map_positions(obj, mapper: Callable[[float, float], Sequence[float]]):
    """Copy of a GeoJSON object with every position transformed.

    ``mapper`` receives (lon_deg, lat_deg) and returns the replacement
    coordinate pair.
    """
    if isinstance(obj, dict):
        out = {}
        for key, value in obj.items():
            if key == "coordinates":
                out[key] = _map_coords(value, mapper)
            else:
                out[key] = map_positions(value, mapper)
        return out
    if isinstance(obj, list):
        return [map_positions(item, mapper) for item in obj]
    return obj


def _map_coords(coords, mapper):
    if not isinstance(coords, (list, tuple)):
        raise GeoJsonError("malformed coordinates")
    if coords and isinstance(coords[0], (int, float)):
        lon, lat = float(coords[0]), float(coords[1])
        return [float(v) for v in mapper(lon, lat)]
    return [_map_coords(item, mapper) for item in coords]


def point_feature_collection(points, properties_for) -> dict:
    """FeatureCollection of Point features with computed properties."""
    features = []
    for p in points:
        features.append(
            {
                "type": "Feature",
                "geometry": {
                    "type": "Point",
                    "coordinates": [math.degrees(p.longitude), math.degrees(p.latitude)],
                },
                "properties": properties_for(p),
            }
        )
    return {"type": "FeatureCollection", "features": features}
