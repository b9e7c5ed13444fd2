"""Planar polygon primitives for the synthetic building scenario.

Thin layer over shapely: validity, measures (area, centroid, angles,
principal orientation) and the shape transforms used to produce
generalisation candidates. All functions are pure; polygons are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import shapely
from shapely import affinity
from shapely.geometry import Polygon as ShapelyPolygon


class GeometryError(ValueError):
    """Degenerate or invalid polygon geometry."""


@dataclass(frozen=True)
class Polygon:
    """Simple polygon: ordered (x, y) vertices in meters, implicitly closed,
    counter-clockwise after normalization."""

    vertices: tuple[tuple[float, float], ...]

    def __init__(self, vertices: Sequence[Sequence[float]]):
        verts = [(float(x), float(y)) for x, y in vertices]
        if len(verts) > 1 and verts[0] == verts[-1]:
            verts = verts[:-1]
        # drop exact consecutive duplicates
        cleaned: list[tuple[float, float]] = []
        for v in verts:
            if not cleaned or v != cleaned[-1]:
                cleaned.append(v)
        if len(cleaned) < 3:
            raise GeometryError(f"polygon needs >= 3 distinct vertices, got {len(cleaned)}")
        if _signed_area(cleaned) < 0:
            cleaned = [cleaned[0]] + cleaned[:0:-1]
        shp = ShapelyPolygon(cleaned)
        if not shp.is_valid:
            raise GeometryError("polygon is self-intersecting or otherwise invalid")
        if shp.area <= 0.0:
            raise GeometryError("polygon has zero area")
        object.__setattr__(self, "vertices", tuple(cleaned))

    def to_shapely(self) -> ShapelyPolygon:
        return ShapelyPolygon(self.vertices)

    def to_json_obj(self) -> list[list[float]]:
        return [[x, y] for x, y in self.vertices]

    @classmethod
    def from_json_obj(cls, obj: Sequence[Sequence[float]]) -> "Polygon":
        return cls(obj)


def _signed_area(verts: Sequence[tuple[float, float]]) -> float:
    acc = 0.0
    n = len(verts)
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        acc += x0 * y1 - x1 * y0
    return acc / 2.0


def area(poly: Polygon) -> float:
    return poly.to_shapely().area


def centroid(poly: Polygon) -> tuple[float, float]:
    c = poly.to_shapely().centroid
    return (c.x, c.y)


def centroid_distance(a: Polygon, b: Polygon) -> float:
    ax, ay = centroid(a)
    bx, by = centroid(b)
    return math.hypot(ax - bx, ay - by)


def edge_lengths(poly: Polygon) -> list[float]:
    verts = poly.vertices
    n = len(verts)
    return [math.dist(verts[i], verts[(i + 1) % n]) for i in range(n)]


def shortest_edge(poly: Polygon) -> float:
    return min(edge_lengths(poly))


def interior_angles_deg(poly: Polygon) -> list[float]:
    """Interior angle at each vertex, in degrees (reflex corners > 180)."""
    verts = poly.vertices
    n = len(verts)
    angles = []
    for i in range(n):
        px, py = verts[i - 1]
        vx, vy = verts[i]
        nx, ny = verts[(i + 1) % n]
        d1 = (vx - px, vy - py)
        d2 = (nx - vx, ny - vy)
        turn = math.degrees(math.atan2(d1[0] * d2[1] - d1[1] * d2[0],
                                       d1[0] * d2[0] + d1[1] * d2[1]))
        angles.append(180.0 - turn)
    return angles


def convexity_ratio(poly: Polygon) -> float:
    shp = poly.to_shapely()
    return shp.area / shapely.convex_hull(shp).area


def principal_orientation_deg(poly: Polygon) -> float:
    """Orientation of the long side of the minimum-area bounding rectangle,
    in degrees within [0, 180)."""
    mrr = poly.to_shapely().minimum_rotated_rectangle
    coords = list(mrr.exterior.coords)
    if len(coords) < 4:
        raise GeometryError("degenerate bounding rectangle")
    e1 = (coords[1][0] - coords[0][0], coords[1][1] - coords[0][1])
    e2 = (coords[2][0] - coords[1][0], coords[2][1] - coords[1][1])
    long_edge = e1 if math.hypot(*e1) >= math.hypot(*e2) else e2
    return math.degrees(math.atan2(long_edge[1], long_edge[0])) % 180.0


def orientation_diff_deg(a_deg: float, b_deg: float) -> float:
    """Angle difference folded modulo 90 (rectilinear symmetry), in [0, 45]."""
    d = (a_deg - b_deg) % 90.0
    return min(d, 90.0 - d)


def translate_polygon(poly: Polygon, dx: float, dy: float) -> Polygon:
    return Polygon([(x + dx, y + dy) for x, y in poly.vertices])


def rotate_polygon(poly: Polygon, angle_deg: float) -> Polygon:
    """Rotate about the polygon centroid."""
    cx, cy = centroid(poly)
    cos = math.cos(math.radians(angle_deg))
    sin = math.sin(math.radians(angle_deg))
    return Polygon([
        (cx + (x - cx) * cos - (y - cy) * sin,
         cy + (x - cx) * sin + (y - cy) * cos)
        for x, y in poly.vertices
    ])


def scale_polygon(poly: Polygon, factor: float) -> Polygon:
    """Uniform scaling about the polygon centroid."""
    if factor <= 0:
        raise GeometryError(f"scale factor must be positive, got {factor}")
    cx, cy = centroid(poly)
    return Polygon([(cx + (x - cx) * factor, cy + (y - cy) * factor)
                    for x, y in poly.vertices])


def simplify_polygon(poly: Polygon, tolerance: float) -> Polygon:
    """Douglas-Peucker vertex decimation; raises GeometryError on collapse."""
    simplified = poly.to_shapely().simplify(tolerance, preserve_topology=True)
    if simplified.is_empty or simplified.geom_type != "Polygon":
        raise GeometryError(f"simplification with tolerance {tolerance} collapsed the polygon")
    return Polygon(list(simplified.exterior.coords))


def square_corners(poly: Polygon, cluster_tol: float = 1.2) -> Polygon:
    """Snap near-rectilinear shapes to exact right angles.

    Works in the frame of the minimum-area bounding rectangle: coordinates
    within cluster_tol of each other are snapped to their cluster mean, which
    makes nearly-axis-parallel edges exactly axis-parallel. Edges tilted well
    away from the frame axes end up distorted; callers discard invalid results.
    """
    theta = principal_orientation_deg(poly)
    cx, cy = centroid(poly)
    cos = math.cos(math.radians(-theta))
    sin = math.sin(math.radians(-theta))
    frame = [((x - cx) * cos - (y - cy) * sin, (x - cx) * sin + (y - cy) * cos)
             for x, y in poly.vertices]
    xs = _snap_to_clusters([v[0] for v in frame], cluster_tol)
    ys = _snap_to_clusters([v[1] for v in frame], cluster_tol)
    cos_b, sin_b = math.cos(math.radians(theta)), math.sin(math.radians(theta))
    snapped = [(cx + x * cos_b - y * sin_b, cy + x * sin_b + y * cos_b)
               for x, y in zip(xs, ys)]
    return Polygon(snapped)


def _snap_to_clusters(values: list[float], tol: float) -> list[float]:
    order = np.argsort(values)
    snapped = list(values)
    cluster: list[int] = []
    for idx in order:
        if cluster and values[idx] - values[cluster[-1]] > tol:
            mean = float(np.mean([values[i] for i in cluster]))
            for i in cluster:
                snapped[i] = mean
            cluster = []
        cluster.append(int(idx))
    if cluster:
        mean = float(np.mean([values[i] for i in cluster]))
        for i in cluster:
            snapped[i] = mean
    return snapped
