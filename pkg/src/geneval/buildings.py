"""Synthetic building-generalisation scenario.

Stands in for a production generalisation engine at desk scale: generates
rectilinear-ish building footprints, derives alternative generalisation
candidates through randomized transform pipelines, and scores each candidate
against the scenario's constraints.

Constraint measures (all mapped to [0, 1], higher = more satisfied):

    size         min(1, area / min_area_m2)
    granularity  min(1, shortest_edge / min_edge_m)
    squareness   1 - mean(|angle - 90| / 25) over vertices within 25 deg of 90
    convexity    area / area(convex hull)
    position     max(0, 1 - centroid_distance / position_tolerance_m)
    orientation  max(0, 1 - principal-orientation diff / orientation_tolerance_deg),
                 angles compared modulo 90 (rectilinear symmetry)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from shapely.geometry import box

from . import geometry
from .evalfunc import ConstraintSet, SatisfactionVector
from .geometry import GeometryError, Polygon
from .seeding import derive_rng

LEARNABLE_CONSTRAINTS = ("size", "granularity", "squareness", "convexity", "position")
ALL_CONSTRAINTS = LEARNABLE_CONSTRAINTS + ("orientation",)

DEFAULT_CONSTRAINT_SET = ConstraintSet(ALL_CONSTRAINTS)


@dataclass(frozen=True)
class ScenarioConfig:
    """Scale-derived legibility thresholds plus the evaluated constraint set."""

    scale_denominator: int = 25000
    min_area_m2: float = 100.0
    min_edge_m: float = 2.5
    position_tolerance_m: float = 10.0
    orientation_tolerance_deg: float = 15.0
    constraint_set: ConstraintSet = field(default=DEFAULT_CONSTRAINT_SET)

    def __post_init__(self):
        for name in ("min_area_m2", "min_edge_m", "position_tolerance_m",
                     "orientation_tolerance_deg"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        for cid in self.constraint_set:
            if cid not in CONSTRAINT_EVALUATORS:
                raise ValueError(
                    f"unknown constraint {cid!r}; available: {sorted(CONSTRAINT_EVALUATORS)}"
                )

    def to_json_obj(self) -> dict:
        return {
            "scale_denominator": self.scale_denominator,
            "min_area_m2": self.min_area_m2,
            "min_edge_m": self.min_edge_m,
            "position_tolerance_m": self.position_tolerance_m,
            "orientation_tolerance_deg": self.orientation_tolerance_deg,
        }

    @classmethod
    def from_json_obj(cls, obj: dict, constraints: list[str]) -> "ScenarioConfig":
        return cls(
            scale_denominator=obj["scale_denominator"],
            min_area_m2=obj["min_area_m2"],
            min_edge_m=obj["min_edge_m"],
            position_tolerance_m=obj["position_tolerance_m"],
            orientation_tolerance_deg=obj["orientation_tolerance_deg"],
            constraint_set=ConstraintSet(constraints),
        )


@dataclass(frozen=True)
class BuildingObject:
    object_id: str
    initial: Polygon


@dataclass(frozen=True)
class GeneralisationCandidate:
    """One generalisation result: geometry, its per-constraint satisfactions,
    and the transform recipe that produced it."""

    candidate_id: str
    object_id: str
    geometry: Polygon
    satisfactions: SatisfactionVector
    provenance: tuple[tuple[str, dict], ...] = ()

    def to_json_obj(self) -> dict:
        return {
            "id": self.candidate_id,
            "geometry": self.geometry.to_json_obj(),
            "satisfactions": list(self.satisfactions.values),
            "provenance": [[name, params] for name, params in self.provenance],
        }

    @classmethod
    def from_json_obj(cls, obj: dict, object_id: str,
                      constraints: ConstraintSet) -> "GeneralisationCandidate":
        return cls(
            candidate_id=obj["id"],
            object_id=object_id,
            geometry=Polygon.from_json_obj(obj["geometry"]),
            satisfactions=SatisfactionVector(constraints, obj["satisfactions"]),
            provenance=tuple((name, dict(params)) for name, params in obj.get("provenance", [])),
        )


# ---------------------------------------------------------------------------
# Constraint measures
# ---------------------------------------------------------------------------

def _measure_size(initial: Polygon, gen: Polygon, cfg: ScenarioConfig) -> float:
    return min(1.0, geometry.area(gen) / cfg.min_area_m2)


def _measure_granularity(initial: Polygon, gen: Polygon, cfg: ScenarioConfig) -> float:
    return min(1.0, geometry.shortest_edge(gen) / cfg.min_edge_m)


def _measure_squareness(initial: Polygon, gen: Polygon, cfg: ScenarioConfig) -> float:
    deviations = [abs(a - 90.0) for a in geometry.interior_angles_deg(gen)
                  if abs(a - 90.0) <= 25.0]
    if not deviations:
        return 1.0
    return 1.0 - sum(d / 25.0 for d in deviations) / len(deviations)


def _measure_convexity(initial: Polygon, gen: Polygon, cfg: ScenarioConfig) -> float:
    return geometry.convexity_ratio(gen)


def _measure_position(initial: Polygon, gen: Polygon, cfg: ScenarioConfig) -> float:
    dist = geometry.centroid_distance(initial, gen)
    return max(0.0, 1.0 - dist / cfg.position_tolerance_m)


def _measure_orientation(initial: Polygon, gen: Polygon, cfg: ScenarioConfig) -> float:
    diff = geometry.orientation_diff_deg(
        geometry.principal_orientation_deg(gen),
        geometry.principal_orientation_deg(initial),
    )
    return max(0.0, 1.0 - diff / cfg.orientation_tolerance_deg)


CONSTRAINT_EVALUATORS = {
    "size": _measure_size,
    "granularity": _measure_granularity,
    "squareness": _measure_squareness,
    "convexity": _measure_convexity,
    "position": _measure_position,
    "orientation": _measure_orientation,
}


def evaluate_constraints(initial: Polygon, gen: Polygon,
                         cfg: ScenarioConfig) -> SatisfactionVector:
    """Score `gen` against `initial` for every constraint in the scenario."""
    values = []
    for cid in cfg.constraint_set:
        v = CONSTRAINT_EVALUATORS[cid](initial, gen, cfg)
        values.append(min(1.0, max(0.0, v)))
    return SatisfactionVector(cfg.constraint_set, values)


# ---------------------------------------------------------------------------
# Footprint generation
# ---------------------------------------------------------------------------

def generate_building(seed: int) -> BuildingObject:
    """Deterministic rectilinear-ish footprint.

    A rectangle with sides 8-30 m carrying 0-3 corner notches or edge
    extensions (feature sides 2-6 m), randomly rotated and placed, with every
    vertex jittered by up to 0.5 m (capped at 5% of the shorter adjacent edge
    so corners stay within a few degrees of square).
    """
    for attempt in range(100):
        rng = derive_rng("building", seed, attempt)
        width = rng.uniform(8.0, 30.0)
        height = rng.uniform(8.0, 30.0)
        shape = box(0.0, 0.0, width, height)

        corners = [0, 1, 2, 3]
        edges = [0, 1, 2, 3]
        for _ in range(rng.randint(0, 3)):
            kind = rng.choice(("notch", "extension"))
            fmax_w = min(6.0, width / 3.0 - 0.5)
            fmax_h = min(6.0, height / 3.0 - 0.5)
            if kind == "notch" and corners:
                corner = corners.pop(rng.randrange(len(corners)))
                dx = rng.uniform(2.0, fmax_w)
                dy = rng.uniform(2.0, fmax_h)
                cut = {
                    0: box(0.0, 0.0, dx, dy),
                    1: box(width - dx, 0.0, width, dy),
                    2: box(width - dx, height - dy, width, height),
                    3: box(0.0, height - dy, dx, height),
                }[corner]
                shape = shape.difference(cut)
            elif kind == "extension" and edges:
                edge = edges.pop(rng.randrange(len(edges)))
                depth = rng.uniform(2.0, 6.0)
                if edge in (0, 2):  # bottom / top
                    length = rng.uniform(2.0, fmax_w)
                    start = rng.uniform(width / 3.0, 2.0 * width / 3.0 - length)
                    y0, y1 = (-depth, 0.0) if edge == 0 else (height, height + depth)
                    bump = box(start, y0, start + length, y1)
                else:  # right / left
                    length = rng.uniform(2.0, fmax_h)
                    start = rng.uniform(height / 3.0, 2.0 * height / 3.0 - length)
                    x0, x1 = (width, width + depth) if edge == 1 else (-depth, 0.0)
                    bump = box(x0, start, x1, start + length)
                shape = shape.union(bump)

        verts = list(shape.exterior.coords)[:-1]
        jittered = _jitter(verts, rng)
        angle = rng.uniform(0.0, 90.0)
        ox = rng.uniform(0.0, 1000.0)
        oy = rng.uniform(0.0, 1000.0)
        try:
            poly = Polygon(jittered)
            poly = geometry.rotate_polygon(poly, angle)
            poly = geometry.translate_polygon(poly, ox, oy)
        except GeometryError:
            continue
        return BuildingObject(object_id=f"building-{seed}", initial=poly)
    raise GeometryError(f"could not generate a valid footprint for seed {seed}")


def _jitter(verts: list[tuple[float, float]], rng) -> list[tuple[float, float]]:
    n = len(verts)
    out = []
    for i in range(n):
        prev_len = math.dist(verts[i - 1], verts[i])
        next_len = math.dist(verts[i], verts[(i + 1) % n])
        delta = min(0.5, 0.05 * min(prev_len, next_len))
        x, y = verts[i]
        out.append((x + rng.uniform(-delta, delta), y + rng.uniform(-delta, delta)))
    return out


# ---------------------------------------------------------------------------
# Candidate generation
# ---------------------------------------------------------------------------

TRANSFORM_NAMES = ("simplify", "square", "scale_to_min_area", "rotate", "translate", "identity")


def apply_recipe(initial: Polygon, recipe, cfg: ScenarioConfig) -> Polygon:
    """Apply a transform pipeline [(name, params), ...] to a footprint.

    Raises GeometryError if any step degenerates the polygon.
    """
    poly = initial
    for name, params in recipe:
        if name == "simplify":
            poly = geometry.simplify_polygon(poly, params["tolerance"])
        elif name == "square":
            poly = geometry.square_corners(poly, params["tolerance"])
        elif name == "scale_to_min_area":
            current = geometry.area(poly)
            if current < cfg.min_area_m2:
                factor = min(2.0, math.sqrt(cfg.min_area_m2 / current))
                poly = geometry.scale_polygon(poly, factor)
        elif name == "rotate":
            poly = geometry.rotate_polygon(poly, params["angle_deg"])
        elif name == "translate":
            poly = geometry.translate_polygon(poly, params["dx"], params["dy"])
        elif name == "identity":
            pass
        else:
            raise ValueError(f"unknown transform {name!r}")
    return poly


def make_candidate(b: BuildingObject, cfg: ScenarioConfig, candidate_id: str,
                   recipe) -> GeneralisationCandidate:
    """Build a candidate from an explicit transform recipe."""
    recipe = tuple((name, dict(params)) for name, params in recipe)
    geom = apply_recipe(b.initial, recipe, cfg)
    return GeneralisationCandidate(
        candidate_id=candidate_id,
        object_id=b.object_id,
        geometry=geom,
        satisfactions=evaluate_constraints(b.initial, geom, cfg),
        provenance=recipe,
    )


def _draw_recipe(rng, cfg: ScenarioConfig):
    if rng.random() < 1.0 / 6.0:
        return (("identity", {}),)
    ops = rng.sample(("simplify", "square", "scale_to_min_area", "rotate", "translate"),
                     rng.randint(1, 3))
    recipe = []
    for name in ops:
        if name == "simplify":
            recipe.append((name, {"tolerance": rng.uniform(0.5, 4.0)}))
        elif name == "square":
            recipe.append((name, {"tolerance": rng.uniform(0.8, 1.5)}))
        elif name == "scale_to_min_area":
            recipe.append((name, {}))
        elif name == "rotate":
            recipe.append((name, {"angle_deg": rng.uniform(-25.0, 25.0)}))
        elif name == "translate":
            dist = rng.uniform(0.0, 15.0)
            bearing = math.radians(rng.uniform(0.0, 360.0))
            recipe.append((name, {"dx": dist * math.cos(bearing),
                                  "dy": dist * math.sin(bearing)}))
    return tuple(recipe)


def generate_candidates(b: BuildingObject, cfg: ScenarioConfig, n: int,
                        seed: int) -> list[GeneralisationCandidate]:
    """n distinct candidates for one building, deterministic for a seed.

    Each candidate comes from a randomized pipeline of 1-3 transforms (or the
    identity); degenerate results and geometry duplicates are redrawn, with a
    bounded retry budget.
    """
    if n < 2:
        raise ValueError(f"need at least 2 candidates, got {n}")
    candidates: list[GeneralisationCandidate] = []
    seen: set[tuple] = set()
    for i in range(n):
        for attempt in range(50):
            rng = derive_rng("candidate", b.object_id, seed, i, attempt)
            recipe = _draw_recipe(rng, cfg)
            try:
                cand = make_candidate(b, cfg, f"{b.object_id}-g{i}", recipe)
            except GeometryError:
                continue
            key = tuple((round(x, 9), round(y, 9)) for x, y in cand.geometry.vertices)
            if key in seen:
                continue
            seen.add(key)
            candidates.append(cand)
            break
        else:
            raise GeometryError(
                f"could not produce {n} distinct candidates for {b.object_id}"
            )
    return candidates
