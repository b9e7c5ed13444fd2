import math

import pytest

from geneval import (
    ConstraintSet,
    GeometryError,
    Polygon,
    ScenarioConfig,
    evaluate_constraints,
    generate_building,
    generate_candidates,
    make_candidate,
)
from geneval import geometry

CFG = ScenarioConfig()


class TestGenerateBuilding:
    def test_deterministic(self):
        assert generate_building(1).initial == generate_building(1).initial
        assert generate_building(1).object_id == generate_building(1).object_id

    def test_different_seeds_differ(self):
        assert generate_building(1).initial != generate_building(2).initial

    def test_valid_polygons(self):
        for seed in range(50):
            poly = generate_building(seed).initial
            assert len(poly.vertices) >= 3
            assert poly.to_shapely().is_valid
            assert geometry.area(poly) > 0

    def test_area_sweep_within_envelope(self):
        # brute-force sweep over the generator's documented parameter ranges
        for seed in range(1000):
            a = geometry.area(generate_building(seed).initial)
            assert 4.0 <= a <= 1600.0

    def test_roughly_square_corners(self):
        angles = geometry.interior_angles_deg(generate_building(3).initial)
        for a in angles:
            dev = min(abs(a - 90.0), abs(a - 270.0))
            assert dev <= 10.0


class TestEvaluateConstraints:
    def test_identity_scores_position_and_orientation_full(self):
        for seed in (0, 5, 9):
            poly = generate_building(seed).initial
            sat = evaluate_constraints(poly, poly, CFG)
            assert sat.value_of("position") == 1.0
            assert sat.value_of("orientation") == 1.0

    def test_area_exactly_at_threshold(self):
        square = Polygon([(0, 0), (10, 0), (10, 10), (0, 10)])
        sat = evaluate_constraints(square, square, CFG)
        assert sat.value_of("size") == pytest.approx(1.0)

    def test_small_area_scales_linearly(self):
        square = Polygon([(0, 0), (5, 0), (5, 5), (0, 5)])
        sat = evaluate_constraints(square, square, CFG)
        assert sat.value_of("size") == pytest.approx(0.25)

    def test_perfect_rectangle_square_and_convex(self):
        rect = Polygon([(0, 0), (20, 0), (20, 8), (0, 8)])
        sat = evaluate_constraints(rect, rect, CFG)
        assert sat.value_of("squareness") == pytest.approx(1.0)
        assert sat.value_of("convexity") == pytest.approx(1.0)

    def test_position_half_at_half_tolerance(self):
        rect = Polygon([(0, 0), (20, 0), (20, 8), (0, 8)])
        moved = geometry.translate_polygon(rect, 3.0, 4.0)  # 5 m, tolerance 10 m
        sat = evaluate_constraints(rect, moved, CFG)
        assert sat.value_of("position") == pytest.approx(0.5, abs=1e-9)

    def test_rotation_beyond_tolerance_zeroes_orientation(self):
        rect = Polygon([(0, 0), (20, 0), (20, 8), (0, 8)])
        rot = geometry.rotate_polygon(rect, 25.0)  # tolerance 15 deg
        sat = evaluate_constraints(rect, rot, CFG)
        assert sat.value_of("orientation") == 0.0

    def test_granularity_short_edge(self):
        # shortest edge 1 m against the 2.5 m legibility floor
        notched = Polygon([(0, 0), (10, 0), (10, 5), (9, 5), (9, 6), (0, 6)])
        sat = evaluate_constraints(notched, notched, CFG)
        assert sat.value_of("granularity") == pytest.approx(1.0 / 2.5)

    def test_translation_invariance(self):
        initial = generate_building(7).initial
        gen = geometry.rotate_polygon(geometry.scale_polygon(initial, 1.2), 10.0)
        s1 = evaluate_constraints(initial, gen, CFG)
        s2 = evaluate_constraints(
            geometry.translate_polygon(initial, 123.0, -45.0),
            geometry.translate_polygon(gen, 123.0, -45.0),
            CFG,
        )
        for a, b in zip(s1.values, s2.values):
            assert abs(a - b) <= 1e-9


class TestGenerateCandidates:
    def test_requires_two(self):
        b = generate_building(1)
        with pytest.raises(ValueError):
            generate_candidates(b, CFG, 1, seed=0)

    def test_deterministic(self):
        b = generate_building(4)
        c1 = generate_candidates(b, CFG, 5, seed=2)
        c2 = generate_candidates(b, CFG, 5, seed=2)
        assert c1 == c2

    def test_distinct_geometries(self):
        b = generate_building(4)
        cands = generate_candidates(b, CFG, 6, seed=3)
        geoms = {c.geometry.vertices for c in cands}
        assert len(geoms) == 6

    def test_identity_recipe_keeps_position_and_orientation(self):
        b = generate_building(8)
        cand = make_candidate(b, CFG, "x", [("identity", {})])
        assert cand.satisfactions.value_of("position") == 1.0
        assert cand.satisfactions.value_of("orientation") == 1.0

    def test_satisfactions_recomputable(self):
        b = generate_building(12)
        for cand in generate_candidates(b, CFG, 6, seed=1):
            recomputed = evaluate_constraints(b.initial, cand.geometry, CFG)
            for a, v in zip(recomputed.values, cand.satisfactions.values):
                assert abs(a - v) <= 1e-9

    def test_fuzz_satisfactions_in_unit_interval(self):
        # 10,000 random candidates across many buildings
        count = 0
        for seed in range(1250):
            b = generate_building(seed)
            for cand in generate_candidates(b, CFG, 8, seed=seed):
                count += 1
                for v in cand.satisfactions.values:
                    assert 0.0 <= v <= 1.0
        assert count == 10_000


class TestRecipes:
    def test_scale_to_min_area_capped(self):
        from geneval import BuildingObject
        small = Polygon([(0, 0), (5, 0), (5, 5), (0, 5)])  # 25 m2, needs x2 to hit 100
        b = BuildingObject("o", small)
        cand = make_candidate(b, CFG, "c", [("scale_to_min_area", {})])
        assert geometry.area(cand.geometry) == pytest.approx(100.0, rel=1e-9)
        tiny = BuildingObject("o2", Polygon([(0, 0), (3, 0), (3, 3), (0, 3)]))  # 9 m2
        cand2 = make_candidate(tiny, CFG, "c2", [("scale_to_min_area", {})])
        assert geometry.area(cand2.geometry) == pytest.approx(36.0, rel=1e-9)  # capped at x2

    def test_unknown_transform_rejected(self):
        from geneval import BuildingObject
        b = BuildingObject("o", Polygon([(0, 0), (10, 0), (10, 10), (0, 10)]))
        with pytest.raises(ValueError):
            make_candidate(b, CFG, "c", [("erode", {})])


def test_scenario_config_validation():
    with pytest.raises(ValueError):
        ScenarioConfig(min_area_m2=0.0)
    with pytest.raises(ValueError):
        ScenarioConfig(constraint_set=ConstraintSet(("size", "altitude")))
