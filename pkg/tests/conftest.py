import itertools

import pytest

from geneval import (
    Comparison,
    ComparisonSet,
    ConstraintSet,
    GeneralisationCandidate,
    Polygon,
    SatisfactionVector,
    ScenarioConfig,
)

_counter = itertools.count()


def square_at(x: float, y: float, side: float = 10.0) -> Polygon:
    return Polygon([(x, y), (x + side, y), (x + side, y + side), (x, y + side)])


def synthetic_candidate(object_id: str, constraints: ConstraintSet,
                        values, offset: float) -> GeneralisationCandidate:
    return GeneralisationCandidate(
        candidate_id=f"{object_id}-s{next(_counter)}",
        object_id=object_id,
        geometry=square_at(offset, 0.0),
        satisfactions=SatisfactionVector(constraints, values),
    )


def synthetic_comparison_set(constraint_names, sat_pairs, **scenario_kwargs) -> ComparisonSet:
    """Comparison set with hand-picked satisfaction vectors.

    sat_pairs: list of (values_a, values_b); geometries are placeholder
    squares, distinct per candidate, so only the satisfactions matter.
    """
    constraints = ConstraintSet(constraint_names)
    cfg = ScenarioConfig(constraint_set=constraints, **scenario_kwargs)
    comparisons = []
    for i, (va, vb) in enumerate(sat_pairs):
        oid = f"obj-{i}"
        comparisons.append(Comparison(
            comparison_id=f"cmp-{i}",
            object_id=oid,
            initial=square_at(0.0, 0.0),
            a=synthetic_candidate(oid, constraints, va, offset=10.0 * i + 1.0),
            b=synthetic_candidate(oid, constraints, vb, offset=10.0 * i + 2.0),
        ))
    return ComparisonSet(cfg, comparisons)


@pytest.fixture
def five_constraints() -> ConstraintSet:
    return ConstraintSet(("size", "granularity", "squareness", "convexity", "position"))
