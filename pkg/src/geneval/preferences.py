"""Comparison sets and graded preference records.

A comparison is a pair of different generalisations of the same object; the
user (or the oracle) answers each one with a seven-way graded preference.
Comparison sets are stored as a single JSON document, preference records as
an append-only JSONL log.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .buildings import (
    BuildingObject,
    GeneralisationCandidate,
    ScenarioConfig,
    generate_building,
    generate_candidates,
)
from .geometry import Polygon
from .seeding import derive_rng


class PreferenceLabel(Enum):
    FAR_BETTER_A = "FAR_BETTER_A"
    BETTER_A = "BETTER_A"
    SLIGHTLY_BETTER_A = "SLIGHTLY_BETTER_A"
    EQUIVALENT = "EQUIVALENT"
    SLIGHTLY_BETTER_B = "SLIGHTLY_BETTER_B"
    BETTER_B = "BETTER_B"
    FAR_BETTER_B = "FAR_BETTER_B"


_MIRROR = {
    PreferenceLabel.FAR_BETTER_A: PreferenceLabel.FAR_BETTER_B,
    PreferenceLabel.BETTER_A: PreferenceLabel.BETTER_B,
    PreferenceLabel.SLIGHTLY_BETTER_A: PreferenceLabel.SLIGHTLY_BETTER_B,
    PreferenceLabel.EQUIVALENT: PreferenceLabel.EQUIVALENT,
    PreferenceLabel.SLIGHTLY_BETTER_B: PreferenceLabel.SLIGHTLY_BETTER_A,
    PreferenceLabel.BETTER_B: PreferenceLabel.BETTER_A,
    PreferenceLabel.FAR_BETTER_B: PreferenceLabel.FAR_BETTER_A,
}


def mirror(label: PreferenceLabel) -> PreferenceLabel:
    """Swap the A/B direction of a label; EQUIVALENT is its own mirror."""
    return _MIRROR[label]


def parse_label(name: str) -> PreferenceLabel:
    try:
        return PreferenceLabel(name)
    except ValueError:
        valid = ", ".join(l.value for l in PreferenceLabel)
        raise ValueError(f"unknown preference label {name!r}; expected one of: {valid}") from None


@dataclass(frozen=True)
class Comparison:
    """A pair of different generalisations of the same object."""

    comparison_id: str
    object_id: str
    initial: Polygon
    a: GeneralisationCandidate
    b: GeneralisationCandidate

    def __post_init__(self):
        if self.a.object_id != self.object_id or self.b.object_id != self.object_id:
            raise ValueError(
                f"comparison {self.comparison_id}: candidates belong to different objects"
            )
        if self.a.geometry.vertices == self.b.geometry.vertices:
            raise ValueError(
                f"comparison {self.comparison_id}: candidates share an identical geometry"
            )

    def swapped(self) -> "Comparison":
        return Comparison(self.comparison_id, self.object_id, self.initial,
                          a=self.b, b=self.a)


@dataclass(frozen=True)
class ComparisonSet:
    scenario: ScenarioConfig
    comparisons: tuple[Comparison, ...]

    def __init__(self, scenario: ScenarioConfig, comparisons: Sequence[Comparison]):
        comparisons = tuple(comparisons)
        ids = [c.comparison_id for c in comparisons]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate comparison ids")
        for c in comparisons:
            for cand in (c.a, c.b):
                if cand.satisfactions.constraints != scenario.constraint_set:
                    raise ValueError(
                        f"candidate {cand.candidate_id}: satisfaction vector does not "
                        f"match the scenario constraint set"
                    )
        object.__setattr__(self, "scenario", scenario)
        object.__setattr__(self, "comparisons", comparisons)

    def __len__(self) -> int:
        return len(self.comparisons)

    def by_id(self, comparison_id: str) -> Comparison:
        for c in self.comparisons:
            if c.comparison_id == comparison_id:
                return c
        raise KeyError(f"unknown comparison {comparison_id!r}")

    def ids(self) -> set[str]:
        return {c.comparison_id for c in self.comparisons}


@dataclass(frozen=True)
class PreferenceRecord:
    comparison_id: str
    label: PreferenceLabel
    source: str
    elapsed_ms: int | None = None
    created_at: str = ""

    def __post_init__(self):
        if self.source not in ("human", "oracle"):
            raise ValueError(f"source must be 'human' or 'oracle', got {self.source!r}")

    def to_json_obj(self) -> dict:
        return {
            "comparison_id": self.comparison_id,
            "label": self.label.value,
            "source": self.source,
            "elapsed_ms": self.elapsed_ms,
            "created_at": self.created_at,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "PreferenceRecord":
        return cls(
            comparison_id=obj["comparison_id"],
            label=parse_label(obj["label"]),
            source=obj["source"],
            elapsed_ms=obj.get("elapsed_ms"),
            created_at=obj.get("created_at", ""),
        )


def now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


def build_comparison_set(cfg: ScenarioConfig, n_objects: int, pairs_per_object: int,
                         seed: int) -> ComparisonSet:
    """n_objects buildings x pairs_per_object comparisons, deterministic for a seed.

    Enough candidates are generated per object that the requested number of
    distinct unordered pairs can be sampled without replacement.
    """
    if n_objects < 1:
        raise ValueError(f"n_objects must be >= 1, got {n_objects}")
    if pairs_per_object < 1:
        raise ValueError(f"pairs_per_object must be >= 1, got {pairs_per_object}")
    # smallest c with c*(c-1)/2 >= pairs_per_object
    n_cands = max(2, math.ceil((1.0 + math.sqrt(1.0 + 8.0 * pairs_per_object)) / 2.0))
    comparisons: list[Comparison] = []
    for i in range(n_objects):
        building = generate_building(seed * 1_000_003 + i)
        cands = generate_candidates(building, cfg, n_cands, seed)
        pairs = [(x, y) for x in range(n_cands) for y in range(x + 1, n_cands)]
        rng = derive_rng("pairs", seed, building.object_id)
        for k, (x, y) in enumerate(sorted(rng.sample(pairs, pairs_per_object))):
            comparisons.append(Comparison(
                comparison_id=f"{building.object_id}-p{k}",
                object_id=building.object_id,
                initial=building.initial,
                a=cands[x],
                b=cands[y],
            ))
    return ComparisonSet(cfg, comparisons)


def next_unanswered(comparison_set: ComparisonSet,
                    answered: Iterable[str]) -> Comparison | None:
    """First comparison (in set order) without a record; None when all answered."""
    answered = set(answered)
    unknown = answered - comparison_set.ids()
    if unknown:
        raise ValueError(f"answered ids not in the set: {sorted(unknown)}")
    for c in comparison_set.comparisons:
        if c.comparison_id not in answered:
            return c
    return None


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------

def comparison_set_to_json_obj(cs: ComparisonSet) -> dict:
    return {
        "scenario": cs.scenario.to_json_obj(),
        "constraints": list(cs.scenario.constraint_set.ids),
        "comparisons": [
            {
                "id": c.comparison_id,
                "object_id": c.object_id,
                "initial_geometry": c.initial.to_json_obj(),
                "a": c.a.to_json_obj(),
                "b": c.b.to_json_obj(),
            }
            for c in cs.comparisons
        ],
    }


def comparison_set_from_json_obj(obj: dict) -> ComparisonSet:
    scenario = ScenarioConfig.from_json_obj(obj["scenario"], obj["constraints"])
    comparisons = []
    for entry in obj["comparisons"]:
        initial = Polygon.from_json_obj(entry["initial_geometry"])
        comparisons.append(Comparison(
            comparison_id=entry["id"],
            object_id=entry["object_id"],
            initial=initial,
            a=GeneralisationCandidate.from_json_obj(
                entry["a"], entry["object_id"], scenario.constraint_set),
            b=GeneralisationCandidate.from_json_obj(
                entry["b"], entry["object_id"], scenario.constraint_set),
        ))
    return ComparisonSet(scenario, comparisons)


def save_comparison_set(cs: ComparisonSet, path: str | Path) -> None:
    Path(path).write_text(json.dumps(comparison_set_to_json_obj(cs), indent=2) + "\n")


def load_comparison_set(path: str | Path) -> ComparisonSet:
    return comparison_set_from_json_obj(json.loads(Path(path).read_text()))


def append_preference(path: str | Path, record: PreferenceRecord) -> None:
    """Append one record to the JSONL log, flushed and fsynced (durable on write)."""
    with open(path, "a", encoding="utf-8") as f:
        f.write(json.dumps(record.to_json_obj()) + "\n")
        f.flush()
        os.fsync(f.fileno())


def save_preferences(path: str | Path, records: Iterable[PreferenceRecord]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record.to_json_obj()) + "\n")


def load_preferences(path: str | Path) -> list[PreferenceRecord]:
    records = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                records.append(PreferenceRecord.from_json_obj(json.loads(line)))
    return records


def latest_by_comparison(records: Iterable[PreferenceRecord]) -> dict[str, PreferenceRecord]:
    """Latest record per comparison (a re-answer supersedes by timestamp,
    log order breaking ties)."""
    def sort_key(item):
        idx, rec = item
        try:
            ts = datetime.fromisoformat(rec.created_at)
        except ValueError:
            ts = datetime.fromtimestamp(0, tz=timezone.utc)
        if ts.tzinfo is None:
            ts = ts.replace(tzinfo=timezone.utc)
        return (ts, idx)

    latest: dict[str, PreferenceRecord] = {}
    for _, rec in sorted(enumerate(records), key=sort_key):
        latest[rec.comparison_id] = rec
    return latest
