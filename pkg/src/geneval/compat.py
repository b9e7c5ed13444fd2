"""Fuzzy compatibility between graded preferences and an evaluation function.

A preference is compatible with a function when the quality difference
d = quality(a) - quality(b) falls inside the band assigned to its grade:

    FAR_BETTER    d >= fb_min                (mirrored for the B direction)
    BETTER        b_min <= d <= b_max
    SLIGHTLY      sb_min <= d <= sb_max
    EQUIVALENT    |d| <= eq_max

Adjacent bands may overlap; that overlap is what makes the notion fuzzy.
comp() returns 0 for compatible and 1 for incompatible so that the global
error is simply its sum, expressed as a percentage of labeled comparisons.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .evalfunc import EvaluationFunction, quality
from .preferences import (
    Comparison,
    ComparisonSet,
    PreferenceLabel,
    PreferenceRecord,
    latest_by_comparison,
)


@dataclass(frozen=True)
class CompatibilityThresholds:
    """The six fuzzy bounds on the quality-difference scale [0, 1]."""

    eq_max: float = 0.05
    sb_min: float = 0.03
    sb_max: float = 0.15
    b_min: float = 0.10
    b_max: float = 0.30
    fb_min: float = 0.25

    def __post_init__(self):
        for name in ("eq_max", "sb_min", "sb_max", "b_min", "b_max", "fb_min"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} must lie in [0,1], got {v}")
        if self.sb_min > self.sb_max:
            raise ValueError("sb_min must not exceed sb_max")
        if self.b_min > self.b_max:
            raise ValueError("b_min must not exceed b_max")

    def to_json_obj(self) -> dict:
        return {
            "eq_max": self.eq_max,
            "sb_min": self.sb_min,
            "sb_max": self.sb_max,
            "b_min": self.b_min,
            "b_max": self.b_max,
            "fb_min": self.fb_min,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "CompatibilityThresholds":
        return cls(**{k: obj[k] for k in
                      ("eq_max", "sb_min", "sb_max", "b_min", "b_max", "fb_min")})


# grade codes for the vectorized path: 0=EQUIVALENT, 1=SLIGHTLY, 2=BETTER, 3=FAR
_LABEL_GRADE_DIR = {
    PreferenceLabel.EQUIVALENT: (0, 0),
    PreferenceLabel.SLIGHTLY_BETTER_A: (1, 1),
    PreferenceLabel.SLIGHTLY_BETTER_B: (1, -1),
    PreferenceLabel.BETTER_A: (2, 1),
    PreferenceLabel.BETTER_B: (2, -1),
    PreferenceLabel.FAR_BETTER_A: (3, 1),
    PreferenceLabel.FAR_BETTER_B: (3, -1),
}


def label_codes(labels: Iterable[PreferenceLabel]) -> tuple[np.ndarray, np.ndarray]:
    """(grade, direction) integer arrays for the vectorized compatibility check."""
    pairs = [_LABEL_GRADE_DIR[l] for l in labels]
    grades = np.array([p[0] for p in pairs], dtype=np.int64)
    dirs = np.array([p[1] for p in pairs], dtype=np.int64)
    return grades, dirs


def compatible_mask(d: np.ndarray, grades: np.ndarray, dirs: np.ndarray,
                    t: CompatibilityThresholds) -> np.ndarray:
    """Boolean compatibility per comparison, given quality differences d.

    Single implementation shared by the scalar comp() and the learner's
    batch evaluator, so both always agree at threshold boundaries.
    """
    sd = d * dirs  # difference signed toward the preferred side
    return (
        ((grades == 0) & (np.abs(d) <= t.eq_max))
        | ((grades == 1) & (sd >= t.sb_min) & (sd <= t.sb_max))
        | ((grades == 2) & (sd >= t.b_min) & (sd <= t.b_max))
        | ((grades == 3) & (sd >= t.fb_min))
    )


def quality_difference(c: Comparison, f: EvaluationFunction) -> tuple[float, float, float]:
    """(quality_a, quality_b, diff) under f, restricting satisfaction vectors
    to f's constraint set."""
    qa = quality(f, c.a.satisfactions.project(f.constraint_set))
    qb = quality(f, c.b.satisfactions.project(f.constraint_set))
    return qa, qb, qa - qb


def comp(c: Comparison, f: EvaluationFunction, label: PreferenceLabel,
         t: CompatibilityThresholds) -> int:
    """0 if the preference is consistent with the quality order, else 1."""
    _, _, d = quality_difference(c, f)
    grades, dirs = label_codes([label])
    return 0 if bool(compatible_mask(np.array([d]), grades, dirs, t)[0]) else 1


@dataclass(frozen=True)
class CompatibilityRow:
    comparison_id: str
    label: PreferenceLabel
    quality_a: float
    quality_b: float
    diff: float
    compatible: bool

    def to_json_obj(self) -> dict:
        return {
            "comparison_id": self.comparison_id,
            "label": self.label.value,
            "quality_a": self.quality_a,
            "quality_b": self.quality_b,
            "diff": self.diff,
            "compatible": self.compatible,
        }


@dataclass(frozen=True)
class CompatibilityReport:
    """Per-comparison diagnostics, incompatible entries first."""

    global_error_percent: float
    rows: tuple[CompatibilityRow, ...]

    def to_json_obj(self) -> dict:
        return {
            "global_error_percent": self.global_error_percent,
            "rows": [r.to_json_obj() for r in self.rows],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "CompatibilityReport":
        rows = tuple(
            CompatibilityRow(
                comparison_id=r["comparison_id"],
                label=PreferenceLabel(r["label"]),
                quality_a=r["quality_a"],
                quality_b=r["quality_b"],
                diff=r["diff"],
                compatible=r["compatible"],
            )
            for r in obj["rows"]
        )
        return cls(global_error_percent=obj["global_error_percent"], rows=rows)


def save_report(report: CompatibilityReport, path: str | Path) -> None:
    Path(path).write_text(json.dumps(report.to_json_obj(), indent=2) + "\n")


def _labeled_rows(comparison_set: ComparisonSet, prefs: Iterable[PreferenceRecord],
                  f: EvaluationFunction, t: CompatibilityThresholds) -> list[CompatibilityRow]:
    latest = latest_by_comparison(prefs)
    known = comparison_set.ids()
    unknown = set(latest) - known
    if unknown:
        raise ValueError(f"preference records reference unknown comparisons: {sorted(unknown)}")
    rows = []
    for c in comparison_set.comparisons:
        rec = latest.get(c.comparison_id)
        if rec is None:
            continue
        qa, qb, d = quality_difference(c, f)
        grades, dirs = label_codes([rec.label])
        ok = bool(compatible_mask(np.array([d]), grades, dirs, t)[0])
        rows.append(CompatibilityRow(c.comparison_id, rec.label, qa, qb, d, ok))
    if not rows:
        raise ValueError("no labeled comparisons: global error is undefined")
    return rows


def global_error(comparison_set: ComparisonSet, prefs: Iterable[PreferenceRecord],
                 f: EvaluationFunction, t: CompatibilityThresholds) -> float:
    """Percentage of labeled comparisons incompatible with f.

    Comparisons without a record are excluded from both numerator and
    denominator.
    """
    rows = _labeled_rows(comparison_set, prefs, f, t)
    incompatible = sum(1 for r in rows if not r.compatible)
    return 100.0 * incompatible / len(rows)


def diagnose(comparison_set: ComparisonSet, prefs: Iterable[PreferenceRecord],
             f: EvaluationFunction, t: CompatibilityThresholds) -> CompatibilityReport:
    """Full per-comparison report; incompatible entries first (set order within
    each group). Useful for spotting missing or faulty constraints: clusters of
    incompatible comparisons that differ mainly in one unmeasured aspect."""
    rows = _labeled_rows(comparison_set, prefs, f, t)
    incompatible = sum(1 for r in rows if not r.compatible)
    ordered = [r for r in rows if not r.compatible] + [r for r in rows if r.compatible]
    return CompatibilityReport(
        global_error_percent=100.0 * incompatible / len(rows),
        rows=tuple(ordered),
    )
