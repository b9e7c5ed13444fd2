"""Simulated preference-giver driven by a hidden evaluation function.

Stands in for a human cartographer: grades each comparison from the hidden
quality difference (three cuts partition |diff| into the four grades), with
optional label noise. The hidden function may weight constraints the
learner's function space does not contain, which is how missing-constraint
experiments are set up.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .evalfunc import EvaluationFunction, quality
from .preferences import Comparison, ComparisonSet, PreferenceLabel, PreferenceRecord
from .seeding import derive_rng

_GRADE_LABELS = {
    # (grade, sign of diff) -> label
    ("equivalent", 0): PreferenceLabel.EQUIVALENT,
    ("slightly", 1): PreferenceLabel.SLIGHTLY_BETTER_A,
    ("slightly", -1): PreferenceLabel.SLIGHTLY_BETTER_B,
    ("better", 1): PreferenceLabel.BETTER_A,
    ("better", -1): PreferenceLabel.BETTER_B,
    ("far", 1): PreferenceLabel.FAR_BETTER_A,
    ("far", -1): PreferenceLabel.FAR_BETTER_B,
}


@dataclass(frozen=True)
class OracleConfig:
    hidden_function: EvaluationFunction
    label_cuts: tuple[float, float, float] = (0.05, 0.15, 0.30)
    noise_rate: float = 0.0
    seed: int = 0

    def __post_init__(self):
        t1, t2, t3 = self.label_cuts
        if not (0.0 <= t1 < t2 < t3 <= 1.0):
            raise ValueError(f"label cuts must satisfy 0 <= t1 < t2 < t3 <= 1, got {self.label_cuts}")
        if not (0.0 <= self.noise_rate <= 1.0):
            raise ValueError(f"noise_rate must lie in [0,1], got {self.noise_rate}")
        object.__setattr__(self, "label_cuts", tuple(float(t) for t in self.label_cuts))

    def to_json_obj(self) -> dict:
        return {
            "hidden_function": self.hidden_function.to_json_obj(),
            "label_cuts": list(self.label_cuts),
            "noise_rate": self.noise_rate,
            "seed": self.seed,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "OracleConfig":
        return cls(
            hidden_function=EvaluationFunction.from_json_obj(obj["hidden_function"]),
            label_cuts=tuple(obj["label_cuts"]),
            noise_rate=obj.get("noise_rate", 0.0),
            seed=obj.get("seed", 0),
        )


def load_oracle_config(path: str | Path) -> OracleConfig:
    return OracleConfig.from_json_obj(json.loads(Path(path).read_text()))


def save_oracle_config(cfg: OracleConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(cfg.to_json_obj(), indent=2) + "\n")


def oracle_label(c: Comparison, cfg: OracleConfig) -> PreferenceLabel:
    """Grade one comparison from the hidden quality difference.

    Deterministic given the oracle seed and the comparison id: the noise
    stream is derived per comparison, so labels do not depend on the order
    comparisons are presented in.
    """
    hidden = cfg.hidden_function
    qa = quality(hidden, c.a.satisfactions.project(hidden.constraint_set))
    qb = quality(hidden, c.b.satisfactions.project(hidden.constraint_set))
    d = qa - qb
    t1, t2, t3 = cfg.label_cuts
    mag = abs(d)
    if mag <= t1:
        grade, sign = "equivalent", 0
    else:
        grade = "slightly" if mag <= t2 else ("better" if mag <= t3 else "far")
        sign = 1 if d > 0 else -1
    label = _GRADE_LABELS[(grade, sign)]

    rng = derive_rng("oracle", cfg.seed, c.comparison_id)
    if rng.random() < cfg.noise_rate:
        label = rng.choice([l for l in PreferenceLabel if l is not label])
    return label


def label_set(comparison_set: ComparisonSet, cfg: OracleConfig) -> list[PreferenceRecord]:
    """One record per comparison, in set order, source "oracle".

    Timestamps count seconds from the Unix epoch so repeated runs produce
    byte-identical logs.
    """
    records = []
    for i, c in enumerate(comparison_set.comparisons):
        records.append(PreferenceRecord(
            comparison_id=c.comparison_id,
            label=oracle_label(c, cfg),
            source="oracle",
            elapsed_ms=None,
            created_at=datetime.fromtimestamp(i, tz=timezone.utc).isoformat(),
        ))
    return records
