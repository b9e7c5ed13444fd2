"""Parametric quality function: a weighted mean of constraint satisfactions
balanced by an integer power.

For a constraint set with weights w_i and power p, the quality of a
generalisation result with satisfaction values v_i is

    quality = [ (1 / sum_i w_i^p) * sum_i (w_i^p * v_i^p) ] ^ (1/p)

Raising p favours the most satisfied constraints: p=1 is the ordinary
weighted arithmetic mean, large p approaches the maximum over constraints
with nonzero weight.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class ConstraintMismatchError(ValueError):
    """A satisfaction vector does not cover the constraints of a function."""


@dataclass(frozen=True)
class ConstraintSet:
    """Ordered, duplicate-free list of constraint names.

    The order is canonical for a scenario: satisfaction vectors index into it.
    """

    ids: tuple[str, ...]

    def __init__(self, ids: Iterable[str]):
        ids = tuple(ids)
        if not ids:
            raise ValueError("constraint set must contain at least one constraint")
        for name in ids:
            if not name:
                raise ValueError("constraint names must be non-empty")
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate constraint names in {ids}")
        object.__setattr__(self, "ids", ids)

    def __len__(self) -> int:
        return len(self.ids)

    def __iter__(self):
        return iter(self.ids)

    def __contains__(self, name: str) -> bool:
        return name in self.ids

    def index(self, name: str) -> int:
        try:
            return self.ids.index(name)
        except ValueError:
            raise ConstraintMismatchError(f"unknown constraint {name!r}") from None


@dataclass(frozen=True)
class SatisfactionVector:
    """Per-constraint satisfaction values in [0, 1], aligned with a ConstraintSet."""

    constraints: ConstraintSet
    values: tuple[float, ...]

    def __init__(self, constraints: ConstraintSet, values: Sequence[float]):
        values = tuple(float(v) for v in values)
        if len(values) != len(constraints):
            raise ValueError(
                f"expected {len(constraints)} satisfaction values, got {len(values)}"
            )
        for name, v in zip(constraints, values):
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"satisfaction for {name!r} out of [0,1]: {v}")
        object.__setattr__(self, "constraints", constraints)
        object.__setattr__(self, "values", values)

    def value_of(self, name: str) -> float:
        return self.values[self.constraints.index(name)]

    def project(self, subset: ConstraintSet) -> "SatisfactionVector":
        """Restrict to the constraints of `subset`, in `subset` order.

        Raises ConstraintMismatchError if a requested constraint is absent.
        """
        return SatisfactionVector(subset, [self.value_of(name) for name in subset])


@dataclass(frozen=True)
class EvaluationFunction:
    """The object being learned: one non-negative weight per constraint plus
    an integer power p >= 1."""

    constraint_set: ConstraintSet
    weights: tuple[float, ...]
    power: int

    def __init__(self, constraint_set: ConstraintSet, weights: Sequence[float], power: int):
        weights = tuple(float(w) for w in weights)
        if len(weights) != len(constraint_set):
            raise ValueError(
                f"expected {len(constraint_set)} weights, got {len(weights)}"
            )
        if any(w < 0 for w in weights):
            raise ValueError(f"weights must be non-negative: {weights}")
        if not any(w > 0 for w in weights):
            raise ValueError("at least one weight must be positive")
        if not isinstance(power, (int, np.integer)) or isinstance(power, bool):
            raise ValueError(f"power must be an integer, got {power!r}")
        if power < 1:
            raise ValueError(f"power must be >= 1, got {power}")
        object.__setattr__(self, "constraint_set", constraint_set)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "power", int(power))

    def to_json_obj(self) -> dict:
        return {
            "constraints": list(self.constraint_set.ids),
            "weights": list(self.weights),
            "p": self.power,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "EvaluationFunction":
        return cls(ConstraintSet(obj["constraints"]), obj["weights"], obj["p"])


def power_mean_batch(values: np.ndarray, weights: np.ndarray, power: int) -> np.ndarray:
    """Weighted power mean over the last axis of `values`.

    Shared kernel for the scalar quality() and the vectorized learner paths,
    so both produce bit-identical results. Uses elementwise multiply + sum
    (not dot) to keep the reduction order independent of batch size.
    """
    w_max = weights.max()
    if w_max <= 0.0:
        raise ValueError("all weights are zero: normalizer is zero")
    # normalize by the largest weight before powering: the ratio is unchanged
    # and w^p cannot underflow to an all-zero normalizer
    wp = np.power(weights / w_max, power)
    acc = (np.power(values, power) * wp).sum(axis=-1)
    return np.power(acc / wp.sum(), 1.0 / power)


def quality(f: EvaluationFunction, sat: SatisfactionVector) -> float:
    """Evaluate the quality of one generalisation result under `f`.

    `sat` must be aligned with f's constraint set (same names, same order);
    use SatisfactionVector.project() to restrict a wider scenario vector.
    """
    if sat.constraints != f.constraint_set:
        raise ConstraintMismatchError(
            f"satisfaction vector covers {sat.constraints.ids}, "
            f"function expects {f.constraint_set.ids}"
        )
    v = np.asarray(sat.values, dtype=float).reshape(1, -1)
    w = np.asarray(f.weights, dtype=float)
    return float(power_mean_batch(v, w, f.power)[0])


def effective_weight_share(f: EvaluationFunction) -> tuple[float, ...]:
    """Normalized p-th-power weights w_i^p / sum_j w_j^p.

    Diagnostic view of how much each constraint actually counts: raising p
    concentrates the share on the heaviest constraints.
    """
    w = np.asarray(f.weights, dtype=float)
    wp = np.power(w / w.max(), f.power)
    return tuple((wp / wp.sum()).tolist())
