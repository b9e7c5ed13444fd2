"""Search for the evaluation-function parameters that minimize global error.

A solution is a parameter assignment (constraint weights plus the power p)
restricted to a discrete grid. The neighbourhood of a solution is every
assignment in which exactly one parameter takes a different grid value.
tabu_search() walks that neighbourhood with attribute-based short-term
memory; exhaustive_search() is the brute-force oracle for grids small
enough to enumerate.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .compat import CompatibilityThresholds, compatible_mask, label_codes
from .evalfunc import ConstraintSet, EvaluationFunction, power_mean_batch
from .preferences import ComparisonSet, PreferenceRecord, latest_by_comparison


def _default_weight_levels() -> tuple[float, ...]:
    return tuple(round(0.05 * i, 2) for i in range(21))


@dataclass(frozen=True)
class ParameterGrid:
    """Allowed values for each weight (shared) and for the power."""

    weight_values: tuple[float, ...] = field(default_factory=_default_weight_levels)
    p_values: tuple[int, ...] = tuple(range(1, 9))

    def __post_init__(self):
        w = tuple(float(v) for v in self.weight_values)
        p = tuple(int(v) for v in self.p_values)
        if len(w) < 2 or 0.0 not in w:
            raise ValueError("weight_values needs at least two levels and must include 0")
        if any(not (0.0 <= v <= 1.0) for v in w):
            raise ValueError(f"weight levels must lie in [0,1]: {w}")
        if any(b <= a for a, b in zip(w, w[1:])):
            raise ValueError("weight levels must be strictly increasing")
        if not p or p[0] < 1 or any(b <= a for a, b in zip(p, p[1:])):
            raise ValueError("p values must be strictly increasing integers >= 1")
        object.__setattr__(self, "weight_values", w)
        object.__setattr__(self, "p_values", p)

    def size(self, n_constraints: int) -> int:
        return len(self.weight_values) ** n_constraints * len(self.p_values)

    def to_json_obj(self) -> dict:
        return {"weight_values": list(self.weight_values), "p_values": list(self.p_values)}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "ParameterGrid":
        return cls(tuple(obj["weight_values"]), tuple(obj["p_values"]))


@dataclass(frozen=True)
class Solution:
    """A grid-restricted evaluation function (never all-zero weights)."""

    function: EvaluationFunction


@dataclass(frozen=True)
class TabuConfig:
    max_iterations: int = 500
    tabu_tenure: int = 7
    seed: int = 0  # reserved: the search is fully deterministic
    stop_at_zero: bool = True

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.tabu_tenure < 0:
            raise ValueError(f"tabu_tenure must be >= 0, got {self.tabu_tenure}")

    def to_json_obj(self) -> dict:
        return {
            "max_iterations": self.max_iterations,
            "tabu_tenure": self.tabu_tenure,
            "seed": self.seed,
            "stop_at_zero": self.stop_at_zero,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "TabuConfig":
        return cls(**{k: obj[k] for k in
                      ("max_iterations", "tabu_tenure", "seed", "stop_at_zero") if k in obj})


@dataclass(frozen=True)
class LearnResult:
    best: Solution
    best_error_percent: float
    initial_error_percent: float
    trajectory: tuple[tuple[int, float, float], ...]
    evaluations: int

    def to_json_obj(self) -> dict:
        return {
            "best_function": self.best.function.to_json_obj(),
            "best_error_percent": self.best_error_percent,
            "initial_error_percent": self.initial_error_percent,
            "trajectory": [[i, cur, best] for i, cur, best in self.trajectory],
            "evaluations": self.evaluations,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "LearnResult":
        return cls(
            best=Solution(EvaluationFunction.from_json_obj(obj["best_function"])),
            best_error_percent=obj["best_error_percent"],
            initial_error_percent=obj["initial_error_percent"],
            trajectory=tuple((int(i), float(c), float(b)) for i, c, b in obj["trajectory"]),
            evaluations=obj["evaluations"],
        )


def save_learn_result(result: LearnResult, path: str | Path) -> None:
    Path(path).write_text(json.dumps(result.to_json_obj(), indent=2) + "\n")


def load_learn_result(path: str | Path) -> LearnResult:
    return LearnResult.from_json_obj(json.loads(Path(path).read_text()))


class BatchErrorEvaluator:
    """Global error of grid solutions against one labeled comparison sample.

    Precomputes the candidates' satisfaction matrices (projected onto the
    learner's constraint set) and the label codes; each solution evaluation
    is then two vectorized power means plus the band checks. Uses the same
    kernels as the scalar path, so errors match global_error() bit for bit.
    """

    def __init__(self, comparison_set: ComparisonSet, prefs: Iterable[PreferenceRecord],
                 constraint_set: ConstraintSet, thresholds: CompatibilityThresholds):
        latest = latest_by_comparison(prefs)
        unknown = set(latest) - comparison_set.ids()
        if unknown:
            raise ValueError(
                f"preference records reference unknown comparisons: {sorted(unknown)}")
        labeled = [c for c in comparison_set.comparisons if c.comparison_id in latest]
        if not labeled:
            raise ValueError("no labeled comparisons to learn from")
        self.constraint_set = constraint_set
        self.thresholds = thresholds
        self.n_labeled = len(labeled)
        self._sat_a = np.array(
            [c.a.satisfactions.project(constraint_set).values for c in labeled])
        self._sat_b = np.array(
            [c.b.satisfactions.project(constraint_set).values for c in labeled])
        self._grades, self._dirs = label_codes(
            [latest[c.comparison_id].label for c in labeled])

    def error_percent(self, weights: Sequence[float], p: int) -> float:
        w = np.asarray(weights, dtype=float)
        qa = power_mean_batch(self._sat_a, w, p)
        qb = power_mean_batch(self._sat_b, w, p)
        ok = compatible_mask(qa - qb, self._grades, self._dirs, self.thresholds)
        return 100.0 * int((~ok).sum()) / self.n_labeled


# ---------------------------------------------------------------------------
# Grid plumbing
# ---------------------------------------------------------------------------

def _state_to_solution(state: tuple[tuple[int, ...], int], grid: ParameterGrid,
                       constraints: ConstraintSet) -> Solution:
    w_idx, p_idx = state
    weights = [grid.weight_values[i] for i in w_idx]
    return Solution(EvaluationFunction(constraints, weights, grid.p_values[p_idx]))


def _solution_to_state(s: Solution, grid: ParameterGrid) -> tuple[tuple[int, ...], int]:
    w_idx = []
    for w in s.function.weights:
        if w not in grid.weight_values:
            raise ValueError(f"weight {w} is not a grid level {grid.weight_values}")
        w_idx.append(grid.weight_values.index(w))
    if s.function.power not in grid.p_values:
        raise ValueError(f"p={s.function.power} is not a grid level {grid.p_values}")
    return tuple(w_idx), grid.p_values.index(s.function.power)


def snap_to_grid(f: EvaluationFunction, grid: ParameterGrid) -> Solution:
    """Nearest grid solution to f (ties snap to the lower value).

    Raises if every weight snaps to zero; the caller should provide a
    starting function with at least one clearly nonzero weight.
    """
    levels = np.asarray(grid.weight_values)
    snapped = [float(levels[int(np.argmin(np.abs(levels - w)))]) for w in f.weights]
    if not any(w > 0 for w in snapped):
        raise ValueError("all weights snap to zero on this grid; adjust the initial function")
    ps = np.asarray(grid.p_values)
    p = int(ps[int(np.argmin(np.abs(ps - f.power)))])
    return Solution(EvaluationFunction(f.constraint_set, snapped, p))


def _moves(state: tuple[tuple[int, ...], int], grid: ParameterGrid):
    """All (param_index, new_level_index) moves, in tie-break order: weight
    axes by constraint index then p, grid values ascending; all-zero weight
    assignments excluded."""
    w_idx, p_idx = state
    k = len(w_idx)
    for param in range(k):
        others_zero = all(grid.weight_values[w_idx[j]] == 0.0
                          for j in range(k) if j != param)
        for level in range(len(grid.weight_values)):
            if level == w_idx[param]:
                continue
            if others_zero and grid.weight_values[level] == 0.0:
                continue
            yield param, level
    for level in range(len(grid.p_values)):
        if level != p_idx:
            yield k, level


def _apply_move(state, move):
    w_idx, p_idx = state
    param, level = move
    if param == len(w_idx):
        return w_idx, level
    w = list(w_idx)
    w[param] = level
    return tuple(w), p_idx


def neighborhood(s: Solution, grid: ParameterGrid) -> list[Solution]:
    """Every solution differing from s in exactly one parameter value."""
    state = _solution_to_state(s, grid)
    constraints = s.function.constraint_set
    return [_state_to_solution(_apply_move(state, m), grid, constraints)
            for m in _moves(state, grid)]


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------

def tabu_search(comparison_set: ComparisonSet, prefs: Iterable[PreferenceRecord],
                init: Solution, thresholds: CompatibilityThresholds,
                grid: ParameterGrid, cfg: TabuConfig) -> LearnResult:
    """Classic tabu search from an expert-provided starting function.

    Each iteration moves to the best non-tabu neighbour (ties: lowest
    parameter index, then lowest grid value), including non-improving moves.
    The inverse attribute (parameter, abandoned value) of each move stays
    tabu for tabu_tenure iterations; a tabu move is allowed if it strictly
    beats the best error seen (aspiration). When every move is tabu and none
    aspirates, the best tabu move is taken so the walk never stalls. Fully
    deterministic for fixed inputs.
    """
    prefs = list(prefs)
    evaluator = BatchErrorEvaluator(comparison_set, prefs,
                                    init.function.constraint_set, thresholds)
    state = _solution_to_state(init, grid)
    constraints = init.function.constraint_set

    def error_at(st):
        w_idx, p_idx = st
        weights = [grid.weight_values[i] for i in w_idx]
        return evaluator.error_percent(weights, grid.p_values[p_idx])

    current_error = error_at(state)
    evaluations = 1
    best_state, best_error = state, current_error
    trajectory = [(0, current_error, best_error)]
    tabu: dict[tuple[int, int], int] = {}

    if not (cfg.stop_at_zero and best_error == 0.0):
        for it in range(1, cfg.max_iterations + 1):
            chosen = chosen_err = None
            fallback = fallback_err = None
            for move in _moves(state, grid):
                err = error_at(_apply_move(state, move))
                evaluations += 1
                is_tabu = tabu.get(move, 0) >= it and err >= best_error
                if is_tabu:
                    if fallback is None or err < fallback_err:
                        fallback, fallback_err = move, err
                elif chosen is None or err < chosen_err:
                    chosen, chosen_err = move, err
            if chosen is None:
                chosen, chosen_err = fallback, fallback_err
            if chosen is None:
                break  # degenerate grid with no moves at all
            param = chosen[0]
            old_level = state[0][param] if param < len(state[0]) else state[1]
            tabu[(param, old_level)] = it + cfg.tabu_tenure
            state = _apply_move(state, chosen)
            current_error = chosen_err
            if current_error < best_error:
                best_state, best_error = state, current_error
            trajectory.append((it, current_error, best_error))
            if cfg.stop_at_zero and best_error == 0.0:
                break

    return LearnResult(
        best=_state_to_solution(best_state, grid, constraints),
        best_error_percent=best_error,
        initial_error_percent=trajectory[0][1],
        trajectory=tuple(trajectory),
        evaluations=evaluations,
    )


def exhaustive_search(comparison_set: ComparisonSet, prefs: Iterable[PreferenceRecord],
                      thresholds: CompatibilityThresholds, grid: ParameterGrid,
                      constraint_set: ConstraintSet | None = None,
                      max_solutions: int = 1_000_000) -> Solution:
    """Minimal-error solution over the whole grid (brute-force oracle).

    Ties go to the lexicographically smallest parameter vector (weights in
    constraint order, then p). Only usable when the grid has at most
    max_solutions assignments.
    """
    if constraint_set is None:
        constraint_set = comparison_set.scenario.constraint_set
    k = len(constraint_set)
    total = grid.size(k)
    if total > max_solutions:
        raise ValueError(f"grid has {total} solutions, exceeding the cap of {max_solutions}")
    evaluator = BatchErrorEvaluator(comparison_set, list(prefs), constraint_set, thresholds)
    best_state = None
    best_error = None
    for w_idx in itertools.product(range(len(grid.weight_values)), repeat=k):
        weights = [grid.weight_values[i] for i in w_idx]
        if not any(w > 0 for w in weights):
            continue
        for p_idx, p in enumerate(grid.p_values):
            err = evaluator.error_percent(weights, p)
            if best_error is None or err < best_error:
                best_state, best_error = (w_idx, p_idx), err
    return _state_to_solution(best_state, grid, constraint_set)
