"""Diagnostic figures rendered to files alongside the delimited report output.

All rendering is opt-in from the CLI (--figures DIR); the machine-readable
JSON outputs never depend on matplotlib state.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .compat import CompatibilityReport, CompatibilityThresholds  # noqa: E402
from .evalfunc import EvaluationFunction, effective_weight_share  # noqa: E402
from .learn import LearnResult  # noqa: E402
from .preferences import Comparison, PreferenceLabel  # noqa: E402

_LABEL_ORDER = [
    PreferenceLabel.FAR_BETTER_B,
    PreferenceLabel.BETTER_B,
    PreferenceLabel.SLIGHTLY_BETTER_B,
    PreferenceLabel.EQUIVALENT,
    PreferenceLabel.SLIGHTLY_BETTER_A,
    PreferenceLabel.BETTER_A,
    PreferenceLabel.FAR_BETTER_A,
]


def _draw_polygon(ax, polygon, **kwargs):
    xs = [x for x, _ in polygon.vertices] + [polygon.vertices[0][0]]
    ys = [y for _, y in polygon.vertices] + [polygon.vertices[0][1]]
    ax.plot(xs, ys, **kwargs)


def plot_comparison(comparison: Comparison, out_path: str | Path,
                    title: str | None = None) -> Path:
    """Candidates A and B side by side over the initial outline, shared scale."""
    fig, axes = plt.subplots(1, 2, figsize=(8, 4), sharex=True, sharey=True)
    polygons = [comparison.initial, comparison.a.geometry, comparison.b.geometry]
    xs = [x for p in polygons for x, _ in p.vertices]
    ys = [y for p in polygons for _, y in p.vertices]
    pad = 2.0
    for ax, cand, name in zip(axes, (comparison.a, comparison.b), ("A", "B")):
        _draw_polygon(ax, comparison.initial, color="0.6", lw=1.0, ls="--",
                      label="initial")
        _draw_polygon(ax, cand.geometry, color="tab:blue", lw=1.8, label=name)
        ax.set_xlim(min(xs) - pad, max(xs) + pad)
        ax.set_ylim(min(ys) - pad, max(ys) + pad)
        ax.set_aspect("equal")
        ax.set_title(f"{name}: {cand.candidate_id}", fontsize=9)
        ax.tick_params(labelsize=7)
    fig.suptitle(title or comparison.comparison_id, fontsize=10)
    fig.tight_layout()
    out_path = Path(out_path)
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path


def plot_trajectory(result: LearnResult, out_path: str | Path) -> Path:
    """Current and best-seen error along the tabu walk."""
    iters = [i for i, _, _ in result.trajectory]
    current = [c for _, c, _ in result.trajectory]
    best = [b for _, _, b in result.trajectory]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(iters, current, color="0.7", lw=1.0, label="current")
    ax.step(iters, best, color="tab:red", lw=1.8, where="post", label="best")
    ax.set_xlabel("iteration")
    ax.set_ylabel("global error (%)")
    ax.set_ylim(bottom=0)
    ax.legend(frameon=False)
    ax.set_title(
        f"initial {result.initial_error_percent:.1f}% -> "
        f"best {result.best_error_percent:.1f}%", fontsize=10)
    fig.tight_layout()
    out_path = Path(out_path)
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path


def plot_weight_shares(functions: dict[str, EvaluationFunction],
                       out_path: str | Path) -> Path:
    """Effective weight share per constraint, one bar group per function."""
    fig, ax = plt.subplots(figsize=(7, 4))
    names = sorted({c for f in functions.values() for c in f.constraint_set})
    width = 0.8 / max(1, len(functions))
    for i, (label, f) in enumerate(functions.items()):
        shares = dict(zip(f.constraint_set, effective_weight_share(f)))
        xs = [j + i * width for j in range(len(names))]
        ax.bar(xs, [shares.get(n, 0.0) for n in names], width=width,
               label=f"{label} (p={f.power})")
    ax.set_xticks([j + 0.4 - width / 2 for j in range(len(names))])
    ax.set_xticklabels(names, fontsize=8)
    ax.set_ylabel("effective weight share")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    out_path = Path(out_path)
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path


def plot_report_bands(report: CompatibilityReport, thresholds: CompatibilityThresholds,
                      out_path: str | Path) -> Path:
    """Quality differences per label row against the compatibility bands."""
    fig, ax = plt.subplots(figsize=(8, 4.5))
    index = {label: i for i, label in enumerate(_LABEL_ORDER)}
    for ok, color in ((True, "tab:green"), (False, "tab:red")):
        pts = [(r.diff, index[r.label]) for r in report.rows if r.compatible == ok]
        if pts:
            ax.scatter([p[0] for p in pts], [p[1] for p in pts], s=18,
                       color=color, alpha=0.7,
                       label="compatible" if ok else "incompatible")
    t = thresholds
    bands = {
        PreferenceLabel.EQUIVALENT: (-t.eq_max, t.eq_max),
        PreferenceLabel.SLIGHTLY_BETTER_A: (t.sb_min, t.sb_max),
        PreferenceLabel.SLIGHTLY_BETTER_B: (-t.sb_max, -t.sb_min),
        PreferenceLabel.BETTER_A: (t.b_min, t.b_max),
        PreferenceLabel.BETTER_B: (-t.b_max, -t.b_min),
        PreferenceLabel.FAR_BETTER_A: (t.fb_min, 1.0),
        PreferenceLabel.FAR_BETTER_B: (-1.0, -t.fb_min),
    }
    for label, (lo, hi) in bands.items():
        y = index[label]
        ax.plot([lo, hi], [y, y], color="0.8", lw=8, zorder=0, solid_capstyle="butt")
    ax.set_yticks(range(len(_LABEL_ORDER)))
    ax.set_yticklabels([l.value for l in _LABEL_ORDER], fontsize=8)
    ax.set_xlabel("quality(A) - quality(B)")
    ax.set_xlim(-1.0, 1.0)
    ax.axvline(0.0, color="0.9", lw=0.8, zorder=0)
    ax.legend(frameon=False, fontsize=8)
    ax.set_title(f"global error {report.global_error_percent:.1f}%", fontsize=10)
    fig.tight_layout()
    out_path = Path(out_path)
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path


def write_report_csv(report: CompatibilityReport, out_path: str | Path) -> Path:
    out_path = Path(out_path)
    with open(out_path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["comparison_id", "label", "quality_a", "quality_b",
                         "diff", "compatible"])
        for r in report.rows:
            writer.writerow([r.comparison_id, r.label.value, repr(r.quality_a),
                             repr(r.quality_b), repr(r.diff), int(r.compatible)])
    return out_path


def render_report_figures(report: CompatibilityReport, comparison_set,
                          thresholds: CompatibilityThresholds,
                          out_dir: str | Path, max_comparisons: int = 12) -> list[Path]:
    """Report-path bundle: band plot, CSV rows, and drawings of the first
    incompatible comparisons."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [
        plot_report_bands(report, thresholds, out_dir / "report_bands.png"),
        write_report_csv(report, out_dir / "report_rows.csv"),
    ]
    shown = 0
    for row in report.rows:
        if row.compatible or shown >= max_comparisons:
            continue
        comparison = comparison_set.by_id(row.comparison_id)
        written.append(plot_comparison(
            comparison, out_dir / f"incompatible_{row.comparison_id}.png",
            title=f"{row.comparison_id}: {row.label.value} (diff {row.diff:+.3f})"))
        shown += 1
    return written


def render_learn_figures(result: LearnResult, init_function: EvaluationFunction,
                         out_dir: str | Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return [
        plot_trajectory(result, out_dir / "trajectory.png"),
        plot_weight_shares({"initial": init_function,
                            "learnt": result.best.function},
                           out_dir / "weight_shares.png"),
    ]
