"""Batch entry points: generate comparisons, simulate a user, learn, evaluate,
and serve the dialogue UI.

A full desk experiment is four commands:

    geneval gen --objects 25 --pairs 4 --seed 1 --out learning.json
    geneval simulate --comps learning.json --oracle oracle.json --out prefs.jsonl
    geneval learn --comps learning.json --prefs prefs.jsonl --out result.json
    geneval eval --comps test.json --prefs test-prefs.jsonl \\
        --function learnt.json --report report.json
"""

from __future__ import annotations

import json
from pathlib import Path

import click

from .compat import CompatibilityThresholds, diagnose, save_report
from .evalfunc import ConstraintMismatchError, EvaluationFunction
from .learn import (
    ParameterGrid,
    TabuConfig,
    save_learn_result,
    snap_to_grid,
    tabu_search,
)
from .oracle import label_set, load_oracle_config
from .preferences import (
    build_comparison_set,
    load_comparison_set,
    load_preferences,
    save_comparison_set,
    save_preferences,
)
from .buildings import ScenarioConfig
from .service import ServiceConfig, create_app, default_init_function


def scenario_for_scale(scale_denominator: int) -> ScenarioConfig:
    """Legibility thresholds derived from the target scale: 0.4 mm minimum
    symbol side and 0.1 mm minimum edge at map scale."""
    side_m = 0.0004 * scale_denominator
    return ScenarioConfig(
        scale_denominator=scale_denominator,
        min_area_m2=side_m * side_m,
        min_edge_m=0.0001 * scale_denominator,
    )


def _load_thresholds(path: str | None) -> CompatibilityThresholds:
    if path is None:
        return CompatibilityThresholds()
    return CompatibilityThresholds.from_json_obj(json.loads(Path(path).read_text()))


def _load_grid(path: str | None) -> ParameterGrid:
    if path is None:
        return ParameterGrid()
    return ParameterGrid.from_json_obj(json.loads(Path(path).read_text()))


@click.group()
def main():
    """Learn a generalisation evaluation function from graded preferences."""


@main.command("gen")
@click.option("--objects", type=int, required=True, help="Number of buildings.")
@click.option("--pairs", type=int, required=True, help="Comparisons per building.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--scale", type=int, default=25000, show_default=True,
              help="Target map scale denominator.")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def cmd_gen(objects, pairs, seed, scale, out):
    """Generate a comparison set of synthetic building generalisations."""
    if objects < 1:
        raise click.UsageError("--objects must be >= 1")
    if pairs < 1:
        raise click.UsageError("--pairs must be >= 1")
    cfg = scenario_for_scale(scale)
    comparison_set = build_comparison_set(cfg, objects, pairs, seed)
    save_comparison_set(comparison_set, out)
    click.echo(f"wrote {len(comparison_set)} comparisons "
               f"({objects} objects x {pairs} pairs) to {out}")


@main.command("simulate")
@click.option("--comps", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--oracle", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Oracle config JSON (hidden function, label cuts, noise, seed).")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def cmd_simulate(comps, oracle, out):
    """Label every comparison with the simulated oracle user."""
    comparison_set = load_comparison_set(comps)
    oracle_cfg = load_oracle_config(oracle)
    try:
        records = label_set(comparison_set, oracle_cfg)
    except ConstraintMismatchError as exc:
        raise click.ClickException(str(exc)) from exc
    save_preferences(out, records)
    click.echo(f"labeled {len(records)} comparisons -> {out}")


@main.command("learn")
@click.option("--comps", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--prefs", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--init", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Initial function JSON; defaults to equal weights over the "
                   "non-orientation constraints, p=1.")
@click.option("--thresholds", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--grid", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--max-iters", type=int, default=500, show_default=True)
@click.option("--tenure", type=int, default=7, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--figures", type=click.Path(file_okay=False), default=None,
              help="Also render trajectory and weight-share figures to this directory.")
def cmd_learn(comps, prefs, init, thresholds, grid, max_iters, tenure, seed, out, figures):
    """Tabu-search the parameter grid for the minimum-error function."""
    if max_iters < 1:
        raise click.UsageError("--max-iters must be >= 1")
    if tenure < 0:
        raise click.UsageError("--tenure must be >= 0")
    comparison_set = load_comparison_set(comps)
    records = load_preferences(prefs)
    t = _load_thresholds(thresholds)
    g = _load_grid(grid)
    if init is not None:
        init_fn = EvaluationFunction.from_json_obj(json.loads(Path(init).read_text()))
    else:
        init_fn = default_init_function(comparison_set.scenario.constraint_set)
    try:
        solution = snap_to_grid(init_fn, g)
        result = tabu_search(comparison_set, records, solution, t, g,
                             TabuConfig(max_iterations=max_iters, tabu_tenure=tenure,
                                        seed=seed))
    except (ValueError, ConstraintMismatchError) as exc:
        raise click.ClickException(str(exc)) from exc
    save_learn_result(result, out)
    click.echo(f"initial error: {result.initial_error_percent:.1f}%")
    click.echo(f"best error:    {result.best_error_percent:.1f}%")
    click.echo(f"wrote result ({result.evaluations} evaluations, "
               f"{len(result.trajectory) - 1} iterations) to {out}")
    if figures:
        from .figures import render_learn_figures
        for path in render_learn_figures(result, init_fn, figures):
            click.echo(f"figure: {path}")


@main.command("eval")
@click.option("--comps", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--prefs", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--function", "function_path",
              type=click.Path(exists=True, dir_okay=False), required=True,
              help="Function JSON, or a learn-result JSON (its best function is used).")
@click.option("--thresholds", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--report", type=click.Path(dir_okay=False), required=True)
@click.option("--figures", type=click.Path(file_okay=False), default=None,
              help="Also render report figures and CSV rows to this directory.")
def cmd_eval(comps, prefs, function_path, thresholds, report, figures):
    """Evaluate a function against labeled comparisons and write the report."""
    comparison_set = load_comparison_set(comps)
    records = load_preferences(prefs)
    t = _load_thresholds(thresholds)
    obj = json.loads(Path(function_path).read_text())
    if "best_function" in obj:  # accept a learn result directly
        obj = obj["best_function"]
    f = EvaluationFunction.from_json_obj(obj)
    try:
        result = diagnose(comparison_set, records, f, t)
    except (ValueError, ConstraintMismatchError) as exc:
        raise click.ClickException(str(exc)) from exc
    save_report(result, report)
    click.echo(f"global error: {result.global_error_percent:.1f}% "
               f"({sum(1 for r in result.rows if not r.compatible)} of "
               f"{len(result.rows)} incompatible)")
    click.echo(f"wrote report to {report}")
    if figures:
        from .figures import render_report_figures
        for path in render_report_figures(result, comparison_set, t, figures):
            click.echo(f"figure: {path}")


@main.command("serve")
@click.option("--comps", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--data-dir", type=click.Path(file_okay=False), default="geneval-data",
              show_default=True)
@click.option("--port", type=int, default=None, help="Overrides config and env.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Service config JSON.")
@click.option("--ui-dir", type=click.Path(file_okay=False), default=None,
              help="Static directory with the comparison UI bundle.")
def cmd_serve(comps, data_dir, port, config_path, ui_dir):
    """Serve the dialogue API (and the comparison UI, when a bundle is given)."""
    import uvicorn

    cfg = ServiceConfig.load(config_path)
    cfg.data_dir = data_dir
    if port is not None:
        cfg.port = port
    if ui_dir is not None:
        cfg.ui_dir = ui_dir
    app = create_app(cfg)
    state = app.state.service
    session = state.find_session_for_path(comps)
    if session is None:
        session = state.create_session(comps)
        click.echo(f"created session {session.session_id} for {comps}")
    else:
        click.echo(f"resuming session {session.session_id} "
                   f"({session.progress()['answered']}/{session.progress()['total']} answered)")
    click.echo(f"serving on http://127.0.0.1:{cfg.port}")
    uvicorn.run(app, host="127.0.0.1", port=cfg.port, log_level="warning")


if __name__ == "__main__":
    main()
