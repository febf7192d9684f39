"""Command-line entry points for the full pipeline."""

from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

import click
import numpy as np

from .. import datagen, records_io
from ..core import DomainError, distance_to_center, nominal_zone
from ..features import (
    FEATURE_NAMES,
    build_feature_matrix,
    grouped_folds,
    schema_rows,
    vector_from_values,
)
from ..gametheory import (
    empirical_strategies,
    estimate_payoff,
    payoff_to_rows,
    restrict_to_full_support as gt_restrict,
    solve_minimax,
)
from ..linkage import SourceGame, SourcePenalty, merge_sources
from ..models import HyperParams, boosting, nested_cv
from ..simulator import (
    DIRECTION_CLASSES,
    DEFAULT_EARLY_RANGES,
    DEFAULT_LATE_RANGES,
    DEFAULT_OFFSETS,
    EmpiricalTables,
    advise as run_advise,
    evaluate_policy,
    fit_uncertainty,
    offset_sweep,
    range_sweep,
)
from .common import (
    ENV_ARTIFACTS,
    ENV_PORT,
    Artifacts,
    dump_json,
    load_json,
    load_tables,
    policy_from_dict,
    params_from_dict,
    profile_from_dict,
    read_payoff_csv,
    save_tables,
)


@click.group()
def main():
    """Goalkeeper penalty-kick policy toolkit."""


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _load_records(path: str):
    path = Path(path)
    reader = records_io.read_jsonl if path.suffix == ".jsonl" else records_io.read_csv
    try:
        return reader(path)
    except FileNotFoundError:
        _fail(f"records file not found: {path}")
    except (ValueError, DomainError) as exc:
        _fail(str(exc))


def _parse_date(raw: str):
    import datetime as dt

    return dt.date.fromisoformat(raw)


def _read_source(directory: Path):
    games = []
    with open(directory / "games.csv", newline="") as fh:
        for row in csv.DictReader(fh):
            games.append(
                SourceGame(
                    game_id=row["game_id"],
                    team_home=row["team_home"],
                    team_away=row["team_away"],
                    date=_parse_date(row["date"]),
                )
            )
    penalties = []
    with open(directory / "penalties.csv", newline="") as fh:
        for row in csv.DictReader(fh):
            penalties.append(
                SourcePenalty(
                    penalty_id=row["penalty_id"],
                    game_id=row["game_id"],
                    player=row["player"],
                    minute=int(row["minute"]),
                    result=row["result"],
                    direction=row.get("direction") or None,
                    foot=row.get("foot") or None,
                    strategy=row.get("strategy") or None,
                    keeper_timing=row.get("keeper_timing") or None,
                    keeper_dive_direction=row.get("keeper_dive_direction") or None,
                    end_x=float(row["end_x"]) if row.get("end_x") else None,
                    end_z=float(row["end_z"]) if row.get("end_z") else None,
                    is_shootout=row.get("is_shootout", "") in ("true", "True", "1"),
                    shootout_kick_index=int(row["shootout_kick_index"])
                    if row.get("shootout_kick_index")
                    else None,
                    shootout_team_kick_index=int(row["shootout_team_kick_index"])
                    if row.get("shootout_team_kick_index")
                    else None,
                    goal_diff=int(row["goal_diff"]) if row.get("goal_diff") else 0,
                )
            )
    return games, penalties


@main.command()
@click.option("--source-a", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--source-b", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--overrides", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--report", "report_path", type=click.Path(dir_okay=False))
def merge(source_a, source_b, overrides, out, report_path):
    """Merge two source directories (games.csv + penalties.csv each) into one record file."""
    games_a, pens_a = _read_source(Path(source_a))
    games_b, pens_b = _read_source(Path(source_b))
    override_map = {}
    if overrides:
        with open(overrides, newline="") as fh:
            for row in csv.DictReader(fh):
                override_map[(row["kind"], row["source_name"])] = row["target_name"]
    try:
        result = merge_sources(games_a, games_b, pens_a, pens_b, overrides=override_map)
    except DomainError as exc:
        _fail(str(exc))
    records_io.write_csv(result.records, out)
    report_rows = result.report.rows()
    if report_path:
        records_io.write_table(report_rows, report_path)
    for row in report_rows:
        click.echo(f"{row['stage']}: {row['count']}")
    if result.unresolved_teams:
        click.echo(f"unresolved teams: {', '.join(result.unresolved_teams)}", err=True)


@main.command()
@click.option("--n", "n_kicks", required=True, type=int)
@click.option("--seed", required=True, type=int)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def generate(n_kicks, seed, config_path, out):
    """Generate a synthetic penalty dataset."""
    try:
        if config_path:
            config = datagen.config_from_json(config_path, n_kicks=n_kicks, seed=seed)
        else:
            config = datagen.GeneratorConfig(n_kicks=n_kicks, seed=seed)
        records = datagen.generate(config)
    except DomainError as exc:
        _fail(str(exc))
    records_io.write_csv(records, out)
    click.echo(f"wrote {len(records)} records to {out}")


@main.command()
@click.option("--records", "records_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--schema", "schema_path", type=click.Path(dir_okay=False))
def featurize(records_path, out, schema_path):
    """Export the 47-column feature matrix (plus kick_id) for a record file."""
    records = _load_records(records_path)
    matrix, ordered = build_feature_matrix(records)
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["kick_id", *FEATURE_NAMES])
        for rec, row in zip(ordered, matrix):
            writer.writerow([rec.kick_id, *[repr(float(v)) for v in row]])
    if schema_path:
        records_io.write_table(schema_rows(), schema_path)
    click.echo(f"wrote {matrix.shape[0]} x {matrix.shape[1]} features to {out}")


def _training_data(records, task):
    matrix, ordered = build_feature_matrix(records)
    if task == "direction":
        mask = np.array([r.taker_strategy == "independent" for r in ordered])
        labels = np.array(
            [DIRECTION_CLASSES.index(nominal_zone(r.end_x, r.foot)) for r in ordered]
        )
    else:
        mask = np.array([r.on_target for r in ordered])
        labels = np.array([distance_to_center(r.end_x, r.end_z) for r in ordered])
    subset = [r for r, m in zip(ordered, mask) if m]
    return subset, matrix[mask], labels[mask]


@main.command()
@click.option("--records", "records_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--task", required=True, type=click.Choice(["direction", "distance"]))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--learning-rate", default=0.1, show_default=True)
@click.option("--max-depth", default=4, show_default=True)
@click.option("--n-trees", default=100, show_default=True)
@click.option("--seed", default=0, show_default=True, type=int)
def train(records_path, task, out, learning_rate, max_depth, n_trees, seed):
    """Train the direction or distance model on a record file."""
    records = _load_records(records_path)
    try:
        _, X, y = _training_data(records, task)
        hp = HyperParams(learning_rate=learning_rate, max_depth=max_depth, n_trees=n_trees)
        model = boosting.train(
            "multiclass_3" if task == "direction" else "regression",
            X, y, hp, seed=seed, feature_names=FEATURE_NAMES,
        )
    except (DomainError, boosting.ModelError) as exc:
        _fail(str(exc))
    boosting.save_model(model, out)
    click.echo(f"wrote {task} model to {out}")


@main.command("evaluate-models")
@click.option("--records", "records_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--task", required=True, type=click.Choice(["direction", "distance"]))
@click.option("--k-outer", default=5, show_default=True)
@click.option("--seed", required=True, type=int)
@click.option("--grid", default="small", show_default=True, type=click.Choice(["small", "full"]))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def evaluate_models(records_path, task, k_outer, seed, grid, out):
    """Grouped nested cross-validation report for one model."""
    records = _load_records(records_path)
    hp_grid = (
        boosting.default_grid()
        if grid == "full"
        else [HyperParams(0.01, 3, 50), HyperParams(0.1, 4, 50), HyperParams(0.1, 4, 100)]
    )
    try:
        subset, X, y = _training_data(records, task)
        result = nested_cv(
            subset, X, y,
            "multiclass_3" if task == "direction" else "regression",
            k_outer, hp_grid, seed,
        )
    except (DomainError, boosting.ModelError) as exc:
        _fail(str(exc))
    rows = [
        {
            "fold": i,
            "metric": result.per_fold_metric[i],
            "base_metric": result.per_fold_base_metric[i],
            "learning_rate": result.chosen_hp[i].learning_rate,
            "max_depth": result.chosen_hp[i].max_depth,
            "n_trees": result.chosen_hp[i].n_trees,
        }
        for i in range(k_outer)
    ]
    records_io.write_table(rows, out)
    click.echo(result.summary())


@main.command("solve-game")
@click.option("--payoff", "payoff_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--restrict-full-support", is_flag=True,
              help="drop actions with empty cells instead of refusing")
@click.option("--out", type=click.Path(dir_okay=False))
def solve_game(payoff_path, restrict_full_support, out):
    """Solve the 4x3 zero-sum game in a payoff CSV."""
    try:
        matrix = read_payoff_csv(payoff_path)
        if restrict_full_support:
            matrix = gt_restrict(matrix)
        kicker, keeper, value = solve_minimax(matrix)
    except (DomainError, KeyError, ValueError) as exc:
        _fail(str(exc))
    payload = {
        "kicker_mix": kicker.as_dict(),
        "keeper_mix": keeper.as_dict(),
        "value": value,
    }
    if out:
        dump_json(payload, out)
    click.echo(json.dumps(payload, indent=2, sort_keys=True))


@main.command("estimate-game")
@click.option("--records", "records_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def estimate_game(records_path, out):
    """Estimate the empirical payoff matrix and strategy mixes from records."""
    records = _load_records(records_path)
    matrix = estimate_payoff(records)
    records_io.write_table(payoff_to_rows(matrix), out)
    try:
        kicker, keeper = empirical_strategies(records)
        click.echo(f"kicker mix: {kicker.as_dict()}")
        click.echo(f"keeper mix: {keeper.as_dict()}")
    except DomainError as exc:
        _fail(str(exc))


def _tables_for(records_path, tables_path) -> EmpiricalTables:
    if tables_path:
        return load_tables(tables_path)
    return EmpiricalTables.from_records(_load_records(records_path))


def _artifact_models(direction_path, distance_path):
    art = Artifacts()
    try:
        if direction_path:
            art.direction = boosting.load_model(direction_path, expected_features=FEATURE_NAMES)
        if distance_path:
            art.distance = boosting.load_model(distance_path, expected_features=FEATURE_NAMES)
    except FileNotFoundError as exc:
        _fail(f"missing model artifact: {exc.filename}")
    except boosting.ModelError as exc:
        _fail(str(exc))
    return art


@main.command()
@click.option("--records", "records_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--policy", "policy_kind", required=True)
@click.option("--offset", type=float)
@click.option("--gt-mix", "gt_mix_raw")
@click.option("--profile", "profile_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--direction-model", "direction_path", type=click.Path(dir_okay=False))
@click.option("--distance-model", "distance_path", type=click.Path(dir_okay=False))
@click.option("--tables", "tables_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--mu", type=float)
@click.option("--rho", type=float)
@click.option("--seed", type=int)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def simulate(records_path, policy_kind, offset, gt_mix_raw, profile_path, direction_path,
             distance_path, tables_path, mu, rho, seed, out):
    """Evaluate one policy over a record file; writes per-kick evaluations."""
    records = _load_records(records_path)
    try:
        gt_mix = tuple(float(x) for x in gt_mix_raw.split(",")) if gt_mix_raw else None
        policy = policy_from_dict(
            {"kind": policy_kind, "offset": offset, "gt_mix": gt_mix}
        )
        gk = profile_from_dict(load_json(profile_path))
        params = params_from_dict({k: v for k, v in (("mu", mu), ("rho", rho)) if v is not None})
        tables = _tables_for(records_path, tables_path)
        art = _artifact_models(direction_path, distance_path)
        matrix, ordered = build_feature_matrix(records)
        rng = np.random.default_rng(seed) if seed is not None else None
        result = evaluate_policy(
            ordered, policy, gk, params, tables,
            models=art.models, feature_matrix=matrix, rng=rng,
        )
    except DomainError as exc:
        _fail(str(exc))
    rows = [
        {
            "kick_id": e.kick_id,
            "dive_timing_used": e.dive_timing_used,
            "p_correct": e.p_correct,
            "p_save_given_correct": e.p_save_given_correct,
            "p_save": e.p_save,
        }
        for e in result.kicks
    ]
    records_io.write_table(rows, out)
    click.echo(f"expected save fraction: {result.expected_save_fraction:.4f}")


def _sweep_common(records_path, profile_path, direction_path, distance_path, tables_path):
    records = _load_records(records_path)
    gk = profile_from_dict(load_json(profile_path))
    tables = _tables_for(records_path, tables_path)
    art = _artifact_models(direction_path, distance_path)
    matrix, ordered = build_feature_matrix(records)
    policies = [policy_from_dict({"kind": k}) for k in ("late", "early", "early_educated", "mixed_educated")]
    return ordered, gk, tables, art, matrix, policies


@main.command("sweep-ranges")
@click.option("--records", "records_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--profile", "profile_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--direction-model", "direction_path", type=click.Path(dir_okay=False))
@click.option("--distance-model", "distance_path", type=click.Path(dir_okay=False))
@click.option("--tables", "tables_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def sweep_ranges(records_path, profile_path, direction_path, distance_path, tables_path, out):
    """Expected save fraction over the late x early dive-range grid."""
    try:
        ordered, gk, tables, art, matrix, policies = _sweep_common(
            records_path, profile_path, direction_path, distance_path, tables_path
        )
        rows = range_sweep(
            ordered, policies, DEFAULT_LATE_RANGES, DEFAULT_EARLY_RANGES, gk,
            params_from_dict(None), tables, models=art.models, feature_matrix=matrix,
        )
    except DomainError as exc:
        _fail(str(exc))
    records_io.write_table(rows, out)
    click.echo(f"wrote {len(rows)} sweep cells to {out}")


@main.command("sweep-offset")
@click.option("--records", "records_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--profile", "profile_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--direction-model", "direction_path", type=click.Path(dir_okay=False))
@click.option("--distance-model", "distance_path", type=click.Path(dir_okay=False))
@click.option("--tables", "tables_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def sweep_offset(records_path, profile_path, direction_path, distance_path, tables_path, out):
    """Expected save fraction as the keeper shades toward the natural corner."""
    try:
        ordered, gk, tables, art, matrix, policies = _sweep_common(
            records_path, profile_path, direction_path, distance_path, tables_path
        )
        rows = offset_sweep(
            ordered, policies, DEFAULT_OFFSETS, gk,
            params_from_dict(None), tables, models=art.models, feature_matrix=matrix,
        )
    except DomainError as exc:
        _fail(str(exc))
    records_io.write_table(rows, out)
    click.echo(f"wrote {len(rows)} sweep cells to {out}")


@main.command("fit-uncertainty")
@click.option("--records", "records_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def fit_uncertainty_cmd(records_path, out):
    """Recover dive ranges and reach-model uncertainty by Brier-score grid search."""
    records = _load_records(records_path)
    try:
        fit = fit_uncertainty(records)
    except DomainError as exc:
        _fail(str(exc))
    payload = {
        "early_range": fit.early_range,
        "late_range": fit.late_range,
        "mu": fit.mu,
        "rho": fit.rho,
        "brier": fit.brier,
        "n_kicks": fit.n_kicks,
        "calibration": [
            {
                "lo": b.lo,
                "hi": b.hi,
                "mean_predicted": None if np.isnan(b.mean_predicted) else b.mean_predicted,
                "observed_frequency": None if np.isnan(b.observed_frequency) else b.observed_frequency,
                "count": b.count,
            }
            for b in fit.calibration
        ],
    }
    dump_json(payload, out)
    click.echo(
        f"best fit: early={fit.early_range} late={fit.late_range} mu={fit.mu} rho={fit.rho} "
        f"(brier {fit.brier:.4f} over {fit.n_kicks} kicks)"
    )


@main.command("build-tables")
@click.option("--records", "records_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def build_tables(records_path, out):
    """Estimate the simulator's empirical tables from a record file."""
    records = _load_records(records_path)
    save_tables(EmpiricalTables.from_records(records), out)
    click.echo(f"wrote tables to {out}")


@main.command()
@click.option("--profile", "profile_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--context", "context_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--direction-model", "direction_path", required=True, type=click.Path(dir_okay=False))
@click.option("--distance-model", "distance_path", required=True, type=click.Path(dir_okay=False))
@click.option("--tables", "tables_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", required=True, type=int)
@click.option("--out", type=click.Path(dir_okay=False))
def advise(profile_path, context_path, direction_path, distance_path, tables_path, seed, out):
    """Per-policy save probabilities and a sampled instruction for one kick context."""
    try:
        gk = profile_from_dict(load_json(profile_path))
        fv = vector_from_values(load_json(context_path))
        tables = load_tables(tables_path)
        art = _artifact_models(direction_path, distance_path)
        advice = run_advise(fv, gk, params_from_dict(None), tables, art.models, seed)
    except DomainError as exc:
        _fail(str(exc))
    payload = {
        "p_save": advice.p_save,
        "recommendation": advice.recommendation,
        "instruction": advice.instruction,
        "seed": advice.seed,
    }
    if out:
        dump_json(payload, out)
    click.echo(json.dumps(payload, indent=2, sort_keys=True))


@main.command()
@click.option("--artifacts", required=True, type=click.Path(exists=True, file_okay=False),
              envvar=ENV_ARTIFACTS)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8008, show_default=True, type=int, envvar=ENV_PORT)
def serve(artifacts, host, port):
    """Run the HTTP advisory service over a directory of trained artifacts."""
    import uvicorn

    from .service import create_app

    app = create_app(Path(artifacts))
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
