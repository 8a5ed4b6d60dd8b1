"""Command-line surface. Subcommands map 1:1 onto package operations;
usage errors exit 2 (argparse), operational errors exit 1 with a message."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import dataset as ds
from .architectures import deep_architectures, descending_architectures, wide_architectures
from .bundle import ModelBundle, load_bundle, save_bundle
from .derive import load_pipeline_config
from .errors import TornadoDamageError
from .events import ingest_events, write_reject_report
from .fitting_demo import run_demo
from .geometry import load_region_index, load_rings
from .grid import (
    build_grid,
    city_points,
    make_scenarios,
    predict_points,
    write_predictions_csv,
    write_predictions_geojsonl,
)
from .inflation import load_cpi
from .metrics import OneClassOnly
from .nn import HiddenActivation
from .optim import OptimizerKind
from .protocol import (
    Candidate,
    Task,
    enumerate_candidates,
    report_to_dict,
    run_protocol,
    write_sweep_report,
)
from .rasters import load_raster_set
from .service import create_app, parse_predict_request, request_features
from .zero_inflated import ZeroInflatedModel, predict


def _parse_rasters(pairs: list[str]) -> dict[int, Path]:
    out = {}
    for pair in pairs:
        year, _, path = pair.partition("=")
        out[int(year)] = Path(path)
    return out


def _parse_widths(text: str) -> tuple[int, ...]:
    return tuple(int(w) for w in text.split("x"))


def _parse_grid_values(text: str) -> tuple[float, ...]:
    """Either a:b:step (inclusive) or a comma-separated list."""
    if ":" in text:
        lo, hi, step = (float(v) for v in text.split(":"))
        count = int(round((hi - lo) / step)) + 1
        return tuple(round(lo + i * step, 10) for i in range(count))
    return tuple(float(v) for v in text.split(","))


def _parse_months(text: str) -> list[int]:
    if "-" in text:
        lo, hi = text.split("-")
        return list(range(int(lo), int(hi) + 1))
    return [int(m) for m in text.split(",")]


def _load_table_split(args) -> tuple[ds.FeatureTable, ds.SplitAssignment]:
    table = ds.load_table(args.table)
    assignment = ds.load_split(args.split, table.row_ids)
    return table, assignment


def cmd_ingest(args) -> int:
    events, rejects = ingest_events(args.events)
    if args.rejects_out:
        write_reject_report(rejects, args.rejects_out)
    print(f"ingested {len(events)} events, rejected {len(rejects)} rows")
    return 0


def cmd_assemble(args) -> int:
    config = load_pipeline_config(args.config)
    events, rejects = ingest_events(args.events)
    rasters = load_raster_set(_parse_rasters(args.raster))
    regions = load_region_index(args.regions_geometry)
    region_values = ds.load_region_tables(args.regions_values, config)
    cpi = load_cpi(args.cpi)
    table, drops = ds.assemble_feature_table(events, rasters, region_values, regions, cpi, config)
    ds.save_table(table, args.out)
    if args.drops_out:
        ds.write_drop_report(drops, args.drops_out)
    print(
        f"assembled {table.n_rows} rows x {len(table.columns)} predictors "
        f"({len(drops)} dropped, {len(rejects)} rejected at ingest)"
    )
    return 0


def cmd_split(args) -> int:
    table = ds.load_table(args.table)
    fractions = tuple(float(f) for f in args.fractions.split(","))
    assignment = ds.split(table.n_rows, args.seed, fractions)
    ds.save_split(assignment, table.row_ids, args.out)
    print(f"split {table.n_rows} rows: {assignment.counts()}")
    return 0


def cmd_sweep(args) -> int:
    table, assignment = _load_table_split(args)
    task = Task(args.task)
    columns = ds.variable_sets(table)[args.variable_set]
    if args.family == "descending":
        architectures = descending_architectures(len(columns))
    elif args.family == "wide":
        architectures = wide_architectures([int(w) for w in args.widths.split(",")])
    elif args.family == "deep":
        architectures = deep_architectures(len(columns), [int(d) for d in args.depths.split(",")])
    else:
        raise TornadoDamageError(f"unknown family {args.family}")
    candidates = enumerate_candidates(
        task=task,
        variable_set=args.variable_set,
        family=args.family,
        n_inputs=len(columns),
        architectures=architectures,
        dropouts=_parse_grid_values(args.dropout) if args.dropout else (0.0,),
        l2s=_parse_grid_values(args.l2) if args.l2 else (0.0,),
        activation=HiddenActivation(args.activation),
        epochs=args.epochs,
        learning_rate=args.lr,
    )
    result = run_protocol(table, assignment, candidates, base_seed=args.seed)
    write_sweep_report(result.results, args.out)
    best = result.results[result.best_index].candidate
    print(f"swept {len(candidates)} candidates; best: {best.name}")
    print(f"test report: {report_to_dict(result.test_report)}")
    return 0


def _single_candidate(args, task: Task, prefix: str) -> Candidate:
    widths = _parse_widths(getattr(args, f"{prefix}_arch"))
    return Candidate(
        name=f"{task.value}-{args.variable_set}-" + "x".join(map(str, widths)),
        task=task,
        variable_set=args.variable_set,
        hidden_widths=widths,
        hidden_activation=HiddenActivation(getattr(args, f"{prefix}_activation")),
        dropout_p=getattr(args, f"{prefix}_dropout"),
        l2=getattr(args, f"{prefix}_l2"),
        epochs=args.epochs,
        learning_rate=args.lr,
        batch_size=args.batch_size,
        optimizer=OptimizerKind(args.optimizer),
    )


def cmd_train(args) -> int:
    table, assignment = _load_table_split(args)
    conditional = _single_candidate(args, Task.CONDITIONAL, "conditional")
    classifier = _single_candidate(args, Task.CLASSIFIER, "classifier")

    cond_result = run_protocol(table, assignment, [conditional], base_seed=args.seed)
    clf_result = run_protocol(table, assignment, [classifier], base_seed=args.seed)

    columns = ds.variable_sets(table)[args.variable_set]
    roster = [table.columns[j] for j in columns]
    model = ZeroInflatedModel(
        classifier_spec=clf_result.best_spec,
        classifier_params=clf_result.final_params,
        conditional_spec=cond_result.best_spec,
        conditional_params=cond_result.final_params,
        outcome_transform=table.outcome_transform,
        feature_names=[c.name for c in roster],
    )
    bundle = ModelBundle(
        model=model,
        columns=roster,
        aux_means=table.aux_means,
        training_meta={
            "seed": args.seed,
            "variable_set": args.variable_set,
            "conditional_candidate": conditional.name,
            "classifier_candidate": classifier.name,
            "test_reports": {
                "conditional": report_to_dict(cond_result.test_report),
                "classifier": report_to_dict(clf_result.test_report),
            },
            "protocol_log": cond_result.log + clf_result.log,
        },
    )
    save_bundle(bundle, args.out)
    print(f"conditional test: {report_to_dict(cond_result.test_report)}")
    print(f"classifier test:  {report_to_dict(clf_result.test_report)}")
    print(f"bundle written to {args.out}")

    if args.residuals_dir:
        from .protocol import residual_export, write_residuals

        out_dir = Path(args.residuals_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for task, result in (("conditional", cond_result), ("classifier", clf_result)):
            rows = residual_export(
                table, assignment, Task(task), result.best_spec, result.test_params, result.columns
            )
            write_residuals(rows, out_dir / f"residuals_{task}.csv")
        print(f"test residuals written to {args.residuals_dir}")

    if args.loss_history_dir:
        from .optim import export_loss_history

        out_dir = Path(args.loss_history_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for task, result in (("conditional", cond_result), ("classifier", clf_result)):
            export_loss_history(result.final_history, out_dir / f"loss_{task}.csv")
        print(f"loss histories written to {args.loss_history_dir}")
    return 0


def cmd_evaluate(args) -> int:
    from .metrics import accuracy, auroc, mse, r2
    from .nn import Mode, forward

    table, assignment = _load_table_split(args)
    bundle = load_bundle(args.bundle)
    columns = [table.column_index(name) for name in bundle.model.feature_names]
    report: dict[str, dict] = {}
    for scope in ds.Scope:
        idx = assignment.indices(scope)
        x = table.matrix[np.ix_(idx, columns)]
        cond_rows = idx[table.outcome_raw[idx] > 0]
        xc = table.matrix[np.ix_(cond_rows, columns)]
        cond_out, _ = forward(bundle.model.conditional_params, bundle.model.conditional_spec, xc, Mode.EVAL)
        clf_out, _ = forward(bundle.model.classifier_params, bundle.model.classifier_spec, x, Mode.EVAL)
        labels = (table.outcome_raw[idx] > 0).astype(float)
        entry = {
            "conditional_mse": mse(cond_out, table.outcome_z[cond_rows]),
            "conditional_r2": r2(cond_out, table.outcome_z[cond_rows]),
            "classifier_accuracy": accuracy(clf_out, labels),
            "n": int(idx.size),
            "n_damaged": int(cond_rows.size),
        }
        try:
            entry["classifier_auroc"] = auroc(clf_out, labels)
        except OneClassOnly:
            entry["classifier_auroc"] = None
        report[scope.value] = entry
    print(json.dumps(report, indent=2))
    return 0


def cmd_grid(args) -> int:
    bundle = load_bundle(args.bundle)
    config = load_pipeline_config(args.config)
    boundary = [ring for rings in load_rings(args.boundary).values() for ring in rings]
    grid = build_grid(boundary)
    points = [("", lat, lon) for lat, lon in grid.unmasked()]
    if args.cities:
        points += city_points(args.cities)
    rasters = load_raster_set(_parse_rasters(args.raster))
    regions = load_region_index(args.regions_geometry)
    region_values = ds.load_region_tables(args.regions_values, config)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for month in _parse_months(args.months):
        scenarios, failed = make_scenarios(
            points, args.year, month, bundle.columns, bundle.aux_means,
            rasters, region_values, regions, config,
        )
        rows = predict_points(bundle.model, scenarios)
        stem = f"grid_{args.year}-{month:02d}"
        write_predictions_csv(rows, out_dir / f"{stem}.csv")
        write_predictions_geojsonl(rows, out_dir / f"{stem}.geojsonl")
        floored = sum(1 for r in rows if r.prediction.floored)
        print(f"{stem}: {len(rows)} points predicted, {len(failed)} failed, "
              f"{floored} dollar inversions floored at zero")
    return 0


def cmd_predict(args) -> int:
    bundle = load_bundle(args.bundle)
    body = {
        "lat": args.lat,
        "lon": args.lon,
        "datetime": args.datetime,
        "overrides": dict(
            (name, float(value))
            for name, _, value in (o.partition("=") for o in args.override)
        ),
    }
    for key in ("length", "width", "duration"):
        value = getattr(args, key)
        if value is not None:
            body[key] = value
    req = parse_predict_request(body)
    vector, echo = request_features(bundle, req)
    result = predict(bundle.model, vector)
    print(json.dumps({
        "p_damage": result.p_damage,
        "conditional_transformed": result.conditional_transformed,
        "conditional_usd": result.conditional_usd,
        "expected_usd": result.expected_usd,
        "damage_flag": result.damage_flag,
        "features": echo,
    }))
    return 0


def cmd_serve(args) -> int:
    import os

    import uvicorn

    bundle = load_bundle(args.bundle)
    app = create_app(bundle, grid_dir=args.grid_dir, dashboard_dir=args.dashboard_dir)
    bind = os.environ.get("TORNADO_DAMAGE_BIND", f"{args.host}:{args.port}")
    host, _, port = bind.rpartition(":")
    uvicorn.run(app, host=host, port=int(port))
    return 0


def cmd_demo_fig1(args) -> int:
    results = run_demo(seed=args.seed, epochs=args.epochs)
    for name, values in results.items():
        print(f"{name}: nn_mse={values['nn_mse']!r} linear_mse={values['linear_mse']!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tornado-damage")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate an events file")
    p.add_argument("--events", required=True)
    p.add_argument("--rejects-out")
    p.set_defaults(fn=cmd_ingest)

    p = sub.add_parser("assemble", help="build the feature table")
    p.add_argument("--events", required=True)
    p.add_argument("--raster", action="append", required=True, metavar="YEAR=PATH")
    p.add_argument("--regions-geometry", required=True)
    p.add_argument("--regions-values", required=True)
    p.add_argument("--cpi", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--drops-out")
    p.set_defaults(fn=cmd_assemble)

    p = sub.add_parser("split", help="assign the train/cv/test partition")
    p.add_argument("--table", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fractions", default="0.6,0.2,0.2")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_split)

    p = sub.add_parser("sweep", help="train a candidate grid, select on CV")
    p.add_argument("--table", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--task", choices=[t.value for t in Task], default="conditional")
    p.add_argument("--variable-set", default="combined")
    p.add_argument("--family", choices=["descending", "wide", "deep"], default="wide")
    p.add_argument("--widths", default="100", help="comma list for the wide family")
    p.add_argument("--depths", default="1,2,3", help="comma list for the deep family")
    p.add_argument("--dropout", default="", help="a:b:step or comma list")
    p.add_argument("--l2", default="", help="comma list")
    p.add_argument("--activation", choices=[a.value for a in HiddenActivation], default="relu")
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("train", help="run the protocol and write a model bundle")
    p.add_argument("--table", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--variable-set", default="combined")
    p.add_argument("--conditional-arch", default="100x100")
    p.add_argument("--conditional-dropout", type=float, default=0.2)
    p.add_argument("--conditional-l2", type=float, default=0.0)
    p.add_argument("--conditional-activation", default="relu")
    p.add_argument("--classifier-arch", default="100x100")
    p.add_argument("--classifier-dropout", type=float, default=0.1)
    p.add_argument("--classifier-l2", type=float, default=0.0)
    p.add_argument("--classifier-activation", default="relu")
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--batch-size", type=int, default=50)
    p.add_argument("--optimizer", choices=[o.value for o in OptimizerKind], default="adagrad")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--residuals-dir")
    p.add_argument("--loss-history-dir")
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("evaluate", help="score a bundle against a table")
    p.add_argument("--bundle", required=True)
    p.add_argument("--table", required=True)
    p.add_argument("--split", required=True)
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("grid", help="precompute monthly grid predictions")
    p.add_argument("--bundle", required=True)
    p.add_argument("--boundary", required=True)
    p.add_argument("--raster", action="append", required=True, metavar="YEAR=PATH")
    p.add_argument("--regions-geometry", required=True)
    p.add_argument("--regions-values", required=True)
    p.add_argument("--cities")
    p.add_argument("--config", default=None)
    p.add_argument("--year", type=int, default=2019)
    p.add_argument("--months", default="1-12")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(fn=cmd_grid)

    p = sub.add_parser("predict", help="one prediction from the command line")
    p.add_argument("--bundle", required=True)
    p.add_argument("--lat", type=float, required=True)
    p.add_argument("--lon", type=float, required=True)
    p.add_argument("--datetime", required=True)
    p.add_argument("--length", type=float)
    p.add_argument("--width", type=float)
    p.add_argument("--duration", type=float)
    p.add_argument("--override", action="append", default=[], metavar="FEATURE=VALUE")
    p.set_defaults(fn=cmd_predict)

    p = sub.add_parser("serve", help="run the inference HTTP service")
    p.add_argument("--bundle", required=True)
    p.add_argument("--grid-dir")
    p.add_argument("--dashboard-dir")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("demo-fig1", help="function-fitting demonstration")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epochs", type=int, default=60)
    p.set_defaults(fn=cmd_demo_fig1)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except TornadoDamageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
