#!/usr/bin/env python3
"""End-to-end pipeline walkthrough on the synthetic inputs: assemble the
feature table, split it, sweep a small candidate grid, train and persist the
paired model, evaluate it, and precompute a month of grid predictions.

Run scripts/make_synthetic_inputs.py first (or pass --inputs)."""

import argparse
import sys
from pathlib import Path

from tornado_damage.cli import main as cli


def run(args: list[str]):
    print(f"$ tornado-damage {' '.join(args)}")
    code = cli(args)
    if code != 0:
        sys.exit(code)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--inputs", default="synthetic_inputs")
    parser.add_argument("--out-dir", default="pipeline_demo")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--epochs", type=int, default=60)
    args = parser.parse_args()

    src = Path(args.inputs)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rasters = [f"--raster=2001={src}/nlcd2001.asc",
               f"--raster=2006={src}/nlcd2006.asc",
               f"--raster=2011={src}/nlcd2011.asc"]

    run(["ingest", "--events", f"{src}/events.csv",
         "--rejects-out", f"{out}/rejects.csv"])
    run(["assemble", "--events", f"{src}/events.csv", *rasters,
         "--regions-geometry", f"{src}/regions.csv",
         "--regions-values", f"{src}/region_values.csv",
         "--cpi", f"{src}/cpi.csv",
         "--out", f"{out}/table.csv", "--drops-out", f"{out}/drops.csv"])
    run(["split", "--table", f"{out}/table.csv", "--seed", str(args.seed),
         "--out", f"{out}/split.json"])
    run(["sweep", "--table", f"{out}/table.csv", "--split", f"{out}/split.json",
         "--task", "conditional", "--variable-set", "combined",
         "--family", "descending", "--epochs", str(args.epochs),
         "--seed", str(args.seed), "--out", f"{out}/sweep_conditional.csv"])
    run(["train", "--table", f"{out}/table.csv", "--split", f"{out}/split.json",
         "--conditional-arch", "16x16", "--conditional-dropout", "0.2",
         "--classifier-arch", "16x16", "--classifier-dropout", "0.1",
         "--epochs", str(args.epochs), "--seed", str(args.seed),
         "--out", f"{out}/model.bundle.json",
         "--residuals-dir", f"{out}/residuals"])
    run(["evaluate", "--bundle", f"{out}/model.bundle.json",
         "--table", f"{out}/table.csv", "--split", f"{out}/split.json"])
    run(["grid", "--bundle", f"{out}/model.bundle.json",
         "--boundary", f"{src}/boundary.csv", f"--raster=2011={src}/nlcd2011.asc",
         "--regions-geometry", f"{src}/regions.csv",
         "--regions-values", f"{src}/region_values.csv",
         "--cities", f"{src}/cities.csv",
         "--year", "2019", "--months", "5", "--out-dir", f"{out}/grid"])
    run(["predict", "--bundle", f"{out}/model.bundle.json",
         "--lat", "35.0", "--lon", "-98.0", "--datetime", "2019-05-15T17:30",
         "--length", "1.2", "--width", "300"])
    print(f"\npipeline artifacts in {out}/; serve with:")
    print(f"  tornado-damage serve --bundle {out}/model.bundle.json --grid-dir {out}/grid")


if __name__ == "__main__":
    main()
