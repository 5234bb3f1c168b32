"""Command line harness.

Subcommands: experiment (stock configurations 1..23 or a JSON config),
evolve (fully custom search), replay (rebuild a genome's map), render
(image a saved map dump), sweep (batch of configurations from a CSV
grid file). Every invocation that writes files also records its
resolved configuration as config.json alongside the outputs.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

from sdamap.evolve import (
    EaConfig,
    ExperimentResult,
    SUMMARY_CSV_HEADER,
    experiment_config,
    run_experiment,
    write_runs_csv,
    write_summary_csv,
)
from sdamap.mapgen import BuilderConfig, build_map
from sdamap.render import (
    RenderStyle,
    render_image,
    render_image_from_text,
    save_map_figure,
    save_text_figure,
    save_trace_figure,
)
from sdamap.textio import parse_genome, parse_mask, render_map_text, serialize_genome

SWEEP_COLUMNS = (
    "pop",
    "mnm",
    "states",
    "events",
    "width",
    "height",
    "max_rooms",
    "proposal_budget",
    "rrh",
    "rrh_window",
)


def parse_grid(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 80x80, got {text!r}") from None


def parse_rect(text: str) -> tuple[int, int, int, int]:
    try:
        x, y, w, h = (int(v) for v in text.split(","))
        return x, y, w, h
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"initial room must look like x,y,w,h, got {text!r}"
        ) from None


def add_builder_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--grid", type=parse_grid, default=(80, 80), metavar="WxH",
                   help="grid size (default 80x80)")
    p.add_argument("--max-rooms", type=int, default=256,
                   help="stop after this many rooms stand (default 256)")
    p.add_argument("--proposal-budget", type=int, default=5000,
                   help="stop after this many proposals (default 5000)")
    p.add_argument("--rrh", action="store_true",
                   help="select the focal room from the ten most recent rooms")
    p.add_argument("--rrh-window", type=int, default=10,
                   help="recent-room window size (default 10)")
    p.add_argument("--initial-room", type=parse_rect, action="append", metavar="x,y,w,h",
                   help="replace the default centered 4x4 start (repeatable)")
    p.add_argument("--mask", type=Path, default=None,
                   help="forbidden-cell mask file")


def add_run_flags(p: argparse.ArgumentParser, default_runs: int = 30) -> None:
    p.add_argument("--runs", type=int, default=default_runs,
                   help=f"independent runs (default {default_runs})")
    p.add_argument("--seed", type=int, default=1, help="master seed (default 1)")
    p.add_argument("--jobs", type=int, default=1,
                   help="worker processes; results do not depend on this")
    p.add_argument("--outdir", type=Path, default=Path("results"),
                   help="output directory (default ./results)")
    p.add_argument("--cell-size", type=int, default=8,
                   help="image pixels per grid cell (default 8)")


def builder_config_from_args(args) -> BuilderConfig:
    mask = None
    if args.mask is not None:
        mask = parse_mask(Path(args.mask).read_text())
    width, height = args.grid
    return BuilderConfig(
        width=width,
        height=height,
        max_rooms=args.max_rooms,
        proposal_budget=args.proposal_budget,
        rrh_enabled=args.rrh,
        rrh_window=args.rrh_window,
        initial_rooms=tuple(args.initial_room) if args.initial_room else None,
        forbidden_mask=mask,
    )


def builder_payload(builder: BuilderConfig, mask_path) -> dict:
    return {
        "width": builder.width,
        "height": builder.height,
        "max_rooms": builder.max_rooms,
        "proposal_budget": builder.proposal_budget,
        "rrh_enabled": builder.rrh_enabled,
        "rrh_window": builder.rrh_window,
        "initial_rooms": [list(r) for r in builder.start_rooms()],
        "mask": str(mask_path) if mask_path else None,
    }


def config_payload(name, config: EaConfig, runs, seed, jobs, mask_path) -> dict:
    return {
        "experiment": name,
        "population_size": config.population_size,
        "max_mutations": config.max_mutations,
        "num_states": config.num_states,
        "mating_events": config.mating_events,
        "runs": runs,
        "master_seed": seed,
        "jobs": jobs,
        "builder": builder_payload(config.builder, mask_path),
    }


def write_experiment_dir(outdir: Path, result: ExperimentResult, payload: dict, cell_size: int) -> None:
    """Standard artifact set: config, CSVs, trace figure, and per run the
    champion genome plus its map as text, BMP, and figure."""
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "config.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    write_runs_csv(outdir / "runs.csv", result)
    write_summary_csv(outdir / "summary.csv", [result])
    save_trace_figure(
        result.runs,
        outdir / "trace.png",
        total_events=result.config.mating_events,
        title=result.name,
    )
    style = RenderStyle(cell_size=cell_size)
    for i, run in enumerate(result.runs):
        stem = f"run{i:02d}"
        (outdir / f"{stem}_best.sda").write_text(serialize_genome(run.best_genome))
        level = build_map(run.best_genome, result.config.builder)
        (outdir / f"{stem}_map.txt").write_text(render_map_text(level))
        (outdir / f"{stem}_map.bmp").write_bytes(render_image(level, style))
        save_map_figure(
            level,
            outdir / f"{stem}_map.png",
            style,
            title=f"{result.name} {stem}  fitness {level.fitness():.2f}",
        )


def ea_config_from_json(path: Path) -> EaConfig:
    raw = json.loads(path.read_text())
    builder_raw = raw.get("builder", {})
    mask = None
    if builder_raw.get("mask"):
        mask = parse_mask(Path(builder_raw["mask"]).read_text())
    initial = builder_raw.get("initial_rooms")
    builder = BuilderConfig(
        width=builder_raw.get("width", 80),
        height=builder_raw.get("height", 80),
        max_rooms=builder_raw.get("max_rooms", 256),
        proposal_budget=builder_raw.get("proposal_budget", 5000),
        rrh_enabled=builder_raw.get("rrh_enabled", False),
        rrh_window=builder_raw.get("rrh_window", 10),
        initial_rooms=tuple(tuple(r) for r in initial) if initial else None,
        forbidden_mask=mask,
    )
    return EaConfig(
        population_size=raw.get("population_size", 32),
        max_mutations=raw.get("max_mutations", 1),
        num_states=raw.get("num_states", 12),
        mating_events=raw.get("mating_events", 10_000),
        builder=builder,
    )


def cmd_experiment(args) -> int:
    if (args.id is None) == (args.config is None):
        raise ValueError("give exactly one of --id or --config")
    if args.id is not None:
        config = experiment_config(args.id)
        name = f"exp{args.id}"
        mask_path = None
    else:
        config = ea_config_from_json(args.config)
        name = args.config.stem
        mask_path = json.loads(args.config.read_text()).get("builder", {}).get("mask")
    if args.events is not None:
        config = replace(config, mating_events=args.events)
    result = run_experiment(config, runs=args.runs, master_seed=args.seed, name=name,
                            jobs=args.jobs)
    payload = config_payload(name, config, args.runs, args.seed, args.jobs, mask_path)
    write_experiment_dir(args.outdir / name, result, payload, args.cell_size)
    lo, q1, med, q3, hi = result.summary()
    print(f"{name}: runs {args.runs}  median best fitness {med:.3f}  max {hi:.3f}")
    return 0


def cmd_evolve(args) -> int:
    builder = builder_config_from_args(args)
    config = EaConfig(
        population_size=args.pop,
        max_mutations=args.mnm,
        num_states=args.states,
        mating_events=args.events,
        builder=builder,
    )
    result = run_experiment(config, runs=args.runs, master_seed=args.seed, name=args.name,
                            jobs=args.jobs)
    payload = config_payload(args.name, config, args.runs, args.seed, args.jobs, args.mask)
    write_experiment_dir(args.outdir / args.name, result, payload, args.cell_size)
    lo, q1, med, q3, hi = result.summary()
    print(f"{args.name}: runs {args.runs}  median best fitness {med:.3f}  max {hi:.3f}")
    return 0


def cmd_replay(args) -> int:
    genome = parse_genome(Path(args.genome).read_text())
    builder = builder_config_from_args(args)
    level = build_map(genome, builder)
    print(f"rooms {len(level.rooms)}")
    print(f"area {level.total_area}")
    bx, by, bw, bh = level.bounding_box()
    print(f"bbox_area {bw * bh}")
    print(f"fitness {level.fitness()!r}")
    print(f"proposed {level.proposed}")
    print(f"rejected {level.rejected}")
    if args.outdir is not None:
        args.outdir.mkdir(parents=True, exist_ok=True)
        style = RenderStyle(cell_size=args.cell_size)
        (args.outdir / "map.txt").write_text(render_map_text(level))
        (args.outdir / "map.bmp").write_bytes(render_image(level, style))
        save_map_figure(level, args.outdir / "map.png", style)
        payload = {
            "genome": str(args.genome),
            "builder": builder_payload(builder, args.mask),
            "rooms": len(level.rooms),
            "area": level.total_area,
            "bbox_area": bw * bh,
            "fitness": level.fitness(),
            "proposed": level.proposed,
            "rejected": level.rejected,
        }
        (args.outdir / "config.json").write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n"
        )
    return 0


def cmd_render(args) -> int:
    text = Path(args.map).read_text()
    style = RenderStyle(cell_size=args.cell_size)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_bytes(render_image_from_text(text, style))
    if args.figure is not None:
        args.figure.parent.mkdir(parents=True, exist_ok=True)
        save_text_figure(text, args.figure, style, title=args.map.name)
    return 0


def _sweep_row_config(row: dict, line_no: int, default_events: int | None) -> EaConfig:
    def geti(key, fallback):
        raw = (row.get(key) or "").strip()
        return int(raw) if raw else fallback

    rrh_raw = (row.get("rrh") or "").strip().lower()
    if rrh_raw in ("", "0", "false", "no"):
        rrh = False
    elif rrh_raw in ("1", "true", "yes"):
        rrh = True
    else:
        raise ValueError(f"sweep line {line_no}: rrh must be boolean-like, got {rrh_raw!r}")
    try:
        builder = BuilderConfig(
            width=geti("width", 80),
            height=geti("height", 80),
            max_rooms=geti("max_rooms", 256),
            proposal_budget=geti("proposal_budget", 5000),
            rrh_enabled=rrh,
            rrh_window=geti("rrh_window", 10),
        )
        return EaConfig(
            population_size=geti("pop", 32),
            max_mutations=geti("mnm", 1),
            num_states=geti("states", 12),
            mating_events=geti("events", default_events if default_events else 10_000),
            builder=builder,
        )
    except ValueError as e:
        raise ValueError(f"sweep line {line_no}: {e}") from None


def cmd_sweep(args) -> int:
    with open(args.grid_file, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None:
            raise ValueError(f"sweep grid file {args.grid_file} is empty")
        unknown = [c for c in reader.fieldnames if c not in SWEEP_COLUMNS]
        if unknown:
            raise ValueError(f"unknown sweep columns: {', '.join(unknown)}")
        rows = list(reader)
    if not rows:
        raise ValueError(f"sweep grid file {args.grid_file} lists no configurations")

    args.outdir.mkdir(parents=True, exist_ok=True)
    combined: list[tuple[EaConfig, ExperimentResult]] = []
    for i, row in enumerate(rows):
        config = _sweep_row_config(row, i + 2, args.events)
        name = f"combo{i:02d}"
        result = run_experiment(config, runs=args.runs, master_seed=args.seed, name=name,
                                jobs=args.jobs)
        payload = config_payload(name, config, args.runs, args.seed, args.jobs, None)
        write_experiment_dir(args.outdir / name, result, payload, args.cell_size)
        combined.append((config, result))
        print(f"{name}: median best fitness {result.summary()[2]:.3f}")

    header = ["experiment", "pop", "mnm", "states", "events", "width", "height",
              "max_rooms", "rrh"] + SUMMARY_CSV_HEADER[1:]
    with open(args.outdir / "summary.csv", "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for config, result in combined:
            writer.writerow(
                [
                    result.name,
                    config.population_size,
                    config.max_mutations,
                    config.num_states,
                    config.mating_events,
                    config.builder.width,
                    config.builder.height,
                    config.builder.max_rooms,
                    int(config.builder.rrh_enabled),
                ]
                + [repr(v) for v in result.summary()]
            )
    payload = {
        "grid_file": str(args.grid_file),
        "runs": args.runs,
        "master_seed": args.seed,
        "jobs": args.jobs,
        "combos": [config_payload(r.name, c, args.runs, args.seed, args.jobs, None)
                   for c, r in combined],
    }
    (args.outdir / "config.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdamap",
        description="Evolve self-driving bit automata that grow grid level maps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("experiment", help="run a stock experiment configuration")
    p.add_argument("--id", type=int, default=None, help="stock experiment id, 1..23")
    p.add_argument("--config", type=Path, default=None, help="custom JSON config file")
    p.add_argument("--events", type=int, default=None,
                   help="override the configured mating event count")
    add_run_flags(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("evolve", help="run a fully custom search")
    p.add_argument("--pop", type=int, default=32, help="population size (default 32)")
    p.add_argument("--mnm", type=int, default=1,
                   help="maximum mutations per child (default 1)")
    p.add_argument("--states", type=int, default=12, help="automaton states (default 12)")
    p.add_argument("--events", type=int, default=10_000,
                   help="mating events per run (default 10000)")
    p.add_argument("--name", default="custom", help="experiment name (default custom)")
    add_builder_flags(p)
    add_run_flags(p)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("replay", help="rebuild and report one genome's map")
    p.add_argument("--genome", type=Path, required=True, help="genome file")
    p.add_argument("--outdir", type=Path, default=None,
                   help="also write map.txt, map.bmp, map.png here")
    p.add_argument("--cell-size", type=int, default=8,
                   help="image pixels per grid cell (default 8)")
    add_builder_flags(p)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("render", help="image a saved map dump")
    p.add_argument("--map", type=Path, required=True, help="map dump file")
    p.add_argument("--out", type=Path, required=True, help="BMP output path")
    p.add_argument("--figure", type=Path, default=None, help="optional PNG figure path")
    p.add_argument("--cell-size", type=int, default=8,
                   help="image pixels per grid cell (default 8)")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("sweep", help="run every configuration in a CSV grid file")
    p.add_argument("--grid-file", type=Path, required=True,
                   help=f"CSV with columns from: {', '.join(SWEEP_COLUMNS)}")
    p.add_argument("--events", type=int, default=None,
                   help="default mating events for rows that omit the column")
    add_run_flags(p)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
