"""Command line front end.

Verbs: bench (run config file -> results + report), episode (single seeded
episode), replay (verify a record), designs (emit/list design files),
serve (start the play service). Exit codes: 0 ok, 1 usage/config error,
2 verification failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench, designs, records
from .agents import AGENT_NAMES, make_agent
from .core import Dim, load_design
from .designs import DesignError, DesignSpec, FAMILY_DIMS, dynamic_family, generate, static_family
from .env import EnvConfig


def _build_env_config(args) -> EnvConfig:
    return EnvConfig(
        dim=Dim(args.dim),
        width=args.width,
        height=args.height,
        dynamic=args.task == "dynamic",
        gps=args.gps,
        fixed_step=args.fixed_step,
        obstacles=args.obstacles,
        landmarks=args.n_landmarks > 0,
        n_landmarks=args.n_landmarks,
        seed=args.seed,
    )


def _resolve_episode_design(args, cfg: EnvConfig):
    if args.design_file:
        return load_design(args.design_file)
    family = args.family
    if family is None:
        family = dynamic_family(cfg.dim) if cfg.dynamic else static_family(cfg.dim, args.density)
    return generate(DesignSpec(family, density=args.density, group_id=args.group), cfg)


def cmd_bench(args) -> int:
    results = []
    for path in args.config:
        try:
            rc = bench.RunConfig.from_file(path)
        except (OSError, json.JSONDecodeError, TypeError, ValueError) as exc:
            print(f"error: bad run config {path}: {exc}", file=sys.stderr)
            return 1
        if args.workers is not None:
            rc.workers = args.workers
        if args.records_dir is not None:
            rc.records_dir = args.records_dir
        result = bench.run(rc)
        flag = "" if result.valid else "  [INVALID]"
        print(
            f"{result.label} / {result.agent}: avg IoU {result.avg_iou:.4f}, "
            f"min {result.min_iou:.4f} over {result.n_episodes} episodes{flag}"
        )
        results.append(result)
    paths = bench.emit_report(results, args.output_dir, plots=not args.no_plots)
    for kind, p in paths.items():
        print(f"wrote {kind}: {p}")
    return 0


def cmd_episode(args) -> int:
    try:
        cfg = _build_env_config(args)
        design = _resolve_episode_design(args, cfg)
    except (DesignError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    agent = make_agent(args.agent, cfg, design)
    record = records.run_episode(cfg, design, agent, args.seed)
    if args.verbose:
        for s in record.steps:
            print(
                f"  step {s.n_steps:4d}  {s.action:<14s} d={s.sampled_distance} "
                f"pose={s.pose} reward={s.reward:+d} bricks={s.n_bricks}"
            )
    print(
        f"episode: IoU {record.iou:.4f}, {len(record.steps)} steps, "
        f"{record.steps[-1].n_bricks if record.steps else 0} bricks, ended by {record.done_reason}"
    )
    if record.error:
        print(f"episode error: {record.error}", file=sys.stderr)
    if args.record:
        records.save(record, args.record)
        print(f"wrote record: {args.record}")
    if args.plot:
        from .report import render_episode_figure

        render_episode_figure(record, args.plot)
        print(f"wrote figure: {args.plot}")
    return 0


def cmd_replay(args) -> int:
    worst = 0
    for path in args.record:
        try:
            verdict = records.replay(path)
        except records.IncompatibleRecordError as exc:
            print(f"{path}: INCOMPATIBLE ({exc})", file=sys.stderr)
            worst = max(worst, 1)
            continue
        except (records.MalformedRecordError, OSError) as exc:
            print(f"{path}: MALFORMED ({exc})", file=sys.stderr)
            worst = max(worst, 1)
            continue
        print(f"{path}: {verdict.message}")
        if not verdict.ok:
            worst = max(worst, 2)
    return worst


def cmd_designs(args) -> int:
    if args.list:
        for family, dim in FAMILY_DIMS.items():
            kind = "dynamic" if family in designs.DYNAMIC_FAMILIES else "static"
            print(f"{family:<14s} {dim.name}  {kind}")
        return 0
    if not args.family:
        print("error: --family required unless --list", file=sys.stderr)
        return 1
    try:
        cfg = EnvConfig(dim=FAMILY_DIMS[args.family])
        manifest = designs.write_design_set(args.family, cfg, args.out, args.density)
    except (KeyError, DesignError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote manifest: {manifest}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    static_dir = args.static_dir
    if static_dir is None:
        bundled = Path("frontend") / "dist"
        static_dir = str(bundled) if bundled.is_dir() else None
    app = create_app(
        records_dir=args.records_dir, session_ttl=args.session_ttl, static_dir=static_dir
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mobuild", description=__doc__)
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("bench", help="run benchmark configs and emit a report")
    p.add_argument("--config", action="append", required=True, help="run config JSON (repeatable)")
    p.add_argument("--output-dir", default="bench_out")
    p.add_argument("--workers", type=int, default=None, help="override worker count")
    p.add_argument("--records-dir", default=None, help="persist every episode record here")
    p.add_argument("--no-plots", action="store_true", help="skip figure rendering")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("episode", help="run one seeded episode")
    p.add_argument("--dim", type=int, choices=(1, 2, 3), default=1)
    p.add_argument("--task", choices=("static", "dynamic"), default="static")
    p.add_argument("--density", choices=("dense", "sparse"), default=None)
    p.add_argument("--family", default=None, help="design family (defaults per task)")
    p.add_argument("--group", type=int, default=0, help="dynamic design group")
    p.add_argument("--design-file", default=None, help="load the design from a file instead")
    p.add_argument("--agent", choices=AGENT_NAMES, default="handcrafted")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--width", type=int, default=None)
    p.add_argument("--height", type=int, default=None)
    p.add_argument("--gps", action="store_true")
    p.add_argument("--fixed-step", action="store_true")
    p.add_argument("--obstacles", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--n-landmarks", type=int, default=0)
    p.add_argument("--record", default=None, help="write the episode record here")
    p.add_argument("--plot", default=None, help="render design vs built figure here")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_episode)

    p = sub.add_parser("replay", help="verify episode records by re-simulation")
    p.add_argument("record", nargs="+")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("designs", help="list families or emit design files")
    p.add_argument("--list", action="store_true")
    p.add_argument("--family", default=None)
    p.add_argument("--density", choices=("dense", "sparse"), default=None)
    p.add_argument("--out", default="designs_out")
    p.set_defaults(func=cmd_designs)

    p = sub.add_parser("serve", help="start the interactive play service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--records-dir", default=None)
    p.add_argument("--static-dir", default=None, help="browser client bundle to serve at /")
    p.add_argument("--session-ttl", type=float, default=1800.0)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors; contract says 1
        return 0 if exc.code in (0, None) else 1
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
