"""Benchmark harness: seeded episode batches with reproducible aggregation.

Episode seeds are seed_base + index, so parallel and serial execution of
the same run produce identical results and any episode can be re-run in
isolation. Statistics are computed over sorted scores, making aggregation
independent of completion order.
"""
from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import records
from .agents import make_agent
from .core import Design, canonical_json, design_from_dict, design_to_dict, load_design
from .designs import (
    DesignSpec,
    DYNAMIC_FAMILIES,
    dynamic_family,
    dynamic_test_groups,
    generate,
    static_family,
)
from .env import EnvConfig


@dataclass
class RunConfig:
    """One benchmark run: environment, design source, agent, episode plan."""

    env: EnvConfig
    design: dict = field(default_factory=dict)
    agent: str = "handcrafted"
    agent_params: dict = field(default_factory=dict)
    n_episodes: int = 500
    episodes_per_group: int = 200
    seed_base: int = 0
    workers: int = 1
    records_dir: str | None = None
    label: str | None = None

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        doc = dict(doc)
        env = EnvConfig.from_dict(doc.pop("env", {}))
        return cls(env=env, **doc)

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def as_dict(self) -> dict:
        return {
            "env": self.env.as_dict(),
            "design": self.design,
            "agent": self.agent,
            "agent_params": self.agent_params,
            "n_episodes": self.n_episodes,
            "episodes_per_group": self.episodes_per_group,
            "seed_base": self.seed_base,
        }

    @property
    def config_hash(self) -> str:
        # excludes workers/records_dir/label: they must not affect results
        return hashlib.sha256(canonical_json(self.as_dict()).encode()).hexdigest()

    @property
    def density(self) -> str | None:
        return self.design.get("density")

    def task_name(self) -> str:
        if self.label:
            return self.label
        kind = "dynamic" if self.env.dynamic else "static"
        name = f"{int(self.env.dim)}d_{kind}"
        if self.density:
            name += f"_{self.density}"
        return name


def resolve_static_design(rc: RunConfig) -> Design:
    d = rc.design
    if "path" in d:
        return load_design(d["path"])
    family = d.get("family") or static_family(rc.env.dim, d.get("density"))
    spec = DesignSpec(
        family,
        params=d.get("params", {}),
        density=d.get("density"),
        group_id=d.get("group_id", 0),
    )
    return generate(spec, rc.env)


def resolve_design_groups(rc: RunConfig) -> list[Design]:
    d = rc.design
    family = d.get("family") or dynamic_family(rc.env.dim)
    if family not in DYNAMIC_FAMILIES:
        raise ValueError(f"{family} has no dynamic evaluation groups")
    return dynamic_test_groups(family, rc.env, d.get("density"))


@dataclass
class BenchResult:
    label: str
    agent: str
    config_hash: str
    ious: list[float]
    done_reasons: dict[str, int]
    group_stats: list[dict] = field(default_factory=list)
    wall_time: float = 0.0
    errors: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.errors

    @property
    def n_episodes(self) -> int:
        return len(self.ious)

    @property
    def avg_iou(self) -> float:
        if not self.ious:
            return 0.0
        return sum(sorted(self.ious)) / len(self.ious)

    @property
    def min_iou(self) -> float:
        return min(self.ious) if self.ious else 0.0

    @property
    def min_group_avg(self) -> float | None:
        """Worst per-group average; second reading of "min" for dynamic runs."""
        if not self.group_stats:
            return None
        return min(g["avg_iou"] for g in self.group_stats)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "agent": self.agent,
            "config_hash": self.config_hash,
            "n_episodes": self.n_episodes,
            "avg_iou": self.avg_iou,
            "min_iou": self.min_iou,
            "min_group_avg_iou": self.min_group_avg,
            "done_reasons": dict(sorted(self.done_reasons.items())),
            "group_stats": self.group_stats,
            "valid": self.valid,
            "errors": self.errors,
            "wall_time": self.wall_time,
            "ious": self.ious,
        }


def _episode_worker(args: tuple) -> tuple[int, float, str, str | None]:
    index, cfg_doc, design_doc, agent_name, agent_params, seed, record_path = args
    cfg = EnvConfig.from_dict(dict(cfg_doc))
    design = design_from_dict(design_doc)
    agent = make_agent(agent_name, cfg, design, agent_params)
    rec = records.run_episode(cfg, design, agent, seed)
    if record_path:
        records.save(rec, record_path)
    return index, rec.iou, rec.done_reason, rec.error


def _run_batch(tasks: list[tuple], workers: int) -> list[tuple]:
    if workers <= 1:
        return [_episode_worker(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_episode_worker, tasks, chunksize=8))


def _aggregate(rc: RunConfig, rows: list[tuple], group_of: list[int] | None) -> BenchResult:
    rows = sorted(rows)  # by episode index
    ious = [r[1] for r in rows]
    reasons: dict[str, int] = {}
    errors = []
    for index, _, reason, error in rows:
        reasons[reason] = reasons.get(reason, 0) + 1
        if error:
            errors.append(f"episode {index}: {error}")
    group_stats: list[dict] = []
    if group_of is not None:
        by_group: dict[int, list[float]] = {}
        for (index, iou_val, _, _), g in zip(rows, group_of):
            by_group.setdefault(g, []).append(iou_val)
        for g in sorted(by_group):
            vals = by_group[g]
            group_stats.append(
                {
                    "group": g,
                    "n": len(vals),
                    "avg_iou": sum(sorted(vals)) / len(vals),
                    "min_iou": min(vals),
                }
            )
    return BenchResult(
        label=rc.task_name(),
        agent=rc.agent,
        config_hash=rc.config_hash,
        ious=ious,
        done_reasons=reasons,
        group_stats=group_stats,
        errors=errors,
    )


def _record_path(rc: RunConfig, index: int) -> str | None:
    if rc.records_dir is None:
        return None
    return str(Path(rc.records_dir) / f"{rc.task_name()}_{rc.agent}_ep{index:05d}.jsonl")


def run_static(rc: RunConfig) -> BenchResult:
    """n_episodes independent seeded episodes on one static design."""
    started = time.perf_counter()
    design_doc = design_to_dict(resolve_static_design(rc))
    cfg_doc = rc.env.as_dict()
    tasks = [
        (i, cfg_doc, design_doc, rc.agent, rc.agent_params, rc.seed_base + i, _record_path(rc, i))
        for i in range(rc.n_episodes)
    ]
    result = _aggregate(rc, _run_batch(tasks, rc.workers), None)
    result.wall_time = time.perf_counter() - started
    return result


def run_dynamic(rc: RunConfig) -> BenchResult:
    """episodes_per_group seeded episodes on each of the 10 fixed designs."""
    started = time.perf_counter()
    groups = resolve_design_groups(rc)
    cfg_doc = rc.env.as_dict()
    tasks = []
    group_of = []
    per = rc.episodes_per_group
    for g, design in enumerate(groups):
        design_doc = design_to_dict(design)
        for i in range(per):
            index = g * per + i
            tasks.append(
                (
                    index,
                    cfg_doc,
                    design_doc,
                    rc.agent,
                    rc.agent_params,
                    rc.seed_base + index,
                    _record_path(rc, index),
                )
            )
            group_of.append(g)
    result = _aggregate(rc, _run_batch(tasks, rc.workers), group_of)
    result.wall_time = time.perf_counter() - started
    return result


def run(rc: RunConfig) -> BenchResult:
    return run_dynamic(rc) if rc.env.dynamic else run_static(rc)


def result_from_records(paths: list[str | Path], label: str = "replayed") -> BenchResult:
    """Rebuild benchmark statistics from persisted episode records alone."""
    rows = []
    agent = "?"
    for i, p in enumerate(sorted(str(x) for x in paths)):
        rec = records.load(p)
        agent = rec.agent
        rows.append((i, rec.iou, rec.done_reason, rec.error))
    rc = RunConfig(env=EnvConfig(), label=label)
    result = _aggregate(rc, rows, None)
    result.agent = agent
    result.config_hash = ""
    return result


# ---------------------------------------------------------------------------
# report emission (delimited table + machine-readable document + figures)


CSV_COLUMNS = (
    "task",
    "agent",
    "episodes",
    "avg_iou",
    "min_iou",
    "min_group_avg_iou",
    "done_step_budget",
    "done_brick_budget",
    "done_immobilized",
    "valid",
)


def results_csv(results: list[BenchResult]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for r in results:
        mga = "" if r.min_group_avg is None else str(r.min_group_avg)
        lines.append(
            ",".join(
                [
                    r.label,
                    r.agent,
                    str(r.n_episodes),
                    str(r.avg_iou),
                    str(r.min_iou),
                    mga,
                    str(r.done_reasons.get("step_budget", 0)),
                    str(r.done_reasons.get("brick_budget", 0)),
                    str(r.done_reasons.get("immobilized", 0)),
                    str(r.valid).lower(),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def emit_report(results: list[BenchResult], out_dir: str | Path, plots: bool = True) -> dict:
    """Write results.csv, results.json, and (optionally) summary figures."""
    if not results:
        raise ValueError("no results to report")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "results.csv"
    csv_path.write_text(results_csv(results))
    json_path = out / "results.json"
    json_path.write_text(json.dumps([r.to_dict() for r in results], indent=2, sort_keys=True) + "\n")
    paths = {"csv": csv_path, "json": json_path}
    if plots:
        from .report import render_summary_figure

        fig_path = out / "iou_summary.png"
        render_summary_figure(results, fig_path)
        paths["figure"] = fig_path
    return paths
