"""Episode records: capture, line-delimited persistence, replay verification.

A record is one JSON object per line: a header (config, design, seed,
integrity hash), one line per step, and a footer (final grid, IoU, stop
reason). Serialization is canonical, so identical episodes produce
byte-identical files and any tamper is detectable: the header is covered
by its hash, and every step/footer field is re-checked by re-simulation.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .core import Design, canonical_json, design_from_dict, design_to_dict
from .env import Action, EnvConfig, Environment, EpisodeOver, validate_action

FORMAT_VERSION = 1


class MalformedRecordError(ValueError):
    """The file is not a parseable episode record."""


class IncompatibleRecordError(ValueError):
    """The record's format or header hash does not match this code."""


@dataclass
class StepEntry:
    n_steps: int
    pose: tuple[int, ...]
    action: str
    sampled_distance: int
    reward: int
    n_bricks: int


@dataclass
class EpisodeRecord:
    config: dict
    design: dict
    seed: int
    agent: str
    steps: list[StepEntry] = field(default_factory=list)
    final_grid: list[int] = field(default_factory=list)
    iou: float = 0.0
    done_reason: str = "none"
    error: str | None = None

    @property
    def config_hash(self) -> str:
        return header_hash(self.config, self.design, self.seed, self.agent)


def header_hash(config: dict, design: dict, seed: int, agent: str) -> str:
    body = canonical_json(
        {"format": FORMAT_VERSION, "config": config, "design": design, "seed": seed, "agent": agent}
    )
    return hashlib.sha256(body.encode()).hexdigest()


class EpisodeRecorder:
    """Steps an environment while accumulating the replayable record."""

    def __init__(self, cfg: EnvConfig, design: Design, seed: int | None = None, agent_label: str = "?"):
        self.env = Environment(cfg, design)
        self.observation = self.env.reset(seed)
        self.record = EpisodeRecord(
            config=cfg.as_dict(),
            design=design_to_dict(design),
            seed=int(cfg.seed if seed is None else seed),
            agent=agent_label,
        )
        self.total_reward = 0
        if self.env.done:  # e.g. spawned enclosed by landmarks
            self._finalize()

    @property
    def done(self) -> bool:
        return self.env.done or self.record.error is not None

    def check_action(self, proposed) -> Action | None:
        """Validate a proposed action; on failure record the abort."""
        action = validate_action(proposed, self.env.cfg.dim)
        if action is None:
            self.abort(f"illegal action {proposed!r} for {self.env.cfg.dim.name}")
        return action

    def step(self, action: Action):
        outcome = self.env.step(action)
        s = self.env.state
        self.record.steps.append(
            StepEntry(
                n_steps=s.n_steps,
                pose=s.pose.as_tuple(),
                action=action.value,
                sampled_distance=outcome.sampled_distance,
                reward=outcome.reward,
                n_bricks=s.n_bricks,
            )
        )
        self.total_reward += outcome.reward
        self.observation = outcome.observation
        if self.env.done:
            self._finalize()
        return outcome

    def abort(self, reason: str) -> None:
        self.record.error = reason
        self._finalize()

    def _finalize(self) -> None:
        self.record.final_grid = [int(v) for v in self.env.state.grid.cells.reshape(-1)]
        self.record.iou = self.env.final_iou()
        self.record.done_reason = "aborted" if self.record.error else self.env.done_reason


def run_episode(
    cfg: EnvConfig, design: Design, agent, seed: int | None = None
) -> EpisodeRecord:
    """Play one full episode and capture it as a replayable record.

    An illegal action from the agent aborts the episode; the abort is
    recorded rather than raised so harness runs can flag it.
    """
    agent.reset()
    rec = EpisodeRecorder(cfg, design, seed, getattr(agent, "name", type(agent).__name__))
    while not rec.done:
        action = rec.check_action(agent.act(rec.observation))
        if action is None:
            break
        agent.notify(rec.step(action))
    return rec.record


# ---------------------------------------------------------------------------
# serialization


def dumps(record: EpisodeRecord) -> str:
    header = {
        "kind": "header",
        "format": FORMAT_VERSION,
        "config": record.config,
        "design": record.design,
        "seed": record.seed,
        "agent": record.agent,
        "config_hash": record.config_hash,
    }
    lines = [canonical_json(header)]
    for s in record.steps:
        lines.append(
            canonical_json(
                {
                    "kind": "step",
                    "n": s.n_steps,
                    "pose": list(s.pose),
                    "action": s.action,
                    "d": s.sampled_distance,
                    "reward": s.reward,
                    "bricks": s.n_bricks,
                }
            )
        )
    footer = {
        "kind": "footer",
        "final_grid": record.final_grid,
        "iou": record.iou,
        "done_reason": record.done_reason,
    }
    if record.error is not None:
        footer["error"] = record.error
    lines.append(canonical_json(footer))
    return "\n".join(lines) + "\n"


def loads(text: str) -> EpisodeRecord:
    try:
        docs = [json.loads(line) for line in text.splitlines() if line.strip()]
    except json.JSONDecodeError as exc:
        raise MalformedRecordError(f"unparseable record line: {exc}") from exc
    if len(docs) < 2 or docs[0].get("kind") != "header" or docs[-1].get("kind") != "footer":
        raise MalformedRecordError("record must be header, steps, footer")
    head, foot = docs[0], docs[-1]
    try:
        record = EpisodeRecord(
            config=head["config"],
            design=head["design"],
            seed=head["seed"],
            agent=head["agent"],
            final_grid=foot["final_grid"],
            iou=foot["iou"],
            done_reason=foot["done_reason"],
            error=foot.get("error"),
        )
        for doc in docs[1:-1]:
            if doc.get("kind") != "step":
                raise MalformedRecordError("unexpected line between header and footer")
            record.steps.append(
                StepEntry(
                    n_steps=doc["n"],
                    pose=tuple(doc["pose"]),
                    action=doc["action"],
                    sampled_distance=doc["d"],
                    reward=doc["reward"],
                    n_bricks=doc["bricks"],
                )
            )
    except (KeyError, TypeError) as exc:
        raise MalformedRecordError(f"missing or bad record field: {exc}") from exc
    if head.get("format") != FORMAT_VERSION:
        raise IncompatibleRecordError(f"record format {head.get('format')} != {FORMAT_VERSION}")
    if head.get("config_hash") != record.config_hash:
        raise IncompatibleRecordError("header hash mismatch: config/design/seed were altered")
    return record


def save(record: EpisodeRecord, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(record))
    return path


def load(path: str | Path) -> EpisodeRecord:
    return loads(Path(path).read_text())


# ---------------------------------------------------------------------------
# replay verification


@dataclass
class ReplayVerdict:
    ok: bool
    first_divergence: int | None = None  # step index, or len(steps) for footer
    message: str = "OK"


def replay(source: EpisodeRecord | str | Path) -> ReplayVerdict:
    """Re-simulate a record from its seed and compare every step.

    Returns OK only if each step's pose, sampled distance, reward, and
    brick count plus the footer's grid, IoU, and stop reason all match.
    Malformed or incompatible records raise instead of failing.
    """
    record = source if isinstance(source, EpisodeRecord) else load(source)
    try:
        cfg = EnvConfig.from_dict(dict(record.config))
        design = design_from_dict(record.design)
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedRecordError(f"header does not describe a runnable episode: {exc}") from exc

    env = Environment(cfg, design)
    env.reset(record.seed)

    def fail(i: int, msg: str) -> ReplayVerdict:
        return ReplayVerdict(False, i, f"FAIL at step {i}: {msg}")

    for i, s in enumerate(record.steps):
        try:
            action = Action(s.action)
        except ValueError:
            raise MalformedRecordError(f"unknown action {s.action!r} at step {i}")
        try:
            outcome = env.step(action)
        except (EpisodeOver, ValueError) as exc:
            return fail(i, str(exc))
        st = env.state
        got = (st.n_steps, st.pose.as_tuple(), outcome.sampled_distance, outcome.reward, st.n_bricks)
        want = (s.n_steps, tuple(s.pose), s.sampled_distance, s.reward, s.n_bricks)
        if got != want:
            return fail(i, f"recorded {want}, resimulated {got}")

    n = len(record.steps)
    if record.error is None and not env.done:
        return fail(n, "record ends before the episode does")
    grid = [int(v) for v in env.state.grid.cells.reshape(-1)]
    if grid != list(record.final_grid):
        return fail(n, "final grid mismatch")
    if env.final_iou() != record.iou:
        return fail(n, f"IoU {record.iou} recorded, {env.final_iou()} resimulated")
    reason = "aborted" if record.error else env.done_reason
    if reason != record.done_reason:
        return fail(n, f"done_reason {record.done_reason!r} recorded, {reason!r} resimulated")
    return ReplayVerdict(True, None, "OK")
