"""Interactive play service: serves live episodes over a websocket so a
human client faces exactly the environment the agents do.

Protocol (JSON frames on /play):
  client -> {"type": "create", "task": {...}, "mode": "training"|"evaluation",
             "seed": int?}
            {"type": "action", "action": "move_left" | ...}
            {"type": "resign"}
  server -> {"type": "state", ...}        window, counters, design/reward
                                          when the mode permits them
            {"type": "episode_end", ...}  IoU, stop reason, record id
            {"type": "error", "code": ..., "text": ...}

Visibility is enforced server-side: evaluation-mode messages never carry
reward fields, static tasks never carry the design. All scoring comes from
the environment; finished episodes export as standard records that replay
verifies.
"""
from __future__ import annotations

import json
import time
import uuid
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import PlainTextResponse
from fastapi.staticfiles import StaticFiles

from . import records
from .core import DEFAULT_WIDTH, Design, Dim, design_to_dict
from .designs import (
    DesignError,
    DesignSpec,
    N_DYNAMIC_GROUPS,
    dynamic_family,
    family_defaults,
    generate,
    static_family,
)
from .env import EnvConfig, legal_actions, validate_action

DEFAULT_SESSION_TTL = 1800.0  # seconds idle before a session is dropped

TASK_CATALOG = (
    {"id": "1d_static", "dim": 1, "kind": "static", "density": None},
    {"id": "1d_dynamic", "dim": 1, "kind": "dynamic", "density": None},
    {"id": "2d_static_dense", "dim": 2, "kind": "static", "density": "dense"},
    {"id": "2d_static_sparse", "dim": 2, "kind": "static", "density": "sparse"},
    {"id": "2d_dynamic_dense", "dim": 2, "kind": "dynamic", "density": "dense"},
    {"id": "2d_dynamic_sparse", "dim": 2, "kind": "dynamic", "density": "sparse"},
    {"id": "3d_static_dense", "dim": 3, "kind": "static", "density": "dense"},
    {"id": "3d_static_sparse", "dim": 3, "kind": "static", "density": "sparse"},
    {"id": "3d_dynamic_dense", "dim": 3, "kind": "dynamic", "density": "dense"},
    {"id": "3d_dynamic_sparse", "dim": 3, "kind": "dynamic", "density": "sparse"},
)


class TaskError(ValueError):
    pass


def _scaled_params(family: str, cfg: EnvConfig, group: int) -> dict:
    """Family parameters adapted to a non-default world size.

    Benchmark geometry is defined on the default worlds; play sessions may
    shrink the world for quick games, so shapes rescale proportionally.
    """
    if cfg.width == DEFAULT_WIDTH[cfg.dim] and (
        not cfg.dim.planar or cfg.height == DEFAULT_WIDTH[cfg.dim]
    ):
        return {}
    params = family_defaults(family, group)
    if family == "gaussian_1d":
        return {"center": (cfg.width - 1) / 2, "sigma": max(cfg.width / 6.0, 1.0)}
    if family == "sine_1d":
        return {}  # the curve already follows the configured width
    if "vertices" in params:  # triangle families
        sx = (cfg.width - 1) / (DEFAULT_WIDTH[cfg.dim] - 1)
        sy = (cfg.height - 1) / (DEFAULT_WIDTH[cfg.dim] - 1)
        scaled = [[x * sx, y * sy] for x, y in params["vertices"]]
        return {"vertices": scaled}
    radius = max(0.32 * min(cfg.width, cfg.height), 1.4)
    out = {"cx": (cfg.width - 1) / 2, "cy": (cfg.height - 1) / 2, "radius": radius}
    if "height" in params:
        out["height"] = params["height"]
    if "thickness" in params:
        out["thickness"] = params["thickness"]
    return out


def resolve_task(task: dict, seed: int) -> tuple[EnvConfig, Design]:
    """Build config and design from a task descriptor.

    Descriptors are catalog ids expanded to {dim, kind, density} plus
    optional "group" (dynamic design group; defaults from the seed) and
    "env" config overrides.
    """
    if not isinstance(task, dict):
        raise TaskError("task must be an object")
    if "id" in task and not task.get("dim"):
        matches = [t for t in TASK_CATALOG if t["id"] == task["id"]]
        if not matches:
            raise TaskError(f"unknown task id {task['id']!r}")
        task = {**matches[0], **{k: v for k, v in task.items() if k != "id"}}
    try:
        dim = Dim(int(task["dim"]))
    except (KeyError, ValueError) as exc:
        raise TaskError(f"bad task dim: {exc}") from exc
    kind = task.get("kind", "static")
    if kind not in ("static", "dynamic"):
        raise TaskError(f"task kind must be static|dynamic, got {kind!r}")
    density = task.get("density")
    if density not in (None, "dense", "sparse"):
        raise TaskError(f"bad density {density!r}")
    overrides = dict(task.get("env", {}))
    overrides["dim"] = dim
    overrides["dynamic"] = kind == "dynamic"
    try:
        cfg = EnvConfig.from_dict(overrides)
    except (TypeError, ValueError) as exc:
        raise TaskError(f"bad env overrides: {exc}") from exc
    try:
        if kind == "dynamic":
            group = task.get("group")
            if group is None:
                group = seed % N_DYNAMIC_GROUPS
            try:
                group = int(group)
            except (TypeError, ValueError) as exc:
                raise TaskError(f"bad group: {exc}") from exc
            if not 0 <= group < N_DYNAMIC_GROUPS:
                raise TaskError(f"group must be 0..{N_DYNAMIC_GROUPS - 1}")
            family = dynamic_family(dim)
            spec = DesignSpec(
                family, _scaled_params(family, cfg, group), density=density, group_id=group
            )
        else:
            family = static_family(dim, density)
            spec = DesignSpec(family, _scaled_params(family, cfg, 0), density=density)
        design = generate(spec, cfg)
    except DesignError as exc:
        raise TaskError(f"no valid design for this task/world: {exc}") from exc
    return cfg, design


@dataclass
class Session:
    id: str
    recorder: records.EpisodeRecorder
    mode: str
    task: dict
    last_active: float

    def touch(self) -> None:
        self.last_active = time.monotonic()


class SessionStore:
    """Live sessions plus finished episode records, with idle expiry."""

    def __init__(self, ttl: float = DEFAULT_SESSION_TTL, records_dir: str | None = None):
        self.ttl = ttl
        self.records_dir = records_dir
        self.sessions: dict[str, Session] = {}
        self.finished: dict[str, records.EpisodeRecord] = {}

    def sweep(self) -> None:
        cutoff = time.monotonic() - self.ttl
        for sid in [s for s, sess in self.sessions.items() if sess.last_active < cutoff]:
            del self.sessions[sid]

    def create(self, recorder: records.EpisodeRecorder, mode: str, task: dict) -> Session:
        self.sweep()
        session = Session(uuid.uuid4().hex, recorder, mode, task, time.monotonic())
        self.sessions[session.id] = session
        return session

    def finish(self, session: Session) -> str:
        """Move a completed episode into the record store; returns record id."""
        record = session.recorder.record
        self.finished[session.id] = record
        if self.records_dir:
            records.save(record, Path(self.records_dir) / f"{session.id}.jsonl")
        self.sessions.pop(session.id, None)
        return session.id

    def close(self, session: Session) -> None:
        self.sessions.pop(session.id, None)

    def export_record(self, record_id: str) -> records.EpisodeRecord:
        if record_id not in self.finished:
            raise KeyError(record_id)
        return self.finished[record_id]


def _state_message(session: Session, reward: int | None = None) -> dict:
    """Serialize the current observation under the mode's visibility rules."""
    rec = session.recorder
    obs = rec.observation
    cfg = rec.env.cfg
    msg = {
        "type": "state",
        "session": session.id,
        "dim": int(cfg.dim),
        "window": [int(v) for v in obs.window.reshape(-1)],
        "window_shape": list(obs.window.shape),
        "n_steps": obs.n_steps,
        "n_bricks": obs.n_bricks,
        "brick_budget": rec.env.state.brick_budget,
        "legal_actions": [a.value for a in legal_actions(cfg.dim)],
        "done": rec.done,
    }
    if obs.design is not None:  # dynamic tasks only
        msg["design"] = design_to_dict(obs.design)
    if obs.pose is not None:  # location oracle enabled
        msg["pose"] = list(obs.pose.as_tuple())
    if session.mode == "training":
        if reward is not None:
            msg["reward"] = reward
        msg["total_reward"] = rec.total_reward
    return msg


def _end_message(session: Session, record_id: str | None) -> dict:
    rec = session.recorder
    return {
        "type": "episode_end",
        "session": session.id,
        "iou": rec.record.iou,
        "done_reason": rec.record.done_reason,
        "n_steps": rec.env.state.n_steps,
        "n_bricks": rec.env.state.n_bricks,
        "record_id": record_id,
    }


def _error(code: str, text: str) -> dict:
    return {"type": "error", "code": code, "text": text}


def create_app(
    records_dir: str | None = None,
    session_ttl: float = DEFAULT_SESSION_TTL,
    static_dir: str | None = None,
) -> FastAPI:
    app = FastAPI(title="mobuild play service")
    store = SessionStore(session_ttl, records_dir)
    app.state.store = store

    @app.get("/tasks")
    def tasks() -> list[dict]:
        return [dict(t) for t in TASK_CATALOG]

    @app.get("/records/{record_id}")
    def get_record(record_id: str):
        try:
            record = store.export_record(record_id)
        except KeyError:
            return PlainTextResponse("record not found\n", status_code=404)
        return PlainTextResponse(records.dumps(record), media_type="application/x-ndjson")

    @app.websocket("/play")
    async def play(ws: WebSocket):
        await ws.accept()
        session: Session | None = None
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    msg = json.loads(raw)
                    mtype = msg["type"]
                except (json.JSONDecodeError, TypeError, KeyError):
                    await ws.send_json(_error("bad_message", "frames must be JSON with a type"))
                    continue

                if mtype == "create":
                    if session is not None and session.id in store.sessions:
                        await ws.send_json(
                            _error("session_active", "finish or resign the current episode first")
                        )
                        continue
                    mode = msg.get("mode", "evaluation")
                    if mode not in ("training", "evaluation"):
                        await ws.send_json(_error("bad_mode", "mode must be training|evaluation"))
                        continue
                    seed = msg.get("seed")
                    if seed is None:
                        seed = int.from_bytes(uuid.uuid4().bytes[:4], "big")
                    try:
                        seed = int(seed)
                        cfg, design = resolve_task(msg.get("task", {}), seed)
                    except (TypeError, ValueError) as exc:  # includes TaskError
                        await ws.send_json(_error("unknown_task", str(exc)))
                        continue
                    recorder = records.EpisodeRecorder(cfg, design, seed, agent_label="human")
                    session = store.create(recorder, mode, msg.get("task", {}))
                    await ws.send_json({**_state_message(session), "seed": seed})
                    continue

                if session is None or session.id not in store.sessions:
                    await ws.send_json(_error("no_session", "create a session first"))
                    continue
                session.touch()

                if mtype == "action":
                    if session.recorder.done:
                        await ws.send_json(_error("episode_over", "the episode has ended"))
                        continue
                    action = validate_action(msg.get("action"), session.recorder.env.cfg.dim)
                    if action is None:
                        # an illegal key keeps the session live
                        await ws.send_json(
                            _error("illegal_action", f"{msg.get('action')!r} is not legal here")
                        )
                        continue
                    outcome = session.recorder.step(action)
                    if session.recorder.done:
                        record_id = store.finish(session)
                        await ws.send_json(_end_message(session, record_id))
                    else:
                        await ws.send_json(_state_message(session, outcome.reward))
                    continue

                if mtype == "resign":
                    # unfinished episodes export no record
                    session.recorder.abort("resigned")
                    store.close(session)
                    await ws.send_json(_end_message(session, None) | {"done_reason": "resigned"})
                    session = None
                    continue

                await ws.send_json(_error("bad_message", f"unknown message type {mtype!r}"))
        except WebSocketDisconnect:
            pass  # live sessions expire via the idle sweep

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
