"""Episode dynamics: stochastic motion, brick drops, rewards, stop rules.

An `Environment` owns one episode's mutable state and is single-threaded;
independent instances may run in parallel. Every source of randomness goes
through one seeded generator, so (seed, design, agent) fully determines a
trajectory.
"""
from __future__ import annotations

from dataclasses import dataclass, asdict
from enum import Enum

import numpy as np

from .core import (
    DEFAULT_HALF_WINDOW,
    DEFAULT_WIDTH,
    Design,
    Dim,
    GridState,
    ObservationPacket,
    Pose,
    ShapeMismatchError,
    observe,
    iou,
)

DEFAULT_STEP_BUDGET = {1: 1000, 2: 1500, 3: 1500}


class Action(str, Enum):
    MOVE_LEFT = "move_left"
    MOVE_RIGHT = "move_right"
    MOVE_UP = "move_up"
    MOVE_DOWN = "move_down"
    MOVE_FORWARD = "move_forward"
    MOVE_BACKWARD = "move_backward"
    DROP = "drop"
    DROP_LEFT = "drop_left"
    DROP_RIGHT = "drop_right"
    DROP_FRONT = "drop_front"
    DROP_REAR = "drop_rear"


# Unit direction vectors, (dx, dy). Screen convention: y grows downward,
# so "up"/"forward" decrease y.
MOVE_DIRECTIONS = {
    Action.MOVE_LEFT: (-1, 0),
    Action.MOVE_RIGHT: (1, 0),
    Action.MOVE_UP: (0, -1),
    Action.MOVE_DOWN: (0, 1),
    Action.MOVE_FORWARD: (0, -1),
    Action.MOVE_BACKWARD: (0, 1),
}

DROP_DIRECTIONS = {
    Action.DROP_LEFT: (-1, 0),
    Action.DROP_RIGHT: (1, 0),
    Action.DROP_FRONT: (0, -1),
    Action.DROP_REAR: (0, 1),
}

_LEGAL = {
    Dim.D1: (Action.MOVE_LEFT, Action.MOVE_RIGHT, Action.DROP),
    Dim.D2: (
        Action.MOVE_LEFT,
        Action.MOVE_RIGHT,
        Action.MOVE_UP,
        Action.MOVE_DOWN,
        Action.DROP,
    ),
    Dim.D3: (
        Action.MOVE_LEFT,
        Action.MOVE_RIGHT,
        Action.MOVE_FORWARD,
        Action.MOVE_BACKWARD,
        Action.DROP_LEFT,
        Action.DROP_RIGHT,
        Action.DROP_FRONT,
        Action.DROP_REAR,
    ),
}


def legal_actions(dim: Dim) -> tuple[Action, ...]:
    return _LEGAL[Dim(dim)]


def move_actions(dim: Dim) -> tuple[Action, ...]:
    return tuple(a for a in _LEGAL[Dim(dim)] if a in MOVE_DIRECTIONS)


def is_move(action: Action) -> bool:
    return action in MOVE_DIRECTIONS


def validate_action(proposed, dim: Dim) -> Action | None:
    """Parse an action name and check dimensional legality; None if invalid."""
    try:
        action = Action(proposed)
    except ValueError:
        return None
    return action if action in legal_actions(dim) else None


@dataclass
class EnvConfig:
    """Static parameters of one task variant.

    `max_move` bounds the uniform move distance and may not exceed
    `half_window`, otherwise successive windows stop overlapping and
    scan matching becomes ill-posed.
    """

    dim: Dim = Dim.D1
    width: int | None = None
    height: int | None = None
    half_window: int | None = None
    dynamic: bool = False
    max_move: int = 2
    step_budget: int | None = None
    obstacles: bool | None = None
    gps: bool = False
    fixed_step: bool = False
    landmarks: bool = False
    n_landmarks: int = 0
    seed: int = 0

    def __post_init__(self):
        self.dim = Dim(self.dim)
        if self.width is None:
            self.width = DEFAULT_WIDTH[self.dim]
        if self.height is None and self.dim.planar:
            self.height = DEFAULT_WIDTH[self.dim]
        if not self.dim.planar:
            self.height = None
        if self.half_window is None:
            self.half_window = DEFAULT_HALF_WINDOW[self.dim]
        if self.step_budget is None:
            self.step_budget = DEFAULT_STEP_BUDGET[self.dim]
        if self.obstacles is None:
            self.obstacles = self.dim is Dim.D3
        if self.width <= 0 or (self.dim.planar and self.height <= 0):
            raise ValueError("world dimensions must be positive")
        if self.half_window <= 0:
            raise ValueError("half_window must be positive")
        if not 1 <= self.max_move <= self.half_window:
            raise ValueError("max_move must satisfy 1 <= max_move <= half_window")
        if self.step_budget < 1:
            raise ValueError("step_budget must be >= 1")
        if self.landmarks and self.n_landmarks < 1:
            raise ValueError("landmarks enabled but n_landmarks < 1")

    def world_shape(self) -> tuple[int, ...]:
        return (self.width,) if self.dim is Dim.D1 else (self.width, self.height)

    def as_dict(self) -> dict:
        doc = asdict(self)
        doc["dim"] = int(self.dim)
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "EnvConfig":
        return cls(**doc)


@dataclass
class EnvState:
    """Full episode state: world, pose, counters, budget, and RNG."""

    grid: GridState
    pose: Pose
    n_steps: int
    n_bricks: int
    design: Design
    brick_budget: int
    rng: np.random.Generator


@dataclass
class StepOutcome:
    observation: ObservationPacket
    reward: int
    done: bool
    done_reason: str  # step_budget | brick_budget | immobilized | none
    sampled_distance: int  # 0 for drop actions


class EpisodeOver(RuntimeError):
    """Raised when step() is called after the episode ended."""


class Environment:
    """One construction episode: reset, then step until done."""

    def __init__(self, cfg: EnvConfig, design: Design):
        if design.dim != cfg.dim or design.shape != cfg.world_shape():
            raise ShapeMismatchError(
                f"design {design.dim.name}{design.shape} does not match "
                f"config {cfg.dim.name}{cfg.world_shape()}"
            )
        self.cfg = cfg
        self.design = design
        self._state: EnvState | None = None
        self._done = True
        self._done_reason = "none"

    # -- lifecycle ---------------------------------------------------------

    def reset(self, seed: int | None = None) -> ObservationPacket:
        """Start a fresh episode; `seed` overrides the config seed."""
        cfg = self.cfg
        rng = np.random.default_rng(cfg.seed if seed is None else seed)
        grid = GridState.empty(cfg.dim, cfg.width, cfg.height)

        if cfg.landmarks:
            free = np.flatnonzero(self.design.target.reshape(-1) == 0)
            if len(free) < cfg.n_landmarks:
                raise ValueError("not enough design-free cells for landmarks")
            picked = rng.choice(free, size=cfg.n_landmarks, replace=False)
            mask = grid.landmark_mask.reshape(-1)
            mask[np.sort(picked)] = True

        open_cells = np.flatnonzero(~grid.landmark_mask.reshape(-1))
        start = int(open_cells[rng.integers(len(open_cells))])
        if cfg.dim is Dim.D1:
            pose = Pose(start)
        else:
            pose = Pose(start // cfg.height, start % cfg.height)

        self._state = EnvState(
            grid=grid,
            pose=pose,
            n_steps=0,
            n_bricks=0,
            design=self.design,
            brick_budget=self.design.total_bricks,
            rng=rng,
        )
        self._done = False
        self._done_reason = "none"
        if cfg.obstacles and self._immobilized():
            self._done, self._done_reason = True, "immobilized"
        return self.observe()

    @property
    def state(self) -> EnvState:
        if self._state is None:
            raise RuntimeError("environment not reset")
        return self._state

    @property
    def done(self) -> bool:
        return self._done

    @property
    def done_reason(self) -> str:
        return self._done_reason

    def observe(self) -> ObservationPacket:
        s, cfg = self.state, self.cfg
        return observe(
            s.grid,
            s.pose,
            cfg.half_window,
            s.n_steps,
            s.n_bricks,
            design=s.design if cfg.dynamic else None,
            expose_pose=cfg.gps,
        )

    def final_iou(self) -> float:
        return iou(self.state.grid, self.design)

    # -- dynamics ----------------------------------------------------------

    def sample_distance(self) -> int:
        """Move distance for one action: 1, or uniform on {1..max_move}."""
        if self.cfg.fixed_step:
            return 1
        return int(self.state.rng.integers(1, self.cfg.max_move + 1))

    def step(self, action: Action) -> StepOutcome:
        if self._done:
            raise EpisodeOver(f"episode already ended ({self._done_reason})")
        action = Action(action)
        if action not in legal_actions(self.cfg.dim):
            raise ValueError(f"action {action.value} illegal in {self.cfg.dim.name}")

        s = self.state
        if is_move(action):
            d = self.sample_distance()
            self.apply_move(MOVE_DIRECTIONS[action], d)
            reward, sampled = 0, d
        else:
            reward = self.apply_drop(action)
            sampled = 0
            s.n_bricks += 1
        s.n_steps += 1

        if s.n_steps >= self.cfg.step_budget:
            self._done, self._done_reason = True, "step_budget"
        elif s.n_bricks >= s.brick_budget:
            self._done, self._done_reason = True, "brick_budget"
        elif self.cfg.obstacles and self._immobilized():
            self._done, self._done_reason = True, "immobilized"

        return StepOutcome(
            observation=self.observe(),
            reward=reward,
            done=self._done,
            done_reason=self._done_reason if self._done else "none",
            sampled_distance=sampled,
        )

    def _blocked(self, x: int, y: int | None) -> bool:
        """True if (x, y) cannot be entered: out of bounds, or with the
        obstacle mechanism active, holding bricks or a landmark."""
        s = self.state
        coords = (x,) if y is None else (x, y)
        if not s.grid.in_bounds(*coords):
            return True
        if self.cfg.obstacles:
            return bool(s.grid.cells[coords] > 0 or s.grid.landmark_mask[coords])
        return False

    def apply_move(self, direction: tuple[int, int], distance: int) -> None:
        """Advance cell by cell, stopping at walls and (when the obstacle
        mechanism is active) just before blocked cells."""
        s = self.state
        dx, dy = direction
        for _ in range(distance):
            nx = s.pose.x + dx
            ny = None if s.pose.y is None else s.pose.y + dy
            if self._blocked(nx, ny):
                break
            s.pose.x = nx
            if ny is not None:
                s.pose.y = ny

    def apply_drop(self, action: Action) -> int:
        s, cfg = self.state, self.cfg
        if cfg.dim is Dim.D1:
            x = s.pose.x
            if s.grid.landmark_mask[x]:
                return 0  # landmarks are unbuildable
            s.grid.cells[x] += 1
            h, want = int(s.grid.cells[x]), int(s.design.target[x])
            return 10 if h == want else (1 if h < want else -1)

        if cfg.dim is Dim.D2:
            c = (s.pose.x, s.pose.y)
            if s.grid.cells[c] == 0 and not s.grid.landmark_mask[c]:
                s.grid.cells[c] = 1
                return 5 if int(s.design.target[c]) == 1 else 0
            return 0

        # D3: the brick lands on the adjacent cell in the drop direction.
        dx, dy = DROP_DIRECTIONS[action]
        tx, ty = s.pose.x + dx, s.pose.y + dy
        if not s.grid.in_bounds(tx, ty) or s.grid.landmark_mask[tx, ty]:
            return 0  # brick released and lost; budget still consumed
        s.grid.cells[tx, ty] += 1
        return 5 if int(s.grid.cells[tx, ty]) <= int(s.design.target[tx, ty]) else 0

    def _immobilized(self) -> bool:
        s = self.state
        for a in move_actions(self.cfg.dim):
            dx, dy = MOVE_DIRECTIONS[a]
            ny = None if s.pose.y is None else s.pose.y + dy
            if not self._blocked(s.pose.x + dx, ny):
                return False
        return True
