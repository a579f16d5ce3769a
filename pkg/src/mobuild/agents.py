"""Agents: shift-match localization with nearest-target planning, plus
random and greedy baselines behind a common interface.

The handcrafted policy estimates its pose by matching consecutive windows
(observations are noiseless integer grids, so a perfect-overlap shift test
is exact), falls back to unit odometry when matching is ambiguous, and
re-anchors exactly whenever the boundary padding is in view. Ambiguous
moves accrue a per-axis uncertainty bound that only a wall sighting
clears; the agent builds only while certain, and before striking out over
featureless ground it plants a single breadcrumb brick so the shift match
has something to track. Built structure then anchors all later motion.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import LANDMARK, OUTSIDE, Design, Dim, ObservationPacket, Pose
from .env import (
    Action,
    DROP_DIRECTIONS,
    EnvConfig,
    MOVE_DIRECTIONS,
    StepOutcome,
    legal_actions,
    move_actions,
)

_OPPOSITE = {
    Action.MOVE_LEFT: Action.MOVE_RIGHT,
    Action.MOVE_RIGHT: Action.MOVE_LEFT,
    Action.MOVE_UP: Action.MOVE_DOWN,
    Action.MOVE_DOWN: Action.MOVE_UP,
    Action.MOVE_FORWARD: Action.MOVE_BACKWARD,
    Action.MOVE_BACKWARD: Action.MOVE_FORWARD,
}

_DROP_FOR_OFFSET = {
    (-1, 0): Action.DROP_LEFT,
    (1, 0): Action.DROP_RIGHT,
    (0, -1): Action.DROP_FRONT,
    (0, 1): Action.DROP_REAR,
}

# drop landing opposite a move direction (3D breadcrumbs go behind)
_OPPOSITE_DROP = {
    Action.MOVE_LEFT: Action.DROP_RIGHT,
    Action.MOVE_RIGHT: Action.DROP_LEFT,
    Action.MOVE_FORWARD: Action.DROP_REAR,
    Action.MOVE_BACKWARD: Action.DROP_FRONT,
}


class Agent:
    """Observe-act contract shared by every policy."""

    name = "agent"

    def reset(self) -> None:
        pass

    def act(self, obs: ObservationPacket) -> Action:
        raise NotImplementedError

    def notify(self, outcome: StepOutcome) -> None:
        pass


# ---------------------------------------------------------------------------
# localization


class MatchKind(Enum):
    UNIQUE = "unique"
    AMBIGUOUS = "ambiguous"
    NO_MATCH = "no_match"


def _axis_slices(n: int, shift: int) -> tuple[slice, slice]:
    """Overlap slices such that next[a] aligns with prev[b] under `shift`."""
    if shift >= 0:
        return slice(0, n - shift), slice(shift, n)
    return slice(-shift, n), slice(0, n + shift)


def _shift_agrees(prev: np.ndarray, nxt: np.ndarray, direction, k: int) -> bool:
    dx, dy = direction
    if prev.ndim == 1:
        a, b = _axis_slices(prev.shape[0], k * dx)
        return np.array_equal(nxt[a], prev[b])
    ax, bx = _axis_slices(prev.shape[0], k * dx)
    ay, by = _axis_slices(prev.shape[1], k * dy)
    return np.array_equal(nxt[ax, ay], prev[bx, by])


def feature_match(
    prev_window: np.ndarray,
    next_window: np.ndarray,
    direction: tuple[int, int],
    d_max: int,
) -> tuple[MatchKind, int | None]:
    """Recover the executed move distance by shift-and-compare.

    Tries every k in 1..d_max; a shift is feasible when the windows agree
    perfectly on their overlap (boundary and landmark codes are features
    like any other). Identical or featureless windows are ambiguous: any
    agreement they produce is vacuous.
    """
    prev = np.asarray(prev_window)
    nxt = np.asarray(next_window)
    if np.array_equal(prev, nxt):
        return MatchKind.AMBIGUOUS, None
    if (prev == prev.reshape(-1)[0]).all() or (nxt == nxt.reshape(-1)[0]).all():
        return MatchKind.AMBIGUOUS, None
    feasible = [k for k in range(1, d_max + 1) if _shift_agrees(prev, nxt, direction, k)]
    if not feasible:
        return MatchKind.NO_MATCH, None
    if len(feasible) == 1:
        return MatchKind.UNIQUE, feasible[0]
    return MatchKind.AMBIGUOUS, None


@dataclass
class BeliefPose:
    """The agent's pose estimate plus which axes a wall sighting has pinned."""

    estimate: Pose
    anchored_x: bool = False
    anchored_y: bool = False

    @property
    def anchored(self) -> bool:
        return self.anchored_x and (self.anchored_y or self.estimate.y is None)

    def copy(self) -> "BeliefPose":
        return BeliefPose(self.estimate.copy(), self.anchored_x, self.anchored_y)


def _anchor_axis(line: np.ndarray, half: int, extent: int) -> int | None:
    """Exact coordinate implied by boundary codes on a center line, if any."""
    leading = 0
    while leading < half and line[leading] == OUTSIDE:
        leading += 1
    if leading:
        return half - leading
    trailing = 0
    n = len(line)
    while trailing < half and line[n - 1 - trailing] == OUTSIDE:
        trailing += 1
    if trailing:
        return extent - 1 - half + trailing
    return None


def visible_anchor_coords(window: np.ndarray, cfg: EnvConfig) -> tuple[int | None, int | None]:
    """Per-axis exact coordinates readable from boundary bands, if visible."""
    c = cfg.half_window
    if window.ndim == 1:
        return _anchor_axis(window, c, cfg.width), None
    return (
        _anchor_axis(window[:, c], c, cfg.width),
        _anchor_axis(window[c, :], c, cfg.height),
    )


def anchor_from_window(belief: BeliefPose, window: np.ndarray, cfg: EnvConfig) -> BeliefPose:
    """Re-pin belief coordinates on any axis whose wall band is in view."""
    out = belief.copy()
    ax, ay = visible_anchor_coords(window, cfg)
    if ax is not None:
        out.estimate.x, out.anchored_x = ax, True
    if ay is not None:
        out.estimate.y, out.anchored_y = ay, True
    return out


def localize(
    belief: BeliefPose,
    prev_window: np.ndarray,
    next_window: np.ndarray,
    action: Action,
    cfg: EnvConfig,
    match: tuple[MatchKind, int | None] | None = None,
) -> BeliefPose:
    """Update the pose estimate after an executed move.

    Uses the matched shift when it is unique, otherwise assumes one cell
    of travel; then re-anchors from any visible boundary band. `match`
    accepts a precomputed feature_match result.
    """
    direction = MOVE_DIRECTIONS[action]
    kind, d = match or feature_match(prev_window, next_window, direction, cfg.max_move)
    step = d if kind is MatchKind.UNIQUE else 1
    out = belief.copy()
    out.estimate.x = min(max(out.estimate.x + direction[0] * step, 0), cfg.width - 1)
    if out.estimate.y is not None:
        out.estimate.y = min(max(out.estimate.y + direction[1] * step, 0), cfg.height - 1)
    return anchor_from_window(out, next_window, cfg)


# ---------------------------------------------------------------------------
# planning


@dataclass
class PriorityActionSpace:
    """Ordered move preferences driving exploration.

    order[0] is the current sweep direction, order[1] the row-step
    direction of the boustrophedon.
    """

    order: tuple[Action, ...]

    @classmethod
    def fresh(cls, dim: Dim) -> "PriorityActionSpace":
        dim = Dim(dim)
        if dim is Dim.D1:
            return cls((Action.MOVE_RIGHT, Action.MOVE_LEFT))
        if dim is Dim.D2:
            return cls((Action.MOVE_RIGHT, Action.MOVE_DOWN, Action.MOVE_LEFT, Action.MOVE_UP))
        return cls(
            (Action.MOVE_RIGHT, Action.MOVE_BACKWARD, Action.MOVE_LEFT, Action.MOVE_FORWARD)
        )

    def rank(self, action: Action) -> int:
        try:
            return self.order.index(action)
        except ValueError:
            return len(self.order)


def _window_cell(window: np.ndarray, offset: tuple[int, int], half: int) -> int:
    if window.ndim == 1:
        return int(window[half + offset[0]])
    return int(window[half + offset[0], half + offset[1]])


def _blocked_in_view(window: np.ndarray, action: Action, cfg: EnvConfig) -> bool:
    """True when the adjacent cell in a move direction cannot be entered."""
    v = _window_cell(window, MOVE_DIRECTIONS[action], cfg.half_window)
    if v == OUTSIDE:
        return True
    return bool(cfg.obstacles and (v == LANDMARK or v > 0))


def _design_patch(design: Design, belief: BeliefPose, cfg: EnvConfig) -> np.ndarray:
    """Design targets aligned to the window under the believed pose; -1
    where the believed coordinate falls outside the world."""
    c = cfg.half_window
    w = 2 * c + 1
    bx = belief.estimate.x
    # hypothesized poses may sit entirely off-world; keep slices empty then
    if design.dim is Dim.D1:
        patch = np.full(w, -1, dtype=np.int64)
        lo = max(0, bx - c)
        hi = max(lo, min(cfg.width, bx + c + 1))
        patch[lo - (bx - c) : lo - (bx - c) + (hi - lo)] = design.target[lo:hi]
        return patch
    by = belief.estimate.y
    patch = np.full((w, w), -1, dtype=np.int64)
    x0 = max(0, bx - c)
    x1 = max(x0, min(cfg.width, bx + c + 1))
    y0 = max(0, by - c)
    y1 = max(y0, min(cfg.height, by + c + 1))
    dx, dy = x0 - (bx - c), y0 - (by - c)
    patch[dx : dx + (x1 - x0), dy : dy + (y1 - y0)] = design.target[x0:x1, y0:y1]
    return patch


def _axis_move(axis: int, sign: int, dim: Dim) -> Action:
    if axis == 0:
        return Action.MOVE_RIGHT if sign > 0 else Action.MOVE_LEFT
    if dim is Dim.D3:
        return Action.MOVE_BACKWARD if sign > 0 else Action.MOVE_FORWARD
    return Action.MOVE_DOWN if sign > 0 else Action.MOVE_UP


def _moves_toward(offset: tuple[int, int], prior: PriorityActionSpace, dim: Dim) -> list[Action]:
    """Unit moves that reduce distance to `offset`, best-ranked first."""
    di, dj = offset
    options = []
    if di:
        options.append(_axis_move(0, di, dim))
    if dj:
        options.append(_axis_move(1, dj, dim))
    options.sort(key=prior.rank)
    return options


@dataclass
class ErrorBox:
    """Signed bounds on (true - estimated) coordinates per axis.

    Ambiguous moves assume one cell of travel while the robot may have
    moved up to max_move, so the error they add is one-sided along the
    move direction. Only a wall sighting collapses an axis back to zero.
    """

    lo_x: int = 0
    hi_x: int = 0
    lo_y: int = 0
    hi_y: int = 0

    @property
    def exact(self) -> bool:
        return self.lo_x == self.hi_x == self.lo_y == self.hi_y == 0

    def widen(self, direction: tuple[int, int], slack: int) -> None:
        dx, dy = direction
        if dx > 0:
            self.hi_x += slack
        elif dx < 0:
            self.lo_x -= slack
        if dy > 0:
            self.hi_y += slack
        elif dy < 0:
            self.lo_y -= slack

    def clear_x(self) -> None:
        self.lo_x = self.hi_x = 0

    def clear_y(self) -> None:
        self.lo_y = self.hi_y = 0


_ROBUST_SPREAD_CAP = 4  # hypotheses beyond this spread never certify a drop


def _candidate_offsets(
    window: np.ndarray,
    belief: BeliefPose,
    design: Design,
    cfg: EnvConfig,
    box: ErrorBox | None = None,
) -> list[tuple[int, int]]:
    """Window offsets (relative to the robot) of cells needing bricks.

    With an error box, a cell qualifies only if it needs bricks under
    every pose hypothesis the box allows: such drops are provably correct
    even though the estimate may be off.
    """

    def needed_for(b: BeliefPose) -> np.ndarray:
        patch = _design_patch(design, b, cfg)
        if cfg.dim is Dim.D2:
            return (window == 0) & (patch == 1)
        return (window >= 0) & (patch > window)

    if box is None or box.exact:
        needed = needed_for(belief)
    else:
        if box.hi_x - box.lo_x > _ROBUST_SPREAD_CAP or box.hi_y - box.lo_y > _ROBUST_SPREAD_CAP:
            return []
        needed = None
        for ex in range(box.lo_x, box.hi_x + 1):
            for ey in range(box.lo_y, box.hi_y + 1):
                hyp = BeliefPose(
                    Pose(
                        belief.estimate.x + ex,
                        None if belief.estimate.y is None else belief.estimate.y + ey,
                    )
                )
                n = needed_for(hyp)
                needed = n if needed is None else needed & n
                if not needed.any():
                    return []
    c = cfg.half_window
    if window.ndim == 1:
        return [(int(i) - c, 0) for i in np.flatnonzero(needed)]
    return [(int(i) - c, int(j) - c) for i, j in np.argwhere(needed)]


def _pick_nearest(
    offsets: list[tuple[int, int]], prior: PriorityActionSpace, dim: Dim
) -> tuple[int, int]:
    def key(off):
        di, dj = off
        dist = abs(di) + abs(dj)
        moves = _moves_toward(off, prior, dim)
        rank = prior.rank(moves[0]) if moves else -1
        return (dist, rank, di, dj)

    return min(offsets, key=key)


def _advance_sweep(
    prior: PriorityActionSpace,
    window: np.ndarray,
    cfg: EnvConfig,
    anchored: bool,
    rng: np.random.Generator | None = None,
) -> tuple[Action, PriorityActionSpace]:
    """Exploration move: sweep ahead, turning at walls.

    Unanchored agents rotate through the order (a perimeter walk that pins
    both axes quickly); anchored agents run a boustrophedon, stepping one
    row at each wall and reversing the sweep.
    """
    if rng is not None:
        open_moves = [a for a in prior.order if not _blocked_in_view(window, a, cfg)]
        pool = open_moves or list(prior.order)
        return pool[int(rng.integers(len(pool)))], prior

    head = prior.order[0]
    if not _blocked_in_view(window, head, cfg):
        return head, prior
    if len(prior.order) == 2:  # 1D: bounce
        flipped = (prior.order[1], prior.order[0])
        return flipped[0], PriorityActionSpace(flipped)
    if not anchored:
        rotated = prior.order
        for _ in range(3):
            rotated = rotated[1:] + rotated[:1]
            if not _blocked_in_view(window, rotated[0], cfg):
                return rotated[0], PriorityActionSpace(rotated)
        return head, prior  # fully enclosed; the episode is ending anyway
    sweep, row = prior.order[0], prior.order[1]
    if _blocked_in_view(window, row, cfg):
        row = _OPPOSITE[row]  # far edge reached: bounce the row direction
    new_prior = PriorityActionSpace((_OPPOSITE[sweep], row, sweep, _OPPOSITE[row]))
    if _blocked_in_view(window, row, cfg):
        return new_prior.order[0], new_prior  # single open row: just turn around
    return row, new_prior


def _plan_impl(
    belief: BeliefPose,
    obs: ObservationPacket,
    design: Design | None,
    prior: PriorityActionSpace,
    cfg: EnvConfig,
    allow_approach: bool,
    box: ErrorBox | None = None,
    rng: np.random.Generator | None = None,
) -> tuple[Action, PriorityActionSpace, bool]:
    """plan() plus a flag marking build intent (drop or move-to-candidate).

    Drops fire whenever the error box certifies them; approach moves need
    `allow_approach` (an exact estimate), since chasing candidates with a
    drifted estimate makes the robot orbit cells that move with its error.
    """
    window = obs.window
    if design is not None and belief.anchored:
        offsets = _candidate_offsets(window, belief, design, cfg, box)
        if offsets:
            best = _pick_nearest(offsets, prior, cfg.dim)
            dist = abs(best[0]) + abs(best[1])
            if cfg.dim is not Dim.D3:
                if dist == 0:
                    return Action.DROP, prior, True
                if allow_approach:
                    for a in _moves_toward(best, prior, cfg.dim):
                        if not _blocked_in_view(window, a, cfg):
                            return a, prior, True
            else:
                # bricks land beside the robot: adjacent candidates trump the
                # cell underfoot, which can only be built after stepping off
                adjacent = [o for o in offsets if abs(o[0]) + abs(o[1]) == 1]
                if adjacent:
                    best = _pick_nearest(adjacent, prior, cfg.dim)
                    return _DROP_FOR_OFFSET[best], prior, True
                if allow_approach:
                    remote = [o for o in offsets if abs(o[0]) + abs(o[1]) >= 2]
                    if remote:
                        best = _pick_nearest(remote, prior, cfg.dim)
                        for a in _moves_toward(best, prior, cfg.dim):
                            if not _blocked_in_view(window, a, cfg):
                                return a, prior, True
                    else:
                        # only the cell underfoot needs bricks: step aside,
                        # then drop back toward it
                        for a in prior.order:
                            if not _blocked_in_view(window, a, cfg):
                                return a, prior, True
    action, prior = _advance_sweep(prior, window, cfg, belief.anchored, rng)
    return action, prior, False


def plan(
    belief: BeliefPose,
    obs: ObservationPacket,
    design: Design | None,
    prior: PriorityActionSpace,
    cfg: EnvConfig,
    rng: np.random.Generator | None = None,
) -> tuple[Action, PriorityActionSpace]:
    """Next action: build at the nearest needed cell, else explore.

    Building requires an anchored belief; placing bricks from an unpinned
    estimate wastes budget on misaligned cells. `rng` switches exploration
    from the deterministic sweep to sampling the open moves.
    """
    action, prior, _ = _plan_impl(belief, obs, design, prior, cfg, belief.anchored, rng=rng)
    return action, prior


def belief_error_bound(box: ErrorBox) -> int:
    """Worst-case Manhattan error of the estimate the box still allows."""
    return max(abs(box.lo_x), abs(box.hi_x)) + max(abs(box.lo_y), abs(box.hi_y))


def safe_drop_filter(
    window: np.ndarray, proposed: Action, prior: PriorityActionSpace, cfg: EnvConfig
) -> Action:
    """Veto drops that would seal the robot's last open side (3D guard)."""
    if proposed not in DROP_DIRECTIONS:
        return proposed
    target_offset = DROP_DIRECTIONS[proposed]
    open_after = [
        a
        for a in move_actions(cfg.dim)
        if MOVE_DIRECTIONS[a] != target_offset and not _blocked_in_view(window, a, cfg)
    ]
    if open_after:
        return proposed
    for a in prior.order:
        if not _blocked_in_view(window, a, cfg):
            return a
    return proposed  # every side already blocked; nothing left to protect


# ---------------------------------------------------------------------------
# policies


class HandcraftedAgent(Agent):
    """Scan-match localization + nearest-target planning."""

    name = "handcrafted"

    def __init__(
        self,
        cfg: EnvConfig,
        design: Design | None = None,
        safe_drop: bool = True,
        breadcrumbs: bool = True,
        sweep_random: bool = False,
        seed: int = 0,
    ):
        self.cfg = cfg
        self._static_design = design
        self._safe_drop = safe_drop
        self._breadcrumbs = breadcrumbs
        self._sweep_random = sweep_random
        self._seed = seed
        self.reset()

    def reset(self) -> None:
        cfg = self.cfg
        y = None if cfg.dim is Dim.D1 else cfg.height // 2
        self.belief = BeliefPose(Pose(cfg.width // 2, y))
        self.prior = PriorityActionSpace.fresh(cfg.dim)
        self.box = ErrorBox()
        self._prev_window: np.ndarray | None = None
        self._last_action: Action | None = None
        self._rng = np.random.default_rng(self._seed) if self._sweep_random else None

    @property
    def certain(self) -> bool:
        """Anchored with no ambiguous moves since the last wall sighting."""
        return self.belief.anchored and self.box.exact

    def _absorb_anchors(self, window: np.ndarray) -> None:
        ax, ay = visible_anchor_coords(window, self.cfg)
        if ax is not None:
            self.belief.estimate.x = ax
            self.belief.anchored_x = True
            self.box.clear_x()
        if ay is not None:
            self.belief.estimate.y = ay
            self.belief.anchored_y = True
            self.box.clear_y()

    def act(self, obs: ObservationPacket) -> Action:
        design = obs.design if obs.design is not None else self._static_design
        if design is None:
            raise ValueError("handcrafted agent needs the design (static) or a dynamic task")
        if obs.pose is not None:
            self.belief = BeliefPose(obs.pose.copy(), True, True)
            self.box = ErrorBox()
        else:
            self._absorb_anchors(obs.window)
        action, self.prior, building = _plan_impl(
            self.belief,
            obs,
            design,
            self.prior,
            self.cfg,
            allow_approach=self.certain,
            box=self.box,
            rng=self._rng,
        )
        if self._crumb_wanted(obs.window, action, building):
            action = self._crumb_action(obs.window, action)
        if self.cfg.dim is Dim.D3 and self.cfg.obstacles and self._safe_drop:
            action = safe_drop_filter(obs.window, action, self.prior, self.cfg)
        self._prev_window = obs.window
        self._last_action = action
        return action

    def _crumb_wanted(self, window: np.ndarray, action: Action, building: bool) -> bool:
        """Plant one brick before moving toward a candidate over featureless
        ground: the shift match needs something to track, and without it the
        exact position earned at the wall would decay into a shifted build."""
        if not self._breadcrumbs:
            return False
        if self.cfg.gps or self.cfg.fixed_step:  # localization is already exact
            return False
        if not building or action not in MOVE_DIRECTIONS or not self.certain:
            return False
        return not bool((window > 0).any() or (window == LANDMARK).any())

    def _crumb_action(self, window: np.ndarray, move: Action) -> Action:
        if self.cfg.dim is not Dim.D3:
            return Action.DROP
        # 3D bricks land beside the robot and block motion: drop behind the
        # planned move so the path stays open and the crumb stays in view
        ranked = sorted(_DROP_FOR_OFFSET.values(), key=lambda a: 0 if a == _OPPOSITE_DROP[move] else 1)
        for drop in ranked:
            off = DROP_DIRECTIONS[drop]
            if off == MOVE_DIRECTIONS[move]:
                continue
            if _window_cell(window, off, self.cfg.half_window) == 0:
                return drop
        return move  # nowhere safe to plant; just proceed

    def notify(self, outcome: StepOutcome) -> None:
        if (
            self._last_action not in MOVE_DIRECTIONS
            or self._prev_window is None
            or self.cfg.gps
        ):
            return
        direction = MOVE_DIRECTIONS[self._last_action]
        nxt = outcome.observation.window
        if self.cfg.fixed_step:
            step = 1  # the move distance is exactly one cell
        else:
            kind, d = feature_match(self._prev_window, nxt, direction, self.cfg.max_move)
            step = d if kind is MatchKind.UNIQUE else 1
            if kind is not MatchKind.UNIQUE:
                self.box.widen(direction, self.cfg.max_move - 1)
        est = self.belief.estimate
        est.x = min(max(est.x + direction[0] * step, 0), self.cfg.width - 1)
        if est.y is not None:
            est.y = min(max(est.y + direction[1] * step, 0), self.cfg.height - 1)
        self._absorb_anchors(nxt)


class RandomAgent(Agent):
    """Uniform legal action each step; the benchmark floor."""

    name = "random"

    def __init__(self, cfg: EnvConfig, seed: int = 0):
        self.cfg = cfg
        self._seed = seed
        self._actions = legal_actions(cfg.dim)
        self.reset()

    def reset(self) -> None:
        self._rng = np.random.default_rng(self._seed)

    def act(self, obs: ObservationPacket) -> Action:
        return self._actions[int(self._rng.integers(len(self._actions)))]


class GreedyDropAgent(Agent):
    """Drop whenever the cell under (or beside, in 3D) the robot needs a
    brick, judged from naive unit odometry; otherwise move randomly."""

    name = "greedy"

    def __init__(self, cfg: EnvConfig, design: Design | None = None, seed: int = 0):
        self.cfg = cfg
        self._static_design = design
        self._seed = seed
        self._moves = move_actions(cfg.dim)
        self.reset()

    def reset(self) -> None:
        cfg = self.cfg
        y = None if cfg.dim is Dim.D1 else cfg.height // 2
        self._pose = Pose(cfg.width // 2, y)
        self._last_action: Action | None = None
        self._rng = np.random.default_rng(self._seed)

    def act(self, obs: ObservationPacket) -> Action:
        design = obs.design if obs.design is not None else self._static_design
        if design is None:
            raise ValueError("greedy agent needs the design (static) or a dynamic task")
        if obs.pose is not None:
            self._pose = obs.pose.copy()
        c = self.cfg.half_window
        win = obs.window
        if self.cfg.dim is not Dim.D3:
            v = _window_cell(win, (0, 0), c)
            t = self._target_at(design, self._pose.x, self._pose.y)
            needed = (v == 0 and t == 1) if self.cfg.dim is Dim.D2 else (0 <= v < t)
            if needed:
                self._last_action = Action.DROP
                return Action.DROP
        else:
            for offset, drop in _DROP_FOR_OFFSET.items():
                v = _window_cell(win, offset, c)
                t = self._target_at(design, self._pose.x + offset[0], self._pose.y + offset[1])
                if 0 <= v < t:
                    self._last_action = drop
                    return drop
        action = self._moves[int(self._rng.integers(len(self._moves)))]
        self._last_action = action
        return action

    def _target_at(self, design: Design, x: int, y: int | None) -> int:
        coords = (x,) if y is None else (x, y)
        if all(0 <= c < n for c, n in zip(coords, design.shape)):
            return int(design.target[coords])
        return 0

    def notify(self, outcome: StepOutcome) -> None:
        if self._last_action in MOVE_DIRECTIONS and outcome.observation.pose is None:
            dx, dy = MOVE_DIRECTIONS[self._last_action]
            self._pose.x = min(max(self._pose.x + dx, 0), self.cfg.width - 1)
            if self._pose.y is not None:
                self._pose.y = min(max(self._pose.y + dy, 0), self.cfg.height - 1)


AGENT_NAMES = ("handcrafted", "random", "greedy")


def make_agent(
    name: str, cfg: EnvConfig, design: Design | None = None, params: dict | None = None
) -> Agent:
    """Build an agent by registry name; `params` tunes agent-specifics."""
    params = dict(params or {})
    static_design = None if cfg.dynamic else design
    if name == "handcrafted":
        return HandcraftedAgent(cfg, static_design, **params)
    if name == "random":
        return RandomAgent(cfg, **params)
    if name == "greedy":
        return GreedyDropAgent(cfg, static_design, **params)
    raise ValueError(f"unknown agent {name!r}; expected one of {AGENT_NAMES}")
