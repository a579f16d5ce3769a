"""Grid-world geometry: world state, goal designs, partial observation, IoU.

Worlds are 1D lines or 2D planes of integer cells. 1D and 3D cells hold
brick heights; 2D cells are binary occupancy. A "3D" world is a height
field over a 2D plane. All types here are plain values; the functions are
pure and never mutate their inputs.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path

import numpy as np

# Window sentinel codes. Cells outside the world boundary read as OUTSIDE
# so an agent can tell a wall from an empty cell; landmark cells read as
# LANDMARK so they stay distinguishable from bricks in a single channel.
OUTSIDE = -1
LANDMARK = -2

DEFAULT_WIDTH = {1: 30, 2: 20, 3: 20}
DEFAULT_HALF_WINDOW = {1: 2, 2: 3, 3: 3}


class Dim(IntEnum):
    """World dimensionality. D3 is a height field over a 2D plane."""

    D1 = 1
    D2 = 2
    D3 = 3

    @property
    def planar(self) -> bool:
        return self is not Dim.D1


class ShapeMismatchError(ValueError):
    """Raised when two grids that must share a shape do not."""


@dataclass
class Pose:
    """Robot location as integer grid indices. `y` is None in 1D worlds."""

    x: int
    y: int | None = None

    def as_tuple(self) -> tuple[int, ...]:
        return (self.x,) if self.y is None else (self.x, self.y)

    def copy(self) -> "Pose":
        return Pose(self.x, self.y)


@dataclass
class GridState:
    """Per-cell brick contents of the world plus immovable landmark cells.

    `cells` has shape (W,) for 1D and (W, H) for 2D/3D. 2D cells are
    restricted to {0, 1}; elsewhere they are non-negative heights.
    Landmark cells never hold bricks.
    """

    dim: Dim
    cells: np.ndarray
    landmark_mask: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self):
        self.cells = np.asarray(self.cells, dtype=np.int64)
        if self.landmark_mask is None:
            self.landmark_mask = np.zeros(self.cells.shape, dtype=bool)
        else:
            self.landmark_mask = np.asarray(self.landmark_mask, dtype=bool)
        if self.landmark_mask.shape != self.cells.shape:
            raise ShapeMismatchError(
                f"landmark mask shape {self.landmark_mask.shape} != cells {self.cells.shape}"
            )
        if (self.cells < 0).any():
            raise ValueError("cells must be non-negative")
        if self.dim is Dim.D2 and (self.cells > 1).any():
            raise ValueError("2D cells are binary occupancy")
        if (self.cells[self.landmark_mask] > 0).any():
            raise ValueError("landmark cells never hold bricks")

    @classmethod
    def empty(cls, dim: Dim, width: int, height: int | None = None) -> "GridState":
        shape = (width,) if dim is Dim.D1 else (width, height)
        return cls(dim, np.zeros(shape, dtype=np.int64))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.cells.shape

    def in_bounds(self, *coords: int) -> bool:
        return all(0 <= c < n for c, n in zip(coords, self.cells.shape))

    def copy(self) -> "GridState":
        return GridState(self.dim, self.cells.copy(), self.landmark_mask.copy())


@dataclass
class Design:
    """Goal grid state. `target` follows the same shape contract as cells."""

    dim: Dim
    target: np.ndarray
    tags: tuple[str, ...] = ("static",)
    group_id: int = 0

    def __post_init__(self):
        self.target = np.asarray(self.target, dtype=np.int64)
        if (self.target < 0).any():
            raise ValueError("design targets must be non-negative")
        if self.dim is Dim.D2 and (self.target > 1).any():
            raise ValueError("2D design targets must be binary")
        if int(self.target.sum()) == 0:
            raise ValueError("design demands no bricks")

    @property
    def total_bricks(self) -> int:
        """Integrated volume of the design; the per-episode brick budget."""
        return int(self.target.sum())

    @property
    def shape(self) -> tuple[int, ...]:
        return self.target.shape

    def copy(self) -> "Design":
        return Design(self.dim, self.target.copy(), self.tags, self.group_id)


@dataclass
class ObservationPacket:
    """Local window around the robot plus episode counters.

    `window` is (2*half+1,) in 1D, square in 2D/3D. Codes: OUTSIDE beyond
    the boundary, LANDMARK on landmark cells, otherwise the brick count.
    `design` is attached only for dynamic tasks; `pose` only when the
    location oracle is enabled.
    """

    window: np.ndarray
    n_steps: int
    n_bricks: int
    design: Design | None = None
    pose: Pose | None = None


def observe(
    grid: GridState,
    pose: Pose,
    half_window: int,
    n_steps: int,
    n_bricks: int,
    design: Design | None = None,
    expose_pose: bool = False,
) -> ObservationPacket:
    """Extract the centered window at `pose` with boundary padding.

    Cells beyond the world read OUTSIDE, landmark cells read LANDMARK,
    everything else reads its brick count.
    """
    w = 2 * half_window + 1
    if grid.dim is Dim.D1:
        window = np.full(w, OUTSIDE, dtype=np.int64)
        lo = max(0, pose.x - half_window)
        hi = min(grid.shape[0], pose.x + half_window + 1)
        dst = lo - (pose.x - half_window)
        window[dst : dst + (hi - lo)] = grid.cells[lo:hi]
        marks = grid.landmark_mask[lo:hi]
        window[dst : dst + (hi - lo)][marks] = LANDMARK
    else:
        window = np.full((w, w), OUTSIDE, dtype=np.int64)
        x0 = max(0, pose.x - half_window)
        x1 = min(grid.shape[0], pose.x + half_window + 1)
        y0 = max(0, pose.y - half_window)
        y1 = min(grid.shape[1], pose.y + half_window + 1)
        dx = x0 - (pose.x - half_window)
        dy = y0 - (pose.y - half_window)
        patch = window[dx : dx + (x1 - x0), dy : dy + (y1 - y0)]
        patch[...] = grid.cells[x0:x1, y0:y1]
        patch[grid.landmark_mask[x0:x1, y0:y1]] = LANDMARK
    return ObservationPacket(
        window=window,
        n_steps=n_steps,
        n_bricks=n_bricks,
        design=design,
        pose=pose.copy() if expose_pose else None,
    )


def iou(final: GridState, design: Design) -> float:
    """Overlap score between a built grid and its design, in [0, 1].

    Sum of per-cell minima over sum of per-cell maxima; on binary grids
    this is exactly |intersection| / |union|. Landmark cells contribute
    zero built volume. Defined as 0 when the intersection is empty.
    """
    if final.dim != design.dim or final.shape != design.shape:
        raise ShapeMismatchError(
            f"grid {final.dim.name}{final.shape} vs design {design.dim.name}{design.shape}"
        )
    built = np.where(final.landmark_mask, 0, final.cells)
    inter = int(np.minimum(built, design.target).sum())
    union = int(np.maximum(built, design.target).sum())
    if inter == 0 or union == 0:
        return 0.0
    return inter / union


# ---------------------------------------------------------------------------
# Design file format: portable JSON with a row-major integer target array.
# Serialization is canonical (sorted keys, fixed separators) so files
# round-trip bit-exactly and can be content-hashed.


def design_to_dict(design: Design) -> dict:
    doc = {
        "dim": int(design.dim),
        "W": int(design.shape[0]),
        "H": int(design.shape[1]) if design.dim.planar else None,
        "tags": list(design.tags),
        "group_id": int(design.group_id),
        "target": [int(v) for v in design.target.reshape(-1)],
    }
    return doc


def design_from_dict(doc: dict) -> Design:
    dim = Dim(doc["dim"])
    shape = (doc["W"],) if dim is Dim.D1 else (doc["W"], doc["H"])
    target = np.array(doc["target"], dtype=np.int64).reshape(shape)
    return Design(dim, target, tuple(doc.get("tags", ())), int(doc.get("group_id", 0)))


def canonical_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def save_design(design: Design, path: str | Path) -> None:
    Path(path).write_text(canonical_json(design_to_dict(design)) + "\n")


def load_design(path: str | Path) -> Design:
    return design_from_dict(json.loads(Path(path).read_text()))


def design_sha256(design: Design) -> str:
    return hashlib.sha256(canonical_json(design_to_dict(design)).encode()).hexdigest()
