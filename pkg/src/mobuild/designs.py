"""Design generators: curve, disk, ring, dome, shell, and triangle families.

Concrete shape parameters live in data/design_params.json so the benchmark
set stays stable across versions. The ten evaluation groups of each dynamic
family are fixed and seed-independent; training-style draws sample fresh
parameters from the declared ranges.
"""
from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .core import Design, Dim, canonical_json, design_sha256, save_design
from .env import EnvConfig

N_DYNAMIC_GROUPS = 10

FAMILY_DIMS = {
    "gaussian_1d": Dim.D1,
    "sine_1d": Dim.D1,
    "disk_2d": Dim.D2,
    "ring_2d": Dim.D2,
    "triangle_2d": Dim.D2,
    "dome_3d": Dim.D3,
    "shell_3d": Dim.D3,
    "triangle_3d": Dim.D3,
}
DYNAMIC_FAMILIES = ("sine_1d", "triangle_2d", "triangle_3d")
# Default density for families that are inherently one or the other.
FIXED_DENSITY = {"disk_2d": "dense", "ring_2d": "sparse", "dome_3d": "dense", "shell_3d": "sparse"}


class DesignError(ValueError):
    """Parameters produced an empty or malformed design."""


@dataclass
class DesignSpec:
    """Recipe for one design: family, parameter overrides, group, density."""

    family: str
    params: dict = field(default_factory=dict)
    density: str | None = None  # dense | sparse; triangles only
    group_id: int = 0
    seed: int = 0


def _params_table() -> dict:
    with resources.files("mobuild.data").joinpath("design_params.json").open() as fh:
        return json.load(fh)


_TABLE = _params_table()


def family_defaults(family: str, group_id: int = 0) -> dict:
    entry = _TABLE[family]
    if "groups" in entry:
        if not 0 <= group_id < len(entry["groups"]):
            raise DesignError(f"{family} has no group {group_id}")
        return dict(entry["groups"][group_id])
    return dict(entry["defaults"])


def static_family(dim: Dim, density: str | None) -> str:
    """Benchmark family used for the static task of a dimensionality."""
    dim = Dim(dim)
    if dim is Dim.D1:
        return "gaussian_1d"
    if dim is Dim.D2:
        return "ring_2d" if density == "sparse" else "disk_2d"
    return "shell_3d" if density == "sparse" else "dome_3d"


def dynamic_family(dim: Dim) -> str:
    return {Dim.D1: "sine_1d", Dim.D2: "triangle_2d", Dim.D3: "triangle_3d"}[Dim(dim)]


# ---------------------------------------------------------------------------
# rasterization helpers


def _round_half_away(v: np.ndarray) -> np.ndarray:
    return (np.sign(v) * np.floor(np.abs(v) + 0.5)).astype(np.int64)


def _cell_distances(width: int, height: int, cx: float, cy: float) -> np.ndarray:
    ix, iy = np.meshgrid(np.arange(width), np.arange(height), indexing="ij")
    return np.hypot(ix - cx, iy - cy)


def _line_cells(p: tuple[int, int], q: tuple[int, int]) -> list[tuple[int, int]]:
    """Integer cells along a 4-connected walk from p to q (inclusive)."""
    x, y = p
    x1, y1 = q
    dx, dy = x1 - x, y1 - y
    cells = [(x, y)]
    sx = 1 if dx > 0 else -1
    sy = 1 if dy > 0 else -1
    while (x, y) != (x1, y1):
        if x == x1:
            y += sy
        elif y == y1:
            x += sx
        else:
            # step on the axis that keeps the walk closest to the segment
            err_x = abs((x + sx - p[0]) * dy - (y - p[1]) * dx)
            err_y = abs((x - p[0]) * dy - (y + sy - p[1]) * dx)
            if err_x <= err_y:
                x += sx
            else:
                y += sy
        cells.append((x, y))
    return cells


def _triangle_masks(vertices, width: int, height: int) -> tuple[np.ndarray, np.ndarray]:
    """(filled, outline) boolean masks for a triangle given float vertices."""
    (ax, ay), (bx, by), (cx, cy) = [(float(x), float(y)) for x, y in vertices]
    ix, iy = np.meshgrid(np.arange(width), np.arange(height), indexing="ij")
    eps = 1e-9

    def half_plane(px, py, qx, qy):
        return (qx - px) * (iy - py) - (qy - py) * (ix - px)

    d1 = half_plane(ax, ay, bx, by)
    d2 = half_plane(bx, by, cx, cy)
    d3 = half_plane(cx, cy, ax, ay)
    has_neg = (d1 < -eps) | (d2 < -eps) | (d3 < -eps)
    has_pos = (d1 > eps) | (d2 > eps) | (d3 > eps)
    filled = ~(has_neg & has_pos)

    outline = np.zeros((width, height), dtype=bool)
    corners = [
        (int(math.floor(vx + 0.5)), int(math.floor(vy + 0.5)))
        for vx, vy in ((ax, ay), (bx, by), (cx, cy))
    ]
    for i in range(3):
        for x, y in _line_cells(corners[i], corners[(i + 1) % 3]):
            if 0 <= x < width and 0 <= y < height:
                outline[x, y] = True
    # the outline bounds the fill so the union stays 4-connected
    return filled | outline, outline


def _triangle_area(vertices) -> float:
    (ax, ay), (bx, by), (cx, cy) = vertices
    return abs((bx - ax) * (cy - ay) - (cx - ax) * (by - ay)) / 2.0


# ---------------------------------------------------------------------------
# family rasterizers


def _raster_gaussian(p: dict, cfg: EnvConfig) -> np.ndarray:
    x = np.arange(cfg.width)
    h = p["amplitude"] * np.exp(-((x - p["center"]) ** 2) / (2 * p["sigma"] ** 2))
    return np.maximum(_round_half_away(h), 0)


def _raster_sine(p: dict, cfg: EnvConfig) -> np.ndarray:
    x = np.arange(cfg.width)
    h = p["amplitude"] * np.sin(2 * math.pi * p["frequency"] * x / cfg.width + p["phase"])
    return np.maximum(_round_half_away(h + p["offset"]), 0)


def _raster_disk(p: dict, cfg: EnvConfig) -> np.ndarray:
    d = _cell_distances(cfg.width, cfg.height, p["cx"], p["cy"])
    return (d <= p["radius"]).astype(np.int64)


def _raster_ring(p: dict, cfg: EnvConfig) -> np.ndarray:
    d = _cell_distances(cfg.width, cfg.height, p["cx"], p["cy"])
    return ((d <= p["radius"]) & (d > p["radius"] - p["thickness"])).astype(np.int64)


def _raster_dome(p: dict, cfg: EnvConfig) -> np.ndarray:
    d = _cell_distances(cfg.width, cfg.height, p["cx"], p["cy"])
    inside = d <= p["radius"]
    profile = np.sqrt(np.clip(1.0 - (d / p["radius"]) ** 2, 0.0, 1.0))
    heights = 1 + _round_half_away((p["height"] - 1) * profile)
    return np.where(inside, heights, 0).astype(np.int64)


def _raster_shell(p: dict, cfg: EnvConfig) -> np.ndarray:
    return _raster_ring(p, cfg) * int(p["height"])


def _raster_triangle(p: dict, cfg: EnvConfig, density: str, height: int = 1) -> np.ndarray:
    filled, outline = _triangle_masks(p["vertices"], cfg.width, cfg.height)
    mask = filled if density == "dense" else outline
    return mask.astype(np.int64) * height


# ---------------------------------------------------------------------------
# support-shape validity


def _support_components(support: np.ndarray) -> int:
    """Number of 4-connected components of a boolean mask."""
    seen = np.zeros_like(support)
    count = 0
    for start in zip(*np.nonzero(support)):
        if seen[start]:
            continue
        count += 1
        queue = deque([start])
        seen[start] = True
        while queue:
            x, y = queue.popleft()
            for nx, ny in ((x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)):
                if 0 <= nx < support.shape[0] and 0 <= ny < support.shape[1]:
                    if support[nx, ny] and not seen[nx, ny]:
                        seen[nx, ny] = True
                        queue.append((nx, ny))
    return count


def _has_holes(support: np.ndarray) -> bool:
    """True if some empty cell is fully enclosed by the support."""
    w, h = support.shape
    outside = np.zeros((w + 2, h + 2), dtype=bool)
    padded = np.zeros((w + 2, h + 2), dtype=bool)
    padded[1:-1, 1:-1] = support
    queue = deque([(0, 0)])
    outside[0, 0] = True
    while queue:
        x, y = queue.popleft()
        for nx, ny in ((x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)):
            if 0 <= nx < w + 2 and 0 <= ny < h + 2:
                if not padded[nx, ny] and not outside[nx, ny]:
                    outside[nx, ny] = True
                    queue.append((nx, ny))
    empties = ~padded
    return bool((empties & ~outside).any())


def _check_density(target: np.ndarray, density: str, family: str) -> None:
    support = target > 0
    if density == "dense":
        if _support_components(support) != 1 or _has_holes(support):
            raise DesignError(f"{family}: dense support must be one hole-free component")
    elif density == "sparse":
        padded = np.zeros((support.shape[0] + 2, support.shape[1] + 2), dtype=bool)
        padded[1:-1, 1:-1] = support
        for x, y in zip(*np.nonzero(support)):
            px, py = x + 1, y + 1
            if padded[px - 1, py] and padded[px + 1, py] and padded[px, py - 1] and padded[px, py + 1]:
                raise DesignError(f"{family}: sparse support cell ({x},{y}) is interior")


# ---------------------------------------------------------------------------
# public operations


def generate(spec: DesignSpec, cfg: EnvConfig) -> Design:
    """Rasterize a design deterministically from its spec.

    Raises DesignError for unknown families, dim mismatches, empty results,
    or support shapes violating the declared density.
    """
    family = spec.family
    if family not in FAMILY_DIMS:
        raise DesignError(f"unknown design family {family!r}")
    if FAMILY_DIMS[family] != cfg.dim:
        raise DesignError(f"{family} is a {FAMILY_DIMS[family].name} family, config is {cfg.dim.name}")

    density = spec.density or FIXED_DENSITY.get(family)
    if family in ("triangle_2d", "triangle_3d") and density is None:
        density = "dense"
    params = {**family_defaults(family, spec.group_id), **spec.params}

    if family == "gaussian_1d":
        target = _raster_gaussian(params, cfg)
    elif family == "sine_1d":
        target = _raster_sine(params, cfg)
    elif family == "disk_2d":
        target = _raster_disk(params, cfg)
    elif family == "ring_2d":
        target = _raster_ring(params, cfg)
    elif family == "triangle_2d":
        target = _raster_triangle(params, cfg, density)
    elif family == "dome_3d":
        target = _raster_dome(params, cfg)
    elif family == "shell_3d":
        target = _raster_shell(params, cfg)
    else:
        target = _raster_triangle(params, cfg, density, height=int(params.get("height", 2)))

    if int(target.sum()) == 0:
        raise DesignError(f"{family} parameters produced an empty design")
    if cfg.dim.planar and density is not None:
        _check_density(target, density, family)

    kind = "dynamic" if family in DYNAMIC_FAMILIES else "static"
    tags = (kind,) if density is None else (kind, density)
    return Design(cfg.dim, target, tags, spec.group_id)


def dynamic_test_groups(family: str, cfg: EnvConfig, density: str | None = None) -> list[Design]:
    """The fixed, seed-independent 10-design evaluation set of a family."""
    if family not in DYNAMIC_FAMILIES:
        raise DesignError(f"{family} is not a dynamic family")
    return [
        generate(DesignSpec(family, density=density, group_id=g), cfg)
        for g in range(N_DYNAMIC_GROUPS)
    ]


def sample_training_design(
    family: str,
    cfg: EnvConfig,
    rng: np.random.Generator,
    density: str | None = None,
    max_attempts: int = 200,
) -> Design:
    """Draw family parameters from their training ranges until valid."""
    if family not in DYNAMIC_FAMILIES:
        raise DesignError(f"{family} is not a dynamic family")
    ranges = _TABLE[family]["training_ranges"]
    for _ in range(max_attempts):
        if family == "sine_1d":
            params = {
                k: float(rng.uniform(*ranges[k]))
                for k in ("amplitude", "frequency", "phase", "offset")
            }
        else:
            m = ranges["margin"]
            lo = (m, m)
            hi = (cfg.width - 1 - m, cfg.height - 1 - m)
            verts = [
                [float(rng.uniform(lo[0], hi[0])), float(rng.uniform(lo[1], hi[1]))]
                for _ in range(3)
            ]
            if _triangle_area(verts) < ranges["min_area"]:
                continue
            params = {"vertices": verts}
            if family == "triangle_3d":
                h_lo, h_hi = ranges["height"]
                params["height"] = int(rng.integers(int(h_lo), int(h_hi) + 1))
        try:
            return generate(DesignSpec(family, params, density=density), cfg)
        except DesignError:
            continue
    raise DesignError(f"no valid {family} design after {max_attempts} draws")


def write_design_set(
    family: str, cfg: EnvConfig, out_dir: str | Path, density: str | None = None
) -> Path:
    """Emit a family's designs as files plus a content-hash manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if family in DYNAMIC_FAMILIES:
        designs = dynamic_test_groups(family, cfg, density)
    else:
        designs = [generate(DesignSpec(family, density=density), cfg)]
    suffix = f"_{density}" if density else ""
    entries = []
    for d in designs:
        name = f"{family}{suffix}_g{d.group_id}.json"
        save_design(d, out / name)
        entries.append({"group_id": d.group_id, "path": name, "sha256": design_sha256(d)})
    manifest_path = out / f"{family}{suffix}_manifest.json"
    manifest = {"family": family, "density": density, "entries": entries}
    manifest_path.write_text(canonical_json(manifest) + "\n")
    return manifest_path
