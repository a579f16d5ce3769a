"""Figure rendering for benchmark results and single episodes."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .core import Dim, design_from_dict


def render_summary_figure(results, path: str | Path) -> Path:
    """Grouped bars of average and minimum IoU per task/agent row."""
    labels = [f"{r.label}\n{r.agent}" for r in results]
    avg = [r.avg_iou for r in results]
    low = [r.min_iou for r in results]
    x = np.arange(len(labels))
    width = 0.38
    fig, ax = plt.subplots(figsize=(max(6.0, 1.2 * len(labels)), 4.0))
    ax.bar(x - width / 2, avg, width, label="avg IoU", color="#3f7fbf")
    ax.bar(x + width / 2, low, width, label="min IoU", color="#bf5f3f")
    ax.set_xticks(x)
    ax.set_xticklabels(labels, fontsize=8)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("IoU")
    ax.legend()
    ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def render_episode_figure(record, path: str | Path) -> Path:
    """Built structure next to its design, from a finished episode record."""
    design = design_from_dict(record.design)
    grid = np.array(record.final_grid, dtype=np.int64).reshape(design.shape)
    if design.dim is Dim.D1:
        fig, ax = plt.subplots(figsize=(7, 3))
        xs = np.arange(design.shape[0])
        ax.step(xs, design.target, where="mid", label="design", color="#2f6f2f")
        ax.bar(xs, grid, width=0.9, label="built", color="#bf5f3f", alpha=0.7)
        ax.set_xlabel("x")
        ax.set_ylabel("height")
        ax.legend()
    else:
        vmax = max(int(design.target.max()), int(grid.max()), 1)
        fig, axes = plt.subplots(1, 2, figsize=(8, 4))
        for ax, data, title in ((axes[0], design.target, "design"), (axes[1], grid, "built")):
            ax.imshow(data.T, origin="upper", cmap="viridis", vmin=0, vmax=vmax)
            ax.set_title(title)
            ax.set_xticks([])
            ax.set_yticks([])
    fig.suptitle(f"IoU {record.iou:.3f} ({record.done_reason})")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)
