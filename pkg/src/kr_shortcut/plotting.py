"""Figures for the ``report`` command.  Rendering is file-only (Agg)."""
from __future__ import annotations

from collections import Counter
from typing import Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def plot_cost_vs_distance(rows: Sequence[Tuple[int, int, float, Optional[int]]],
                          delta: float, r: int, path: str) -> None:
    """Scatter of cost(P) against dist(u, v), with the short-path threshold."""
    xs = [d for _, _, d, c in rows if c is not None]
    ys = [c for _, _, d, c in rows if c is not None]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.scatter(xs, ys, s=8, alpha=0.5)
    ax.axvline(delta / r, color="tab:red", ls="--", lw=1, label="delta / r")
    ax.axvline(delta, color="tab:gray", ls=":", lw=1, label="delta")
    ax.set_xlabel("dist(u, v)")
    ax.set_ylabel("cost(P)")
    ax.legend(loc="upper left")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_sizes(supernode_sizes: Sequence[int], cluster_sizes: Sequence[int], path: str) -> None:
    fig, axes = plt.subplots(1, 2, figsize=(8, 3.5))
    for ax, sizes, title in ((axes[0], supernode_sizes, "supernodes"),
                             (axes[1], cluster_sizes, "clusters")):
        cnt = Counter(sizes)
        keys = sorted(cnt)
        ax.bar([str(k) for k in keys] if len(keys) <= 30 else keys, [cnt[k] for k in keys])
        ax.set_title(f"{title} ({len(sizes)})")
        ax.set_xlabel("vertices")
        ax.set_ylabel("count")
        if len(keys) > 30:
            ax.set_xscale("log")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
