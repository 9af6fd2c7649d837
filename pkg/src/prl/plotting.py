"""Matplotlib figures written next to the JSON/CSV outputs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.patches import Circle  # noqa: E402

from prl.export import stereographic_circle  # noqa: E402

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _save(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # fixed metadata keeps repeated renders byte-stable
    fig.savefig(path, dpi=150, bbox_inches="tight", metadata={"Software": None})
    plt.close(fig)
    return path


def plot_packings(configs: dict, path, title=None):
    """Stereographic overlay of labeled circle configurations."""
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.add_patch(Circle((0, 0), 1.0, fill=False, ls="--", lw=0.6, color="0.7"))
    extent = 1.2
    for k, (name, cfg) in enumerate(configs.items()):
        color = COLORS[k % len(COLORS)]
        for lab, c in zip(cfg.labels, cfg.circles):
            img = stereographic_circle(c)
            if img.kind != "circle":
                continue
            ax.add_patch(Circle(img.center, img.radius, fill=False, lw=1.0, color=color,
                                label=name if lab == cfg.labels[0] else None))
            if k == 0:
                ax.annotate(lab, img.center, ha="center", va="center", fontsize=8)
            extent = max(extent, abs(img.center[0]) + img.radius, abs(img.center[1]) + img.radius)
    ax.set_xlim(-extent, extent)
    ax.set_ylim(-extent, extent)
    ax.set_aspect("equal")
    ax.set_xlabel(r"$x$")
    ax.set_ylabel(r"$y$")
    if title:
        ax.set_title(title)
    ax.legend(loc="upper right", fontsize=8)
    return _save(fig, path)


def plot_gram_difference(report: dict, path):
    """Heat map of the Gram-matrix difference between the two packings."""
    gram = report["gram"]
    diff = np.array(gram["P_t"]) - np.array(gram["P_minus_t"])
    labels = gram["labels"]
    lim = max(float(np.max(np.abs(diff))), 1e-16)
    fig, ax = plt.subplots(figsize=(5, 4.2))
    im = ax.imshow(diff, cmap="RdBu_r", vmin=-lim, vmax=lim)
    ax.set_xticks(range(len(labels)), labels)
    ax.set_yticks(range(len(labels)), labels)
    fig.colorbar(im, ax=ax, fraction=0.046, pad=0.04)
    t = report["params"]["t"]
    ax.set_title(rf"$G(P_t) - G(P_{{-t}})$, $t = {t:g}$", fontsize=10)
    return _save(fig, path)


def plot_sweep(rows: list, path):
    """Diagonal Gram deviation against ``t`` for each ``(a, h)`` that passed."""
    fig, ax = plt.subplots(figsize=(5.5, 4))
    groups = {}
    for r in rows:
        if r.get("gram_diagonal_min_deviation") is not None and r["t"] != 0:
            groups.setdefault((r["a"], r["h"]), []).append((abs(r["t"]), r["gram_diagonal_min_deviation"]))
    for k, ((a, h), pts) in enumerate(sorted(groups.items())):
        pts.sort()
        ts, devs = zip(*pts)
        ax.loglog(ts, devs, "o-", color=COLORS[k % len(COLORS)], label=f"a={a:g}, h={h:g}")
    ax.set_xlabel(r"$|t|$")
    ax.set_ylabel("min diagonal Gram deviation")
    if groups:
        ax.legend(fontsize=8)
    ax.grid(True, which="both", lw=0.3)
    return _save(fig, path)
