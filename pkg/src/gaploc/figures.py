"""Figure rendering for the reporting subcommands.

Every report that writes delimited output also drops a PNG next to it;
these helpers own the drawing so the CLI stays declarative. The Agg
backend is forced because the CLI never has a display.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def render_front_png(entries, path: str) -> None:
    """Scatter of the front: distance vs cost, shaded by frequency use."""
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    if entries:
        f1 = [e.objectives.f1 for e in entries]
        f2 = [e.objectives.f2 for e in entries]
        f3 = [e.objectives.f3 for e in entries]
        sc = ax.scatter(f2, f3, c=f1, cmap="viridis", s=60,
                        edgecolors="black", linewidths=0.5, zorder=3)
        fig.colorbar(sc, ax=ax, label="average collection frequency (1/day)")
    ax.set_xlabel("average walking distance (m)")
    ax.set_ylabel("installation cost (m.u.)")
    ax.set_title("non-dominated solutions")
    ax.grid(True, linewidth=0.3, alpha=0.6)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_policy_png(rows, path: str) -> None:
    """Side-by-side bars of the constructive policies.

    ``rows`` holds (policy, average distance, total cost) triples.
    """
    fig, (ax_d, ax_c) = plt.subplots(1, 2, figsize=(7.5, 3.8))
    labels = [r[0] for r in rows]
    xs = range(len(rows))
    ax_d.bar(xs, [r[1] for r in rows], color="#4878a8")
    ax_d.set_xticks(list(xs))
    ax_d.set_xticklabels(labels)
    ax_d.set_ylabel("average walking distance (m)")
    ax_c.bar(xs, [r[2] for r in rows], color="#a85f48")
    ax_c.set_xticks(list(xs))
    ax_c.set_xticklabels(labels)
    ax_c.set_ylabel("installation cost (m.u.)")
    for ax in (ax_d, ax_c):
        ax.grid(True, axis="y", linewidth=0.3, alpha=0.6)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
