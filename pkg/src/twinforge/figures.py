"""Matplotlib renderings of posets, org structures, assemblies and reports."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Arc  # noqa: E402

from .report import FAIL, INFO, PASS, SKIP, ClauseReport  # noqa: E402

STATUS_COLORS = {PASS: "#3a7d44", FAIL: "#c0392b", SKIP: "#999999", INFO: "#2f6690"}


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def _hasse_edges(T):
    out = []
    for a, b in T.pairs():
        if T.lt(a, b) and not any(T.lt(a, c) and T.lt(c, b) for c in range(T.n)):
            out.append((a, b))
    return out


def plot_poset(T, path, highlight=(), title: str | None = None) -> Path:
    """Hasse diagram, drawn bottom-up by height; ``highlight`` ids are filled."""
    levels: dict[int, list[int]] = {}
    for x in range(T.n):
        levels.setdefault(T.height(x), []).append(x)
    pos = {}
    for h, xs in levels.items():
        for i, x in enumerate(xs):
            pos[x] = (i - (len(xs) - 1) / 2, h)
    fig, ax = plt.subplots(figsize=(max(4, 0.6 * max(len(v) for v in levels.values()) + 2),
                                    1.2 * len(levels) + 1))
    for a, b in _hasse_edges(T):
        ax.plot(*zip(pos[a], pos[b]), color="#555555", lw=1, zorder=1)
    hl = set(highlight)
    for x, (px, py) in pos.items():
        ax.scatter([px], [py], s=220, zorder=2, edgecolors="black",
                   color="#f4a259" if x in hl else "white")
        ax.annotate(str(T.label(x)) or "()", (px, py), ha="center", va="center", fontsize=7, zorder=3)
    ax.set_axis_off()
    if title:
        ax.set_title(title)
    return _save(fig, path)


def plot_org(J, path, marks: dict | None = None, title: str | None = None) -> Path:
    """Elements on a line in order, edges as arcs above, maps as arcs below."""
    x_of = {e: i for i, e in enumerate(J.order)}
    fig, ax = plt.subplots(figsize=(max(5, 0.35 * J.n + 2), 4))
    for a, b in J.edges:
        xa, xb = sorted((x_of[a], x_of[b]))
        ax.add_patch(Arc(((xa + xb) / 2, 0), xb - xa, xb - xa, theta1=0, theta2=180, color="#2f6690", lw=1))
    cmap = plt.get_cmap("tab10")
    for k, (node, m) in enumerate(sorted(J.maps.items(), key=lambda kv: kv[0])):
        for s, t in m.items():
            xa, xb = sorted((x_of[s], x_of[t]))
            ax.add_patch(Arc(((xa + xb) / 2, 0), xb - xa, xb - xa, theta1=180, theta2=360,
                             color=cmap(k % 10), lw=0.8, alpha=0.7))
    marks = marks or {}
    for e, i in x_of.items():
        face = marks.get(e, "black" if e in J.frontier else "white")
        ax.scatter([i], [0], s=40, color=face, edgecolors="black", zorder=3)
    up = max((abs(x_of[a] - x_of[b]) for a, b in J.edges), default=0) / 2
    down = max((abs(x_of[s] - x_of[t]) for _, m in J.maps.items() for s, t in m.items()), default=0) / 2
    ax.set_xlim(-1, max(J.n, 2))
    ax.set_ylim(-down - 0.5, up + 0.5)
    ax.set_aspect("equal")
    ax.set_axis_off()
    if title:
        ax.set_title(title)
    return _save(fig, path)


def plot_assembly(a, path) -> Path:
    """The assembled structure with seeds, odd and even translates marked."""
    marks = {}
    for x in a.X1:
        marks[x] = "#f4a259"
    for x in a.X2:
        marks[x] = "#8cb369"
    for x in a.X:
        marks[x] = "#bc4b51"
    return plot_org(a.J, path, marks, title=f"lam={a.lam}, L={a.L}: seeds red, odd orange, even green")


def plot_report(rep: ClauseReport, path) -> Path:
    """One colored row per clause."""
    n = max(len(rep.clauses), 1)
    fig, ax = plt.subplots(figsize=(7, 0.32 * n + 0.8))
    for i, c in enumerate(rep.clauses):
        y = n - 1 - i
        ax.barh(y, 1, color=STATUS_COLORS.get(c.status, "#cccccc"))
        ax.text(0.02, y, f"{c.status:>4}  {c.name}", va="center", fontsize=8, color="white")
    ax.set_xlim(0, 1)
    ax.set_ylim(-0.5, n - 0.5)
    ax.set_axis_off()
    ax.set_title(rep.title)
    return _save(fig, path)


def plot_game_values(values: dict, path, title: str = "winner by number of moves") -> Path:
    """Bar chart of ``moves -> 1 if ISO wins else 0``."""
    ks = sorted(values)
    fig, ax = plt.subplots(figsize=(5, 3))
    ax.bar(ks, [1 if values[k] else 0 for k in ks],
           color=["#3a7d44" if values[k] else "#c0392b" for k in ks])
    ax.set_yticks([0, 1], ["ANTI", "ISO"])
    ax.set_xlabel("moves")
    ax.set_title(title)
    return _save(fig, path)
