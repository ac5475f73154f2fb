"""Deterministic batch rendering of the sweep and convergence files.

Figures are rasterized through the Agg backend with a fixed dpi and with the
software tag stripped from the PNG metadata, so rendering the same input file
twice with the same pinned library versions yields byte-identical output.

Layout choices, fixed once so reruns cannot drift:

* The gap heatmap uses the ``Greys`` colormap, so darker cells carry a larger
  gap, and every panel is normalized to its own minimum and maximum.
* The small panel restricts both rates to ``[0, 0.1]`` and overlays dashed
  contour lines of the ``contour`` column at five logarithmically spaced
  levels between the smallest and the largest positive value on that panel.
* The full panel shows the whole rate grid without contour lines.
"""

from __future__ import annotations

import numpy as np

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .errors import MalformedInput
from .frames import ConvergenceSeries, SweepFrame, load_convergence, load_sweep

SMALL_PANEL_BOUND = 0.1
CONTOUR_LEVEL_COUNT = 5
PANEL_NAMES = ("both", "small", "full")
_DPI = 150


def _save(fig, out_png):
    try:
        fig.savefig(out_png, dpi=_DPI, metadata={"Software": None})
    finally:
        plt.close(fig)


def _cell_edges(values):
    """Edges of the mesh cells centered on a sorted coordinate array."""
    if values.size == 1:
        half = 0.5 if values[0] == 0 else 0.5 * abs(values[0])
        return np.array([values[0] - half, values[0] + half])
    midpoints = 0.5 * (values[:-1] + values[1:])
    first = values[0] - (midpoints[0] - values[0])
    last = values[-1] + (values[-1] - midpoints[-1])
    return np.concatenate([[first], midpoints, [last]])


def _panel_slice(frame: SweepFrame):
    keep_p0 = frame.p0 <= SMALL_PANEL_BOUND + 1e-12
    keep_p1 = frame.p1 <= SMALL_PANEL_BOUND + 1e-12
    if keep_p0.sum() < 2 or keep_p1.sum() < 2:
        raise MalformedInput(
            "small panel needs at least two grid values at or below "
            f"{SMALL_PANEL_BOUND} on each axis"
        )
    return (
        frame.p0[keep_p0],
        frame.p1[keep_p1],
        frame.delta_q2[np.ix_(keep_p1, keep_p0)],
        frame.contour[np.ix_(keep_p1, keep_p0)],
    )


def _draw_panel(ax, fig, p0, p1, gap, contour, title, with_contours):
    mesh = ax.pcolormesh(
        _cell_edges(p0),
        _cell_edges(p1),
        gap,
        cmap="Greys",
        vmin=gap.min(),
        vmax=gap.max(),
        shading="flat",
        rasterized=False,
    )
    fig.colorbar(mesh, ax=ax, shrink=0.85)
    if with_contours:
        positive = contour[contour > 0]
        if positive.size:
            low, high = positive.min(), positive.max()
            if low == high:
                levels = np.array([low])
            else:
                levels = np.geomspace(low, high, CONTOUR_LEVEL_COUNT)
            ax.contour(
                p0,
                p1,
                contour,
                levels=levels,
                colors="red",
                linestyles="dashed",
                linewidths=0.9,
            )
    ax.set_xlabel("p0")
    ax.set_ylabel("p1")
    ax.set_title(title)
    ax.set_aspect("equal")


def build_heatmap_figure(frame: SweepFrame, panel: str = "both"):
    """Assemble the gap heatmap figure without writing it anywhere.

    ``panel`` selects the small rate window, the full grid, or both side by
    side.  The caller owns the returned figure and should close it.
    """
    if panel not in PANEL_NAMES:
        raise MalformedInput(
            f"unknown panel {panel!r}, expected one of {list(PANEL_NAMES)}"
        )
    small_title = f"rates in [0, {SMALL_PANEL_BOUND:g}], epsilon = {frame.epsilon:g}"
    full_title = f"full rate grid, epsilon = {frame.epsilon:g}"
    if panel == "both":
        fig, (ax_small, ax_full) = plt.subplots(
            1, 2, figsize=(11.0, 4.6), layout="constrained"
        )
    else:
        fig, ax = plt.subplots(figsize=(5.6, 4.6), layout="constrained")
    fig.suptitle("gap between repeated-signal and paired-signal information")
    if panel in ("both", "small"):
        target = ax_small if panel == "both" else ax
        p0, p1, gap, contour = _panel_slice(frame)
        _draw_panel(target, fig, p0, p1, gap, contour, small_title, True)
    if panel in ("both", "full"):
        target = ax_full if panel == "both" else ax
        _draw_panel(
            target,
            fig,
            frame.p0,
            frame.p1,
            frame.delta_q2,
            frame.contour,
            full_title,
            False,
        )
    return fig


def render_heatmap(csv_path, out_png, panel: str = "both"):
    """Render the sweep CSV at ``csv_path`` to a PNG heatmap figure."""
    frame = load_sweep(csv_path)
    _save(build_heatmap_figure(frame, panel), out_png)


def build_convergence_figure(series: ConvergenceSeries):
    """Assemble the log-log convergence figure without writing it anywhere."""
    fig, ax = plt.subplots(figsize=(6.2, 4.6), layout="constrained")
    ax.loglog(
        series.epsilon,
        series.epsilon_rel_error,
        marker="o",
        color="tab:blue",
        label="signal strength series",
    )
    ax.loglog(
        1.0 / series.system_size,
        series.size_rel_error,
        marker="s",
        color="tab:orange",
        label="system size series (1 / n)",
    )
    ax.set_xlabel("epsilon or 1 / n")
    ax.set_ylabel("relative error of the limit value")
    ax.set_title("approach to the small-signal limit")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    return fig


def render_convergence(json_path, out_png):
    """Render the convergence JSON at ``json_path`` to a PNG figure."""
    series = load_convergence(json_path)
    _save(build_convergence_figure(series), out_png)
