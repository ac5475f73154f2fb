"""Batch figure rendering for the outputs of the infogap command line tool.

No mutual information is computed here.  The renderers consume the sweep CSV
and convergence JSON files exactly as written by ``infogap sweep`` and
``infogap convergence`` and turn them into deterministic PNG figures.
"""

from .errors import MalformedInput
from .frames import (
    ConvergenceSeries,
    SweepFrame,
    load_convergence,
    load_sweep,
)
from .render import (
    build_convergence_figure,
    build_heatmap_figure,
    render_convergence,
    render_heatmap,
)

__all__ = [
    "MalformedInput",
    "ConvergenceSeries",
    "SweepFrame",
    "load_convergence",
    "load_sweep",
    "build_convergence_figure",
    "build_heatmap_figure",
    "render_convergence",
    "render_heatmap",
]
