"""ASCII and SVG drawings of the capacity curve and selected segments.

A task is drawn as the horizontal segment ``(s, t) x {b}`` at its
bottleneck level, so it touches the curve on its bottleneck edge.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .maze import MazePair
from .model import Instance, format_fraction

SHOW_ALL = frozenset({"capacity-curve", "task-segments", "mtask-segments", "dp-cell-area"})


@dataclass(frozen=True)
class RenderSpec:
    output: str = "ascii"
    show: frozenset = field(default=frozenset({"capacity-curve", "task-segments", "mtask-segments"}))
    width: int = 4  # ascii columns per edge
    height: int = 10  # ascii rows for the largest capacity
    scale: int = 60  # svg pixels per vertex step
    level_px: float = 24.0  # svg pixels per unit of the largest capacity fraction

    def __post_init__(self):
        if self.output not in ("ascii", "svg"):
            raise ValueError(f"unknown output {self.output!r}")
        object.__setattr__(self, "show", frozenset(self.show))
        unknown = self.show - SHOW_ALL
        if unknown:
            raise ValueError(f"unknown show items: {', '.join(sorted(unknown))}")
        if self.width < 1 or self.height < 1:
            raise ValueError("width and height must be positive")


def _split(solution) -> tuple:
    if solution is None:
        return [], []
    if isinstance(solution, MazePair):
        return sorted(solution.tasks), solution.regular_mtasks()
    return sorted(solution), []


def render(inst: Instance, solution=None, spec: Optional[RenderSpec] = None,
           cell_area: Optional[tuple] = None) -> str:
    """Draw ``inst`` with an optional solution (task ids or a maze pair).

    ``cell_area = (first_edge, last_edge, y_low, y_high)`` shades a DP cell
    region in SVG output when ``dp-cell-area`` is shown.
    """
    spec = spec or RenderSpec()
    tasks, mtasks = _split(solution)
    if spec.output == "ascii":
        return render_ascii(inst, tasks, mtasks, spec)
    return render_svg(inst, tasks, mtasks, spec, cell_area)


def _row(value: Fraction, top: Fraction, height: int) -> int:
    r = round(value * height / top)
    return max(1, min(height, r))


def render_ascii(inst: Instance, tasks: Iterable[int], mtasks: Iterable, spec: RenderSpec) -> str:
    """Plateaus as ``#`` columns; tasks as ``-`` runs, m-tasks as ``=`` runs."""
    w, h = spec.width, spec.height
    top = max(inst.capacities)
    m = inst.num_edges
    grid = [[" "] * (m * w) for _ in range(h + 1)]  # row 0 unused
    if "capacity-curve" in spec.show:
        for e in range(1, m + 1):
            for r in range(1, _row(inst.capacity(e), top, h) + 1):
                for c in range((e - 1) * w, e * w):
                    grid[r][c] = "#"

    def draw(s, t, level, ch):
        r = _row(level, top, h)
        for c in range((s - 1) * w, (t - 1) * w):
            grid[r][c] = ch

    if "task-segments" in spec.show:
        for i in tasks:
            t = inst.task(i)
            draw(t.s, t.t, inst.bneck(i).b, "-")
    if "mtask-segments" in spec.show:
        for mt in mtasks:
            draw(mt.s, mt.t, mt.b, "=")
    label = len(str(format_fraction(top)))
    lines = []
    for r in range(h, 0, -1):
        tick = str(format_fraction(top)) if r == h else ""
        lines.append(f"{tick:>{label + 2}} |" + "".join(grid[r]).rstrip())
    lines.append(f"{'0':>{label + 2}} +" + "-" * (m * w))
    lines.append(" " * (label + 2) + "  " + "".join(f"e{e}".ljust(w) for e in range(1, m + 1)).rstrip())
    return "\n".join(lines) + "\n"


def render_svg(inst: Instance, tasks: Iterable[int], mtasks: Iterable, spec: RenderSpec,
               cell_area: Optional[tuple] = None) -> str:
    top = max(inst.capacities)
    px = spec.scale
    plot_h = spec.level_px * 10
    pad = 20
    n = inst.num_vertices
    width = int(pad * 2 + (n - 1) * px)
    height = int(pad * 2 + plot_h)

    def X(x):
        return pad + (x - 1) * px

    def Y(y):
        return pad + plot_h - float(Fraction(y) / top) * plot_h

    svg = ET.Element("svg", xmlns="http://www.w3.org/2000/svg", width=str(width), height=str(height),
                     viewBox=f"0 0 {width} {height}")
    if "capacity-curve" in spec.show:
        # closed curve: the plateaus plus the base segment [1, N] x {0}
        pts = [(1, 0)]
        for e in range(1, inst.num_edges + 1):
            u = inst.capacity(e)
            pts += [(e, u), (e + 1, u)]
        pts.append((n, 0))
        d = "M " + " L ".join(f"{X(x):g} {Y(y):g}" for x, y in pts) + " Z"
        ET.SubElement(svg, "path", {"class": "capacity", "d": d, "fill": "#eef3fb", "stroke": "#20406a",
                                    "stroke-width": "1.5"})
    if "dp-cell-area" in spec.show and cell_area is not None:
        e0, e1, y0, y1 = cell_area
        ET.SubElement(svg, "rect", {"class": "dp-cell", "x": f"{X(e0):g}", "y": f"{Y(y1):g}",
                                    "width": f"{X(e1 + 1) - X(e0):g}", "height": f"{Y(y0) - Y(y1):g}",
                                    "fill": "#f6c343", "fill-opacity": "0.3"})
    # same level coincidences get a small display-only lift
    seen = {}

    def lift(level):
        k = seen.get(level, 0)
        seen[level] = k + 1
        return k * 3

    if "task-segments" in spec.show:
        for i in tasks:
            t = inst.task(i)
            b = inst.bneck(i).b
            y = Y(b) - lift(b)
            ET.SubElement(svg, "line", {"class": "task", "data-task": str(i), "data-s": str(t.s),
                                        "data-t": str(t.t), "data-b": str(format_fraction(b)),
                                        "x1": f"{X(t.s):g}", "x2": f"{X(t.t):g}", "y1": f"{y:g}",
                                        "y2": f"{y:g}", "stroke": "#b03030", "stroke-width": "1.5",
                                        "stroke-dasharray": "5,3"})
    if "mtask-segments" in spec.show:
        for mt in mtasks:
            y = Y(mt.b) - lift(mt.b)
            ET.SubElement(svg, "line", {"class": "mtask", "data-mtask": mt.id, "data-s": str(mt.s),
                                        "data-t": str(mt.t), "data-b": str(format_fraction(mt.b)),
                                        "x1": f"{X(mt.s):g}", "x2": f"{X(mt.t):g}", "y1": f"{y:g}",
                                        "y2": f"{y:g}", "stroke": "#101010", "stroke-width": "4"})
    return ET.tostring(svg, encoding="unicode") + "\n"
