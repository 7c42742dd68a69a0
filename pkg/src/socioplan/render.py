"""Deterministic SVG rendering of costmaps, scene footprints, and paths."""

from __future__ import annotations

from typing import Sequence

from .cost_field import Costmap, footprint_of
from .planner import Path
from .scene_graph import SceneGraph

PATH_COLORS = ("#1f6fb4", "#c23728", "#2a8f3c", "#8a4fad", "#b0771c")
PATH_DASHES = ("", "7 4", "2 4", "9 4 2 4", "12 3")


def _heat_color(value: float, vmax: float) -> str:
    # White at cost 1, warm red toward the map maximum.
    t = 0.0 if vmax <= 1.0 else (value - 1.0) / (vmax - 1.0)
    red = 255
    green = int(round(250.0 - 190.0 * t))
    blue = int(round(240.0 - 210.0 * t))
    return f"#{red:02x}{green:02x}{blue:02x}"


def render_svg(
    costmap: Costmap,
    paths: Sequence[Path],
    scene: SceneGraph,
    labels: Sequence[str] | None = None,
    *,
    px_per_m: float = 90.0,
) -> str:
    """Render the costmap as heat cells with object footprints, human
    markers, one dashed polyline per path, and a legend.

    Pure function of its inputs: identical inputs give identical bytes.
    """
    if labels is None:
        labels = [f"path {i + 1}" for i in range(len(paths))]
    if len(labels) != len(paths):
        raise ValueError("need exactly one label per path")

    (xmin, ymin) = costmap.origin
    (xmax, ymax) = costmap.max_xy
    width_px = (xmax - xmin) * px_per_m
    height_px = (ymax - ymin) * px_per_m

    def sx(x: float) -> float:
        return (x - xmin) * px_per_m

    def sy(y: float) -> float:
        return (ymax - y) * px_per_m  # flip: world y up, SVG y down

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width_px:.0f}" '
        f'height="{height_px:.0f}" viewBox="0 0 {width_px:.2f} {height_px:.2f}">',
        f'<rect x="0" y="0" width="{width_px:.2f}" height="{height_px:.2f}" fill="#ffffff"/>',
    ]

    vmax = float(costmap.cells.max())
    cell_px = costmap.resolution * px_per_m
    out.append('<g shape-rendering="crispEdges">')
    for iy in range(costmap.height):
        for ix in range(costmap.width):
            value = costmap.value(ix, iy)
            if value <= 1.0:
                continue  # white background already covers cost-1 cells
            x = sx(xmin + ix * costmap.resolution)
            y = sy(ymin + (iy + 1) * costmap.resolution)
            out.append(
                f'<rect x="{x:.2f}" y="{y:.2f}" width="{cell_px:.2f}" '
                f'height="{cell_px:.2f}" fill="{_heat_color(value, vmax)}"/>'
            )
    out.append("</g>")

    for node in scene:
        rect = footprint_of(node)
        x, y = sx(rect.min_xy[0]), sy(rect.max_xy[1])
        w = (rect.max_xy[0] - rect.min_xy[0]) * px_per_m
        h = (rect.max_xy[1] - rect.min_xy[1]) * px_per_m
        cx, cy = sx(rect.center[0]), sy(rect.center[1])
        if node.is_human:
            r = max(rect.sides) / 2.0 * px_per_m
            out.append(
                f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{r:.2f}" fill="none" '
                f'stroke="#111111" stroke-width="2"/>'
            )
        else:
            out.append(
                f'<rect x="{x:.2f}" y="{y:.2f}" width="{w:.2f}" height="{h:.2f}" '
                f'fill="none" stroke="#333333" stroke-width="1.5"/>'
            )
        out.append(
            f'<text x="{cx:.2f}" y="{cy:.2f}" font-size="11" font-family="sans-serif" '
            f'text-anchor="middle" fill="#111111">{node.tag}</text>'
        )

    for i, path in enumerate(paths):
        color = PATH_COLORS[i % len(PATH_COLORS)]
        dash = PATH_DASHES[i % len(PATH_DASHES)]
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        points = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in path.polyline)
        out.append(
            f'<polyline points="{points}" fill="none" stroke="{color}" '
            f'stroke-width="2.5"{dash_attr}/>'
        )

    if labels:
        box_h = 16.0 * len(labels) + 10.0
        out.append(
            f'<rect x="8" y="8" width="190" height="{box_h:.2f}" fill="#ffffff" '
            f'fill-opacity="0.85" stroke="#555555" stroke-width="0.5"/>'
        )
        for i, label in enumerate(labels):
            color = PATH_COLORS[i % len(PATH_COLORS)]
            dash = PATH_DASHES[i % len(PATH_DASHES)]
            dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
            y = 20.0 + 16.0 * i
            out.append(
                f'<line x1="14" y1="{y:.2f}" x2="44" y2="{y:.2f}" stroke="{color}" '
                f'stroke-width="2.5"{dash_attr}/>'
            )
            out.append(
                f'<text x="50" y="{y + 4:.2f}" font-size="11" '
                f'font-family="sans-serif" fill="#111111">{label}</text>'
            )

    out.append("</svg>")
    return "\n".join(out) + "\n"
