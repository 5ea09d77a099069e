"""SVG drawings of periodic spin patterns."""

from __future__ import annotations

import itertools
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .cells import UnitCell
from .lattice import Lattice
from .model import as_spins

UP_COLOR = "#1f5fbf"
DOWN_COLOR = "#d03030"
CELL_FILL = "#999999"


def render_pattern(
    lattice: Lattice,
    cell: UnitCell,
    config: Sequence[int],
    tiling: tuple[int, int] = (3, 3),
    title: str | None = None,
) -> str:
    """Tile the pattern ``tiling[0] x tiling[1]`` times; the first copy of the cell is shaded.

    Blue circles are spins +1, red circles spins -1. Coordinates inside the
    drawing are lattice units (y axis pointing up).
    """
    spins = as_spins(config, cell.K)
    n1, n2 = tiling
    T1, T2 = np.array(cell.T1), np.array(cell.T2)
    pos = cell.positions
    points = []
    for a, b in itertools.product(range(n1), range(n2)):
        shift = a * T1 + b * T2
        points.extend((p + shift, int(s)) for p, s in zip(pos, spins))
    xy = np.array([p for p, _ in points])
    if len(xy) > 1:
        diff = xy[:, None, :] - xy[None, :, :]
        dist = np.sqrt((diff ** 2).sum(-1))
        nn = float(dist[dist > 1e-9].min())
    else:
        nn = float(min(np.linalg.norm(T1), np.linalg.norm(T2)))
    radius = 0.3 * nn

    corners = np.array([[0.0, 0.0], T1, T1 + T2, T2])
    everything = np.vstack([xy, corners])
    lo = everything.min(axis=0) - 2 * radius
    hi = everything.max(axis=0) + 2 * radius
    width, height = hi - lo

    def fmt(v: float) -> str:
        return f"{v:.6g}"

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{fmt(lo[0])} {fmt(-hi[1])} {fmt(width)} {fmt(height)}" '
        f'width="{fmt(80 * width)}" height="{fmt(80 * height)}">',
    ]
    if title:
        lines.append(f"<title>{escape(title)}</title>")
    lines.append('<g transform="scale(1,-1)">')
    poly = " ".join(f"{fmt(x)},{fmt(y)}" for x, y in corners)
    lines.append(f'<polygon class="unit-cell" points="{poly}" fill="{CELL_FILL}" fill-opacity="0.3" stroke="none"/>')
    for p, s in points:
        cls, color = ("spin-up", UP_COLOR) if s > 0 else ("spin-down", DOWN_COLOR)
        lines.append(
            f'<circle class="{cls}" cx="{fmt(p[0])}" cy="{fmt(p[1])}" r="{fmt(radius)}" fill="{color}" '
            f'stroke="black" stroke-width="{fmt(0.05 * radius)}"/>'
        )
    lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
