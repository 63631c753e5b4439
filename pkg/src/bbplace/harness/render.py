"""SVG drawing of a placement."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from ..netlist import Placement


def render_svg(placement: Placement, out=None, size: int = 800, show_cells: bool = True) -> str:
    """Canvas frame, macros as labelled rectangles, fixed blocks in grey, cells as dots.

    The y axis is flipped so the canvas origin sits bottom-left.  Returns
    the document and writes it to ``out`` when given.
    """
    nl = placement.netlist
    c = nl.canvas
    s = size / max(c.width, c.height)
    W, H = c.width * s, c.height * s
    pad = 10.0

    def X(v):
        return pad + (v - c.x) * s

    def Y(v, h=0.0):
        return pad + H - (v + h - c.y) * s

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W + 2 * pad:.1f}" height="{H + 2 * pad:.1f}" '
        f'viewBox="0 0 {W + 2 * pad:.1f} {H + 2 * pad:.1f}">',
        f'<rect class="canvas" x="{pad:.1f}" y="{pad:.1f}" width="{W:.2f}" height="{H:.2f}" '
        'fill="white" stroke="black" stroke-width="1"/>',
    ]
    is_macro = np.zeros(nl.n_modules, dtype=bool)
    is_macro[nl.macro_ids] = True
    fixed_blocks = np.flatnonzero(nl.fixed & (nl.area > 0) & ~is_macro)
    for m in fixed_blocks:
        parts.append(_rect(X(placement.x[m]), Y(placement.y[m], nl.height[m]), nl.width[m] * s,
                           nl.height[m] * s, "fixed", "#bbbbbb"))
    if show_cells:
        cells = np.flatnonzero(~nl.fixed & ~is_macro)
        r = max(0.5, 0.2 * float(np.sqrt(np.median(nl.area[cells])) * s)) if len(cells) else 0.5
        for m in cells:
            cx = X(placement.x[m] + 0.5 * nl.width[m])
            cy = Y(placement.y[m] + 0.5 * nl.height[m])
            parts.append(f'<circle class="cell" cx="{cx:.2f}" cy="{cy:.2f}" r="{r:.2f}" fill="#4a90d9"/>')
    for m in nl.macro_ids:
        x0, y0 = X(placement.x[m]), Y(placement.y[m], nl.height[m])
        w, h = nl.width[m] * s, nl.height[m] * s
        parts.append(_rect(x0, y0, w, h, "macro", "#e8a33d", opacity=0.6))
        fs = max(4.0, min(12.0, 0.4 * min(w, h)))
        parts.append(f'<text x="{x0 + w / 2:.2f}" y="{y0 + h / 2:.2f}" font-size="{fs:.1f}" '
                     f'text-anchor="middle" dominant-baseline="middle">{int(m)}</text>')
    parts.append("</svg>")
    doc = "\n".join(parts) + "\n"
    if out is not None:
        Path(out).write_text(doc)
    return doc


def _rect(x, y, w, h, cls, fill, opacity=1.0):
    return (f'<rect class="{cls}" x="{x:.2f}" y="{y:.2f}" width="{w:.2f}" height="{h:.2f}" '
            f'fill="{fill}" fill-opacity="{opacity}" stroke="black" stroke-width="0.5"/>')
