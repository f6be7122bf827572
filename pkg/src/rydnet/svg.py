"""Minimal SVG renderings; the CSV next to each file is the real record."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

_HEAD = '<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">\n'


def _color(t: float) -> str:
    # t in [0, 1] -> dark blue .. yellow
    t = min(max(t, 0.0), 1.0)
    r = int(40 + 215 * t)
    g = int(20 + 200 * t**0.8)
    b = int(110 * (1 - t) + 30)
    return f"#{r:02x}{g:02x}{b:02x}"


def heatmap_svg(grid: np.ndarray, title: str, cell: int = 28) -> str:
    """Log-scaled color grid; row 0 is drawn on top."""
    h, w = grid.shape
    pos = grid[grid > 0]
    lo, hi = (math.log10(pos.min()), math.log10(pos.max())) if pos.size else (0.0, 1.0)
    span = hi - lo or 1.0
    W, H = w * cell + 20, h * cell + 60
    out = [_HEAD.format(w=W, h=H), f'<text x="10" y="16">{title}</text>\n']
    for y in range(h):
        for x in range(w):
            v = grid[y, x]
            fill = "#ffffff" if v <= 0 else _color((math.log10(v) - lo) / span)
            out.append(
                f'<rect x="{10 + x * cell}" y="{26 + y * cell}" width="{cell}" height="{cell}" '
                f'fill="{fill}" stroke="#888" stroke-width="0.5"/>\n'
            )
    out.append(f'<text x="10" y="{H - 14}">log10 loss: {lo:.2f} .. {hi:.2f}</text>\n</svg>\n')
    return "".join(out)


def lines_svg(
    series: Sequence[tuple[Sequence[float], Sequence[float]]],
    title: str,
    xlabel: str,
    ylabel: str,
    marks: Sequence[tuple[float, float]] = (),
    logy: bool = True,
) -> str:
    W, H, m = 560, 380, 50
    xs = np.concatenate([np.asarray(s[0], float) for s in series])
    ys = np.concatenate([np.asarray(s[1], float) for s in series])
    f = (lambda v: math.log10(max(v, 1e-300))) if logy else float
    yv = [f(v) for v in ys]
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = min(yv), max(yv)
    x1 = x1 if x1 > x0 else x0 + 1
    y1 = y1 if y1 > y0 else y0 + 1

    def px(x, y):
        return m + (x - x0) / (x1 - x0) * (W - 2 * m), H - m - (f(y) - y0) / (y1 - y0) * (H - 2 * m)

    out = [_HEAD.format(w=W, h=H), f'<text x="{m}" y="20">{title}</text>\n']
    out.append(f'<rect x="{m}" y="{m}" width="{W - 2 * m}" height="{H - 2 * m}" fill="none" stroke="#000"/>\n')
    out.append(f'<text x="{W // 2}" y="{H - 12}">{xlabel}</text>\n')
    out.append(f'<text x="8" y="{m - 8}">{ylabel}{" (log10)" if logy else ""}</text>\n')
    out.append(f'<text x="{m}" y="{H - m + 14}">{x0:.3g}</text><text x="{W - m - 20}" y="{H - m + 14}">{x1:.3g}</text>\n')
    out.append(f'<text x="4" y="{H - m}">{y0:.3g}</text><text x="4" y="{m + 4}">{y1:.3g}</text>\n')
    n = max(len(series) - 1, 1)
    for i, (sx, sy) in enumerate(series):
        pts = " ".join("{:.2f},{:.2f}".format(*px(a, b)) for a, b in zip(sx, sy))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{_color(i / n)}" stroke-width="1.5"/>\n')
    for a, b in marks:
        cx, cy = px(a, b)
        out.append(f'<path d="M{cx - 4:.2f},{cy - 4:.2f}L{cx + 4:.2f},{cy + 4:.2f}M{cx - 4:.2f},{cy + 4:.2f}L{cx + 4:.2f},{cy - 4:.2f}" stroke="#1f4fd0" stroke-width="1.5"/>\n')
    out.append("</svg>\n")
    return "".join(out)
