"""Chart-image figures for rank-2 lattices.

The SVG writer is exact: the polygon's vertex cycle is embedded as rational
coordinates in path metadata (``data-vertices``), with the drawing itself a
scaled float rendering.  Other formats go through matplotlib.
"""

from __future__ import annotations

import functools
from fractions import Fraction
from typing import Sequence

from .errors import BadParams
from .polytopes import PLPolytope


def _cyclic_order(verts: Sequence[tuple]) -> list[tuple]:
    """Vertices of a convex polygon in counterclockwise cycle, starting from
    the lexicographically smallest; exact arithmetic throughout."""
    pts = sorted({(Fraction(v[0]), Fraction(v[1])) for v in verts})
    if len(pts) <= 2:
        return pts
    cx = sum(p[0] for p in pts) / len(pts)
    cy = sum(p[1] for p in pts) / len(pts)

    def half(p):
        dx, dy = p[0] - cx, p[1] - cy
        return 0 if (dy > 0 or (dy == 0 and dx > 0)) else 1

    def cmp(p, q):
        hp, hq = half(p), half(q)
        if hp != hq:
            return -1 if hp < hq else 1
        cross = (p[0] - cx) * (q[1] - cy) - (p[1] - cy) * (q[0] - cx)
        if cross > 0:
            return -1
        if cross < 0:
            return 1
        return 0

    ordered = sorted(pts, key=functools.cmp_to_key(cmp))
    start = min(range(len(ordered)), key=lambda i: ordered[i])
    return ordered[start:] + ordered[:start]


def _fmt(x: Fraction) -> str:
    f = Fraction(x)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def render_chart_svg(p: PLPolytope, label, path: str, scale: int = 40) -> str:
    """Write an SVG 1.1 figure of one chart image; returns the SVG text.

    The ``data-vertices`` attribute of the polygon carries the exact vertex
    cycle; floats appear only in the visual layer.
    """
    img = p.chart_image(label)
    if img.dim != 2:
        raise BadParams("SVG rendering is for rank-2 chart images")
    cycle = _cyclic_order(img.vertices)
    box = img.bounding_box()
    if box is None:
        lo, hi = [Fraction(0), Fraction(0)], [Fraction(0), Fraction(0)]
    else:
        lo, hi = box
    margin = Fraction(3, 2)
    x0, y0 = lo[0] - margin, lo[1] - margin
    x1, y1 = hi[0] + margin, hi[1] + margin
    width = float((x1 - x0) * scale)
    height = float((y1 - y0) * scale)

    def sx(x):
        return float((Fraction(x) - x0) * scale)

    def sy(y):
        return float((y1 - Fraction(y)) * scale)

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width:.1f}" height="{height:.1f}" '
        f'viewBox="0 0 {width:.1f} {height:.1f}">',
        f'  <!-- chart {label} image -->',
    ]
    import math

    dots = []
    for ix in range(math.ceil(x0), math.floor(x1) + 1):
        for iy in range(math.ceil(y0), math.floor(y1) + 1):
            dots.append(f'    <circle cx="{sx(ix):.1f}" cy="{sy(iy):.1f}" r="1.2" fill="#666"/>')
    parts.append('  <g class="lattice">')
    parts.extend(dots)
    parts.append("  </g>")
    parts.append(
        f'  <line x1="{sx(x0):.1f}" y1="{sy(0):.1f}" x2="{sx(x1):.1f}" y2="{sy(0):.1f}" '
        'stroke="#aaa" stroke-width="1"/>'
    )
    parts.append(
        f'  <line x1="{sx(0):.1f}" y1="{sy(y0):.1f}" x2="{sx(0):.1f}" y2="{sy(y1):.1f}" '
        'stroke="#aaa" stroke-width="1"/>'
    )
    if cycle:
        pts_attr = " ".join(f"{sx(v[0]):.2f},{sy(v[1]):.2f}" for v in cycle)
        exact = " ".join(f"({_fmt(v[0])},{_fmt(v[1])})" for v in cycle)
        parts.append(
            f'  <polygon points="{pts_attr}" data-vertices="{exact}" '
            'fill="#9ecae1" fill-opacity="0.6" stroke="#2a5599" stroke-width="1.5"/>'
        )
    parts.append("</svg>")
    text = "\n".join(parts) + "\n"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return text


def render_chart_mpl(p: PLPolytope, label, path: str):
    """Matplotlib rendering of one chart image (png, pdf, ...)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    img = p.chart_image(label)
    if img.dim != 2:
        raise BadParams("figure rendering is for rank-2 chart images")
    cycle = [(float(x), float(y)) for x, y in _cyclic_order(img.vertices)]
    fig, ax = plt.subplots(figsize=(4, 4))
    box = img.bounding_box()
    lo, hi = box if box else ([Fraction(0)] * 2, [Fraction(0)] * 2)
    pad = 1.5
    xs = range(int(lo[0] - pad), int(hi[0] + pad) + 1)
    ys = range(int(lo[1] - pad), int(hi[1] + pad) + 1)
    ax.plot(
        [x for x in xs for _ in ys],
        [y for _ in xs for y in ys],
        ".",
        color="0.6",
        markersize=2,
    )
    if cycle:
        ax.fill(
            [v[0] for v in cycle],
            [v[1] for v in cycle],
            facecolor="#9ecae1",
            edgecolor="#2a5599",
            alpha=0.7,
        )
    ax.axhline(0, color="0.7", linewidth=0.8)
    ax.axvline(0, color="0.7", linewidth=0.8)
    ax.set_aspect("equal")
    ax.set_title(f"chart {label}")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def render_chart(p: PLPolytope, label, path: str):
    if str(path).lower().endswith(".svg"):
        render_chart_svg(p, label, path)
    else:
        render_chart_mpl(p, label, path)
