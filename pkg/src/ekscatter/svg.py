"""Self-contained SVG rendering of a density histogram with a normal overlay."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

from .stats import HistogramBins

WIDTH, HEIGHT = 720, 440
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 64, 24, 40, 56


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _normal_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def render_histogram_svg(h: HistogramBins, *, title: str = "", xlabel: str = "",
                         curve_points: int = 241) -> str:
    """Bars for ``h.densities()`` plus the standard normal density as a polyline."""
    dens = h.densities()
    lo, hi = h.lo, h.hi
    ymax = max(max(dens, default=0.0), _normal_pdf(0.0)) * 1.08
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def sx(x):
        return MARGIN_L + (x - lo) / (hi - lo) * pw

    def sy(y):
        return MARGIN_T + ph - y / ymax * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="14">'
                   f'{escape(title)}</text>')

    out.append('<g fill="#4c72b0" stroke="#2a3f66" stroke-width="0.5">')
    for left, d in zip(h.edges(), dens):
        if d <= 0:
            continue
        x0, x1 = sx(left), sx(left + h.width)
        y0 = sy(d)
        out.append(f'<rect x="{_fmt(x0)}" y="{_fmt(y0)}" width="{_fmt(x1 - x0)}" '
                   f'height="{_fmt(sy(0) - y0)}"/>')
    out.append("</g>")

    pts = []
    for i in range(curve_points):
        x = lo + (hi - lo) * i / (curve_points - 1)
        pts.append(f"{_fmt(sx(x))},{_fmt(sy(_normal_pdf(x)))}")
    out.append(f'<polyline fill="none" stroke="#c44e52" stroke-width="2" points="{" ".join(pts)}"/>')

    # axes and ticks
    x_axis, y_axis = sy(0), sx(lo)
    out.append(f'<line x1="{_fmt(y_axis)}" y1="{_fmt(x_axis)}" x2="{_fmt(sx(hi))}" '
               f'y2="{_fmt(x_axis)}" stroke="black"/>')
    out.append(f'<line x1="{_fmt(y_axis)}" y1="{_fmt(x_axis)}" x2="{_fmt(y_axis)}" '
               f'y2="{_fmt(MARGIN_T)}" stroke="black"/>')
    for k in range(math.ceil(lo), math.floor(hi) + 1):
        x = sx(k)
        out.append(f'<line x1="{_fmt(x)}" y1="{_fmt(x_axis)}" x2="{_fmt(x)}" '
                   f'y2="{_fmt(x_axis + 5)}" stroke="black"/>')
        out.append(f'<text x="{_fmt(x)}" y="{_fmt(x_axis + 18)}" text-anchor="middle">{k}</text>')
    step = 0.1 if ymax <= 1 else 10 ** math.floor(math.log10(ymax))
    for i in range(int(ymax / step) + 1):
        y = sy(i * step)
        out.append(f'<line x1="{_fmt(y_axis - 5)}" y1="{_fmt(y)}" x2="{_fmt(y_axis)}" '
                   f'y2="{_fmt(y)}" stroke="black"/>')
        out.append(f'<text x="{_fmt(y_axis - 8)}" y="{_fmt(y + 4)}" text-anchor="end">'
                   f'{i * step:.1f}</text>')
    if xlabel:
        out.append(f'<text x="{_fmt(MARGIN_L + pw / 2)}" y="{HEIGHT - 14}" text-anchor="middle">'
                   f'{escape(xlabel)}</text>')
    out.append(f'<text transform="translate(16 {_fmt(MARGIN_T + ph / 2)}) rotate(-90)" '
               f'text-anchor="middle">density</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
