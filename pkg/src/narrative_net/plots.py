"""Static SVG histograms of a metric split by fiction/nonfiction."""

from __future__ import annotations

import math
from typing import Mapping, Sequence
from xml.sax.saxutils import escape

COLORS = {"fiction": "#e69f00", "nonfiction": "#009e73"}

WIDTH, HEIGHT = 640, 400
MARGIN = 50


def bin_counts(values: Sequence[float], lo: float, hi: float, bins: int) -> list[int]:
    counts = [0] * bins
    span = hi - lo
    for v in values:
        idx = bins - 1 if span == 0 else min(int((v - lo) / span * bins), bins - 1)
        counts[idx] += 1
    return counts


def histogram_svg(groups: Mapping[str, Sequence[float]], title: str, bins: int = 30) -> str:
    """Overlaid density outlines over the pooled range, with a dashed line at each group mean."""
    pooled = [v for vals in groups.values() for v in vals]
    if not pooled:
        lo, hi = 0.0, 1.0
    else:
        lo, hi = min(pooled), max(pooled)
    if hi == lo:
        hi = lo + 1.0
    width = (hi - lo) / bins
    densities = {}
    for name, vals in groups.items():
        counts = bin_counts(vals, lo, hi, bins)
        total = len(vals) or 1
        densities[name] = [c / (total * width) for c in counts]
    top = max((d for ds in densities.values() for d in ds), default=1.0) or 1.0

    plot_w, plot_h = WIDTH - 2 * MARGIN, HEIGHT - 2 * MARGIN

    def sx(v):
        return MARGIN + (v - lo) / (hi - lo) * plot_w

    def sy(d):
        return HEIGHT - MARGIN - d / top * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<text x="{WIDTH / 2:.1f}" y="{MARGIN / 2:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{escape(title)}</text>',
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<text x="{MARGIN}" y="{HEIGHT - MARGIN + 16}" font-family="sans-serif" font-size="11">{lo:.4g}</text>',
        f'<text x="{WIDTH - MARGIN}" y="{HEIGHT - MARGIN + 16}" text-anchor="end" '
        f'font-family="sans-serif" font-size="11">{hi:.4g}</text>',
    ]
    for i, (name, ds) in enumerate(densities.items()):
        color = COLORS.get(name, "#555555")
        pts = [(sx(lo), sy(0))]
        for b, d in enumerate(ds):
            x0, x1 = sx(lo + b * width), sx(lo + (b + 1) * width)
            pts += [(x0, sy(d)), (x1, sy(d))]
        pts.append((sx(hi), sy(0)))
        path = " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
        parts.append(f'<polyline class="hist" data-group="{escape(name)}" fill="none" '
                     f'stroke="{color}" stroke-width="1.5" points="{path}"/>')
        vals = groups[name]
        if vals:
            mean = math.fsum(vals) / len(vals)
            x = sx(mean)
            parts.append(f'<line class="mean" data-group="{escape(name)}" data-mean="{mean!r}" '
                         f'x1="{x:.2f}" y1="{MARGIN}" x2="{x:.2f}" y2="{HEIGHT - MARGIN}" '
                         f'stroke="{color}" stroke-dasharray="4 3"/>')
        parts.append(f'<text x="{WIDTH - MARGIN}" y="{MARGIN + 14 * (i + 1)}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="11" fill="{color}">{escape(name)} '
                     f'(n={len(vals)})</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
