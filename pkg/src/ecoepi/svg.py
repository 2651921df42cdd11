"""Minimal SVG line plots: one stacked panel per state component."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 800, 900
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 90, 30, 50, 50
PANEL_GAP = 40
MAX_POINTS = 2000
COLORS = ("#1f77b4", "#d62728", "#2ca02c")


def _num(v: float) -> str:
    return f"{v:.6g}"


def stacked_plot(t, series, names, title: str = "") -> str:
    """SVG document with ``series[i]`` against ``t`` in panel ``i``, top to bottom."""
    t = np.asarray(t, dtype=float)
    series = [np.asarray(s, dtype=float) for s in series]
    if len(t) > MAX_POINTS:
        idx = np.unique(np.linspace(0, len(t) - 1, MAX_POINTS).round().astype(int))
    else:
        idx = np.arange(len(t))
    n = len(series)
    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    panel_h = (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM - (n - 1) * PANEL_GAP) / n
    t0, t1 = float(t[0]), float(t[-1])
    tspan = t1 - t0 if t1 > t0 else 1.0

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2}" y="28" font-family="sans-serif" font-size="16" '
                   f'text-anchor="middle">{escape(title)}</text>')
    for i, (y, name) in enumerate(zip(series, names)):
        top = MARGIN_TOP + i * (panel_h + PANEL_GAP)
        lo, hi = float(np.min(y)), float(np.max(y))
        if hi - lo <= 1e-12 * max(1.0, abs(hi)):
            pad = max(abs(hi) * 0.05, 1e-12)
            lo, hi = lo - pad, hi + pad
        xs = MARGIN_LEFT + (t[idx] - t0) / tspan * plot_w
        ys = top + panel_h - (y[idx] - lo) / (hi - lo) * panel_h
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(xs, ys))
        out += [
            f'<g id="panel-{escape(name)}">',
            f'<rect x="{MARGIN_LEFT}" y="{top:.2f}" width="{plot_w}" height="{panel_h:.2f}" '
            f'fill="none" stroke="black" stroke-width="1"/>',
            f'<polyline fill="none" stroke="{COLORS[i % len(COLORS)]}" stroke-width="1.2" points="{pts}"/>',
            f'<text x="20" y="{top + panel_h / 2:.2f}" font-family="sans-serif" font-size="16">{escape(name)}</text>',
            f'<text x="{MARGIN_LEFT - 6}" y="{top + 10:.2f}" font-family="sans-serif" font-size="11" '
            f'text-anchor="end">{_num(hi)}</text>',
            f'<text x="{MARGIN_LEFT - 6}" y="{top + panel_h:.2f}" font-family="sans-serif" font-size="11" '
            f'text-anchor="end">{_num(lo)}</text>',
            "</g>",
        ]
    base = HEIGHT - MARGIN_BOTTOM + 18
    out += [
        f'<text x="{MARGIN_LEFT}" y="{base}" font-family="sans-serif" font-size="11">{_num(t0)}</text>',
        f'<text x="{WIDTH - MARGIN_RIGHT}" y="{base}" font-family="sans-serif" font-size="11" '
        f'text-anchor="end">{_num(t1)}</text>',
        f'<text x="{MARGIN_LEFT + plot_w / 2}" y="{base + 16}" font-family="sans-serif" font-size="13" '
        f'text-anchor="middle">t</text>',
        "</svg>",
    ]
    return "\n".join(out) + "\n"
