"""Minimal deterministic SVG line charts (axes, ticks, legend, point markers)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#000000", "#9467bd", "#ff7f0e")

WIDTH, HEIGHT = 640, 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 40, 60


@dataclass
class Series:
    label: str
    x: list
    y: list
    color: str | None = None
    dash: str | None = None


@dataclass
class Marker:
    x: float
    y: float
    label: str = ""
    color: str | None = None


@dataclass
class Chart:
    title: str
    xlabel: str
    ylabel: str
    series: list = field(default_factory=list)
    markers: list = field(default_factory=list)
    xlim: tuple | None = None
    ylim: tuple | None = None


def _finite(v):
    return v is not None and math.isfinite(v)


def _limits(values, given):
    if given is not None:
        return given
    vals = [v for v in values if _finite(v)]
    if not vals:
        return (0.0, 1.0)
    lo, hi = min(vals), max(vals)
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    return (lo, hi)


def _ticks(lo, hi, n=5):
    return [lo + (hi - lo) * k / n for k in range(n + 1)]


def _fmt(v):
    return f"{v:.2f}"


def render(chart):
    xs = [v for s in chart.series for v in s.x] + [m.x for m in chart.markers]
    ys = [v for s in chart.series for v in s.y] + [m.y for m in chart.markers]
    x0, x1 = _limits(xs, chart.xlim)
    y0, y1 = _limits(ys, chart.ylim)
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def px(v):
        return MARGIN_L + (v - x0) / (x1 - x0) * pw

    def py(v):
        return MARGIN_T + ph - (v - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="24" text-anchor="middle" font-family="sans-serif" '
        f'font-size="16">{escape(chart.title)}</text>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        x = px(t)
        out.append(f'<line x1="{_fmt(x)}" y1="{MARGIN_T + ph}" x2="{_fmt(x)}" y2="{MARGIN_T + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{_fmt(x)}" y="{MARGIN_T + ph + 20}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="11">{t:.3g}</text>')
    for t in _ticks(y0, y1):
        y = py(t)
        out.append(f'<line x1="{MARGIN_L - 5}" y1="{_fmt(y)}" x2="{MARGIN_L}" y2="{_fmt(y)}" stroke="black"/>')
        out.append(f'<text x="{MARGIN_L - 8}" y="{_fmt(y + 4)}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11">{t:.3g}</text>')
    out.append(f'<text x="{MARGIN_L + pw / 2:.1f}" y="{HEIGHT - 15}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="13">{escape(chart.xlabel)}</text>')
    out.append(f'<text x="18" y="{MARGIN_T + ph / 2:.1f}" text-anchor="middle" font-family="sans-serif" '
               f'font-size="13" transform="rotate(-90 18 {MARGIN_T + ph / 2:.1f})">{escape(chart.ylabel)}</text>')

    for i, s in enumerate(chart.series):
        color = s.color or PALETTE[i % len(PALETTE)]
        dash = f' stroke-dasharray="{s.dash}"' if s.dash else ""
        run = []
        for x, y in list(zip(s.x, s.y)) + [(None, None)]:
            if _finite(x) and _finite(y):
                run.append(f"{_fmt(px(x))},{_fmt(py(y))}")
                continue
            if len(run) > 1:
                out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} '
                           f'points="{" ".join(run)}"/>')
            run = []
        ly = MARGIN_T + 15 + 16 * i
        lx = MARGIN_L + pw - 150
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 25}" y2="{ly}" stroke="{color}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{lx + 30}" y="{ly + 4}" font-family="sans-serif" font-size="11">{escape(s.label)}</text>')

    for j, m in enumerate(chart.markers):
        if not (_finite(m.x) and _finite(m.y)):
            continue
        color = m.color or PALETTE[j % len(PALETTE)]
        out.append(f'<circle cx="{_fmt(px(m.x))}" cy="{_fmt(py(m.y))}" r="4.5" fill="{color}" stroke="black"/>')
        if m.label:
            out.append(f'<text x="{_fmt(px(m.x) + 7)}" y="{_fmt(py(m.y) - 7)}" font-family="sans-serif" '
                       f'font-size="11">{escape(m.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
