"""Dependency-free SVG plots of sweep results.

One chart per sweep axis: probe accuracy vs the axis value, one series per
loss, point markers at the mean over repeats and vertical bars spanning
min..max. Output is plain text with fixed number formatting, so a given
results CSV always renders to byte-identical SVG.
"""

import math
from collections import defaultdict

_W, _H = 640, 440
_ML, _MR, _MT, _MB = 70, 30, 40, 60
_COLORS = {"barlow_twins": "#1f77b4", "hsic_ssl": "#d62728"}


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _series(records, axis: str):
    """(loss, axis value) -> (mean, lo, hi); only status == ok rows count."""
    groups = defaultdict(list)
    for rec in records:
        if rec.status != "ok" or math.isnan(rec.accuracy):
            continue
        groups[(rec.config.loss, getattr(rec.config, axis))].append(rec.accuracy)
    series = defaultdict(dict)
    for (loss, value), accs in groups.items():
        series[loss][value] = (sum(accs) / len(accs), min(accs), max(accs))
    return series


def render_sweep_svg(records, axis: str) -> str:
    series = _series(records, axis)
    values = sorted({v for pts in series.values() for v in pts})
    if not values:
        raise ValueError("no successful runs to plot")

    lo = min(p[1] for pts in series.values() for p in pts.values())
    hi = max(p[2] for pts in series.values() for p in pts.values())
    y_min = max(0.0, math.floor((lo - 0.02) * 20) / 20)
    y_max = min(1.0, math.ceil((hi + 0.02) * 20) / 20)
    if y_max - y_min < 0.1:
        y_min = max(0.0, y_max - 0.1)

    px_w = _W - _ML - _MR
    px_h = _H - _MT - _MB

    def x_at(i: int) -> float:
        if len(values) == 1:
            return _ML + px_w / 2
        return _ML + px_w * i / (len(values) - 1)

    def y_at(acc: float) -> float:
        return _MT + px_h * (1.0 - (acc - y_min) / (y_max - y_min))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.0f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">'
        f'linear-probe accuracy vs {axis}</text>',
    ]

    # y grid and labels
    ticks = int(round((y_max - y_min) / 0.05))
    for t in range(ticks + 1):
        acc = y_min + 0.05 * t
        y = y_at(acc)
        parts.append(f'<line x1="{_ML}" y1="{y:.1f}" x2="{_W - _MR}" '
                     f'y2="{y:.1f}" stroke="#dddddd" stroke-width="1"/>')
        parts.append(f'<text x="{_ML - 8}" y="{y + 4:.1f}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="11">{_fmt(acc)}</text>')

    # x labels
    for i, v in enumerate(values):
        x = x_at(i)
        parts.append(f'<text x="{x:.1f}" y="{_H - _MB + 20}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="11">{v}</text>')
    parts.append(f'<text x="{_ML + px_w / 2:.0f}" y="{_H - 14}" '
                 f'text-anchor="middle" font-family="sans-serif" '
                 f'font-size="13">{axis}</text>')

    # axes
    parts.append(f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_H - _MB}" '
                 f'stroke="black" stroke-width="1"/>')
    parts.append(f'<line x1="{_ML}" y1="{_H - _MB}" x2="{_W - _MR}" '
                 f'y2="{_H - _MB}" stroke="black" stroke-width="1"/>')

    # series: error bars, polyline, markers
    for loss in sorted(series):
        color = _COLORS.get(loss, "#2ca02c")
        pts = series[loss]
        coords = []
        for i, v in enumerate(values):
            if v not in pts:
                continue
            mean, lo_v, hi_v = pts[v]
            x, y = x_at(i), y_at(mean)
            coords.append((x, y))
            parts.append(f'<line x1="{x:.1f}" y1="{y_at(lo_v):.1f}" x2="{x:.1f}" '
                         f'y2="{y_at(hi_v):.1f}" stroke="{color}" stroke-width="1.5"/>')
            for yy in (y_at(lo_v), y_at(hi_v)):
                parts.append(f'<line x1="{x - 4:.1f}" y1="{yy:.1f}" x2="{x + 4:.1f}" '
                             f'y2="{yy:.1f}" stroke="{color}" stroke-width="1.5"/>')
        path = " ".join(f"{x:.1f},{y:.1f}" for x, y in coords)
        parts.append(f'<polyline points="{path}" fill="none" stroke="{color}" '
                     f'stroke-width="2"/>')
        for x, y in coords:
            parts.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="3.5" fill="{color}"/>')

    # legend
    for idx, loss in enumerate(sorted(series)):
        color = _COLORS.get(loss, "#2ca02c")
        y = _MT + 10 + 18 * idx
        parts.append(f'<line x1="{_W - _MR - 150}" y1="{y}" x2="{_W - _MR - 120}" '
                     f'y2="{y}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{_W - _MR - 112}" y="{y + 4}" '
                     f'font-family="sans-serif" font-size="12">{loss}</text>')

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_sweep_svg(records, axis: str, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_sweep_svg(records, axis))
