"""Minimal static SVG line charts (no plotting dependency)."""

from __future__ import annotations

import math

__all__ = ["line_chart"]

_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if not math.isfinite(lo) or not math.isfinite(hi) or lo == hi:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def line_chart(
    series: list[tuple[str, list[float], list[float]]],
    path: str,
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    loglog: bool = False,
    width: int = 640,
    height: int = 440,
) -> None:
    """Write a simple SVG with one polyline per (label, xs, ys) series."""

    def tx(v: float) -> float:
        return math.log10(v) if loglog else v

    pts = [(tx(x), tx(y)) for _, xs, ys in series for x, y in zip(xs, ys)]
    if not pts:
        raise ValueError("nothing to plot")
    xs_all = [p[0] for p in pts]
    ys_all = [p[1] for p in pts]
    x0, x1 = min(xs_all), max(xs_all)
    y0, y1 = min(ys_all), max(ys_all)
    if x0 == x1:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y0 == y1:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 60
    pw, ph = width - 2 * pad, height - 2 * pad

    def sx(v: float) -> float:
        return pad + (v - x0) / (x1 - x0) * pw

    def sy(v: float) -> float:
        return height - pad - (v - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="monospace" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{pad}" y="{pad}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>',
    ]
    for v in _ticks(x0, x1):
        x = sx(v)
        label = f"{10**v:.3g}" if loglog else f"{v:.3g}"
        out.append(f'<line x1="{x:.1f}" y1="{height-pad}" x2="{x:.1f}" y2="{height-pad+5}" stroke="#333"/>')
        out.append(f'<text x="{x:.1f}" y="{height-pad+18}" text-anchor="middle">{label}</text>')
    for v in _ticks(y0, y1):
        y = sy(v)
        label = f"{10**v:.3g}" if loglog else f"{v:.3g}"
        out.append(f'<line x1="{pad-5}" y1="{y:.1f}" x2="{pad}" y2="{y:.1f}" stroke="#333"/>')
        out.append(f'<text x="{pad-8}" y="{y+4:.1f}" text-anchor="end">{label}</text>')
    if title:
        out.append(f'<text x="{width/2}" y="20" text-anchor="middle" font-size="14">{title}</text>')
    if xlabel:
        out.append(f'<text x="{width/2}" y="{height-8}" text-anchor="middle">{xlabel}</text>')
    if ylabel:
        out.append(
            f'<text x="14" y="{height/2}" text-anchor="middle" transform="rotate(-90 14 {height/2})">{ylabel}</text>'
        )
    for i, (label, xs, ys) in enumerate(series):
        color = _COLORS[i % len(_COLORS)]
        path_pts = " ".join(f"{sx(tx(x)):.1f},{sy(tx(y)):.1f}" for x, y in zip(xs, ys))
        out.append(f'<polyline points="{path_pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for x, y in zip(xs, ys):
            out.append(f'<circle cx="{sx(tx(x)):.1f}" cy="{sy(tx(y)):.1f}" r="3" fill="{color}"/>')
        out.append(f'<text x="{width-pad-4}" y="{pad+14+14*i}" text-anchor="end" fill="{color}">{label}</text>')
    out.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out))
