"""Minimal deterministic SVG line plots (no plotting library)."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 800, 600
MARGIN = dict(left=90, right=160, top=40, bottom=60)
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


def _ticks(lo, hi, count=5):
    if hi <= lo:
        return [lo]
    return list(np.linspace(lo, hi, count))


def _fmt(v):
    return f"{v:.4g}"


def _segments(px, py):
    """Split a polyline wherever a coordinate is not finite."""
    ok = np.isfinite(px) & np.isfinite(py)
    seg = []
    for a, b, good in zip(px, py, ok):
        if good:
            seg.append(f"{a:.2f},{b:.2f}")
        elif seg:
            yield seg
            seg = []
    if seg:
        yield seg


def line_plot(x, series, title="", xlabel="x", ylabel=""):
    """Return SVG text plotting each ``(label, y)`` in ``series`` against x."""
    x = np.asarray(x, dtype=float)
    ys = [np.asarray(y, dtype=float) for _, y in series]
    finite = np.concatenate([y[np.isfinite(y)] for y in ys] + [np.zeros(0)])
    ylo, yhi = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    if yhi == ylo:
        ylo, yhi = ylo - 1.0, yhi + 1.0
    xlo, xhi = float(np.nanmin(x)), float(np.nanmax(x))
    if xhi == xlo:
        xlo, xhi = xlo - 1.0, xhi + 1.0
    L, R, T, B = MARGIN["left"], WIDTH - MARGIN["right"], MARGIN["top"], HEIGHT - MARGIN["bottom"]

    def sx(v):
        return L + (v - xlo) / (xhi - xlo) * (R - L)

    def sy(v):
        return B - (v - ylo) / (yhi - ylo) * (B - T)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.0f}" y="24" text-anchor="middle" font-family="sans-serif" '
        f'font-size="16">{escape(title)}</text>',
        f'<rect x="{L}" y="{T}" width="{R - L}" height="{B - T}" fill="none" stroke="black"/>',
    ]
    for v in _ticks(xlo, xhi):
        X = sx(v)
        out.append(f'<line x1="{X:.2f}" y1="{B}" x2="{X:.2f}" y2="{B + 5}" stroke="black"/>')
        out.append(f'<text x="{X:.2f}" y="{B + 20}" text-anchor="middle" font-family="sans-serif" '
                   f'font-size="12">{_fmt(v)}</text>')
    for v in _ticks(ylo, yhi):
        Y = sy(v)
        out.append(f'<line x1="{L - 5}" y1="{Y:.2f}" x2="{L}" y2="{Y:.2f}" stroke="black"/>')
        out.append(f'<text x="{L - 8}" y="{Y + 4:.2f}" text-anchor="end" font-family="sans-serif" '
                   f'font-size="12">{_fmt(v)}</text>')
    out.append(f'<text x="{(L + R) / 2:.0f}" y="{HEIGHT - 18}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="14">{escape(xlabel)}</text>')
    out.append(f'<text x="20" y="{(T + B) / 2:.0f}" text-anchor="middle" font-family="sans-serif" '
               f'font-size="14" transform="rotate(-90 20 {(T + B) / 2:.0f})">{escape(ylabel)}</text>')
    px = sx(x)
    for idx, ((label, _), y) in enumerate(zip(series, ys)):
        color = PALETTE[idx % len(PALETTE)]
        for seg in _segments(px, sy(y)):
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{" ".join(seg)}"/>')
        ly = T + 20 + 22 * idx
        out.append(f'<line x1="{R + 15}" y1="{ly}" x2="{R + 45}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{R + 52}" y="{ly + 4}" font-family="sans-serif" font-size="13">'
                   f'{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
