"""Minimal deterministic SVG output for arrangements and rate curves."""

from __future__ import annotations

import math

import numpy as np

_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#555555"]


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def arrangement_svg(arr, centers, outer_radius: float, size: int = 480) -> str:
    """Planar arrangement with its unit circles and the outer circle ``S(0, r)``."""
    if arr.dim != 2:
        raise ValueError("SVG rendering is planar only")
    extent = 1.15 * max(outer_radius, 1.0)
    scale = size / (2 * extent)

    def px(x, y):
        return (size / 2 + x * scale, size / 2 - y * scale)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    cx, cy = px(0, 0)
    parts.append(
        f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(outer_radius * scale)}" '
        'fill="none" stroke="#999" stroke-dasharray="4 3"/>'
    )
    u, d = arr.unit()
    for (a1, a2), off in zip(u, d):
        # point on the line closest to the origin, then run along the tangent
        p = np.array([a1, a2]) * off
        t = np.array([-a2, a1]) * 2 * extent
        x1, y1 = px(*(p - t))
        x2, y2 = px(*(p + t))
        parts.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
            'stroke="black" stroke-width="1.5"/>'
        )
    for c in np.asarray(centers).reshape(-1, 2):
        x, y = px(*c)
        parts.append(
            f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(scale)}" '
            'fill="#1f77b4" fill-opacity="0.15" stroke="black"/>'
        )
        parts.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="2" fill="black"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def rate_plot_svg(curve, width: int = 640, height: int = 420) -> str:
    """Rate versus power, one polyline per strategy."""
    strategies = []
    for e in curve.entries:
        if e.strategy not in strategies:
            strategies.append(e.strategy)
    powers = sorted({e.power_db for e in curve.entries})
    rates = [e.mean_rate_bits for e in curve.entries]
    x0, x1 = powers[0], powers[-1]
    if x1 == x0:
        x1 = x0 + 1
    y1 = max(1.0, math.ceil(max(rates)))
    left, right, top, bottom = 60, 150, 20, 50
    pw, ph = width - left - right, height - top - bottom

    def px(p, r):
        return (left + (p - x0) / (x1 - x0) * pw, top + ph - r / y1 * ph)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
        f'<text x="{left + pw / 2}" y="{height - 12}" text-anchor="middle">P (dB)</text>',
        f'<text x="16" y="{top + ph / 2}" text-anchor="middle" '
        f'transform="rotate(-90 16 {top + ph / 2})">Rate (bpcu)</text>',
    ]
    for p in powers:
        x, _ = px(p, 0)
        parts.append(
            f'<text x="{_fmt(x)}" y="{top + ph + 16}" text-anchor="middle">{p:g}</text>'
        )
    for k in range(int(y1) + 1):
        _, y = px(x0, k)
        parts.append(f'<text x="{left - 8}" y="{_fmt(y + 4)}" text-anchor="end">{k}</text>')
    for i, s in enumerate(strategies):
        color = _COLORS[i % len(_COLORS)]
        pts = sorted((e.power_db, e.mean_rate_bits) for e in curve.entries if e.strategy == s)
        path = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in (px(p, r) for p, r in pts))
        dash = ' stroke-dasharray="6 4"' if s == "unquantized" else ""
        parts.append(
            f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="2"{dash}/>'
        )
        ly = top + 16 + 18 * i
        parts.append(
            f'<line x1="{left + pw + 10}" y1="{ly}" x2="{left + pw + 34}" y2="{ly}" '
            f'stroke="{color}" stroke-width="2"{dash}/>'
        )
        parts.append(f'<text x="{left + pw + 40}" y="{ly + 4}">{s}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
