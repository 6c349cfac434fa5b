"""Minimal self-contained SVG line plots; no external assets, byte-stable."""

from __future__ import annotations

from typing import Sequence

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 60, 20, 34, 44


def _fmt(x: float) -> str:
    return format(x, ".6g")


def line_plot(curves: Sequence[tuple[str, Sequence[tuple[float, float]]]],
              title: str = "", xlabel: str = "t", ylabel: str = "h") -> str:
    """Render labelled curves as one standalone SVG document string."""
    pts = [p for _, c in curves for p in c]
    if not pts:
        xs0, xs1, ys0, ys1 = 0.0, 1.0, 0.0, 1.0
    else:
        xs0 = min(p[0] for p in pts)
        xs1 = max(p[0] for p in pts)
        ys0 = min(p[1] for p in pts)
        ys1 = max(p[1] for p in pts)
    if xs1 == xs0:
        xs1 = xs0 + 1.0
    if ys1 == ys0:
        ys1 = ys0 + 1.0
    pad = 0.05 * (ys1 - ys0)
    ys0, ys1 = ys0 - pad, ys1 + pad
    iw = _W - _ML - _MR
    ih = _H - _MT - _MB

    def px(x: float) -> float:
        return _ML + (x - xs0) / (xs1 - xs0) * iw

    def py(y: float) -> float:
        return _MT + (ys1 - y) / (ys1 - ys0) * ih

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W // 2}" y="20" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{title}</text>',
        f'<rect x="{_ML}" y="{_MT}" width="{iw}" height="{ih}" fill="none" '
        f'stroke="#444" stroke-width="1"/>',
    ]
    nticks = 5
    for k in range(nticks + 1):
        xv = xs0 + k * (xs1 - xs0) / nticks
        yv = ys0 + k * (ys1 - ys0) / nticks
        out.append(f'<line x1="{_fmt(px(xv))}" y1="{_MT + ih}" '
                   f'x2="{_fmt(px(xv))}" y2="{_MT + ih + 4}" stroke="#444"/>')
        out.append(f'<text x="{_fmt(px(xv))}" y="{_MT + ih + 16}" '
                   f'text-anchor="middle" font-family="sans-serif" '
                   f'font-size="10">{_fmt(xv)}</text>')
        out.append(f'<line x1="{_ML - 4}" y1="{_fmt(py(yv))}" x2="{_ML}" '
                   f'y2="{_fmt(py(yv))}" stroke="#444"/>')
        out.append(f'<text x="{_ML - 7}" y="{_fmt(py(yv) + 3)}" '
                   f'text-anchor="end" font-family="sans-serif" '
                   f'font-size="10">{_fmt(yv)}</text>')
    out.append(f'<text x="{_W // 2}" y="{_H - 8}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="12">{xlabel}</text>')
    out.append(f'<text x="14" y="{_MT + ih // 2}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="12" '
               f'transform="rotate(-90 14 {_MT + ih // 2})">{ylabel}</text>')
    if ys0 < 0 < ys1:
        out.append(f'<line x1="{_ML}" y1="{_fmt(py(0))}" x2="{_ML + iw}" '
                   f'y2="{_fmt(py(0))}" stroke="#bbb" stroke-width="1" '
                   f'stroke-dasharray="2,3"/>')
    for idx, (label, curve) in enumerate(curves):
        color = _COLORS[idx % len(_COLORS)]
        if not curve:
            continue
        path = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in curve)
        dash = ' stroke-dasharray="6,3"' if "bound" in label or "predicted" in label else ""
        out.append(f'<polyline points="{path}" fill="none" stroke="{color}" '
                   f'stroke-width="1.6"{dash}/>')
        ly = _MT + 14 + 14 * idx
        out.append(f'<line x1="{_ML + iw - 150}" y1="{ly - 4}" '
                   f'x2="{_ML + iw - 126}" y2="{ly - 4}" stroke="{color}" '
                   f'stroke-width="2"{dash}/>')
        out.append(f'<text x="{_ML + iw - 120}" y="{ly}" '
                   f'font-family="sans-serif" font-size="10">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
