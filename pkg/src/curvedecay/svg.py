"""Minimal hand-emitted SVG line plots (no plotting dependency).

Two uses: the exponent polyline in (1/q, sigma) axes and log-log decay
fits in (log2 R, log2 G) axes.  Output is deterministic for given data.
"""

from __future__ import annotations

import math

_W, _H = 640, 440
_ML, _MR, _MT, _MB = 64, 20, 36, 52
_COLORS = ["#1f5fa8", "#c23b22", "#2e7d32", "#7b1fa2", "#e65100", "#455a64"]


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _ticks(lo: float, hi: float, n: int = 6):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-12 * step:
        out.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return out


class LinePlot:
    """Collect (x, y) series and render one SVG string."""

    def __init__(self, title: str, xlabel: str, ylabel: str):
        self.title, self.xlabel, self.ylabel = title, xlabel, ylabel
        self.series: list = []

    def add(self, label: str, xs, ys, marker: bool = False,
            dashed: bool = False):
        pts = [(float(x), float(y)) for x, y in zip(xs, ys)]
        self.series.append((label, pts, marker, dashed))

    def render(self) -> str:
        allx = [p[0] for _, pts, _, _ in self.series for p in pts]
        ally = [p[1] for _, pts, _, _ in self.series for p in pts]
        if not allx:
            allx, ally = [0.0, 1.0], [0.0, 1.0]
        x0, x1 = min(allx), max(allx)
        y0, y1 = min(ally), max(ally)
        padx = 0.05 * (x1 - x0 or 1.0)
        pady = 0.08 * (y1 - y0 or 1.0)
        x0, x1, y0, y1 = x0 - padx, x1 + padx, y0 - pady, y1 + pady
        iw, ih = _W - _ML - _MR, _H - _MT - _MB

        def X(x):
            return _ML + (x - x0) / (x1 - x0) * iw

        def Y(y):
            return _MT + (y1 - y) / (y1 - y0) * ih

        out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" '
               f'height="{_H}" viewBox="0 0 {_W} {_H}">',
               f'<rect width="{_W}" height="{_H}" fill="white"/>',
               f'<text x="{_W/2:.0f}" y="22" text-anchor="middle" '
               f'font-family="sans-serif" font-size="15">{self.title}</text>']
        # axes box and ticks
        out.append(f'<rect x="{_ML}" y="{_MT}" width="{iw}" height="{ih}" '
                   'fill="none" stroke="#333" stroke-width="1"/>')
        for t in _ticks(x0, x1):
            out.append(f'<line x1="{X(t):.1f}" y1="{_MT+ih}" x2="{X(t):.1f}" '
                       f'y2="{_MT+ih+5}" stroke="#333"/>')
            out.append(f'<text x="{X(t):.1f}" y="{_MT+ih+19}" '
                       'text-anchor="middle" font-family="sans-serif" '
                       f'font-size="11">{_fmt(t)}</text>')
        for t in _ticks(y0, y1):
            out.append(f'<line x1="{_ML-5}" y1="{Y(t):.1f}" x2="{_ML}" '
                       f'y2="{Y(t):.1f}" stroke="#333"/>')
            out.append(f'<text x="{_ML-8}" y="{Y(t):.1f}" text-anchor="end" '
                       'dominant-baseline="middle" font-family="sans-serif" '
                       f'font-size="11">{_fmt(t)}</text>')
        out.append(f'<text x="{_ML+iw/2:.0f}" y="{_H-12}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="13">{self.xlabel}</text>')
        out.append(f'<text x="16" y="{_MT+ih/2:.0f}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="13" '
                   f'transform="rotate(-90 16 {_MT+ih/2:.0f})">{self.ylabel}</text>')

        for i, (label, pts, marker, dashed) in enumerate(self.series):
            color = _COLORS[i % len(_COLORS)]
            path = " ".join(f"{'M' if j == 0 else 'L'}{X(x):.2f},{Y(y):.2f}"
                            for j, (x, y) in enumerate(pts))
            dash = ' stroke-dasharray="6 4"' if dashed else ""
            out.append(f'<path d="{path}" fill="none" stroke="{color}" '
                       f'stroke-width="1.6"{dash}/>')
            if marker:
                for x, y in pts:
                    out.append(f'<circle cx="{X(x):.2f}" cy="{Y(y):.2f}" '
                               f'r="3" fill="{color}"/>')
            ly = _MT + 16 + 16 * i
            out.append(f'<line x1="{_ML+iw-130}" y1="{ly-4}" '
                       f'x2="{_ML+iw-106}" y2="{ly-4}" stroke="{color}" '
                       f'stroke-width="1.6"{dash}/>')
            out.append(f'<text x="{_ML+iw-100}" y="{ly}" '
                       f'font-family="sans-serif" font-size="11">{label}</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"
