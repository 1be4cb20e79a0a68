"""Minimal self-contained SVG panels with deterministic output bytes."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 720, 440
LEFT, RIGHT, TOP, BOTTOM = 80, 20, 40, 60


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick(v: float) -> str:
    return "0" if v == 0 else f"{v:.3g}"


class _Frame:
    def __init__(self, xlim, ylim):
        self.x0, self.x1 = map(float, xlim)
        self.y0, self.y1 = map(float, ylim)
        if self.x1 == self.x0:
            self.x1 = self.x0 + 1.0
        if self.y1 == self.y0:
            self.y1 = self.y0 + 1.0
        self.pw = WIDTH - LEFT - RIGHT
        self.ph = HEIGHT - TOP - BOTTOM

    def px(self, x):
        return LEFT + (np.asarray(x, float) - self.x0) / (self.x1 - self.x0) * self.pw

    def py(self, y):
        return TOP + self.ph - (np.asarray(y, float) - self.y0) / (self.y1 - self.y0) * self.ph


def _document(frame: _Frame, body: list[str], title: str, xlabel: str, ylabel: str) -> str:
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
    ]
    out += body
    bx, by = LEFT, TOP + frame.ph
    out.append(f'<rect x="{LEFT}" y="{TOP}" width="{frame.pw}" height="{frame.ph}" '
               f'fill="none" stroke="black"/>')
    for v in np.linspace(frame.x0, frame.x1, 5):
        x = _fmt(float(frame.px(v)))
        out.append(f'<line x1="{x}" y1="{by}" x2="{x}" y2="{by + 5}" stroke="black"/>')
        out.append(f'<text x="{x}" y="{by + 18}" text-anchor="middle">{_tick(float(v))}</text>')
    for v in np.linspace(frame.y0, frame.y1, 5):
        y = _fmt(float(frame.py(v)))
        out.append(f'<line x1="{bx - 5}" y1="{y}" x2="{bx}" y2="{y}" stroke="black"/>')
        out.append(f'<text x="{bx - 8}" y="{y}" text-anchor="end" '
                   f'dominant-baseline="middle">{_tick(float(v))}</text>')
    out.append(f'<text x="{LEFT + frame.pw / 2}" y="{HEIGHT - 15}" '
               f'text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="18" y="{TOP + frame.ph / 2}" text-anchor="middle" '
               f'transform="rotate(-90 18 {TOP + frame.ph / 2})">{escape(ylabel)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def histogram_svg(edges, counts, expected=None, title="", xlabel="screen position y (m)",
                  ylabel="number of hits") -> str:
    edges = np.asarray(edges, float)
    counts = np.asarray(counts, float)
    top = max(counts.max(initial=0.0), 0.0 if expected is None else float(np.max(expected)))
    frame = _Frame((edges[0], edges[-1]), (0.0, 1.05 * top if top > 0 else 1.0))
    body = []
    xs = frame.px(edges)
    base = float(frame.py(0.0))
    for i, c in enumerate(counts):
        y = float(frame.py(c))
        body.append(f'<rect x="{_fmt(xs[i])}" y="{_fmt(y)}" width="{_fmt(xs[i + 1] - xs[i])}" '
                    f'height="{_fmt(base - y)}" fill="#4a7ab5" stroke="none"/>')
    if expected is not None:
        pts = []
        for i, e in enumerate(np.asarray(expected, float)):
            y = _fmt(float(frame.py(e)))
            pts += [f"{_fmt(xs[i])},{y}", f"{_fmt(xs[i + 1])},{y}"]
        body.append(f'<polyline points="{" ".join(pts)}" fill="none" stroke="#c0392b" '
                    f'stroke-width="1.2"/>')
    return _document(frame, body, title, xlabel, ylabel)


def curve_svg(x, y, title="", xlabel="scattering angle theta (rad)",
              ylabel="|psi(theta)|^2 (1/rad)") -> str:
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    frame = _Frame((x[0], x[-1]), (0.0, 1.05 * float(y.max()) if y.max() > 0 else 1.0))
    pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(frame.px(x), frame.py(y)))
    body = [f'<polyline points="{pts}" fill="none" stroke="#1f3b73" stroke-width="1.2"/>']
    return _document(frame, body, title, xlabel, ylabel)


def scatter_svg(x, y, xlim, ylim, title="", xlabel="screen position y (m)",
                ylabel="transverse display coordinate (arb.)") -> str:
    frame = _Frame(xlim, ylim)
    body = [f'<circle cx="{_fmt(a)}" cy="{_fmt(b)}" r="0.9" fill="black"/>'
            for a, b in zip(frame.px(x), frame.py(y))]
    return _document(frame, body, title, xlabel, ylabel)
