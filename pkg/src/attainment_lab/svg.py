"""Hand-written SVG output for the two figures.

Everything is emitted as text with fixed number formatting, so the same
inputs always give byte-identical files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .solvers import LIMIT_DIRECTION, sequence_values

WIDTH, HEIGHT, MARGIN = 640, 480, 56


def _f(v: float) -> str:
    return f"{v:.4f}"


@dataclass(frozen=True)
class Viewport:
    """Affine map from a data box onto the drawable pixel area (y axis up)."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    logx: bool = False
    logy: bool = False

    def _tx(self, v: float, lo: float, hi: float, log: bool) -> float:
        if log:
            v, lo, hi = math.log10(v), math.log10(lo), math.log10(hi)
        return (v - lo) / (hi - lo)

    def to_px(self, x: float, y: float) -> tuple[float, float]:
        u = self._tx(x, self.x_min, self.x_max, self.logx)
        w = self._tx(y, self.y_min, self.y_max, self.logy)
        return MARGIN + u * (WIDTH - 2 * MARGIN), HEIGHT - MARGIN - w * (HEIGHT - 2 * MARGIN)

    def to_data(self, px: float, py: float) -> tuple[float, float]:
        u = (px - MARGIN) / (WIDTH - 2 * MARGIN)
        w = (HEIGHT - MARGIN - py) / (HEIGHT - 2 * MARGIN)

        def back(t, lo, hi, log):
            if log:
                return 10 ** (math.log10(lo) + t * (math.log10(hi) - math.log10(lo)))
            return lo + t * (hi - lo)

        return back(u, self.x_min, self.x_max, self.logx), back(w, self.y_min, self.y_max, self.logy)


@dataclass(frozen=True)
class FigureSpec:
    series: tuple[tuple[str, np.ndarray], ...]
    xlabel: str
    ylabel: str
    logx: bool = False
    logy: bool = False
    title: str = ""

    def __post_init__(self):
        if not self.series:
            raise ValueError("a figure needs at least one series")
        pts = []
        for label, p in self.series:
            p = np.asarray(p, dtype=float).reshape(-1, 2)
            if not np.all(np.isfinite(p)):
                raise ValueError(f"series {label!r} has non-finite points")
            pts.append((label, p))
        object.__setattr__(self, "series", tuple(pts))


def _header(parts: list[str], title: str) -> None:
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">'
    )
    parts.append(f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    if title:
        parts.append(f'<text x="{WIDTH / 2:g}" y="24" text-anchor="middle" font-size="15">{escape(title)}</text>')


def _frame(parts: list[str], vp: Viewport, xlabel: str, ylabel: str) -> None:
    x0, y0 = MARGIN, HEIGHT - MARGIN
    x1, y1 = WIDTH - MARGIN, MARGIN
    parts.append(f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" fill="none" stroke="black"/>')
    parts.append(f'<text x="{WIDTH / 2:g}" y="{HEIGHT - 14}" text-anchor="middle" font-size="13">{escape(xlabel)}</text>')
    parts.append(
        f'<text x="16" y="{HEIGHT / 2:g}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 16 {HEIGHT / 2:g})">{escape(ylabel)}</text>'
    )
    for axis, lo, hi, log in (("x", vp.x_min, vp.x_max, vp.logx), ("y", vp.y_min, vp.y_max, vp.logy)):
        for t in _ticks(lo, hi, log):
            if axis == "x":
                px, _ = vp.to_px(t, vp.y_min)
                parts.append(f'<line x1="{_f(px)}" y1="{y0}" x2="{_f(px)}" y2="{y0 + 5}" stroke="black"/>')
                parts.append(f'<text x="{_f(px)}" y="{y0 + 18}" text-anchor="middle" font-size="11">{_label(t, log)}</text>')
            else:
                _, py = vp.to_px(vp.x_min, t)
                parts.append(f'<line x1="{x0 - 5}" y1="{_f(py)}" x2="{x0}" y2="{_f(py)}" stroke="black"/>')
                parts.append(f'<text x="{x0 - 8}" y="{_f(py + 4)}" text-anchor="end" font-size="11">{_label(t, log)}</text>')


def _ticks(lo: float, hi: float, log: bool) -> list[float]:
    if log:
        a, b = math.ceil(math.log10(lo) - 1e-12), math.floor(math.log10(hi) + 1e-12)
        step = max(1, (b - a) // 6 + 1)
        return [10.0**e for e in range(a, b + 1, step)]
    span = hi - lo
    step = 10 ** math.floor(math.log10(span / 5))
    for m in (1, 2, 5, 10):
        if span / (m * step) <= 8:
            step *= m
            break
    first = math.ceil(lo / step - 1e-9)
    return [i * step for i in range(first, int(math.floor(hi / step + 1e-9)) + 1)]


def _label(t: float, log: bool) -> str:
    if log:
        return f"1e{round(math.log10(t))}"
    return f"{t:g}"


def _polyline(vp: Viewport, pts: np.ndarray, **attrs) -> str:
    coords = " ".join(f"{_f(px)},{_f(py)}" for px, py in (vp.to_px(x, y) for x, y in pts))
    extra = " ".join(f'{k.replace("_", "-")}="{v}"' for k, v in attrs.items())
    return f'<polyline points="{coords}" {extra}/>'


def figure1_svg(k_max: int = 5, samples: int = 257) -> str:
    """Feasible set of (P) in the (x2, x1) plane with the sequence and its limiting ray.

    The horizontal axis is ``x2`` and the vertical axis ``x1``; sequence
    points carry their data coordinates in ``data-x1``/``data-x2``.
    """
    if samples < 256:
        raise ValueError("boundary needs at least 256 samples")
    seq = sequence_values(np.arange(0, k_max + 1))
    half = float(k_max) + 1.5
    top = math.sqrt(1.0 + half * half) + 0.5
    vp = Viewport(-half, half, 0.0, top)

    parts: list[str] = []
    _header(parts, "Feasible set, minimizing sequence and limiting direction")
    _frame(parts, vp, "x2", "x1")

    t = np.linspace(-half, half, samples)
    curve = np.column_stack([t, np.sqrt(1.0 + t * t)])
    region = np.vstack([curve, [[half, top], [-half, top]]])
    coords = " ".join(f"{_f(px)},{_f(py)}" for px, py in (vp.to_px(x, y) for x, y in region))
    parts.append(f'<polygon points="{coords}" fill="#cccccc" stroke="none"/>')
    parts.append(_polyline(vp, curve, fill="none", stroke="black", stroke_width="1.5"))

    # ray from the origin through the limiting direction (x1, x2) = (1, -1)/sqrt(2)
    reach = min(half, top)
    ex, ey = vp.to_px(LIMIT_DIRECTION[1] * reach * math.sqrt(2.0), LIMIT_DIRECTION[0] * reach * math.sqrt(2.0))
    ox, oy = vp.to_px(0.0, 0.0)
    parts.append(
        f'<line x1="{_f(ox)}" y1="{_f(oy)}" x2="{_f(ex)}" y2="{_f(ey)}" stroke="blue" stroke-dasharray="6,4"/>'
    )
    for k, x1, x2 in zip(range(k_max + 1), seq["x1"], seq["x2"] + 0.0):
        px, py = vp.to_px(x2, x1)
        parts.append(
            f'<circle cx="{_f(px)}" cy="{_f(py)}" r="4" fill="red" '
            f'data-k="{k}" data-x1="{x1:.17g}" data-x2="{x2:.17g}"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def line_chart_svg(spec: FigureSpec) -> str:
    pts = np.vstack([p for _, p in spec.series])
    xs, ys = pts[:, 0], pts[:, 1]
    if (spec.logx and np.any(xs <= 0)) or (spec.logy and np.any(ys <= 0)):
        raise ValueError("log axes need positive data")
    pad = (lambda lo, hi, log: (lo / 1.5, hi * 1.5) if log else (lo - 0.05 * (hi - lo or 1), hi + 0.05 * (hi - lo or 1)))
    vp = Viewport(*pad(xs.min(), xs.max(), spec.logx), *pad(ys.min(), ys.max(), spec.logy), spec.logx, spec.logy)
    parts: list[str] = []
    _header(parts, spec.title)
    _frame(parts, vp, spec.xlabel, spec.ylabel)
    colors = ("black", "red", "blue", "green")
    for i, (label, p) in enumerate(spec.series):
        col = colors[i % len(colors)]
        parts.append(_polyline(vp, p, fill="none", stroke=col, stroke_width="1.5"))
        for x, y in p:
            px, py = vp.to_px(x, y)
            parts.append(f'<circle cx="{_f(px)}" cy="{_f(py)}" r="2.5" fill="{col}"/>')
        parts.append(
            f'<text x="{WIDTH - MARGIN - 8}" y="{MARGIN + 18 + 16 * i}" text-anchor="end" '
            f'font-size="12" fill="{col}">{escape(label)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def figure2_svg(ks, values) -> str:
    """Regularized optimal value against ``k = 1/eps`` on log-log axes."""
    pts = np.column_stack([np.asarray(ks, dtype=float), np.asarray(values, dtype=float)])
    spec = FigureSpec(
        (("f at the regularized minimizer", pts),),
        "k (epsilon = 1/k)",
        "x1 + x2",
        logx=True,
        logy=True,
        title="Regularization path",
    )
    return line_chart_svg(spec)
