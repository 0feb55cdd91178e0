"""Deterministic standalone SVG figures (scatter landscapes, histograms, bars, curves, decision regions)."""
from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .analysis import Histogram

W, H = 640, 480
LEFT, RIGHT, TOP, BOTTOM = 70, 130, 40, 60
LOW_RGB = (49, 54, 149)  # blue end of the gradient
HIGH_RGB = (215, 48, 39)  # red end
NEUTRAL = "#9a9a9a"
REGION_EXACT, REGION_HEURISTIC = "#f4c7c3", "#c6d4ee"
POINT_EXACT, POINT_HEURISTIC = "#b2182b", "#2166ac"


def _num(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def _label(v: float) -> str:
    s = f"{v:.3g}"
    return "0" if s == "-0" else s


def _nice_ticks(lo: float, hi: float, target: int = 5) -> np.ndarray:
    """Round-number tick positions inside [lo, hi] (1, 2 or 5 times a power of ten)."""
    span = hi - lo
    raw = span / max(1, target)
    mag = 10.0 ** np.floor(np.log10(raw))
    step = next(m * mag for m in (1, 2, 5, 10) if m * mag >= raw)
    first = np.ceil(lo / step - 1e-9) * step
    ticks = np.arange(first, hi + step * 1e-9, step)
    return np.where(np.abs(ticks) < step * 1e-9, 0.0, ticks)


def _tick_label(v: float) -> str:
    s = f"{v:.6g}"
    return "0" if s == "-0" else s


def _color(t: float) -> str:
    t = min(1.0, max(0.0, t))
    rgb = [round(a + (b - a) * t) for a, b in zip(LOW_RGB, HIGH_RGB)]
    return "#{:02x}{:02x}{:02x}".format(*rgb)


class _Canvas:
    def __init__(self, title: str):
        self.parts = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
            f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
            f'<text x="{W / 2:.0f}" y="22" text-anchor="middle" font-family="sans-serif" font-size="15">'
            f"{escape(title)}</text>",
        ]

    def add(self, s: str) -> None:
        self.parts.append(s)

    def text(self, x, y, s, size=12, anchor="middle", rotate=None) -> None:
        tr = f' transform="rotate({rotate} {_num(x)} {_num(y)})"' if rotate is not None else ""
        self.add(
            f'<text x="{_num(x)}" y="{_num(y)}" text-anchor="{anchor}" font-family="sans-serif" '
            f'font-size="{size}"{tr}>{escape(s)}</text>'
        )

    def bytes(self) -> bytes:
        return ("\n".join(self.parts + ["</svg>"]) + "\n").encode()


class _Axes:
    def __init__(self, canvas: _Canvas, xlim, ylim, xlabel: str, ylabel: str, ticks: int = 5, xticks: bool = True):
        self.c = canvas
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        if self.x1 <= self.x0:
            self.x0, self.x1 = self.x0 - 1, self.x0 + 1
        if self.y1 <= self.y0:
            self.y0, self.y1 = self.y0 - 1, self.y0 + 1
        pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM
        canvas.add(f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
        for xv in _nice_ticks(self.x0, self.x1, ticks) if xticks else ():
            x = self.px(xv)
            canvas.add(f'<line x1="{_num(x)}" y1="{H - BOTTOM}" x2="{_num(x)}" y2="{H - BOTTOM + 4}" stroke="black"/>')
            canvas.text(x, H - BOTTOM + 16, _tick_label(xv), size=10)
        for yv in _nice_ticks(self.y0, self.y1, ticks):
            y = self.py(yv)
            canvas.add(f'<line x1="{LEFT - 4}" y1="{_num(y)}" x2="{LEFT}" y2="{_num(y)}" stroke="black"/>')
            canvas.text(LEFT - 6, y + 4, _tick_label(yv), size=10, anchor="end")
        canvas.text(LEFT + pw / 2, H - 18, xlabel)
        canvas.text(20, TOP + ph / 2, ylabel, rotate=-90)

    def px(self, x: float) -> float:
        return LEFT + (x - self.x0) / (self.x1 - self.x0) * (W - LEFT - RIGHT)

    def py(self, y: float) -> float:
        return H - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (H - TOP - BOTTOM)


def _limits(v: np.ndarray, pad: float = 0.05) -> tuple[float, float]:
    lo, hi = float(np.min(v)), float(np.max(v))
    span = hi - lo if hi > lo else 1.0
    return lo - pad * span, hi + pad * span


def _colorbar(c: _Canvas, lo: float, hi: float, title: str) -> None:
    x = W - RIGHT + 30
    top, height, steps = TOP + 20, H - TOP - BOTTOM - 40, 40
    for k in range(steps):
        t = 1 - (k + 0.5) / steps
        y = top + height * k / steps
        c.add(f'<rect x="{x}" y="{_num(y)}" width="16" height="{_num(height / steps + 0.5)}" fill="{_color(t)}"/>')
    c.text(x + 20, top + 4, _label(hi), size=10, anchor="start")
    c.text(x + 20, top + height + 4, _label(lo), size=10, anchor="start")
    c.add(
        f'<text class="colorscale" x="{W - RIGHT + 8}" y="{top - 22}" font-family="sans-serif" font-size="10">'
        f'{escape(title)}<tspan x="{W - RIGHT + 8}" dy="12">[{_label(lo)},{_label(hi)}]</tspan></text>'

    )


def svg_scatter(
    points: np.ndarray,
    values: Sequence[float] | None = None,
    clamp: tuple[float, float] | None = None,
    legend: str = "",
    title: str = "instance space",
    highlight: Sequence[bool] | None = None,
) -> bytes:
    """Landscape scatter; `values` are mapped onto a blue-red gradient over `clamp`."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if pts.shape[0] == 0:
        raise ValueError("nothing to plot")
    c = _Canvas(title)
    ax = _Axes(c, _limits(pts[:, 0]), _limits(pts[:, 1]), "component 1", "component 2")
    if values is not None:
        vals = np.asarray(values, dtype=float)
        lo, hi = clamp if clamp is not None else (float(vals.min()), float(vals.max()))
        span = hi - lo if hi > lo else 1.0
        colors = [_color((v - lo) / span) for v in np.clip(vals, lo, hi)]
        _colorbar(c, lo, hi, legend)
    elif highlight is not None:
        mask = np.asarray(highlight, dtype=bool)
        colors = ["#1f4fd0" if m else NEUTRAL for m in mask]
        _legend(c, [(legend or "highlighted", "#1f4fd0"), ("other", NEUTRAL)])
    else:
        colors = [NEUTRAL] * pts.shape[0]
    # highlighted / high values are drawn last so they stay visible
    order = np.argsort(np.asarray([0 if col == NEUTRAL else 1 for col in colors]), kind="stable")
    for i in order:
        c.add(f'<circle cx="{_num(ax.px(pts[i, 0]))}" cy="{_num(ax.py(pts[i, 1]))}" r="2.5" fill="{colors[i]}"/>')
    return c.bytes()


def _legend(c: _Canvas, entries: Sequence[tuple[str, str]]) -> None:
    for k, (label, color) in enumerate(entries):
        y = TOP + 6 + 16 * k
        c.add(f'<rect x="{W - RIGHT + 10}" y="{y}" width="10" height="10" fill="{color}"/>')
        c.text(W - RIGHT + 24, y + 9, label, size=11, anchor="start")


def svg_histogram(hist: Histogram, title: str = "runtime difference", xlabel: str = "heuristic - exact (s)") -> bytes:
    c = _Canvas(title)
    edges, counts = hist.edges, hist.counts
    ax = _Axes(c, (float(edges[0]), float(edges[-1])), (0.0, float(max(1, counts.max())) * 1.05), xlabel, "count")
    for a, b, n in zip(edges[:-1], edges[1:], counts):
        x, x2, y = ax.px(a), ax.px(b), ax.py(n)
        c.add(
            f'<rect class="bar" x="{_num(x)}" y="{_num(y)}" width="{_num(max(0.5, x2 - x - 1))}" '
            f'height="{_num(ax.py(0) - y)}" fill="#4a74b4"/>'
        )
    return c.bytes()


SHORT_NAMES = {
    "density": "density",
    "clustering_coefficient": "clustering",
    "energy": "energy",
    "max_degree": "max deg",
    "degree_std": "deg std",
    "degree_skewness": "deg skew",
    "degree_kurtosis": "deg kurt",
    "diameter": "diameter",
    "pct_degree1": "% deg 1",
    "pct_degree2": "% deg 2",
}


def svg_coefficients(components: np.ndarray, names: Sequence[str], title: str = "principal component coefficients") -> bytes:
    comps = np.asarray(components, dtype=float)
    c = _Canvas(title)
    d = len(names)
    lim = max(0.1, float(np.abs(comps).max())) * 1.1
    ax = _Axes(c, (0.0, float(d)), (-lim, lim), "", "coefficient", xticks=False)
    c.add(f'<line x1="{LEFT}" y1="{_num(ax.py(0))}" x2="{W - RIGHT}" y2="{_num(ax.py(0))}" stroke="#888"/>')
    palette = ("#4a74b4", "#e0803a")
    for i in range(d):
        for r in range(comps.shape[0]):
            x = ax.px(i + 0.15 + 0.35 * r)
            w = ax.px(0.33) - ax.px(0)
            y0, y1 = ax.py(0), ax.py(comps[r, i])
            c.add(
                f'<rect x="{_num(x)}" y="{_num(min(y0, y1))}" width="{_num(w)}" height="{_num(abs(y1 - y0))}" '
                f'fill="{palette[r % 2]}"/>'
            )
        c.text(ax.px(i + 0.5), H - BOTTOM + 12, SHORT_NAMES.get(names[i], names[i]), size=9, anchor="end",
               rotate=-35)
    _legend(c, [(f"component {r + 1}", palette[r % 2]) for r in range(comps.shape[0])])
    return c.bytes()


def svg_curves(series: dict[str, Sequence[float]], title: str = "fitness by generation", ylabel: str = "fitness") -> bytes:
    c = _Canvas(title)
    all_v = np.concatenate([np.asarray(v, dtype=float) for v in series.values()])
    length = max(len(v) for v in series.values())
    ax = _Axes(c, (0.0, float(max(1, length - 1))), _limits(all_v), "generation", ylabel)
    palette = ("#d7301f", "#4a74b4", "#2ca02c", "#7f7f7f")
    for k, (name, vals) in enumerate(series.items()):
        pts = " ".join(f"{_num(ax.px(i))},{_num(ax.py(v))}" for i, v in enumerate(vals))
        c.add(f'<polyline points="{pts}" fill="none" stroke="{palette[k % 4]}" stroke-width="1.5"/>')
    _legend(c, [(name, palette[k % 4]) for k, name in enumerate(series)])
    return c.bytes()


def svg_decision_regions(
    xs: np.ndarray,
    ys: np.ndarray,
    grid: np.ndarray,
    train_xy: np.ndarray,
    train_exact: Sequence[bool],
    title: str = "kNN decision regions",
) -> bytes:
    c = _Canvas(title)
    ax = _Axes(c, (float(xs[0]), float(xs[-1])), (float(ys[0]), float(ys[-1])), "component 1", "component 2")
    dx = (xs[1] - xs[0]) if len(xs) > 1 else 1.0
    dy = (ys[1] - ys[0]) if len(ys) > 1 else 1.0
    for iy, yv in enumerate(ys):
        for ix, xv in enumerate(xs):
            fill = REGION_EXACT if grid[iy, ix] else REGION_HEURISTIC
            x0, x1 = ax.px(max(xs[0], xv - dx / 2)), ax.px(min(xs[-1], xv + dx / 2))
            y0, y1 = ax.py(min(ys[-1], yv + dy / 2)), ax.py(max(ys[0], yv - dy / 2))
            c.add(f'<rect x="{_num(x0)}" y="{_num(y0)}" width="{_num(x1 - x0)}" height="{_num(y1 - y0)}" fill="{fill}" '
                  'shape-rendering="crispEdges"/>')
    for (x, y), ex in zip(np.asarray(train_xy, dtype=float), train_exact):
        col = POINT_EXACT if ex else POINT_HEURISTIC
        c.add(f'<circle cx="{_num(ax.px(x))}" cy="{_num(ax.py(y))}" r="2" fill="{col}"/>')
    _legend(c, [("exact faster", POINT_EXACT), ("heuristic faster", POINT_HEURISTIC)])
    return c.bytes()
