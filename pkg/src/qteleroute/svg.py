"""Small self-contained SVG emitters for graphs, histograms and line plots.

Output is a pure function of the inputs: coordinates are printed with fixed
precision and elements are emitted in sorted order.
"""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

FORWARD = "#d62728"
BACKWARD = "#2ca02c"
SERIES_COLORS = ("#1f77b4", "#ff7f0e", "#9467bd", "#8c564b")


def _f(x: float) -> str:
    return f"{x:.2f}"


def _doc(width, height, body) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">')
    return "\n".join([head, f'<rect width="{width}" height="{height}" fill="white"/>', *body, "</svg>"]) + "\n"


def _text(x, y, s, anchor="middle", extra=""):
    return f'<text x="{_f(x)}" y="{_f(y)}" text-anchor="{anchor}"{extra}>{escape(str(s))}</text>'


def graph_svg(g, forward=None, backward=None, size: int = 600, title: str = "") -> str:
    """Draw the topology; the forward path is red and the backward path green.

    The backward path is offset by a few pixels so both stay visible when
    they share links.
    """
    pad = 30
    pos = {n: g.g.nodes[n]["pos"] for n in g.nodes}
    xs = [p[0] for p in pos.values()]
    ys = [p[1] for p in pos.values()]
    span = max(max(xs) - min(xs), max(ys) - min(ys), 1e-9)
    scale = (size - 2 * pad) / span

    def at(n):
        x, y = pos[n]
        return pad + (x - min(xs)) * scale, size - pad - (y - min(ys)) * scale

    body = []
    if title:
        body.append(_text(size / 2, 18, title))
    for u, v in sorted(tuple(sorted(e)) for e in g.g.edges):
        (x1, y1), (x2, y2) = at(u), at(v)
        body.append(f'<line x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" stroke="#bbbbbb" stroke-width="1"/>')
    for path, color, off in ((forward, FORWARD, -2.0), (backward, BACKWARD, 2.0)):
        if path is None or len(path.nodes) < 2:
            continue
        pts = " ".join(f"{_f(x + off)},{_f(y + off)}" for x, y in map(at, path.nodes))
        body.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="3"/>')
    for n in g.nodes:
        x, y = at(n)
        body.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="5" fill="#333333"/>')
        body.append(_text(x + 8, y - 6, n, anchor="start"))
    return _doc(size, size, body)


def bar_chart_svg(labels, counts, expected=None, title: str = "", width: int = 640, height: int = 360) -> str:
    """Vertical bars of counts; `expected` (same units) is drawn as ticks."""
    pad_l, pad_b, pad_t = 50, 70, 30
    n = max(len(labels), 1)
    top = max(list(counts) + list(expected or []) + [1])
    bw = (width - pad_l - 10) / n
    plot_h = height - pad_b - pad_t

    def y_of(v):
        return height - pad_b - plot_h * v / top

    body = [_text(width / 2, 18, title)] if title else []
    body.append(f'<line x1="{pad_l}" y1="{height - pad_b}" x2="{width - 10}" y2="{height - pad_b}" stroke="black"/>')
    body.append(_text(pad_l - 6, y_of(top) + 4, f"{top:g}", anchor="end"))
    body.append(_text(pad_l - 6, height - pad_b + 4, "0", anchor="end"))
    for i, (lab, c) in enumerate(zip(labels, counts)):
        x = pad_l + i * bw
        body.append(f'<rect x="{_f(x + 1)}" y="{_f(y_of(c))}" width="{_f(max(bw - 2, 0.5))}" '
                    f'height="{_f(height - pad_b - y_of(c))}" fill="{SERIES_COLORS[0]}"/>')
        if expected is not None:
            ye = y_of(expected[i])
            body.append(f'<line x1="{_f(x)}" y1="{_f(ye)}" x2="{_f(x + bw)}" y2="{_f(ye)}" stroke="black" stroke-width="2"/>')
        cx, cy = x + bw / 2, height - pad_b + 10
        body.append(_text(cx, cy, lab, anchor="end", extra=f' transform="rotate(-60 {_f(cx)} {_f(cy)})"'))
    return _doc(width, height, body)


def line_plot_svg(xs, series: dict, title: str = "", ylabel: str = "", errors: dict | None = None,
                  width: int = 640, height: int = 400) -> str:
    """One polyline per series over shared x values, with optional error bars."""
    pad_l, pad_r, pad_b, pad_t = 70, 140, 50, 30
    vals = [v for ys in series.values() for v in ys if not math.isnan(v)]
    errs = errors or {}
    spans = [v + e for k, ys in series.items() for v, e in zip(ys, errs.get(k, [0] * len(ys)))
             if not (math.isnan(v) or math.isnan(e))]
    lo = min(vals + [0.0]) if vals else 0.0
    hi = max(spans + vals) if vals else 1.0
    if hi <= lo:
        hi = lo + 1.0
    x_lo, x_hi = min(xs), max(xs)
    if x_hi == x_lo:
        x_hi = x_lo + 1
    plot_w, plot_h = width - pad_l - pad_r, height - pad_b - pad_t

    def px(x):
        return pad_l + plot_w * (x - x_lo) / (x_hi - x_lo)

    def py(y):
        return height - pad_b - plot_h * (y - lo) / (hi - lo)

    body = [_text(width / 2, 18, title)] if title else []
    body.append(f'<line x1="{pad_l}" y1="{height - pad_b}" x2="{pad_l + plot_w}" y2="{height - pad_b}" stroke="black"/>')
    body.append(f'<line x1="{pad_l}" y1="{pad_t}" x2="{pad_l}" y2="{height - pad_b}" stroke="black"/>')
    for x in xs:
        body.append(_text(px(x), height - pad_b + 16, f"{x:g}"))
    for y in (lo, (lo + hi) / 2, hi):
        body.append(_text(pad_l - 6, py(y) + 4, f"{y:.4g}", anchor="end"))
    body.append(_text(pad_l + plot_w / 2, height - 10, "nodes"))
    if ylabel:
        body.append(_text(16, pad_t + plot_h / 2, ylabel, extra=f' transform="rotate(-90 16 {_f(pad_t + plot_h / 2)})"'))
    for i, (name, ys) in enumerate(series.items()):
        color = SERIES_COLORS[i % len(SERIES_COLORS)]
        pts = [(px(x), py(y)) for x, y in zip(xs, ys) if not math.isnan(y)]
        if pts:
            body.append(f'<polyline points="{" ".join(f"{_f(a)},{_f(b)}" for a, b in pts)}" '
                        f'fill="none" stroke="{color}" stroke-width="2"/>')
        for x, y, e in zip(xs, ys, errs.get(name, [0.0] * len(ys))):
            if math.isnan(y):
                continue
            body.append(f'<circle cx="{_f(px(x))}" cy="{_f(py(y))}" r="3" fill="{color}"/>')
            if e and not math.isnan(e):
                body.append(f'<line x1="{_f(px(x))}" y1="{_f(py(y - e))}" x2="{_f(px(x))}" '
                            f'y2="{_f(py(y + e))}" stroke="{color}"/>')
        ly = pad_t + 20 * i + 10
        body.append(f'<line x1="{width - pad_r + 10}" y1="{ly}" x2="{width - pad_r + 30}" y2="{ly}" '
                    f'stroke="{color}" stroke-width="2"/>')
        body.append(_text(width - pad_r + 36, ly + 4, name, anchor="start"))
    return _doc(width, height, body)
