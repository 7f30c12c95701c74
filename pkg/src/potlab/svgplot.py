"""Tiny deterministic SVG emitters (scatter and line charts).

Output bytes depend only on the input data: fixed canvas, fixed float
formatting, no timestamps or generator metadata, so identical runs give
identical files.
"""

import math

W, H = 640, 480
MARGIN = 48


def _fmt(v):
    return "%.3f" % v


def _header(title):
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W // 2}" y="20" text-anchor="middle" '
        f'font-family="monospace" font-size="13">{title}</text>',
    ]


def _axes():
    x0, y0, x1, y1 = MARGIN, H - MARGIN, W - MARGIN, MARGIN
    return [
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>',
    ]


def _map(v, lo, hi, out_lo, out_hi):
    if hi == lo:
        return (out_lo + out_hi) / 2
    return out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo)


def scatter_svg(path, points, title="", xlim=None, ylim=None):
    """Scatter of (x, y) pairs as circle glyphs, affinely mapped to canvas."""
    pts = [(float(x), float(y)) for x, y in points]
    if xlim is None:
        xlim = (min((p[0] for p in pts), default=-1.0),
                max((p[0] for p in pts), default=1.0))
        if xlim[0] == xlim[1]:
            xlim = (xlim[0] - 1, xlim[1] + 1)
    if ylim is None:
        ylim = (min((p[1] for p in pts), default=-1.0),
                max((p[1] for p in pts), default=1.0))
        if ylim[0] == ylim[1]:
            ylim = (ylim[0] - 1, ylim[1] + 1)
    out = _header(title) + _axes()
    for x, y in pts:
        cx = _map(x, xlim[0], xlim[1], MARGIN, W - MARGIN)
        cy = _map(y, ylim[0], ylim[1], H - MARGIN, MARGIN)
        out.append(f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="2" '
                   f'fill="steelblue"/>')
    out.append("</svg>")
    _write(path, out)


def line_chart_svg(path, xs, ys, title="", logy=False):
    """Single polyline through (xs, ys); log-scale y on request."""
    xs = [float(x) for x in xs]
    if logy:
        ys = [math.log10(max(abs(float(y)), 1e-300)) for y in ys]
    else:
        ys = [float(y) for y in ys]
    out = _header(title) + _axes()
    if xs:
        xlo, xhi = min(xs), max(xs)
        ylo, yhi = min(ys), max(ys)
        if xlo == xhi:
            xlo, xhi = xlo - 1, xhi + 1
        if ylo == yhi:
            ylo, yhi = ylo - 1, yhi + 1
        coords = " ".join(
            f"{_fmt(_map(x, xlo, xhi, MARGIN, W - MARGIN))},"
            f"{_fmt(_map(y, ylo, yhi, H - MARGIN, MARGIN))}"
            for x, y in zip(xs, ys))
        out.append(f'<polyline points="{coords}" fill="none" '
                   f'stroke="firebrick" stroke-width="1.5"/>')
    out.append("</svg>")
    _write(path, out)


def _write(path, lines):
    with open(path, "w", newline="\n") as f:
        f.write("\n".join(lines) + "\n")
