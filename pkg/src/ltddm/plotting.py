"""Minimal SVG output: learning curves and event rasters.

The SVG is written by hand so output is byte-stable and easy to diff.
"""

from pathlib import Path

import numpy as np

WIDTH = 640
HEIGHT = 360
MARGIN = 48


def _fmt(v):
    return f"{v:.2f}"


def _document(width, height, body):
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">\n'
            f'<rect width="{width}" height="{height}" fill="white"/>\n')
    return head + "".join(body) + "</svg>\n"


def learning_curve_svg(curve, convergence_epoch=None, title="mean STE per epoch"):
    """Line plot of ``curve`` against epoch, with a dashed vertical line at convergence."""
    y = np.asarray(curve, dtype=np.float64)
    n = len(y)
    x0, x1 = MARGIN, WIDTH - MARGIN // 2
    y0, y1 = HEIGHT - MARGIN, MARGIN // 2
    top = float(y.max()) if n and y.max() > 0 else 1.0
    sx = (x1 - x0) / max(n - 1, 1)

    def px(i):
        return x0 + i * sx

    def py(v):
        return y0 - (v / top) * (y0 - y1)

    body = [
        f'<text x="{WIDTH // 2}" y="16" text-anchor="middle" font-size="13">{title}</text>\n',
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>\n',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>\n',
        f'<text x="{x0 - 4}" y="{y1 + 4}" text-anchor="end" font-size="10">{top:g}</text>\n',
        f'<text x="{x0 - 4}" y="{y0}" text-anchor="end" font-size="10">0</text>\n',
        f'<text x="{x1}" y="{y0 + 16}" text-anchor="end" font-size="10">epoch {n - 1}</text>\n',
    ]
    if n:
        pts = " ".join(f"{_fmt(px(i))},{_fmt(py(v))}" for i, v in enumerate(y))
        body.append(f'<polyline points="{pts}" fill="none" stroke="steelblue" stroke-width="1.5"/>\n')
    if convergence_epoch is not None:
        cx = _fmt(px(convergence_epoch))
        body.append(f'<line x1="{cx}" y1="{y0}" x2="{cx}" y2="{y1}" stroke="gray" '
                    f'stroke-dasharray="4,3"/>\n')
    return _document(WIDTH, HEIGHT, body)


def raster_svg(rows, labels=None, cell=4, title="events"):
    """Raster of binary streams; ``rows`` is a list of 1-D arrays drawn top to bottom."""
    rows = [np.asarray(r, dtype=np.uint8) for r in rows]
    labels = labels or [str(i) for i in range(len(rows))]
    T = max((len(r) for r in rows), default=0)
    row_h = cell * 3
    left = 80
    width = left + T * cell + 8
    height = 24 + len(rows) * row_h + 8
    body = [f'<text x="{width // 2}" y="14" text-anchor="middle" font-size="12">{title}</text>\n']
    for i, (r, lab) in enumerate(zip(rows, labels)):
        top = 24 + i * row_h
        body.append(f'<text x="{left - 4}" y="{top + cell * 2}" text-anchor="end" '
                    f'font-size="10">{lab}</text>\n')
        for t in np.flatnonzero(r):
            body.append(f'<rect x="{left + t * cell}" y="{top}" width="{cell}" '
                        f'height="{cell * 2}" fill="black"/>\n')
    return _document(width, height, body)


def write_svg(path, svg):
    Path(path).write_text(svg, encoding="utf-8")
