"""Dependency-free SVG emission for line charts and heatmaps.

Plots are derived artifacts: nothing here feeds back into any numeric path.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
    "#3b5bdb", "#e8590c", "#2b8a3e",
)

WIDTH = 720
HEIGHT = 440
MARGIN = 56


def _span(lo: float, hi: float) -> tuple[float, float]:
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return (0.0, 1.0)
    if lo == hi:
        pad = 1.0 if lo == 0.0 else abs(lo) * 0.1
        return (lo - pad, hi + pad)
    pad = (hi - lo) * 0.05
    return (lo - pad, hi + pad)


def _fmt(v: float) -> str:
    return f"{v:.6g}"


class _Doc:
    def __init__(self, width: int = WIDTH, height: int = HEIGHT):
        self.width = width
        self.height = height
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
            f'height="{height}" viewBox="0 0 {width} {height}">',
            f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        ]

    def add(self, element: str) -> None:
        self.parts.append(element)

    def text(self, x: float, y: float, s: str, size: int = 12,
             anchor: str = "start", color: str = "#222222") -> None:
        self.add(
            f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-size="{size}" '
            f'font-family="sans-serif" text-anchor="{anchor}" '
            f'fill="{color}">{escape(s)}</text>'
        )

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _axes(doc: _Doc, x_lo, x_hi, y_lo, y_hi, title: str):
    left, right = MARGIN, doc.width - MARGIN // 2
    top, bottom = MARGIN // 2, doc.height - MARGIN

    def px(x):
        return left + (x - x_lo) / (x_hi - x_lo) * (right - left)

    def py(y):
        return bottom - (y - y_lo) / (y_hi - y_lo) * (bottom - top)

    doc.add(
        f'<rect x="{left}" y="{top}" width="{right - left}" '
        f'height="{bottom - top}" fill="none" stroke="#888888"/>'
    )
    if title:
        doc.text(doc.width / 2, top - 8, title, size=14, anchor="middle")
    doc.text(left, bottom + 16, _fmt(x_lo), anchor="middle")
    doc.text(right, bottom + 16, _fmt(x_hi), anchor="middle")
    doc.text(left - 6, bottom + 4, _fmt(y_lo), anchor="end")
    doc.text(left - 6, top + 4, _fmt(y_hi), anchor="end")
    if y_lo < 0.0 < y_hi:
        doc.add(
            f'<line x1="{left}" y1="{_fmt(py(0.0))}" x2="{right}" '
            f'y2="{_fmt(py(0.0))}" stroke="#cccccc" stroke-dasharray="4 3"/>'
        )
    return px, py


def line_chart(series, labels=None, title: str = "",
               hlines: tuple[float, ...] = ()) -> str:
    """Polyline chart; one (x, y) pair per entry in `series`."""
    xs = [np.asarray(x, dtype=np.float64) for x, _ in series]
    ys = [np.asarray(y, dtype=np.float64) for _, y in series]
    x_lo, x_hi = _span(min(x.min() for x in xs), max(x.max() for x in xs))
    all_y = [y.min() for y in ys] + [y.max() for y in ys] + list(hlines)
    y_lo, y_hi = _span(min(all_y), max(all_y))
    doc = _Doc()
    px, py = _axes(doc, x_lo, x_hi, y_lo, y_hi, title)
    for level in hlines:
        doc.add(
            f'<line x1="{MARGIN}" y1="{_fmt(py(level))}" '
            f'x2="{doc.width - MARGIN // 2}" y2="{_fmt(py(level))}" '
            f'stroke="#999999" stroke-dasharray="2 4"/>'
        )
    for i, (x, y) in enumerate(zip(xs, ys)):
        color = PALETTE[i % len(PALETTE)]
        points = " ".join(f"{_fmt(px(a))},{_fmt(py(b))}" for a, b in zip(x, y))
        doc.add(
            f'<polyline points="{points}" fill="none" stroke="{color}" '
            f'stroke-width="1.5"/>'
        )
        if labels is not None:
            doc.text(doc.width - MARGIN // 2 - 4, MARGIN // 2 + 16 + 14 * i,
                     str(labels[i]), anchor="end", color=color)
    return doc.render()


def _cell_color(value: float, lo: float, hi: float) -> str:
    if not math.isfinite(value):
        return "#bbbbbb"
    frac = 0.5 if hi == lo else (value - lo) / (hi - lo)
    # blue (low) through white to red (high)
    if frac < 0.5:
        t = frac / 0.5
        r, g, b = int(49 + t * 206), int(98 + t * 157), 255
    else:
        t = (frac - 0.5) / 0.5
        r, g, b = 255, int(255 - t * 157), int(255 - t * 206)
    return f"#{r:02x}{g:02x}{b:02x}"


def heatmap_chart(values, x_labels, y_labels, title: str = "") -> str:
    """Grid of colored cells; rows follow y_labels, columns x_labels."""
    grid = np.asarray(values, dtype=np.float64)
    n_rows, n_cols = grid.shape
    doc = _Doc()
    left, right = MARGIN + 24, doc.width - MARGIN // 2
    top, bottom = MARGIN // 2 + 8, doc.height - MARGIN
    cell_w = (right - left) / n_cols
    cell_h = (bottom - top) / n_rows
    finite = grid[np.isfinite(grid)]
    lo = float(finite.min()) if len(finite) else 0.0
    hi = float(finite.max()) if len(finite) else 1.0
    if title:
        doc.text(doc.width / 2, top - 10, title, size=14, anchor="middle")
    for i in range(n_rows):
        for j in range(n_cols):
            color = _cell_color(grid[i, j], lo, hi)
            doc.add(
                f'<rect x="{_fmt(left + j * cell_w)}" y="{_fmt(top + i * cell_h)}" '
                f'width="{_fmt(cell_w)}" height="{_fmt(cell_h)}" '
                f'fill="{color}" stroke="#ffffff" stroke-width="0.5"/>'
            )
    for i, label in enumerate(y_labels):
        doc.text(left - 6, top + (i + 0.5) * cell_h + 4, str(label), size=10,
                 anchor="end")
    for j, label in enumerate(x_labels):
        doc.text(left + (j + 0.5) * cell_w, bottom + 14, str(label), size=10,
                 anchor="middle")
    return doc.render()
