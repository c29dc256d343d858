"""Minimal static SVG emission for run reports.

Plots are deliberately simple views: every rendered number is carried in a
sibling CSV written by the caller, and the SVG carries data-* attributes so
charts can be verified mechanically.  No plotting library is used, which
keeps the output byte-deterministic.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

_FONT = 'font-family="sans-serif" font-size="11"'


def _fmt(x: float) -> str:
    return format(float(x), ".6g")


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")


def bar_chart(
    labels: Sequence[str],
    values: Sequence[float],
    title: str = "",
    ylabel: str = "",
) -> str:
    """Vertical bars with a zero baseline; supports negative values."""
    if not labels or len(labels) != len(values):
        raise ValueError("labels and values must be non-empty and aligned")
    values = [float(v) for v in values]
    left, top, bottom = 60, 30, 80
    slot, gap = 46, 12
    width = left + len(labels) * slot + 20
    height = 360
    plot_h = height - top - bottom
    vmax = max(max(values), 0.0)
    vmin = min(min(values), 0.0)
    span = vmax - vmin or 1.0

    def y_of(v: float) -> float:
        return top + (vmax - v) / span * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<text x="{width / 2}" y="16" text-anchor="middle" {_FONT}>{_esc(title)}</text>',
        f'<text x="14" y="{top - 8}" {_FONT}>{_esc(ylabel)}</text>',
    ]
    zero_y = y_of(0.0)
    parts.append(
        f'<line x1="{left}" y1="{_fmt(zero_y)}" x2="{width - 10}" y2="{_fmt(zero_y)}" '
        f'stroke="#444" stroke-width="1"/>'
    )
    for tick in (vmin, vmax):
        parts.append(
            f'<text x="{left - 6}" y="{_fmt(y_of(tick) + 4)}" text-anchor="end" {_FONT}>'
            f"{_fmt(tick)}</text>"
        )
    for i, (label, v) in enumerate(zip(labels, values)):
        x = left + i * slot + gap / 2
        y = y_of(max(v, 0.0))
        h = abs(v) / span * plot_h
        parts.append(
            f'<rect class="bar" data-label="{_esc(label)}" data-value="{_fmt(v)}" '
            f'x="{_fmt(x)}" y="{_fmt(y)}" width="{slot - gap}" height="{_fmt(h)}" '
            f'fill="#4878a8"/>'
        )
        parts.append(
            f'<text x="{_fmt(x + (slot - gap) / 2)}" y="{_fmt(y - 4)}" text-anchor="middle" '
            f"{_FONT}>{_fmt(v)}</text>"
        )
        cx = x + (slot - gap) / 2
        ty = height - bottom + 12
        parts.append(
            f'<text x="{_fmt(cx)}" y="{_fmt(ty)}" text-anchor="end" {_FONT} '
            f'transform="rotate(-45 {_fmt(cx)} {_fmt(ty)})">{_esc(label)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def line_chart(
    points: Sequence[tuple[float, float]],
    references: Sequence[tuple[str, float]] = (),
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
) -> str:
    """One polyline over (x, y) points plus dashed horizontal reference lines."""
    if not points:
        raise ValueError("no points to plot")
    xs = [float(x) for x, _ in points]
    ys = [float(y) for _, y in points]
    all_y = ys + [float(v) for _, v in references]
    left, top, right, bottom = 60, 30, 20, 50
    width, height = 560, 360
    plot_w = width - left - right
    plot_h = height - top - bottom
    xmin, xmax = min(xs), max(xs)
    ymin, ymax = min(all_y), max(all_y)
    xspan = (xmax - xmin) or 1.0
    yspan = (ymax - ymin) or 1.0

    def px(x: float) -> float:
        return left + (x - xmin) / xspan * plot_w

    def py(y: float) -> float:
        return top + (ymax - y) / yspan * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<text x="{width / 2}" y="16" text-anchor="middle" {_FONT}>{_esc(title)}</text>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{height - bottom}" stroke="#444"/>',
        f'<line x1="{left}" y1="{height - bottom}" x2="{width - right}" '
        f'y2="{height - bottom}" stroke="#444"/>',
        f'<text x="{width / 2}" y="{height - 10}" text-anchor="middle" {_FONT}>'
        f"{_esc(xlabel)}</text>",
        f'<text x="14" y="{top - 8}" {_FONT}>{_esc(ylabel)}</text>',
    ]
    for tick, anchor_y in ((ymin, py(ymin)), (ymax, py(ymax))):
        parts.append(
            f'<text x="{left - 6}" y="{_fmt(anchor_y + 4)}" text-anchor="end" {_FONT}>'
            f"{_fmt(tick)}</text>"
        )
    for tick in (xmin, xmax):
        parts.append(
            f'<text x="{_fmt(px(tick))}" y="{height - bottom + 16}" text-anchor="middle" '
            f"{_FONT}>{_fmt(tick)}</text>"
        )
    coords = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(xs, ys))
    parts.append(f'<polyline points="{coords}" fill="none" stroke="#4878a8" stroke-width="2"/>')
    for x, y in zip(xs, ys):
        parts.append(
            f'<circle class="pt" data-x="{_fmt(x)}" data-y="{_fmt(y)}" '
            f'cx="{_fmt(px(x))}" cy="{_fmt(py(y))}" r="3" fill="#4878a8"/>'
        )
    for label, v in references:
        y = py(float(v))
        parts.append(
            f'<line class="ref" data-label="{_esc(label)}" data-y="{_fmt(v)}" '
            f'x1="{left}" y1="{_fmt(y)}" x2="{width - right}" y2="{_fmt(y)}" '
            f'stroke="#a85048" stroke-dasharray="5,3"/>'
        )
        parts.append(
            f'<text x="{width - right - 4}" y="{_fmt(y - 4)}" text-anchor="end" {_FONT} '
            f'fill="#a85048">{_esc(label)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _cell_color(v: float) -> str:
    """Blue (-1) through white (0) to red (+1)."""
    v = max(-1.0, min(1.0, v))
    if v >= 0:
        r, g, b = 255, round(255 * (1 - v)), round(255 * (1 - v))
    else:
        r, g, b = round(255 * (1 + v)), round(255 * (1 + v)), 255
    return f"rgb({r},{g},{b})"


def heatmap(
    row_labels: Sequence[str],
    col_labels: Sequence[str],
    matrix: np.ndarray,
    title: str = "",
) -> str:
    """Correlation heatmap in [-1, 1]; NaN cells are drawn gray."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.shape != (len(row_labels), len(col_labels)):
        raise ValueError("matrix shape must match the label lists")
    cell, left, top = 56, 110, 100
    width = left + cell * len(col_labels) + 20
    height = top + cell * len(row_labels) + 20
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<text x="{width / 2}" y="16" text-anchor="middle" {_FONT}>{_esc(title)}</text>',
    ]
    for j, col in enumerate(col_labels):
        cx = left + j * cell + cell / 2
        parts.append(
            f'<text x="{_fmt(cx)}" y="{top - 8}" text-anchor="start" {_FONT} '
            f'transform="rotate(-45 {_fmt(cx)} {top - 8})">{_esc(col)}</text>'
        )
    for i, row in enumerate(row_labels):
        parts.append(
            f'<text x="{left - 6}" y="{_fmt(top + i * cell + cell / 2 + 4)}" '
            f'text-anchor="end" {_FONT}>{_esc(row)}</text>'
        )
        for j in range(len(col_labels)):
            v = matrix[i, j]
            fill = "#cccccc" if math.isnan(v) else _cell_color(v)
            value_attr = "nan" if math.isnan(v) else _fmt(v)
            parts.append(
                f'<rect class="cell" data-row="{_esc(row_labels[i])}" '
                f'data-col="{_esc(col_labels[j])}" data-value="{value_attr}" '
                f'x="{left + j * cell}" y="{top + i * cell}" width="{cell}" height="{cell}" '
                f'fill="{fill}" stroke="#888"/>'
            )
            label = "n/a" if math.isnan(v) else format(v, ".2f")
            parts.append(
                f'<text x="{_fmt(left + j * cell + cell / 2)}" '
                f'y="{_fmt(top + i * cell + cell / 2 + 4)}" text-anchor="middle" {_FONT}>'
                f"{label}</text>"
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
