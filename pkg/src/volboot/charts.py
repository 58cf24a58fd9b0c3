"""Static SVG renderers for fan charts and power curves.

Hand-rolled SVG keeps the output deterministic and diffable: same table, same
bytes.  Fan charts draw one thin translucent polyline per volatility path, the
unconditional average as a solid line and the uniform cdf as a dashed
diagonal; power charts draw per-path rejection curves plus their average.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .montecarlo import FanChartTable, PowerTable

__all__ = ["render_fanchart", "render_power"]

_W, _H = 640, 480
_MARGIN = 50


def _scale(x: np.ndarray, lo: float, hi: float, out_lo: float, out_hi: float) -> np.ndarray:
    return out_lo + (np.asarray(x, dtype=float) - lo) / (hi - lo) * (out_hi - out_lo)


def _polyline(xs: np.ndarray, ys: np.ndarray, style: str) -> str:
    pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
    return f'<polyline fill="none" {style} points="{pts}" />'


def _document(lines: list[str], x_label: str, y_label: str) -> str:
    frame = (
        f'<rect x="{_MARGIN}" y="{_MARGIN}" width="{_W - 2 * _MARGIN}" '
        f'height="{_H - 2 * _MARGIN}" fill="none" stroke="black" />'
    )
    labels = (
        f'<text x="{_W / 2:.0f}" y="{_H - 12}" text-anchor="middle" '
        f'font-size="14">{x_label}</text>'
        f'<text x="16" y="{_H / 2:.0f}" text-anchor="middle" font-size="14" '
        f'transform="rotate(-90 16 {_H / 2:.0f})">{y_label}</text>'
    )
    body = "\n".join([frame, *lines, labels])
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">\n{body}\n</svg>\n'
    )


def _axes(x_lo: float, x_hi: float):
    def to_px(xs, ys):
        return (
            _scale(xs, x_lo, x_hi, _MARGIN, _W - _MARGIN),
            _scale(ys, 0.0, 1.0, _H - _MARGIN, _MARGIN),
        )

    return to_px


def render_fanchart(table: FanChartTable, out: str | Path) -> None:
    """Write the size fan chart for ``table`` as an SVG file."""
    q = np.asarray(table.q_grid, dtype=float)
    if q.size == 0:
        raise ValueError("empty q_grid")
    to_px = _axes(0.0, 1.0)
    lines = []
    thin = 'stroke="steelblue" stroke-width="0.6" stroke-opacity="0.35"'
    for row in table.per_path_cdf:
        xs, ys = to_px(q, row)
        lines.append(_polyline(xs, ys, thin))
    xs, ys = to_px(q, table.unconditional_cdf)
    lines.append(_polyline(xs, ys, 'stroke="black" stroke-width="1.8"'))
    xs, ys = to_px(np.array([0.0, 1.0]), np.array([0.0, 1.0]))
    lines.append(_polyline(xs, ys, 'stroke="black" stroke-width="1.2" stroke-dasharray="6 4"'))
    Path(out).write_text(_document(lines, "q", "P(p* &#8804; q)"))


def render_power(table: PowerTable, out: str | Path) -> None:
    """Write the power fan chart (per-path rejection vs c) as an SVG file."""
    c = np.asarray(table.c_grid, dtype=float)
    if c.size == 0:
        raise ValueError("empty c_grid")
    hi = float(c[-1]) if c[-1] > c[0] else float(c[0]) + 1.0
    to_px = _axes(float(c[0]), hi)
    lines = []
    thin = 'stroke="firebrick" stroke-width="0.6" stroke-opacity="0.35"'
    for row in table.per_path_rejection:
        xs, ys = to_px(c, row)
        lines.append(_polyline(xs, ys, thin))
    xs, ys = to_px(c, table.per_path_rejection.mean(axis=0))
    lines.append(_polyline(xs, ys, 'stroke="black" stroke-width="1.8"'))
    Path(out).write_text(_document(lines, "c", "rejection rate"))
