"""Minimal deterministic SVG rendering for band diagrams, cascade curves,
and mode-profile heatmaps. No plotting dependency: output bytes depend only
on the data."""

from __future__ import annotations

import math

import numpy as np


def _fmt(x: float) -> str:
    return f"{x:.4f}".rstrip("0").rstrip(".")


class SvgCanvas:
    """Fixed-size canvas with a single data-coordinate viewport."""

    def __init__(self, width=640, height=440, margin=(60, 20, 30, 45)):
        self.width = width
        self.height = height
        self.margin = margin  # left, right, top, bottom
        self.elements: list[str] = []
        self.xlim = (0.0, 1.0)
        self.ylim = (0.0, 1.0)

    def set_limits(self, xlim, ylim):
        self.xlim = xlim
        self.ylim = ylim

    def px(self, x: float) -> float:
        left, right, _, _ = self.margin
        span = self.xlim[1] - self.xlim[0]
        return left + (x - self.xlim[0]) / span * (self.width - left - right)

    def py(self, y: float) -> float:
        _, _, top, bottom = self.margin
        span = self.ylim[1] - self.ylim[0]
        return (
            self.height - bottom
            - (y - self.ylim[0]) / span * (self.height - top - bottom)
        )

    def rect_data(self, x0, x1, y0, y1, color, opacity=1.0):
        xa, xb = sorted((self.px(x0), self.px(x1)))
        ya, yb = sorted((self.py(y0), self.py(y1)))
        self.elements.append(
            f'<rect x="{_fmt(xa)}" y="{_fmt(ya)}" width="{_fmt(xb - xa)}" '
            f'height="{_fmt(yb - ya)}" fill="{color}" '
            f'fill-opacity="{_fmt(opacity)}"/>'
        )

    def polyline(self, xs, ys, color, width=1.2, dashed=False):
        pts = " ".join(
            f"{_fmt(self.px(x))},{_fmt(self.py(y))}" for x, y in zip(xs, ys)
        )
        dash = ' stroke-dasharray="5,4"' if dashed else ""
        self.elements.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="{_fmt(width)}"{dash}/>'
        )

    def polygon(self, xs, ys, color, opacity=0.35):
        pts = " ".join(
            f"{_fmt(self.px(x))},{_fmt(self.py(y))}" for x, y in zip(xs, ys)
        )
        self.elements.append(
            f'<polygon points="{pts}" fill="{color}" '
            f'fill-opacity="{_fmt(opacity)}" stroke="none"/>'
        )

    def vline(self, x, color="#999999", width=0.8):
        self.elements.append(
            f'<line x1="{_fmt(self.px(x))}" y1="{_fmt(self.py(self.ylim[0]))}" '
            f'x2="{_fmt(self.px(x))}" y2="{_fmt(self.py(self.ylim[1]))}" '
            f'stroke="{color}" stroke-width="{_fmt(width)}"/>'
        )

    def text(self, x_px, y_px, s, size=12, anchor="middle", color="#222222"):
        self.elements.append(
            f'<text x="{_fmt(x_px)}" y="{_fmt(y_px)}" font-size="{size}" '
            f'font-family="sans-serif" text-anchor="{anchor}" '
            f'fill="{color}">{s}</text>'
        )

    def label_x(self, x, s, size=12):
        self.text(self.px(x), self.height - self.margin[3] + 16, s, size)

    def label_y_axis(self, s):
        x = 16
        y = 0.5 * self.height
        self.elements.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-size="12" '
            f'font-family="sans-serif" text-anchor="middle" fill="#222222" '
            f'transform="rotate(-90 {_fmt(x)} {_fmt(y)})">{s}</text>'
        )

    def y_ticks(self, n=6, fmt="{:.2f}"):
        lo, hi = self.ylim
        for i in range(n + 1):
            y = lo + (hi - lo) * i / n
            self.text(
                self.margin[0] - 6, self.py(y) + 4, fmt.format(y),
                size=10, anchor="end",
            )
            self.elements.append(
                f'<line x1="{_fmt(self.margin[0] - 4)}" y1="{_fmt(self.py(y))}" '
                f'x2="{_fmt(self.margin[0])}" y2="{_fmt(self.py(y))}" '
                f'stroke="#222222" stroke-width="0.8"/>'
            )

    def frame(self):
        left, right, top, bottom = self.margin
        self.elements.append(
            f'<rect x="{left}" y="{top}" width="{self.width - left - right}" '
            f'height="{self.height - top - bottom}" fill="none" '
            f'stroke="#222222" stroke-width="1"/>'
        )

    def render(self) -> str:
        body = "\n".join(self.elements)
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} '
            f'{self.height}">\n<rect width="{self.width}" '
            f'height="{self.height}" fill="white"/>\n{body}\n</svg>\n'
        )


def band_diagram_svg(bands, gaps=(), title="", unit_label="THz") -> str:
    """Band diagram over the k-path: bands, shaded gaps, shaded light cone
    (when present), vertical lines and labels at path vertices."""
    canvas = SvgCanvas()
    s = bands.kpath.path_length
    f = bands.frequencies
    ymax = float(f[:, : min(f.shape[1], 12)].max()) * 1.05
    canvas.set_limits((float(s[0]), float(s[-1])), (0.0, ymax))

    if bands.light_line is not None:
        xs = list(s) + list(s[::-1])
        ys = list(np.minimum(bands.light_line, ymax)) + [ymax] * len(s)
        canvas.polygon(xs, ys, "#b0b0b0", opacity=0.55)
    for gap in gaps:
        canvas.rect_data(s[0], s[-1], gap.lower, gap.upper, "#ffd890",
                         opacity=0.6)
    for ib in range(f.shape[1]):
        canvas.polyline(s, f[:, ib], "#1f4e9c", width=1.3)
    if bands.light_line is not None:
        canvas.polyline(s, np.minimum(bands.light_line, ymax), "#555555",
                        width=1.0, dashed=True)
    for (label, _), i in zip(bands.kpath.vertices, bands.kpath.vertex_indices):
        canvas.vline(s[i])
        pretty = "&#915;" if label == "Gamma" else label
        canvas.label_x(s[i], pretty)
    canvas.y_ticks()
    canvas.frame()
    canvas.label_y_axis(f"frequency (normalized; scale to {unit_label})")
    if title:
        canvas.text(canvas.width / 2, 16, title, size=13)
    return canvas.render()


def curves_svg(
    curves, labels, xlabel="detuning / linewidth", ylabel="success probability",
    title="",
) -> str:
    """Overlayed (x, y) curves with a small legend."""
    palette = ["#1f4e9c", "#c23b22", "#2e7d32", "#7b1fa2", "#e08900"]
    canvas = SvgCanvas()
    xmin = min(float(np.min(c[:, 0])) for c in curves)
    xmax = max(float(np.max(c[:, 0])) for c in curves)
    ymax = max(1.0, max(float(np.max(c[:, 1])) for c in curves)) * 1.02
    canvas.set_limits((xmin, xmax), (0.0, ymax))
    for i, (curve, label) in enumerate(zip(curves, labels)):
        color = palette[i % len(palette)]
        canvas.polyline(curve[:, 0], curve[:, 1], color, width=1.5)
        canvas.text(
            canvas.width - canvas.margin[1] - 8,
            canvas.margin[2] + 16 + 14 * i,
            label, size=11, anchor="end", color=color,
        )
    canvas.y_ticks()
    canvas.frame()
    canvas.label_y_axis(ylabel)
    canvas.text(canvas.width / 2, canvas.height - 6, xlabel, size=12)
    if title:
        canvas.text(canvas.width / 2, 16, title, size=13)
    return canvas.render()


def heatmap_svg(grid: np.ndarray, aspect: float, title="", max_cells=120) -> str:
    """Mode-profile heatmap; the drawing box keeps the supercell aspect
    ratio and large grids are downsampled by block averaging."""
    nx, ny = grid.shape
    fx = max(1, math.ceil(nx / max_cells))
    fy = max(1, math.ceil(ny / max_cells))
    cx, cy = nx // fx, ny // fy
    block = grid[: cx * fx, : cy * fy].reshape(cx, fx, cy, fy).mean(axis=(1, 3))
    peak = block.max() or 1.0
    block = block / peak

    width = 640
    height = int(round(width / aspect)) + 40
    cell_w = (width - 20) / cx
    cell_h = (height - 40) / cy
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{width / 2}" y="16" font-size="13" '
            f'font-family="sans-serif" text-anchor="middle">{title}</text>'
        )
    for i in range(cx):
        for j in range(cy):
            v = float(block[i, j])
            r = int(round(255 * min(1.0, 0.1 + 1.4 * v)))
            g = int(round(255 * min(1.0, 1.6 * v * v)))
            b = int(round(255 * max(0.0, 0.35 - v)))
            x = 10 + i * cell_w
            y = height - 20 - (j + 1) * cell_h
            parts.append(
                f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(cell_w + 0.5)}" '
                f'height="{_fmt(cell_h + 0.5)}" fill="rgb({r},{g},{b})"/>'
            )
    parts.append("</svg>\n")
    return "\n".join(parts)
