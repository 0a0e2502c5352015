"""Deterministic SVG rendering of bodies, drawings and cycles.

Output is plain SVG 1.1 text with all coordinates at fixed 6-decimal
precision, so identical scenes produce byte-identical files.
"""

from __future__ import annotations

import numpy as np

from .bodies import SymmetricBody

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
           "#8c564b", "#17becf", "#e377c2")


class EmptyScene(ValueError):
    """Nothing to draw."""


def _fmt(x: float) -> str:
    out = f"{x:.6f}"
    return "0.000000" if out == "-0.000000" else out


class Scene:
    """Collects shapes, then emits one SVG document."""

    def __init__(self, width: int = 1000, margin: float = 0.05):
        self.width = int(width)
        self.margin = float(margin)
        self._polygons = []
        self._polylines = []
        self._circles = []
        self._segments = []

    def add_body(self, body: SymmetricBody, center=(0.0, 0.0), scale: float = 1.0,
                 color: str = "#1f77b4", opacity: float = 0.1):
        c = np.asarray(center, dtype=float)
        self._polygons.append((scale * body.vertices + c, color, opacity))

    def add_bodies(self, body: SymmetricBody, centers, scale: float = 1.0,
                   color: str = "#1f77b4", opacity: float = 0.1):
        for c in np.asarray(centers, dtype=float).reshape(-1, 2):
            self.add_body(body, c, scale=scale, color=color, opacity=opacity)

    def add_points(self, points, radius: float = 0.05, color: str = "#000000"):
        for p in np.asarray(points, dtype=float).reshape(-1, 2):
            self._circles.append((p, radius, color))

    def add_edges(self, points, edges, color: str = "#555555", width: float = 0.02):
        pts = np.asarray(points, dtype=float)
        for i, j in np.asarray(edges, dtype=int).reshape(-1, 2):
            self._segments.append((pts[i], pts[j], color, width))

    def add_cycle(self, points, color: str = None, width: float = 0.04,
                  index: int = 0):
        color = color or PALETTE[index % len(PALETTE)]
        pts = np.asarray(points, dtype=float)
        closed = np.vstack([pts, pts[:1]])
        self._polylines.append((closed, color, width))

    def _bounds(self):
        xs, ys = [], []
        for poly, _, _ in self._polygons:
            xs.append(poly[:, 0]); ys.append(poly[:, 1])
        for line, _, _ in self._polylines:
            xs.append(line[:, 0]); ys.append(line[:, 1])
        for p, r, _ in self._circles:
            xs.append(np.array([p[0] - r, p[0] + r]))
            ys.append(np.array([p[1] - r, p[1] + r]))
        for a, b, _, _ in self._segments:
            xs.append(np.array([a[0], b[0]])); ys.append(np.array([a[1], b[1]]))
        if not xs:
            raise EmptyScene("scene has no shapes")
        x = np.concatenate(xs)
        y = np.concatenate(ys)
        return float(x.min()), float(x.max()), float(y.min()), float(y.max())

    def to_svg(self) -> str:
        x0, x1, y0, y1 = self._bounds()
        span = max(x1 - x0, y1 - y0, 1e-9)
        pad = self.margin * span
        x0 -= pad; x1 += pad; y0 -= pad; y1 += pad
        w = x1 - x0
        h = y1 - y0
        height = int(round(self.width * h / w))

        def sx(x): return (x - x0) / w * self.width
        def sy(y): return (y1 - y) / h * height
        unit = self.width / w

        parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
            f'height="{height}" viewBox="0 0 {self.width} {height}">',
            f'<rect width="{self.width}" height="{height}" fill="#ffffff"/>',
        ]
        for poly, color, opacity in self._polygons:
            coords = " ".join(f"{_fmt(sx(p[0]))},{_fmt(sy(p[1]))}" for p in poly)
            parts.append(f'<polygon points="{coords}" fill="{color}" '
                         f'fill-opacity="{opacity:.3f}" stroke="{color}" '
                         f'stroke-opacity="0.4" stroke-width="1"/>')
        for a, b, color, width in self._segments:
            parts.append(
                f'<line x1="{_fmt(sx(a[0]))}" y1="{_fmt(sy(a[1]))}" '
                f'x2="{_fmt(sx(b[0]))}" y2="{_fmt(sy(b[1]))}" stroke="{color}" '
                f'stroke-width="{_fmt(max(0.5, width * unit))}"/>')
        for line, color, width in self._polylines:
            coords = " ".join(f"{_fmt(sx(p[0]))},{_fmt(sy(p[1]))}" for p in line)
            parts.append(f'<polyline points="{coords}" fill="none" '
                         f'stroke="{color}" '
                         f'stroke-width="{_fmt(max(0.5, width * unit))}"/>')
        for p, r, color in self._circles:
            parts.append(f'<circle cx="{_fmt(sx(p[0]))}" cy="{_fmt(sy(p[1]))}" '
                         f'r="{_fmt(max(1.0, r * unit))}" fill="{color}"/>')
        parts.append("</svg>")
        return "\n".join(parts) + "\n"


def render_drawing(body: SymmetricBody, points, edges=None, cycles=(),
                   width: int = 1000, body_opacity: float = 0.1) -> str:
    """One-call scene: translates of the body at each point, contact/meet
    edges, and optional highlighted cycles (one palette color each)."""
    scene = Scene(width=width)
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    scene.add_bodies(body, pts, opacity=body_opacity)
    if edges is not None and len(edges):
        scene.add_edges(pts, edges)
    for i, cyc in enumerate(cycles):
        scene.add_cycle(pts[np.asarray(cyc, dtype=int)], index=i)
    scene.add_points(pts, radius=0.02 * body.circumradius)
    return scene.to_svg()
