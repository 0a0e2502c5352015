"""Origin-symmetric convex polygons and their gauge geometry.

A body is a convex polygon with an even number of vertices, strictly convex,
centrally symmetric about the origin, oriented counter-clockwise.  The gauge
(Minkowski functional) of such a polygon is a norm on the plane; translate
relations (disjoint / touching / overlapping) and chord signatures are all
expressed through it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

DEFAULT_TOLERANCE: float = 1e-9

# Curved primitives are discretized with at least this many segments.
MIN_SEGMENTS: int = 16


class InvalidBody(ValueError):
    """Input does not describe a valid symmetric convex polygon."""


class DegenerateBody(ValueError):
    """Symmetrization target has (numerically) zero area."""


class SingularMap(ValueError):
    """Linear map is not invertible at working precision."""


class Relation(enum.Enum):
    DISJOINT = "disjoint"
    TOUCH = "touch"
    OVERLAP = "overlap"


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise InvalidBody(f"expected an (n, 2) vertex array, got shape {pts.shape}")
    return pts


def _signed_area(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


class SymmetricBody:
    """Convex polygon K = -K with the origin in its interior.

    Vertices are stored counter-clockwise starting from the vertex of
    smallest polar angle, so that vertex angles increase strictly along the
    stored order; gauge queries locate their boundary sector by binary
    search on those angles.
    """

    __slots__ = ("vertices", "tolerance", "_angles", "_edges", "_vxe")

    def __init__(self, vertices, tolerance: float = DEFAULT_TOLERANCE):
        verts = _as_points(vertices)
        m = len(verts)
        if m < 4 or m % 2 != 0:
            raise InvalidBody(f"need an even vertex count >= 4, got {m}")
        if not np.all(np.isfinite(verts)):
            raise InvalidBody("non-finite vertex coordinates")
        if _signed_area(verts) <= 0:
            raise InvalidBody("vertices must be in counter-clockwise order")

        scale = float(np.max(np.abs(verts)))
        if scale <= 0:
            raise InvalidBody("degenerate vertex set")
        tol = float(tolerance)

        half = m // 2
        if not np.allclose(verts, -np.roll(verts, -half, axis=0), atol=10 * tol * scale):
            raise InvalidBody("vertex set is not centrally symmetric about the origin")
        # Snap to exact symmetry so antipodal arithmetic is bitwise clean.
        first = (verts[:half] - verts[half:]) / 2.0
        verts = np.vstack([first, -first])

        edges = np.roll(verts, -1, axis=0) - verts
        crosses = edges[:, 0] * np.roll(edges, -1, axis=0)[:, 1] - edges[:, 1] * np.roll(edges, -1, axis=0)[:, 0]
        if np.any(crosses <= tol * scale * scale):
            raise InvalidBody("polygon is not strictly convex (collinear or reflex vertices)")
        # cross(v_i, v_{i+1}) > 0 for all i is exactly "origin strictly inside".
        vxe = verts[:, 0] * np.roll(verts, -1, axis=0)[:, 1] - verts[:, 1] * np.roll(verts, -1, axis=0)[:, 0]
        if np.any(vxe <= tol * scale * scale):
            raise InvalidBody("origin is not strictly interior")

        angles = np.arctan2(verts[:, 1], verts[:, 0])
        start = int(np.argmin(angles))
        verts = np.roll(verts, -start, axis=0)
        angles = np.roll(angles, -start)
        if np.any(np.diff(angles) <= 0):
            raise InvalidBody("vertex angles are not strictly increasing")

        self.vertices = verts
        self.tolerance = tol
        self._angles = angles
        self._edges = np.roll(verts, -1, axis=0) - verts
        self._vxe = verts[:, 0] * self._edges[:, 1] - verts[:, 1] * self._edges[:, 0]
        self.vertices.setflags(write=False)

    # -- basic metrics ---------------------------------------------------

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def circumradius(self) -> float:
        return float(np.max(np.hypot(self.vertices[:, 0], self.vertices[:, 1])))

    @property
    def inradius(self) -> float:
        # Distance from the origin to each edge line.
        return float(np.min(self._vxe / np.hypot(self._edges[:, 0], self._edges[:, 1])))

    @property
    def area(self) -> float:
        return _signed_area(self.vertices)

    def _sector(self, thetas: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self._angles, thetas, side="right") - 1
        return np.where(idx < 0, len(self._angles) - 1, idx)

    # -- gauge / radial / signature ---------------------------------------

    def norms(self, points) -> np.ndarray:
        """Gauge ||x||, vectorized: x is in t*K exactly when ||x|| <= t."""
        pts = _as_points(points)
        idx = self._sector(np.arctan2(pts[:, 1], pts[:, 0]))
        e = self._edges[idx]
        return (pts[:, 0] * e[:, 1] - pts[:, 1] * e[:, 0]) / self._vxe[idx]

    def norm(self, point) -> float:
        return float(self.norms(np.asarray(point, dtype=float)[None, :])[0])

    def radial_vectors(self, thetas) -> np.ndarray:
        """Boundary point of K on the ray of angle theta, for each theta."""
        th = np.atleast_1d(np.asarray(thetas, dtype=float))
        u = np.column_stack([np.cos(th), np.sin(th)])
        idx = self._sector(np.arctan2(u[:, 1], u[:, 0]))
        e = self._edges[idx]
        r = self._vxe[idx] / (u[:, 0] * e[:, 1] - u[:, 1] * e[:, 0])
        return r[:, None] * u

    def radial_vector(self, theta: float) -> np.ndarray:
        return self.radial_vectors([theta])[0]

    def signatures(self, thetas) -> np.ndarray:
        """Length of the longest chord of K at each direction.

        For a symmetric body the longest chord at angle theta is the
        diameter through the origin, i.e. twice the boundary radius.
        """
        rv = self.radial_vectors(thetas)
        return 2.0 * np.hypot(rv[:, 0], rv[:, 1])

    def signature(self, theta: float) -> float:
        return float(self.signatures([theta])[0])

    def contains(self, point, slack: float = 0.0) -> bool:
        return self.norm(point) <= 1.0 + slack + self.tolerance

    def __repr__(self) -> str:  # pragma: no cover
        return f"SymmetricBody({len(self.vertices)} vertices, tol={self.tolerance:g})"


# -- constructions --------------------------------------------------------


def _merge_collinear(verts: np.ndarray, tol: float) -> np.ndarray:
    """Drop vertices whose adjacent edges are parallel within tolerance."""
    scale = float(np.max(np.abs(verts)))
    keep = np.ones(len(verts), dtype=bool)
    for i in range(len(verts)):
        a = verts[i] - verts[i - 1]
        b = verts[(i + 1) % len(verts)] - verts[i]
        if abs(a[0] * b[1] - a[1] * b[0]) <= tol * scale * scale:
            keep[i] = False
    return verts[keep]


def _convex_ccw(points: np.ndarray, tol: float) -> np.ndarray:
    """Validate that points trace a convex CCW polygon; fix orientation."""
    pts = points.copy()
    if abs(_signed_area(pts)) <= tol * max(1.0, float(np.max(np.abs(pts)))) ** 2:
        raise DegenerateBody("polygon has (numerically) zero area")
    if _signed_area(pts) < 0:
        pts = pts[::-1]
    pts = _merge_collinear(pts, tol)
    edges = np.roll(pts, -1, axis=0) - pts
    crosses = edges[:, 0] * np.roll(edges, -1, axis=0)[:, 1] - edges[:, 1] * np.roll(edges, -1, axis=0)[:, 0]
    if np.any(crosses <= 0):
        raise InvalidBody("polygon is not convex")
    return pts


def symmetrize(polygon, tolerance: float = DEFAULT_TOLERANCE) -> SymmetricBody:
    """Central symmetrization (x - y)/2 over x, y in P, as a polygon.

    The sum of a convex polygon and its reflection is computed by the
    edge-wise merge of the two boundary chains sorted by edge angle; the
    result is recentred, halved and snapped to exact symmetry.
    """
    if isinstance(polygon, SymmetricBody):
        pts = polygon.vertices
        tolerance = polygon.tolerance
    else:
        pts = _as_points(polygon)
    pts = _convex_ccw(pts, tolerance)

    edges = np.roll(pts, -1, axis=0) - pts
    all_edges = np.vstack([edges, -edges])
    order = np.argsort(np.arctan2(all_edges[:, 1], all_edges[:, 0]))
    chain = np.cumsum(all_edges[order], axis=0)
    chain -= (chain.max(axis=0) + chain.min(axis=0)) / 2.0
    chain = _merge_collinear(chain / 2.0, tolerance)
    return SymmetricBody(chain[::-1] if _signed_area(chain) < 0 else chain, tolerance)


def apply_linear(body: SymmetricBody, matrix) -> SymmetricBody:
    """Image body M(K); raises SingularMap when M is not invertible."""
    m = np.asarray(matrix, dtype=float)
    if m.shape != (2, 2):
        raise SingularMap(f"expected a 2x2 matrix, got shape {m.shape}")
    det = float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    scale = float(np.max(np.abs(m)))
    if not np.isfinite(det) or abs(det) <= 1e-12 * max(1.0, scale * scale):
        raise SingularMap(f"matrix is singular at working precision (det={det:g})")
    verts = body.vertices @ m.T
    if det < 0:
        verts = verts[::-1]
    return SymmetricBody(verts, body.tolerance)


def has_urtc(body: SymmetricBody) -> tuple[bool, dict]:
    """Whether equilateral point triples over the body extend uniquely.

    Holds exactly when no boundary segment has gauge length above 1; for a
    strictly convex polygon the maximal boundary segments are its edges.
    Returns (flag, report); the report names the worst edge either way.
    """
    edge_norms = body.norms(np.roll(body.vertices, -1, axis=0) - body.vertices)
    worst = int(np.argmax(edge_norms))
    report = {
        "edge_index": worst,
        "edge_start": body.vertices[worst].tolist(),
        "edge_end": body.vertices[(worst + 1) % len(body)].tolist(),
        "edge_gauge_length": float(edge_norms[worst]),
    }
    return bool(edge_norms[worst] <= 1.0 + body.tolerance), report


def translate_relation(body: SymmetricBody, v) -> Relation:
    """Relation between K and K + v: translates touch iff ||v|| = 2."""
    vec = np.asarray(v, dtype=float)
    g = body.norm(vec)
    band = body.tolerance * max(1.0, float(np.hypot(vec[0], vec[1])))
    if abs(g - 2.0) <= band:
        return Relation.TOUCH
    return Relation.OVERLAP if g < 2.0 else Relation.DISJOINT


# -- primitive loaders -----------------------------------------------------


def _require_segments(segments: int) -> int:
    n = int(segments)
    if n < MIN_SEGMENTS or n % 2 != 0:
        raise InvalidBody(f"segment count must be even and >= {MIN_SEGMENTS}, got {segments}")
    return n


def _curved(param_points, segments: int, tolerance: float) -> SymmetricBody:
    """Discretize a curved symmetric primitive, refining until every edge
    has gauge length <= 1 (keeps the unique-extension property truthful)."""
    n = _require_segments(segments)
    while True:
        body = SymmetricBody(param_points(n), tolerance)
        ok, _ = has_urtc(body)
        if ok:
            return body
        if n > 1 << 16:
            raise InvalidBody("discretization does not reach edge gauge length <= 1")
        n *= 2


def disk_body(segments: int = 256, tolerance: float = DEFAULT_TOLERANCE) -> SymmetricBody:
    """Regular polygon inscribed in the unit circle."""
    def pts(n):
        th = 2.0 * np.pi * np.arange(n) / n
        return np.column_stack([np.cos(th), np.sin(th)])
    return _curved(pts, segments, tolerance)


def ellipse_body(a: float, b: float, segments: int = 256,
                 tolerance: float = DEFAULT_TOLERANCE) -> SymmetricBody:
    if a <= 0 or b <= 0:
        raise InvalidBody("ellipse semi-axes must be positive")
    def pts(n):
        th = 2.0 * np.pi * np.arange(n) / n
        return np.column_stack([a * np.cos(th), b * np.sin(th)])
    return _curved(pts, segments, tolerance)


def regular_polygon(n: int, tolerance: float = DEFAULT_TOLERANCE,
                    symmetrized: bool = False) -> SymmetricBody:
    """Regular n-gon of circumradius 1; odd n only via symmetrization."""
    if n < 3:
        raise InvalidBody("regular polygon needs n >= 3")
    th = 2.0 * np.pi * np.arange(n) / n
    pts = np.column_stack([np.cos(th), np.sin(th)])
    if n % 2 == 1:
        if not symmetrized:
            raise InvalidBody(f"a regular {n}-gon is not symmetric; pass symmetrized=True")
        return symmetrize(pts, tolerance)
    body = SymmetricBody(pts, tolerance)
    return symmetrize(body, tolerance) if symmetrized else body


def square_body(tolerance: float = DEFAULT_TOLERANCE) -> SymmetricBody:
    return SymmetricBody([(1.0, -1.0), (1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0)], tolerance)


# -- JSON schema ------------------------------------------------------------


def body_from_spec(spec: dict) -> SymmetricBody:
    """Build a body from its JSON description.

    {"type": "polygon", "vertices": [[x, y], ...]}
    {"type": "disk", "segments": n}
    {"type": "regular", "n": k, "segments": n?}
    {"type": "ellipse", "a": a, "b": b, "segments": n}
    plus optional "tolerance", "symmetrize": true and "map": [[...], [...]]
    (symmetrization runs before the map is applied).
    """
    if not isinstance(spec, dict) or "type" not in spec:
        raise InvalidBody("body description must be an object with a 'type' field")
    kind = spec["type"]
    tol = float(spec.get("tolerance", DEFAULT_TOLERANCE))
    wants_sym = bool(spec.get("symmetrize", False))

    if kind == "polygon":
        verts = _as_points(spec.get("vertices", []))
        if wants_sym:
            body = symmetrize(verts, tol)
        else:
            if _signed_area(verts) < 0:
                raise InvalidBody("polygon vertices must be counter-clockwise")
            body = SymmetricBody(verts, tol)
    elif kind == "disk":
        body = disk_body(spec.get("segments", 256), tol)
    elif kind == "regular":
        n = int(spec.get("n", 0))
        body = regular_polygon(n, tol, symmetrized=wants_sym)
    elif kind == "ellipse":
        body = ellipse_body(spec.get("a", 1.0), spec.get("b", 1.0),
                            spec.get("segments", 256), tol)
    else:
        raise InvalidBody(f"unknown body type {kind!r}")

    if "map" in spec:
        body = apply_linear(body, spec["map"])
    return body


def body_to_spec(body: SymmetricBody) -> dict:
    return {
        "type": "polygon",
        "vertices": [[float(x), float(y)] for x, y in body.vertices],
        "tolerance": body.tolerance,
    }


@dataclass(frozen=True)
class BodyPair:
    """A named (A, B) instance fed to separation and witness pipelines."""
    a: SymmetricBody
    b: SymmetricBody
    name: str = ""
