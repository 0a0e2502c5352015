"""Point sets and translate graphs over a body gauge.

Vertices are translation vectors; two translates of a body K touch when
their difference has gauge exactly 2, overlap below 2, and are disjoint
above 2.  Graph builders classify all close pairs, using brute force for
small sets and a uniform grid join (cell size = scan radius) above.
"""

from __future__ import annotations

import enum

import numpy as np

from .bodies import SymmetricBody, _as_points

BRUTE_FORCE_LIMIT: int = 2000


class NotCompatible(ValueError):
    """A pair of points sits at gauge distance below the contact band."""

    def __init__(self, message: str, pair=None, gauge=None, ambiguous: bool = False):
        super().__init__(message)
        self.pair = pair
        self.gauge = gauge
        self.ambiguous = ambiguous


class PairTooClose(ValueError):
    """An eps-overlap point set has a pair below 2 - eps."""


class NotTouching(ValueError):
    """Third-point query on centers that are not at gauge distance 2."""


class ManySolutions(ValueError):
    """Equidistant-point query degenerates (flat contact or >2 clusters)."""

    def __init__(self, message: str, cluster_count=None, cluster_diameter=None):
        super().__init__(message)
        self.cluster_count = cluster_count
        self.cluster_diameter = cluster_diameter


class GraphKind(enum.Enum):
    CONTACT = "contact"
    UNIT_DISTANCE = "unit_distance"
    INTERSECTION = "intersection"
    EPS_OVERLAP = "eps_overlap"


class PointSet:
    """Immutable (n, 2) array of translation vectors, with optional integer
    lattice coefficients carried alongside when the set came from a lattice."""

    __slots__ = ("points", "coeffs")

    def __init__(self, points, coeffs=None):
        pts = _as_points(points)
        if len(pts) == 0:
            raise ValueError("point set must be non-empty")
        if not np.all(np.isfinite(pts)):
            raise ValueError("non-finite point coordinates")
        self.points = pts
        self.points.setflags(write=False)
        if coeffs is not None:
            coeffs = np.asarray(coeffs, dtype=np.int64)
            if coeffs.shape != pts.shape:
                raise ValueError("coefficient array must match the point array shape")
        self.coeffs = coeffs

    def __len__(self) -> int:
        return len(self.points)

    def to_json(self) -> dict:
        out = {"points": [[float(x), float(y)] for x, y in self.points]}
        if self.coeffs is not None:
            out["coeffs"] = [[int(a), int(b)] for a, b in self.coeffs]
        return out

    @staticmethod
    def from_json(obj: dict) -> "PointSet":
        return PointSet(obj["points"], obj.get("coeffs"))


# -- close-pair scan -------------------------------------------------------


def _brute_pairs(pts_a: np.ndarray, radius: float, pts_b=None) -> np.ndarray:
    if pts_b is None:
        ii, jj = np.triu_indices(len(pts_a), k=1)
        d = pts_a[ii] - pts_a[jj]
        keep = d[:, 0] ** 2 + d[:, 1] ** 2 <= radius * radius
        return np.column_stack([ii[keep], jj[keep]]).astype(np.int64)
    d = pts_a[:, None, :] - pts_b[None, :, :]
    keep = d[..., 0] ** 2 + d[..., 1] ** 2 <= radius * radius
    ii, jj = np.nonzero(keep)
    return np.column_stack([ii, jj]).astype(np.int64)


def _expand_blocks(starts_a, counts_a, starts_b, counts_b):
    """Index pairs of the block-wise cartesian products, vectorized."""
    total_per = counts_a * counts_b
    total = int(total_per.sum())
    if total == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    offsets = np.concatenate([[0], np.cumsum(total_per)[:-1]])
    t = np.arange(total, dtype=np.int64) - np.repeat(offsets, total_per)
    nb = np.repeat(counts_b, total_per)
    ii = np.repeat(starts_a, total_per) + t // nb
    jj = np.repeat(starts_b, total_per) + t % nb
    return ii, jj


class _Grid:
    def __init__(self, pts: np.ndarray, cell: float, origin: np.ndarray):
        cells = np.floor((pts - origin) / cell).astype(np.int64)
        # Dense enough packing: y-span keys never collide across x.
        self.key = cells[:, 0] * (1 << 32) + cells[:, 1]
        self.order = np.argsort(self.key, kind="stable")
        sorted_keys = self.key[self.order]
        uniq, starts = np.unique(sorted_keys, return_index=True)
        self.uniq = uniq
        self.starts = starts
        self.counts = np.diff(np.concatenate([starts, [len(pts)]]))


def _grid_pairs(pts_a: np.ndarray, radius: float, pts_b=None) -> np.ndarray:
    """All pairs within Euclidean radius via a uniform grid hash join."""
    cross = pts_b is not None
    if not cross:
        pts_b = pts_a
    origin = np.minimum(pts_a.min(axis=0), pts_b.min(axis=0)) - radius
    ga = _Grid(pts_a, radius, origin)
    gb = ga if not cross else _Grid(pts_b, radius, origin)

    if cross:
        offsets = [(dx, dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1)]
    else:
        offsets = [(0, 0), (1, 0), (0, 1), (1, 1), (1, -1)]

    out = []
    r2 = radius * radius
    for dx, dy in offsets:
        shifted = ga.uniq + dx * (1 << 32) + dy
        loc = np.searchsorted(gb.uniq, shifted)
        loc_ok = loc < len(gb.uniq)
        match = np.nonzero(loc_ok & (gb.uniq[np.minimum(loc, len(gb.uniq) - 1)] == shifted))[0]
        if len(match) == 0:
            continue
        mb = loc[match]
        ii, jj = _expand_blocks(ga.starts[match], ga.counts[match],
                                gb.starts[mb], gb.counts[mb])
        ii = ga.order[ii]
        jj = gb.order[jj]
        if not cross:
            if dx == 0 and dy == 0:
                keep = ii < jj
                ii, jj = ii[keep], jj[keep]
            else:
                lo = np.minimum(ii, jj)
                jj = np.maximum(ii, jj)
                ii = lo
        d = pts_a[ii] - pts_b[jj]
        keep = d[:, 0] ** 2 + d[:, 1] ** 2 <= r2
        if keep.any():
            out.append(np.column_stack([ii[keep], jj[keep]]))
    if not out:
        return np.empty((0, 2), np.int64)
    return np.vstack(out)


def close_pairs(points, radius: float, points_b=None) -> np.ndarray:
    """Index pairs within a Euclidean radius; (i, j) with i < j for one set,
    (i in A, j in B) when a second set is given."""
    pts_a = _as_points(points)
    pts_b = None if points_b is None else _as_points(points_b)
    size = len(pts_a) * (len(pts_b) if pts_b is not None else len(pts_a))
    if (pts_b is None and len(pts_a) <= BRUTE_FORCE_LIMIT) or (pts_b is not None and size <= BRUTE_FORCE_LIMIT ** 2):
        return _brute_pairs(pts_a, radius, pts_b)
    return _grid_pairs(pts_a, radius, pts_b)


def _scan_radius(body: SymmetricBody, gauge_limit: float) -> float:
    # gauge(d) <= g implies |d| <= g * circumradius; pad for the bands.
    return (gauge_limit + 1e-6) * body.circumradius


def _pair_gauges(body: SymmetricBody, pts: np.ndarray, pairs: np.ndarray) -> np.ndarray:
    if len(pairs) == 0:
        return np.empty(0)
    return body.norms(pts[pairs[:, 0]] - pts[pairs[:, 1]])


def _relative_band(pts: np.ndarray, pairs: np.ndarray, tol: float) -> np.ndarray:
    if len(pairs) == 0:
        return np.empty(0)
    d = pts[pairs[:, 0]] - pts[pairs[:, 1]]
    return tol * np.maximum(1.0, np.hypot(d[:, 0], d[:, 1]))


def _check_distinct(pts: np.ndarray, tol: float) -> None:
    pairs = close_pairs(pts, max(tol, 1e-12))
    if len(pairs):
        i, j = map(int, pairs[0])
        raise ValueError(f"points {i} and {j} coincide within tolerance")


# -- graphs ----------------------------------------------------------------


class EmbeddedGraph:
    """A drawn graph: a point set plus the classified edge pairs."""

    __slots__ = ("points", "edges", "kind", "epsilon", "_indptr", "_indices")

    def __init__(self, points: PointSet, edges, kind: GraphKind, epsilon: float = None):
        if not isinstance(points, PointSet):
            points = PointSet(points)
        self.points = points
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        e = np.unique(np.column_stack([lo, hi]), axis=0)
        if len(e) and (e[:, 0].min() < 0 or e[:, 1].max() >= len(points)):
            raise ValueError("edge endpoint out of range")
        self.edges = e
        self.edges.setflags(write=False)
        self.kind = kind
        if kind is GraphKind.EPS_OVERLAP and epsilon is None:
            raise ValueError("eps-overlap graphs need epsilon")
        self.epsilon = epsilon
        self._indptr = None
        self._indices = None

    @property
    def n(self) -> int:
        return len(self.points)

    def edge_set(self) -> set:
        return {(int(i), int(j)) for i, j in self.edges}

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n)

    def _adjacency(self):
        if self._indptr is None:
            both = np.concatenate([self.edges, self.edges[:, ::-1]])
            order = np.lexsort((both[:, 1], both[:, 0]))
            both = both[order]
            counts = np.bincount(both[:, 0], minlength=self.n)
            self._indptr = np.concatenate([[0], np.cumsum(counts)])
            self._indices = both[:, 1]
        return self._indptr, self._indices

    def neighbors(self, v: int) -> np.ndarray:
        indptr, indices = self._adjacency()
        return indices[indptr[v]:indptr[v + 1]]

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "kind": self.kind.value,
            "edges": [[int(i), int(j)] for i, j in self.edges],
            "points": self.points.to_json(),
        }
        if self.epsilon is not None:
            out["epsilon"] = float(self.epsilon)
        return out

    @staticmethod
    def from_json(obj: dict) -> "EmbeddedGraph":
        return EmbeddedGraph(PointSet.from_json(obj["points"]), obj.get("edges", []),
                             GraphKind(obj["kind"]), obj.get("epsilon"))

    def to_dot(self, name: str = "g", precision: int = 6) -> str:
        lines = [f"graph {name} {{", "  node [shape=point];"]
        for i, (x, y) in enumerate(self.points.points):
            lines.append(f'  {i} [pos="{x:.{precision}f},{y:.{precision}f}!"];')
        for i, j in self.edges:
            lines.append(f"  {i} -- {j};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def is_compatible(body: SymmetricBody, points) -> tuple[bool, dict]:
    """Whether all pairwise gauge distances are >= 2 (within tolerance)."""
    pts = points.points if isinstance(points, PointSet) else _as_points(points)
    tol = body.tolerance
    pairs = close_pairs(pts, _scan_radius(body, 2.0))
    gauges = _pair_gauges(body, pts, pairs)
    band = _relative_band(pts, pairs, tol)
    bad = gauges < 2.0 - band
    report = {"checked_pairs": int(len(pairs)), "violations": int(np.count_nonzero(bad))}
    if report["violations"]:
        w = int(np.argmin(gauges - (2.0 - band)))
        report["worst_pair"] = (int(pairs[w, 0]), int(pairs[w, 1]))
        report["worst_gauge"] = float(gauges[w])
    return report["violations"] == 0, report


def build_graph(body: SymmetricBody, points, kind: GraphKind = GraphKind.CONTACT) -> EmbeddedGraph:
    """Classify all close pairs into the requested translate graph.

    Contact graphs demand a compatible point set and reject pairs falling
    in the ambiguous band (2 - 10*tol, 2 - tol) rather than guessing.
    """
    ps = points if isinstance(points, PointSet) else PointSet(points)
    pts = ps.points
    tol = body.tolerance
    _check_distinct(pts, tol)
    pairs = close_pairs(pts, _scan_radius(body, 2.0))
    gauges = _pair_gauges(body, pts, pairs)
    band = _relative_band(pts, pairs, tol)

    if kind in (GraphKind.CONTACT, GraphKind.UNIT_DISTANCE):
        if kind is GraphKind.CONTACT:
            low = gauges < 2.0 - band
            ambiguous = low & (gauges > 2.0 - 10.0 * band)
            if np.any(ambiguous):
                w = int(np.nonzero(ambiguous)[0][0])
                raise NotCompatible(
                    f"pair {tuple(map(int, pairs[w]))} sits in the ambiguous contact band "
                    f"(gauge {gauges[w]:.12g})",
                    pair=tuple(map(int, pairs[w])), gauge=float(gauges[w]), ambiguous=True)
            if np.any(low):
                w = int(np.argmin(gauges))
                raise NotCompatible(
                    f"pair {tuple(map(int, pairs[w]))} overlaps (gauge {gauges[w]:.12g} < 2)",
                    pair=tuple(map(int, pairs[w])), gauge=float(gauges[w]))
        touch = np.abs(gauges - 2.0) <= band
        return EmbeddedGraph(ps, pairs[touch], kind)

    if kind is GraphKind.INTERSECTION:
        meet = gauges <= 2.0 + band
        return EmbeddedGraph(ps, pairs[meet], kind)

    raise ValueError("eps-overlap graphs are built by build_eps_overlap")


def build_eps_overlap(body: SymmetricBody, points, epsilon: float) -> EmbeddedGraph:
    """Intersection graph of a set whose pairs all stay above 2 - epsilon."""
    if not 0 < epsilon < 2:
        raise ValueError("epsilon must lie in (0, 2)")
    ps = points if isinstance(points, PointSet) else PointSet(points)
    pts = ps.points
    tol = body.tolerance
    _check_distinct(pts, tol)
    pairs = close_pairs(pts, _scan_radius(body, 2.0))
    gauges = _pair_gauges(body, pts, pairs)
    band = _relative_band(pts, pairs, tol)
    low = gauges < 2.0 - epsilon - band
    if np.any(low):
        w = int(np.argmin(gauges))
        raise PairTooClose(
            f"pair {tuple(map(int, pairs[w]))} at gauge {gauges[w]:.12g} < 2 - epsilon")
    meet = gauges <= 2.0 + band
    return EmbeddedGraph(ps, pairs[meet], GraphKind.EPS_OVERLAP, epsilon=epsilon)


# -- equidistant points ------------------------------------------------------


def _segment_intersections(p: np.ndarray, r: np.ndarray, q: np.ndarray, s: np.ndarray,
                           eps: float):
    """Pairwise proper intersections of segment families p+t*r, q+u*s."""
    rxs = r[:, None, 0] * s[None, :, 1] - r[:, None, 1] * s[None, :, 0]
    qp = q[None, :, :] - p[:, None, :]
    qpxr = qp[..., 0] * r[:, None, 1] - qp[..., 1] * r[:, None, 0]
    qpxs = qp[..., 0] * s[None, :, 1] - qp[..., 1] * s[None, :, 0]
    parallel = np.abs(rxs) <= eps
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(parallel, np.nan, qpxs / rxs)
        u = np.where(parallel, np.nan, qpxr / rxs)
    hit = (~parallel) & (t >= -1e-12) & (t <= 1 + 1e-12) & (u >= -1e-12) & (u <= 1 + 1e-12)
    ti, si = np.nonzero(hit)
    pts = p[ti] + t[ti, si][:, None] * r[ti]
    collinear = parallel & (np.abs(qpxr) <= eps)
    return pts, collinear


def equidistant_points(body: SymmetricBody, c1, c2, radius: float = 2.0,
                       expect_two: bool = True) -> np.ndarray:
    """Points x with gauge distance `radius` to both centers.

    Intersects the boundary polylines of radius*K + c1 and radius*K + c2
    segment by segment; answers are deduplicated within 10*tolerance.
    """
    c1 = np.asarray(c1, dtype=float)
    c2 = np.asarray(c2, dtype=float)
    sep = body.norm(c2 - c1)
    if not 0 < sep < 2 * radius:
        raise NotTouching(f"centers at gauge distance {sep:.12g} have no proper "
                          f"equidistant pair at radius {radius}")
    verts1 = radius * body.vertices + c1
    verts2 = radius * body.vertices + c2
    e1 = np.roll(verts1, -1, axis=0) - verts1
    e2 = np.roll(verts2, -1, axis=0) - verts2
    scale = radius * body.circumradius
    eps = 100 * np.finfo(float).eps * scale * scale
    pts, collinear = _segment_intersections(verts1, e1, verts2, e2, eps)

    merge_tol = 10 * body.tolerance * max(1.0, scale)
    if np.any(collinear):
        # Overlapping collinear boundary pieces mean a flat contact zone.
        ti, si = np.nonzero(collinear)
        for a, b in zip(ti, si):
            d = e1[a] / np.dot(e1[a], e1[a])
            lo = np.dot(verts2[b] - verts1[a], d)
            hi = np.dot(verts2[b] + e2[b] - verts1[a], d)
            lo, hi = min(lo, hi), max(lo, hi)
            overlap = (min(hi, 1.0) - max(lo, 0.0)) * np.hypot(*e1[a])
            if overlap > merge_tol:
                raise ManySolutions(
                    f"boundaries share a segment of length {overlap:.6g}",
                    cluster_diameter=float(overlap))

    if len(pts) == 0:
        raise NotTouching("boundary polylines do not intersect")
    clusters = [pts[0][None, :]]
    for p in pts[1:]:
        for k, cl in enumerate(clusters):
            if np.hypot(*(p - cl.mean(axis=0))) <= merge_tol:
                clusters[k] = np.vstack([cl, p])
                break
        else:
            clusters.append(p[None, :])
    centers = np.array([cl.mean(axis=0) for cl in clusters])
    if expect_two and len(centers) != 2:
        diam = max((float(np.max(np.hypot(*(cl - cl.mean(axis=0)).T))) for cl in clusters),
                   default=0.0)
        raise ManySolutions(f"expected 2 equidistant points, found {len(centers)} clusters",
                            cluster_count=len(centers), cluster_diameter=diam)
    # Deterministic order: positive side of the center line first.
    side = np.sign((c2 - c1)[0] * (centers[:, 1] - c1[1]) - (c2 - c1)[1] * (centers[:, 0] - c1[0]))
    return centers[np.argsort(-side, kind="stable")]


def third_points(body: SymmetricBody, v1, v2) -> np.ndarray:
    """The two points at gauge distance 2 from both touching translates."""
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    g = body.norm(v2 - v1)
    if abs(g - 2.0) > body.tolerance * max(1.0, float(np.hypot(*(v2 - v1)))):
        raise NotTouching(f"centers at gauge distance {g:.12g}, not 2")
    return equidistant_points(body, v1, v2, radius=2.0)
