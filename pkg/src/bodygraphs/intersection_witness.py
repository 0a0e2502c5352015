"""Intersection-graph witnesses: nested cycles, radial fans, assemblies.

Everything here works with intersection graphs (an edge whenever two
translates meet, overlap allowed).  The nested gadget stacks triangle-free
rings so deeply that any realization must keep them nested; the radial
gadget adds touching chains from the center to every outer-ring vertex,
forcing concentric annuli; assemblies of several radial copies force their
apex translates to overlap pairwise, and rescaling a convergent family of
such center plans yields an exact contact configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .bodies import SymmetricBody
from .graphs import (EmbeddedGraph, GraphKind, PointSet, build_eps_overlap,
                     build_graph, close_pairs)
from .contact_witness import normalize_frame, standard_lattice
from .lattice import lattice_from

TAIL_POLICIES = ("packing", "min")


class DepthTooSmall(ValueError):
    """The gadget parameters leave no room for the required structure."""


class NoConvergence(ValueError):
    """The refinement sequence failed to approach exact contacts."""


# -- plane geometry helpers --------------------------------------------------


def winding_fraction(points: np.ndarray, center=(0.0, 0.0)) -> float:
    """Total signed turning of the closed polyline around the center, in
    full turns."""
    d = np.asarray(points, dtype=float) - np.asarray(center, dtype=float)
    ang = np.arctan2(d[:, 1], d[:, 0])
    inc = np.diff(np.concatenate([ang, ang[:1]]))
    inc = (inc + np.pi) % (2.0 * np.pi) - np.pi
    return float(inc.sum() / (2.0 * np.pi))


def _point_in_polygon(point: np.ndarray, poly: np.ndarray) -> bool:
    x, y = point
    px = poly[:, 0]
    py = poly[:, 1]
    qx = np.roll(px, -1)
    qy = np.roll(py, -1)
    crosses = ((py > y) != (qy > y)) & (x < px + (y - py) * (qx - px) / (qy - py))
    return bool(np.count_nonzero(crosses) % 2)


def polygon_contains(cycle: np.ndarray, queries: np.ndarray,
                     center=(0.0, 0.0)) -> np.ndarray:
    """Strict containment of query points in a closed cycle.

    Fast path for cycles that are star shaped around the center: compare
    each query against the cycle's radial reach at its angle.  Cycles that
    fail the monotone-angle test fall back to crossing counts.
    """
    cycle = np.asarray(cycle, dtype=float)
    queries = np.atleast_2d(np.asarray(queries, dtype=float))
    c = np.asarray(center, dtype=float)
    d = cycle - c
    ang = np.arctan2(d[:, 1], d[:, 0])
    start = int(np.argmin(ang))
    ang_r = np.roll(ang, -start)
    cyc_r = np.roll(cycle, -start, axis=0)
    if np.all(np.diff(ang_r) > 0):
        dq = queries - c
        qa = np.arctan2(dq[:, 1], dq[:, 0])
        qr = np.hypot(dq[:, 0], dq[:, 1])
        idx = np.searchsorted(ang_r, qa, side="right") - 1
        idx = np.where(idx < 0, len(ang_r) - 1, idx)
        a = cyc_r[idx] - c
        b = cyc_r[(idx + 1) % len(cyc_r)] - c
        e = b - a
        denom = np.cos(qa) * e[:, 1] - np.sin(qa) * e[:, 0]
        cross_ae = a[:, 0] * e[:, 1] - a[:, 1] * e[:, 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            reach = np.where(np.abs(denom) > 1e-300, cross_ae / denom, np.inf)
        return qr < reach
    return np.array([_point_in_polygon(q, cycle) for q in queries])


def _convex_hull(points: np.ndarray) -> np.ndarray:
    """Andrew monotone chain; returns hull vertices in ccw order."""
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if len(pts) <= 2:
        return pts
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]

    def chain(seq):
        out = []
        for p in seq:
            while len(out) >= 2:
                o, a = out[-2], out[-1]
                if (a[0] - o[0]) * (p[1] - o[1]) - (a[1] - o[1]) * (p[0] - o[0]) <= 0:
                    out.pop()
                else:
                    break
            out.append(p)
        return out

    lower = chain(pts)
    upper = chain(pts[::-1])
    return np.array(lower[:-1] + upper[:-1])


def _polygon_area(poly: np.ndarray) -> float:
    x = poly[:, 0]
    y = poly[:, 1]
    return 0.5 * float(np.abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def _support(body: SymmetricBody, normals: np.ndarray) -> np.ndarray:
    return np.max(normals @ body.vertices.T, axis=1)


def sum_area_with_body(poly: np.ndarray, body: SymmetricBody) -> float:
    """Area of the Minkowski sum of a convex polygon with the body:
    area(P) + area(K) + sum of edge lengths times support values."""
    hull = _convex_hull(poly)
    e = np.roll(hull, -1, axis=0) - hull
    lengths = np.hypot(e[:, 0], e[:, 1])
    normals = np.column_stack([e[:, 1], -e[:, 0]]) / lengths[:, None]
    mixed = float(np.sum(lengths * _support(body, normals)))
    return _polygon_area(hull) + body.area + mixed


# -- nested triangle-free cycles ---------------------------------------------


@dataclass
class NestedGadget:
    """Deeply nested triangle-free rings with gates, collars and tails."""

    body: SymmetricBody
    frame_map: np.ndarray
    depth: int
    tail_policy: str
    radii: list
    points: PointSet
    graph: EmbeddedGraph
    sigma: list = field(default_factory=list)
    tau: list = field(default_factory=list)
    tails: list = field(default_factory=list)

    def outer_cycle_indices(self) -> np.ndarray:
        return self.sigma[-1]

    def summary(self) -> dict:
        return {
            "depth": int(self.depth),
            "tail_policy": self.tail_policy,
            "radii": [int(r) for r in self.radii],
            "points": int(len(self.points)),
            "edges": int(len(self.graph.edges)),
        }


def _ring_walk(r: int) -> np.ndarray:
    """Coefficient walk around the hexagonal ring of step radius r, ccw,
    starting at the gate corner (r, 0)."""
    corners = np.array([(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)])
    steps = []
    for i in range(6):
        a = corners[i] * r
        d = corners[(i + 1) % 6] * r - a
        d = d // r
        steps.extend(a + j * d for j in range(r))
    return np.array(steps, dtype=np.int64)


def _check_no_flat_midpoints(body: SymmetricBody) -> None:
    lat = standard_lattice()
    mids = np.array([lat.e1 + lat.e2, 2 * lat.e1 - lat.e2, lat.e1 - 2 * lat.e2])
    g = body.norms(mids)
    if np.any(g <= 2.0 + 10 * body.tolerance):
        raise DepthTooSmall(
            "body boundary is flat at lattice edge midpoints; ring sites at "
            "step distance 2 would intersect and create triangles")


def _tail_length(policy: str, sigma_pts: np.ndarray, body: SymmetricBody) -> int:
    if policy == "min":
        return 1
    blanket = sum_area_with_body(sigma_pts, body)
    return 2 * int(math.ceil(blanket / body.area)) + 2


def build_nested(body: SymmetricBody, depth: int, tail: str = "packing",
                 max_points: int = 2_000_000) -> NestedGadget:
    """Construct the nested-ring gadget to the requested depth.

    Each level is a hexagonal ring walk with its gate site removed, a
    collar cycle routed around the hole, and a straight tail leading to the
    next level.  The tail policy fixes the gap between levels: "packing"
    uses the certified blanket bound (quadratic in the radius, quickly
    enormous), "min" uses single-point tails (radii 2, 5, 8, ...).
    """
    if depth < 0:
        raise DepthTooSmall("depth must be >= 0")
    if tail not in TAIL_POLICIES:
        raise ValueError(f"unknown tail policy {tail!r}")
    body_n, frame_map = normalize_frame(body)
    _check_no_flat_midpoints(body_n)
    lat = standard_lattice()

    coeffs = []
    index_of = {}

    def add(c) -> int:
        key = (int(c[0]), int(c[1]))
        if key in index_of:
            return index_of[key]
        index_of[key] = len(coeffs)
        coeffs.append(key)
        return index_of[key]

    add((0, 0))
    add((1, 0))

    sigma_idx, tau_idx, tail_idx = [], [], []
    radii = []
    r = 2
    for level in range(1, depth + 1):
        radii.append(r)
        walk = _ring_walk(r)
        ring_part = [add(c) for c in walk[1:]]
        arc = [add((r + 1, -1)), add((r + 1, 0)), add((r, 1))]
        sigma_idx.append(np.array(ring_part + arc, dtype=np.int64))
        inner = add((r - 1, 0))
        tau = [add((r + 1, 0)), add((r, 1)), add((r - 1, 1)), inner,
               add((r, -1)), add((r + 1, -1))]
        tau_idx.append(np.array(tau, dtype=np.int64))

        if level < depth:
            sig_pts = np.asarray([coeffs[i] for i in sigma_idx[-1]], dtype=float) \
                @ np.vstack([lat.e1, lat.e2])
            t_len = _tail_length(tail, sig_pts, body_n)
            r_next = r + t_len + 2
            tail_ids = [add((x, 0)) for x in range(r + 2, r_next)]
            tail_idx.append(np.array(tail_ids, dtype=np.int64))
            r = r_next
            if len(coeffs) + 6 * r + 8 > max_points:
                raise DepthTooSmall(
                    f"level {level + 1} would exceed {max_points} points "
                    f"(next radius {r}); use tail='min' or a smaller depth")
        else:
            tail_idx.append(np.empty(0, dtype=np.int64))

    coeff_arr = np.array(coeffs, dtype=np.int64)
    pts = PointSet(coeff_arr.astype(float) @ np.vstack([lat.e1, lat.e2]), coeff_arr)
    graph = build_graph(body_n, pts, GraphKind.INTERSECTION)
    return NestedGadget(body=body_n, frame_map=frame_map, depth=depth,
                        tail_policy=tail, radii=radii, points=pts, graph=graph,
                        sigma=sigma_idx, tau=tau_idx, tails=tail_idx)


def verify_triangle_free(graph: EmbeddedGraph) -> bool:
    n = graph.n
    if len(graph.edges) == 0:
        return True
    i, j = graph.edges[:, 0], graph.edges[:, 1]
    data = np.ones(len(i), dtype=np.int8)
    a = sp.coo_matrix((data, (i, j)), shape=(n, n))
    a = (a + a.T).tocsr()
    return int((a @ a).multiply(a).nnz) == 0


def verify_nesting(gadget: NestedGadget, sample_cap: int = 4096) -> dict:
    """Every collar cycle sits strictly inside the next ring cycle, and
    every ring cycle stays strictly outside its predecessor."""
    pts = gadget.points.points
    levels_ok = []
    for k in range(gadget.depth - 1):
        outer = pts[gadget.sigma[k + 1]]
        tau_pts = pts[gadget.tau[k]]
        inner_ok = bool(np.all(polygon_contains(outer, tau_pts)))
        inner_cycle = pts[gadget.sigma[k]]
        step = max(1, len(outer) // sample_cap)
        outside_ok = not np.any(polygon_contains(inner_cycle, outer[::step]))
        levels_ok.append(inner_ok and outside_ok)
    windings = [abs(winding_fraction(pts[s])) for s in gadget.sigma]
    report = {
        "levels": levels_ok,
        "all_nested": bool(all(levels_ok)),
        "winding_min": float(min(windings, default=1.0)),
        "winding_max": float(max(windings, default=1.0)),
        "windings_unit": bool(np.allclose(windings, 1.0, atol=0.01)),
    }
    report["passed"] = report["all_nested"] and report["windings_unit"]
    return report


# -- radial gadget -------------------------------------------------------------


@dataclass
class RadialGadget:
    """Nested gadget plus touching chains from the center to every outer
    ring vertex.  Ray points are kept out of the materialized graph; their
    structure is verified directly (the full edge set would be enormous
    and nothing downstream reads it)."""

    body: SymmetricBody
    frame_map: np.ndarray
    k: int
    depth: int
    nested: NestedGadget
    apex: np.ndarray
    ray_points: np.ndarray
    ray_start: np.ndarray
    ray_len: np.ndarray
    ring_index: np.ndarray
    ray_units: np.ndarray
    boundary_norms: np.ndarray

    @property
    def full_point_count(self) -> int:
        return len(self.nested.points) + len(self.ray_points) + 1

    def summary(self) -> dict:
        return {
            "k": int(self.k),
            "depth": int(self.depth),
            "nested": self.nested.summary(),
            "rays": int(len(self.ray_start)),
            "ray_points": int(len(self.ray_points)),
            "d_min": int(self.ray_len.min()),
            "d_max": int(self.ray_len.max()),
        }


def build_radial(body: SymmetricBody, k: int, depth: int = None,
                 tail: str = "min") -> RadialGadget:
    """Center-to-boundary fan over the nested gadget.

    The ray toward outer vertex u has points at exact gauge distances
    2, 4, ..., 2*d from the apex (d = ceil((|u| - 2) / 2) steps), leaving
    a final gap of at most 2 to u itself, so consecutive ray points touch
    and the last one meets the boundary vertex.
    """
    if k < 1:
        raise DepthTooSmall("k must be >= 1")
    if depth is None:
        depth = 18 * (k + 1)
    nested = build_nested(body, depth, tail=tail)
    body_n = nested.body
    pts = nested.points.points
    boundary = pts[nested.outer_cycle_indices()]
    norms = body_n.norms(boundary)
    if float(norms.min()) < 4.0 * k:
        raise DepthTooSmall(
            f"outer ring too close to the apex (min gauge {norms.min():.1f} "
            f"< {4 * k}); increase depth")
    d = np.ceil((norms - 2.0) / 2.0).astype(np.int64)
    if int(d.min()) < 2 * k:
        raise DepthTooSmall("rays shorter than 2k steps")

    thetas = np.arctan2(boundary[:, 1], boundary[:, 0])
    units = body_n.radial_vectors(thetas)

    ray_start = np.concatenate([[0], np.cumsum(d)[:-1]])
    total = int(d.sum())
    ring_index = (np.arange(total, dtype=np.int64)
                  - np.repeat(ray_start, d) + 1).astype(np.int32)
    ray_pts = np.repeat(units, d, axis=0) * (2.0 * ring_index)[:, None]

    return RadialGadget(body=body_n, frame_map=nested.frame_map, k=k,
                        depth=depth, nested=nested, apex=np.zeros(2),
                        ray_points=ray_pts, ray_start=ray_start, ray_len=d,
                        ring_index=ring_index, ray_units=units,
                        boundary_norms=norms)


def verify_alpha(gadget: RadialGadget, points: np.ndarray = None,
                 perturbed: bool = False, ring_sample: int = None) -> dict:
    """Check the ring cycles of the fan: consecutive points on each ring
    are within meeting distance, every ray point sits in its annulus, and
    each full ring winds exactly once around the apex.

    `points` substitutes an alternative drawing of the ray points.  The
    canonical drawing must land in [2j-1, 2j]; any other drawing realizing
    the same graph only guarantees the open form (2j-2, 2j], which is what
    `perturbed` selects.  No extra slack is added in either mode: the
    bounds are properties of the graph, not of the noise magnitude.
    """
    body = gadget.body
    pts = gadget.ray_points if points is None else np.asarray(points, dtype=float)
    if pts.shape != gadget.ray_points.shape:
        raise ValueError("points must match the ray point array")
    tol = body.tolerance

    norms = body.norms(pts - gadget.apex)
    j = gadget.ring_index.astype(float)
    band = tol * np.maximum(1.0, 2 * j)
    if perturbed:
        annulus_ok = bool(np.all((norms > 2.0 * j - 2.0 - band)
                                 & (norms <= 2.0 * j + band)))
    else:
        annulus_ok = bool(np.all((norms >= 2.0 * j - 1.0 - band)
                                 & (norms <= 2.0 * j + band)))

    j_full = int(gadget.ray_len.min())
    rings = range(1, j_full + 1)
    if ring_sample is not None:
        rings = sorted(set(np.linspace(1, j_full, ring_sample, dtype=int).tolist()))
    starts = gadget.ray_start
    edge_ok = True
    winding_ok = True
    worst_gap = 0.0
    for ring in rings:
        ring_pts = pts[starts + (ring - 1)]
        diffs = np.diff(np.vstack([ring_pts, ring_pts[:1]]), axis=0)
        gaps = body.norms(diffs)
        worst_gap = max(worst_gap, float(gaps.max()))
        eband = tol * np.maximum(1.0, np.hypot(diffs[:, 0], diffs[:, 1]))
        if not np.all(gaps <= 2.0 + eband):
            edge_ok = False
        w = winding_fraction(ring_pts, gadget.apex)
        if abs(abs(w) - 1.0) > 0.01:
            winding_ok = False
    report = {
        "rings_checked": len(list(rings)),
        "full_ring_limit": j_full,
        "annulus_ok": annulus_ok,
        "edges_ok": bool(edge_ok),
        "worst_ring_gap": worst_gap,
        "winding_ok": bool(winding_ok),
        "perturbed": bool(perturbed),
    }
    report["passed"] = annulus_ok and edge_ok and winding_ok
    return report


def _radial_noise(gadget: RadialGadget, eta: float, rng) -> np.ndarray:
    """Inward radial jitter that cannot stretch any ray edge: per ray the
    pull-in amounts increase with the ring index, so consecutive ray
    points only get closer; total pull-in stays below eta."""
    pts = gadget.ray_points.copy()
    for start, d, u in zip(gadget.ray_start, gadget.ray_len, gadget.ray_units):
        steps = rng.uniform(0.0, eta / max(d, 1), int(d))
        pull = np.cumsum(steps)
        idx = np.arange(start, start + int(d))
        pts[idx] = pts[idx] - np.outer(pull, u)
    return pts


def perturb_and_check(gadget: RadialGadget, eta: float = 0.05, seed: int = 0,
                      shrink: float = 0.5, max_rounds: int = 12,
                      ring_sample: int = 32) -> dict:
    """Noise harness: redraw the ray fan with inward radial jitter, keep
    only drawings whose checked ring edges still meet (same graph on the
    sampled cycles), and require the open annulus and winding checks to
    hold with no added slack; eta shrinks until a drawing qualifies."""
    rng = np.random.default_rng(seed)
    rounds = []
    for _ in range(max_rounds):
        noisy = _radial_noise(gadget, eta, rng)
        rep = verify_alpha(gadget, points=noisy, perturbed=True,
                           ring_sample=ring_sample)
        rounds.append({"eta": float(eta), "passed": rep["passed"]})
        if rep["passed"]:
            return {"eta_final": float(eta), "rounds": rounds, "passed": True,
                    "report": rep}
        eta *= shrink
    return {"eta_final": float(eta), "rounds": rounds, "passed": False}


# -- assemblies ----------------------------------------------------------------


@dataclass
class Assembly:
    """Three radial copies with apexes on a scaled lattice triangle."""

    body: SymmetricBody
    frame_map: np.ndarray
    k: int
    host_points: np.ndarray
    host_edges: np.ndarray
    apexes: np.ndarray
    gadget: RadialGadget | None

    def adjacent(self, i: int, j: int) -> bool:
        a, b = (i, j) if i < j else (j, i)
        return any(int(e[0]) == a and int(e[1]) == b for e in self.host_edges)

    def summary(self) -> dict:
        return {
            "k": int(self.k),
            "host_points": [[float(x) for x in row] for row in self.host_points],
            "host_edges": [[int(a), int(b)] for a, b in self.host_edges],
            "apexes": [[float(x) for x in row] for row in self.apexes],
            "gadget": None if self.gadget is None else self.gadget.summary(),
        }


def standard_host(body: SymmetricBody, kind: str = "k3") -> np.ndarray:
    """Touching-translate drawings over the given body: a pair or a
    triangle of sites at pairwise gauge distance 2, stated in the body's
    own coordinates (its lattice at direction zero)."""
    lat = lattice_from(body, 0.0)
    if kind == "k2":
        return np.vstack([np.zeros(2), lat.e1])
    if kind == "k3":
        return np.vstack([np.zeros(2), lat.e1, lat.e2])
    raise ValueError(f"unknown host kind {kind!r}")


def build_assembly(body: SymmetricBody, k: int, host: np.ndarray = None,
                   materialize: bool = True, tail: str = "min",
                   depth: int = None) -> Assembly:
    """One radial-gadget copy per host vertex, the apex of copy w placed at
    (2k-2) * w.

    The host must be a contact drawing over the body (touching pairs form
    its edges); it is validated by rebuilding its contact graph.  All
    copies share one canonical gadget; a copy is the canonical point cloud
    plus its apex offset.  Below k=7 the apexes sit too close for the
    cross-edge law to clear the nested part, so that is refused.
    """
    if k < 7:
        raise DepthTooSmall("assemblies need k >= 7")
    if materialize:
        gadget = build_radial(body, k, depth=depth, tail=tail)
        body_n = gadget.body
        frame_map = gadget.frame_map
    else:
        gadget = None
        body_n, frame_map = normalize_frame(body)
    if host is None:
        host = standard_host(body, "k3")
    # host drawings are stated over the input body; carry them into the
    # normalized frame the gadget lives in
    host_n = np.asarray(host, dtype=float) @ frame_map.T
    host_graph = build_graph(body_n, host_n, GraphKind.CONTACT)
    apexes = (2.0 * k - 2.0) * host_n
    return Assembly(body=body_n, frame_map=frame_map, k=k,
                    host_points=host_n, host_edges=host_graph.edges,
                    apexes=apexes, gadget=gadget)


def verify_center_bounds(assembly: Assembly, scan: bool = True) -> dict:
    """Apex distance bounds plus the cross-copy edge law.

    Bounds: every apex pair at gauge distance at least 4k-18, and
    host-adjacent pairs additionally at most 4k+2.  Edge law: any meeting
    pair of ray points from two different copies has ring indices summing
    to at least 2k-4.
    """
    body = assembly.body
    k = assembly.k
    apexes = assembly.apexes
    n = len(apexes)
    lo, hi = 4.0 * k - 18.0, 4.0 * k + 2.0
    dists = []
    window_ok = True
    for i in range(n):
        for j in range(i + 1, n):
            d = float(body.norm(apexes[i] - apexes[j]))
            adj = assembly.adjacent(i, j)
            ok = d >= lo and (not adj or d <= hi)
            window_ok = window_ok and ok
            dists.append({"pair": [i, j], "distance": d,
                          "adjacent": bool(adj), "ok": bool(ok)})
    report = {"apex_distances": dists, "window": [lo, hi],
              "window_ok": bool(window_ok)}

    if scan and assembly.gadget is not None:
        g = assembly.gadget
        radius = (2.0 + 1e-6) * body.circumradius
        law_min = None
        law_ok = True
        checked = 0
        for a in range(n):
            for b in range(a + 1, n):
                shift = apexes[b] - apexes[a]
                pairs = close_pairs(g.ray_points, radius, g.ray_points + shift)
                if len(pairs) == 0:
                    continue
                diffs = g.ray_points[pairs[:, 0]] - (g.ray_points[pairs[:, 1]] + shift)
                gauges = body.norms(diffs)
                meet = gauges <= 2.0 + body.tolerance * np.maximum(
                    1.0, np.hypot(diffs[:, 0], diffs[:, 1]))
                if not np.any(meet):
                    continue
                jsum = (g.ring_index[pairs[meet, 0]].astype(np.int64)
                        + g.ring_index[pairs[meet, 1]])
                checked += int(np.count_nonzero(meet))
                m = int(jsum.min())
                law_min = m if law_min is None else min(law_min, m)
                if m < 2 * k - 4:
                    law_ok = False
        report["cross_pairs_checked"] = checked
        report["ring_sum_min"] = law_min
        report["ring_sum_floor"] = 2 * k - 4
        report["edge_law_ok"] = bool(law_ok)
    report["passed"] = bool(window_ok and report.get("edge_law_ok", True))
    return report


def extract_overlap(assembly: Assembly, body: SymmetricBody = None
                    ) -> tuple[EmbeddedGraph, dict]:
    """Scale the apex plan by 1/(2k+1): the copies' centers then realize
    the host as an eps-overlap drawing with eps = 10/k, every pair staying
    above the 2 - 10/k floor.

    A second body reinterprets the same center plan under another gauge
    (the drawing-over-B reading); distances are then measured in it."""
    gauge = assembly.body if body is None else body
    k = assembly.k
    eps = 10.0 / k
    centers = assembly.apexes / (2.0 * k + 1.0)
    graph = build_eps_overlap(gauge, centers, eps)
    dists = []
    n = len(centers)
    for i in range(n):
        for j in range(i + 1, n):
            dists.append(float(gauge.norm(centers[i] - centers[j])))
    floor = 2.0 - eps
    host_edges = {(int(a), int(b)) for a, b in assembly.host_edges}
    report = {
        "epsilon": eps,
        "scale": 1.0 / (2.0 * k + 1.0),
        "center_distances": dists,
        "floor": floor,
        "floor_arithmetic": (4.0 * k - 18.0) / (2.0 * k + 1.0),
        "floor_ok": bool(all(d >= floor - 1e-12 for d in dists)),
        "host_edges_survive": host_edges.issubset(
            {(int(a), int(b)) for a, b in graph.edges}),
    }
    report["passed"] = report["floor_ok"] and report["host_edges_survive"]
    return graph, report


def refine_to_contact(body: SymmetricBody, host: np.ndarray = None,
                      ks=(8, 16, 32)) -> tuple[EmbeddedGraph, dict]:
    """Drive the scaled center plans toward exact contact.

    The minimum scaled center distance (4k-4)/(2k+1) increases strictly in
    k toward 2 while all centers stay inside one fixed box; the final plan
    is rescaled so the minimum is exactly 2 and the resulting contact
    graph, which must contain the host's edges, is returned.
    """
    body_n, frame_map = normalize_frame(body)
    if host is None:
        host = standard_host(body, "k3")
    w = np.asarray(host, dtype=float) @ frame_map.T
    host_graph = build_graph(body_n, w, GraphKind.CONTACT)
    n = len(w)
    seq = []
    centers = None
    box = float(np.max(np.abs(w))) * 2.0 + 2.0
    for k in ks:
        if k < 7:
            raise DepthTooSmall("refinement stages need k >= 7")
        centers = (2.0 * k - 2.0) / (2.0 * k + 1.0) * w
        dmin = min(float(body_n.norm(centers[i] - centers[j]))
                   for i in range(n) for j in range(i + 1, n))
        seq.append({"k": int(k), "min_distance": dmin,
                    "epsilon": 10.0 / k,
                    "in_box": bool(np.max(np.abs(centers)) <= box)})
    mins = [s["min_distance"] for s in seq]
    if any(b <= a for a, b in zip(mins, mins[1:])):
        raise NoConvergence(f"scaled distances not increasing: {mins}")
    k_last = ks[-1]
    if mins[-1] < 2.0 - 10.0 / k_last:
        raise NoConvergence(
            f"final distance {mins[-1]:.6f} below 2 - 10/{k_last}")
    final = centers * (2.0 / mins[-1])
    graph = build_graph(body_n, final, GraphKind.CONTACT)
    host_edges = {(int(a), int(b)) for a, b in host_graph.edges}
    report = {
        "stages": seq,
        "monotone": True,
        "bounded_box": bool(all(s["in_box"] for s in seq)),
        "final_floor": 2.0 - 10.0 / k_last,
        "rescale": 2.0 / mins[-1],
        "contact_edges": int(len(graph.edges)),
        "host_edges_contained": host_edges.issubset(
            {(int(a), int(b)) for a, b in graph.edges}),
    }
    report["passed"] = report["host_edges_contained"] and report["bounded_box"]
    return graph, report
