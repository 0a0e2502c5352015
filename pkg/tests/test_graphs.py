"""Graph classification against brute-force oracles, and the two-circle
intersection primitives."""

import math

import numpy as np
import pytest

from bodygraphs.bodies import disk_body, regular_polygon, square_body
from bodygraphs.graphs import (EmbeddedGraph, GraphKind, ManySolutions,
                               NotCompatible, NotTouching, PointSet,
                               build_eps_overlap, build_graph, close_pairs,
                               equidistant_points, is_compatible,
                               PairTooClose, third_points)
from bodygraphs.lattice import lattice_disk, lattice_from


def brute_close_pairs(pts: np.ndarray, radius: float) -> set:
    d = pts[:, None, :] - pts[None, :, :]
    dist = np.hypot(d[..., 0], d[..., 1])
    out = set()
    n = len(pts)
    for i in range(n):
        for j in range(i + 1, n):
            if dist[i, j] <= radius:
                out.add((i, j))
    return out


def brute_edges(body, pts: np.ndarray, kind: GraphKind, epsilon=None) -> set:
    tol = body.tolerance
    out = set()
    n = len(pts)
    for i in range(n):
        for j in range(i + 1, n):
            v = pts[i] - pts[j]
            g = body.norm(v)
            band = tol * max(1.0, float(np.hypot(*v)))
            if kind in (GraphKind.CONTACT, GraphKind.UNIT_DISTANCE):
                if abs(g - 2.0) <= band:
                    out.add((i, j))
            elif kind is GraphKind.INTERSECTION:
                if g <= 2.0 + band:
                    out.add((i, j))
            else:
                if g <= 2.0 + band:
                    out.add((i, j))
    return out


def test_close_pairs_matches_brute():
    rng = np.random.default_rng(0)
    for n, radius in ((40, 0.8), (150, 1.5), (80, 6.0)):
        pts = rng.uniform(-10, 10, size=(n, 2))
        got = {(int(i), int(j)) for i, j in close_pairs(pts, radius)}
        assert got == brute_close_pairs(pts, radius)


def test_close_pairs_two_sets():
    rng = np.random.default_rng(1)
    a = rng.uniform(-5, 5, size=(60, 2))
    b = rng.uniform(-5, 5, size=(40, 2))
    got = {(int(i), int(j)) for i, j in close_pairs(a, 1.2, b)}
    want = set()
    for i in range(len(a)):
        for j in range(len(b)):
            if np.hypot(*(a[i] - b[j])) <= 1.2:
                want.add((i, j))
    assert got == want


def test_contact_graph_matches_brute_on_lattice():
    hexa = regular_polygon(6)
    lat = lattice_from(hexa, 0.0)
    pts = lattice_disk(lat, 4)
    rng = np.random.default_rng(7)
    keep = rng.random(len(pts)) < 0.75
    keep[0] = True
    cloud = pts.points[keep]
    graph = build_graph(hexa, cloud, GraphKind.CONTACT)
    assert graph.edge_set() == brute_edges(hexa, cloud, GraphKind.CONTACT)
    ok, report = is_compatible(hexa, cloud)
    assert ok and report["violations"] == 0


def test_intersection_graph_matches_brute():
    rng = np.random.default_rng(3)
    disk = disk_body(64)
    pts = rng.uniform(-8, 8, size=(250, 2))
    graph = build_graph(disk, pts, GraphKind.INTERSECTION)
    assert graph.edge_set() == brute_edges(disk, pts, GraphKind.INTERSECTION)


def test_unit_distance_ignores_overlaps_contact_rejects():
    disk = disk_body(64)
    pts = np.array([[0.0, 0.0], [2.0, 0.0], [3.0, 0.0]])
    unit = build_graph(disk, pts, GraphKind.UNIT_DISTANCE)
    assert unit.edge_set() == {(0, 1)}
    with pytest.raises(NotCompatible):
        build_graph(disk, pts, GraphKind.CONTACT)


def test_unit_distance_equals_contact_on_witness_sets():
    hexa = regular_polygon(6)
    lat = lattice_from(hexa, 0.0)
    cloud = lattice_disk(lat, 3).points
    contact = build_graph(hexa, cloud, GraphKind.CONTACT)
    unit = build_graph(hexa, cloud, GraphKind.UNIT_DISTANCE)
    assert contact.edge_set() == unit.edge_set()


def test_ambiguous_band_refused():
    disk = disk_body(64)
    tol = disk.tolerance
    pts = np.array([[0.0, 0.0], [2.0 - 5.0 * tol, 0.0]])
    with pytest.raises(NotCompatible) as exc:
        build_graph(disk, pts, GraphKind.CONTACT)
    assert exc.value.ambiguous
    assert exc.value.pair == (0, 1)


def test_clear_overlap_refused_without_ambiguity():
    disk = disk_body(64)
    pts = np.array([[0.0, 0.0], [1.5, 0.0]])
    with pytest.raises(NotCompatible) as exc:
        build_graph(disk, pts, GraphKind.CONTACT)
    assert not exc.value.ambiguous


def test_eps_overlap_floor():
    disk = disk_body(64)
    pts = np.array([[0.0, 0.0], [1.8, 0.0], [4.0, 0.0]])
    graph = build_eps_overlap(disk, pts, 0.25)
    assert graph.edge_set() == {(0, 1)}
    assert graph.epsilon == 0.25
    with pytest.raises(PairTooClose):
        build_eps_overlap(disk, pts, 0.1)
    with pytest.raises(ValueError):
        build_eps_overlap(disk, pts, 2.5)


def test_coincident_points_rejected():
    disk = disk_body(64)
    pts = np.array([[0.0, 0.0], [0.0, 0.0], [3.0, 0.0]])
    with pytest.raises(ValueError):
        build_graph(disk, pts, GraphKind.INTERSECTION)


def test_is_compatible_reports_worst_pair():
    disk = disk_body(64)
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [5.0, 0.0]])
    ok, report = is_compatible(disk, pts)
    assert not ok
    assert report["worst_pair"] == (0, 1)
    assert report["worst_gauge"] == pytest.approx(1.0)


# -- equidistant intersections -------------------------------------------------


def test_equidistant_disk_against_circle_formula():
    disk = disk_body(512)
    rng = np.random.default_rng(11)
    for _ in range(25):
        c1 = rng.uniform(-3, 3, size=2)
        d = rng.uniform(0.5, 3.5)
        ang = rng.uniform(0, 2 * math.pi)
        c2 = c1 + d * np.array([math.cos(ang), math.sin(ang)])
        got = equidistant_points(disk, c1, c2, radius=2.0)
        # two circles radius 2: intersection via the standard chord formula
        mid = (c1 + c2) / 2.0
        h = math.sqrt(4.0 - (d / 2.0) ** 2)
        n = (c2 - c1) / d
        perp = np.array([-n[1], n[0]])
        want = [mid + h * perp, mid - h * perp]
        assert len(got) == 2
        for p in got:
            assert min(np.hypot(*(p - w)) for w in want) < 5e-3


def test_third_points_hexagon_exact():
    hexa = regular_polygon(6)
    pts = third_points(hexa, [0.0, 0.0], [2.0, 0.0])
    np.testing.assert_allclose(pts[0], [1.0, math.sqrt(3.0)], atol=1e-12)
    np.testing.assert_allclose(pts[1], [1.0, -math.sqrt(3.0)], atol=1e-12)
    # both answers are genuine touching triples
    for p in pts:
        assert hexa.norm(p) == pytest.approx(2.0, abs=1e-12)
        assert hexa.norm(p - [2.0, 0.0]) == pytest.approx(2.0, abs=1e-12)


def test_third_points_requires_contact():
    hexa = regular_polygon(6)
    with pytest.raises(NotTouching):
        third_points(hexa, [0.0, 0.0], [2.5, 0.0])


def test_equidistant_rejects_far_centers():
    disk = disk_body(64)
    with pytest.raises(NotTouching):
        equidistant_points(disk, [0.0, 0.0], [4.5, 0.0], radius=2.0)


def test_flat_contact_raises_many_solutions():
    square = square_body()
    with pytest.raises(ManySolutions):
        # horizontal boundary edges of the two scaled squares overlap in a
        # whole segment: a continuum of equidistant points
        equidistant_points(square, [0.0, 0.0], [2.0, 0.0], radius=2.0)


# -- container behavior --------------------------------------------------------


def test_embedded_graph_dedup_and_validation():
    pts = PointSet(np.array([[0.0, 0.0], [2.0, 0.0], [4.0, 0.0]]))
    g = EmbeddedGraph(pts, [[0, 1], [1, 0], [1, 2]], GraphKind.CONTACT)
    assert g.edge_set() == {(0, 1), (1, 2)}
    assert list(g.degrees()) == [1, 2, 1]
    assert set(map(int, g.neighbors(1))) == {0, 2}
    with pytest.raises(ValueError):
        EmbeddedGraph(pts, [[0, 3]], GraphKind.CONTACT)


def test_graph_json_and_dot_roundtrip():
    disk = disk_body(64)
    pts = np.array([[0.0, 0.0], [2.0, 0.0], [1.0, math.sqrt(3.0)]])
    g = build_graph(disk, pts, GraphKind.INTERSECTION)
    back = EmbeddedGraph.from_json(g.to_json())
    assert back.edge_set() == g.edge_set()
    assert back.kind is g.kind
    np.testing.assert_allclose(back.points.points, pts)
    dot = g.to_dot()
    assert dot.count("--") == len(g.edges)
    assert "graph g {" in dot


def test_pointset_coeff_roundtrip():
    coeffs = np.array([[0, 0], [1, 0], [0, 1]])
    pts = PointSet(np.array([[0.0, 0.0], [2.0, 0.0], [1.0, 1.7]]), coeffs)
    back = PointSet.from_json(pts.to_json())
    np.testing.assert_allclose(back.points, pts.points)
    np.testing.assert_array_equal(back.coeffs, coeffs)
