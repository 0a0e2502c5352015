"""Gauge kernel: norm axioms, chord/symmetrization oracles, translate
relations and the unique-triangle classification.

The oracles here deliberately avoid the package's sector-lookup gauge:
boundary crossings come from per-edge ray intersection, symmetrization
from a scipy convex hull of pairwise vertex differences, and overlap
relations from shapely set operations.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial import ConvexHull
from shapely.affinity import translate as shp_translate
from shapely.geometry import LineString, Polygon

from bodygraphs.bodies import (InvalidBody, Relation, SingularMap,
                               SymmetricBody, apply_linear, body_from_spec,
                               body_to_spec, disk_body, ellipse_body,
                               has_urtc, regular_polygon, square_body,
                               symmetrize, translate_relation)
from conftest import random_nonsingular, random_symmetric_polygon

# -- oracles -----------------------------------------------------------------


def ray_boundary_scale(vertices: np.ndarray, v: np.ndarray) -> float:
    """Largest s with s*v inside the polygon, via per-edge intersection."""
    a = vertices
    b = np.roll(vertices, -1, axis=0)
    d = b - a
    # solve s*v = a + u*d for each edge
    det = v[0] * (-d[:, 1]) - v[1] * (-d[:, 0])
    ok = np.abs(det) > 1e-15
    s = (a[:, 0] * (-d[:, 1]) - a[:, 1] * (-d[:, 0])) / np.where(ok, det, 1.0)
    u = (v[0] * a[:, 1] - v[1] * a[:, 0]) / np.where(ok, det, 1.0)
    hit = ok & (s > 0) & (u >= -1e-12) & (u <= 1 + 1e-12)
    assert np.any(hit), "ray misses the polygon boundary"
    return float(np.min(s[hit]))


def gauge_oracle(vertices: np.ndarray, v: np.ndarray) -> float:
    return 1.0 / ray_boundary_scale(vertices, v)


def chord_oracle(vertices: np.ndarray, theta: float) -> float:
    """Longest chord of the polygon in direction theta: the boundary
    crossing of the difference set hull along that direction."""
    diffs = vertices[:, None, :] - vertices[None, :, :]
    diffs = diffs.reshape(-1, 2)
    hull = ConvexHull(diffs)
    u = np.array([math.cos(theta), math.sin(theta)])
    return ray_boundary_scale(diffs[hull.vertices], u)


def chord_sweep_oracle(vertices: np.ndarray, theta: float) -> float:
    """Longest chord in direction theta by sweeping cut lines across the
    polygon; the cut length is concave in the offset, so a ternary search
    converges.  Entirely shapely-based."""
    poly = Polygon(vertices)
    u = np.array([math.cos(theta), math.sin(theta)])
    n = np.array([-u[1], u[0]])
    offs = vertices @ n
    lo, hi = float(offs.min()), float(offs.max())
    span = 4.0 * (1.0 + float(np.abs(vertices).max()))

    def cut(c: float) -> float:
        mid = c * n
        line = LineString([mid - span * u, mid + span * u])
        return line.intersection(poly).length

    for _ in range(90):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if cut(m1) < cut(m2):
            lo = m1
        else:
            hi = m2
    return cut((lo + hi) / 2.0)


# -- norm axioms -------------------------------------------------------------

_AXIOM_BODIES = [
    regular_polygon(6),
    square_body(),
    disk_body(64),
    random_symmetric_polygon(np.random.default_rng(5)),
]

finite_coord = st.floats(min_value=-50.0, max_value=50.0,
                         allow_nan=False, allow_infinity=False)


@settings(max_examples=80, deadline=None)
@given(x=finite_coord, y=finite_coord, t=finite_coord,
       idx=st.integers(min_value=0, max_value=len(_AXIOM_BODIES) - 1))
def test_norm_axioms(x, y, t, idx):
    body = _AXIOM_BODIES[idx]
    v = np.array([x, y])
    n = body.norm(v)
    scale = float(np.hypot(x, y))
    assert n >= 0.0
    if scale > 1e-9:
        assert n > 0.0
        # absolute homogeneity and symmetry
        assert body.norm(-v) == pytest.approx(n, rel=1e-12, abs=1e-12)
        assert body.norm(t * v) == pytest.approx(abs(t) * n,
                                                 rel=1e-9, abs=1e-9)
    else:
        assert n <= 1e-8


@settings(max_examples=80, deadline=None)
@given(x1=finite_coord, y1=finite_coord, x2=finite_coord, y2=finite_coord,
       idx=st.integers(min_value=0, max_value=len(_AXIOM_BODIES) - 1))
def test_triangle_inequality(x1, y1, x2, y2, idx):
    body = _AXIOM_BODIES[idx]
    u = np.array([x1, y1])
    v = np.array([x2, y2])
    bound = body.norm(u) + body.norm(v)
    assert body.norm(u + v) <= bound + 1e-9 * max(1.0, bound)


def test_unit_on_own_vertices(named_fixtures, random_polygons):
    for body in list(named_fixtures.values()) + random_polygons:
        np.testing.assert_allclose(body.norms(body.vertices), 1.0,
                                   rtol=0, atol=1e-12)


def test_gauge_matches_ray_oracle(named_fixtures, random_polygons):
    rng = np.random.default_rng(12)
    for body in list(named_fixtures.values()) + random_polygons:
        for _ in range(120):
            v = rng.normal(size=2) * rng.uniform(0.1, 10.0)
            got = body.norm(v)
            want = gauge_oracle(body.vertices, v)
            assert got == pytest.approx(want, rel=1e-10, abs=1e-10)


# -- signature vs chord oracles ----------------------------------------------


def test_signature_equals_chord_oracle(named_fixtures):
    thetas = np.arange(720) * (math.pi / 360.0)
    for name, body in named_fixtures.items():
        sig = body.signatures(thetas)
        want = np.array([chord_oracle(body.vertices, t) for t in thetas])
        np.testing.assert_allclose(sig, want, rtol=0, atol=1e-7,
                                   err_msg=name)


def test_symmetrize_signature_is_original_chord():
    # the signature of the symmetrized body equals the longest chord of
    # the original asymmetric polygon, direction by direction
    triangle = np.array([[1.4, -0.2], [-0.6, 1.1], [-0.9, -0.8]])
    rng = np.random.default_rng(3)
    quad = np.array([[1.0, 0.0], [0.2, 0.9], [-1.3, 0.1], [-0.1, -1.2]])
    quad += rng.normal(size=quad.shape) * 0.05
    for poly in (triangle, quad):
        sym = symmetrize(poly)
        thetas = np.arange(720) * (math.pi / 360.0)
        want = np.array([chord_oracle(poly, t) for t in thetas])
        np.testing.assert_allclose(sym.signatures(thetas), want,
                                   rtol=0, atol=1e-7)


def test_chord_sweep_cross_check():
    # the shapely cut-line sweep agrees with the difference-hull oracle
    triangle = np.array([[1.4, -0.2], [-0.6, 1.1], [-0.9, -0.8]])
    hexa = regular_polygon(6).vertices
    for poly in (triangle, hexa):
        for theta in np.arange(36) * (math.pi / 18.0):
            a = chord_oracle(poly, theta)
            b = chord_sweep_oracle(poly, theta)
            assert a == pytest.approx(b, abs=1e-6)


def test_symmetrize_matches_hull_of_differences(random_polygons):
    rng = np.random.default_rng(77)
    for _ in range(6):
        m = int(rng.integers(3, 7))
        poly = rng.normal(size=(m, 2))
        poly = poly[ConvexHull(poly).vertices] if m > 3 else poly
        try:
            sym = symmetrize(poly)
        except InvalidBody:
            continue
        diffs = (poly[:, None, :] - poly[None, :, :]).reshape(-1, 2) / 2.0
        hull = diffs[ConvexHull(diffs).vertices]
        dirs = rng.normal(size=(200, 2))
        for v in dirs:
            assert sym.norm(v) == pytest.approx(gauge_oracle(hull, v),
                                                rel=1e-9, abs=1e-9)


# -- translate relations vs shapely -------------------------------------------


def shapely_relation(poly: Polygon, v) -> Relation:
    moved = shp_translate(poly, float(v[0]), float(v[1]))
    inter = poly.intersection(moved)
    if inter.is_empty:
        return Relation.DISJOINT
    return Relation.OVERLAP if inter.area > 1e-12 else Relation.TOUCH


def test_translate_relation_against_shapely(named_fixtures):
    rng = np.random.default_rng(99)
    for name, body in named_fixtures.items():
        poly = Polygon(body.vertices)
        for _ in range(800):
            theta = rng.uniform(0, 2 * math.pi)
            s = rng.uniform(0.3, 1.7)
            v = 2.0 * s * np.array([math.cos(theta), math.sin(theta)])
            g = body.norm(v)
            if abs(g - 2.0) <= 1e-6 * max(1.0, float(np.hypot(*v))):
                continue  # ambiguity collar around exact contact
            got = translate_relation(body, v)
            want = shapely_relation(poly, v)
            assert got == want, (name, v, g)


def test_translate_relation_touch_on_diameter(named_fixtures):
    for body in named_fixtures.values():
        for theta in np.arange(16) * (math.pi / 8.0):
            v = 2.0 * body.radial_vector(theta)
            assert translate_relation(body, v) is Relation.TOUCH


# -- unique extension of touching triples -------------------------------------


def test_urtc_true_families(disk256, hexagon, pentagon_sym, heptagon_sym,
                            octagon):
    rng = np.random.default_rng(42)
    triangle_sym = regular_polygon(3, symmetrized=True)
    for body in (disk256, triangle_sym, pentagon_sym, hexagon, heptagon_sym,
                 octagon):
        flag, report = has_urtc(body)
        assert flag, report
        # linear images keep the classification: gauges are equivariant
        image = apply_linear(body, random_nonsingular(rng))
        assert has_urtc(image)[0]


def test_urtc_hexagon_edge_exactly_one(hexagon):
    flag, report = has_urtc(hexagon)
    assert flag
    assert report["edge_gauge_length"] == pytest.approx(1.0, abs=1e-12)


def test_urtc_false_for_parallelograms(square, random_parallelograms):
    flag, report = has_urtc(square)
    assert not flag
    assert report["edge_gauge_length"] == pytest.approx(2.0, abs=1e-12)
    for body in random_parallelograms:
        got, rep = has_urtc(body)
        assert not got
        assert rep["edge_gauge_length"] == pytest.approx(2.0, abs=1e-9)


# -- constructors, spec round trip, validation --------------------------------


def test_spec_roundtrip(named_fixtures):
    for body in named_fixtures.values():
        back = body_from_spec(body_to_spec(body))
        np.testing.assert_allclose(back.vertices, body.vertices, atol=1e-15)


def test_spec_variants():
    assert len(body_from_spec({"type": "disk", "segments": 256})) == 256
    assert len(body_from_spec({"type": "regular", "n": 8})) == 8
    ell = body_from_spec({"type": "ellipse", "a": 2.0, "b": 1.0,
                          "segments": 64})
    assert len(ell) == 64
    mapped = body_from_spec({"type": "regular", "n": 6,
                             "map": [[2.0, 0.0], [0.0, 1.0]]})
    assert mapped.circumradius == pytest.approx(2.0)


def test_spec_odd_without_symmetrize_rejected():
    with pytest.raises(InvalidBody):
        body_from_spec({"type": "regular", "n": 5})
    sym = body_from_spec({"type": "regular", "n": 5, "symmetrize": True})
    assert len(sym) == 10


def test_spec_symmetrize_polygon():
    tri = [[1.4, -0.2], [-0.6, 1.1], [-0.9, -0.8]]
    body = body_from_spec({"type": "polygon", "vertices": tri,
                           "symmetrize": True})
    assert len(body) == 6
    with pytest.raises(InvalidBody):
        body_from_spec({"type": "polygon", "vertices": tri})


def test_invalid_bodies():
    with pytest.raises(InvalidBody):
        SymmetricBody([[1, 0], [0, 1], [-1, 0]])  # odd count
    with pytest.raises(InvalidBody):
        SymmetricBody([[1, 0], [0, 1], [-1, 0.5], [0, -1]])  # not symmetric
    with pytest.raises(InvalidBody):
        SymmetricBody([[2, 0], [1, 0], [-2, 0], [-1, 0]])  # flat
    with pytest.raises(InvalidBody):
        body_from_spec({"type": "disk", "segments": 11})
    with pytest.raises(InvalidBody):
        body_from_spec({"type": "nonsense"})
    with pytest.raises(InvalidBody):
        body_from_spec([1, 2, 3])


def test_singular_map_rejected(hexagon):
    with pytest.raises(SingularMap):
        apply_linear(hexagon, [[1.0, 1.0], [1.0, 1.0]])


def test_ellipse_is_mapped_disk():
    ell = ellipse_body(2.0, 0.5, 128)
    disk = disk_body(128)
    mapped = apply_linear(disk, [[2.0, 0.0], [0.0, 0.5]])
    rng = np.random.default_rng(8)
    for _ in range(50):
        v = rng.normal(size=2)
        assert ell.norm(v) == pytest.approx(mapped.norm(v), rel=1e-9)


def test_metrics(hexagon, square):
    assert hexagon.circumradius == pytest.approx(1.0)
    assert hexagon.inradius == pytest.approx(math.sqrt(3) / 2)
    assert hexagon.area == pytest.approx(3 * math.sqrt(3) / 2)
    assert square.area == pytest.approx(4.0)
    assert square.circumradius == pytest.approx(math.sqrt(2.0))
