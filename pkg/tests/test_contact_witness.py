"""Ring-and-beam contact witnesses: frame geometry, budgets, rigidity."""

import math

import numpy as np
import pytest

from bodygraphs.bodies import (apply_linear, disk_body, regular_polygon,
                               rotation)
from bodygraphs.contact_witness import (AttachFailed, BeamTooShort,
                                        assemble_witness, auto_tune_k,
                                        normalize_frame,
                                        required_direction_count,
                                        signature_pin_identity,
                                        standard_lattice, verify_rigidity)
from bodygraphs.graphs import GraphKind, build_graph, is_compatible
from bodygraphs.lattice import lattice_ring


def test_required_direction_count_formula():
    assert required_direction_count(0.036) == 5000
    assert required_direction_count(0.5) == 360
    for eps in (0.021, 0.09, 0.4):
        k = required_direction_count(eps)
        assert (k - 1) * eps < 180.0 <= k * eps + 1e-9


def test_normalize_frame_standard_lattice(disk256, random_polygons):
    lat = standard_lattice()
    np.testing.assert_allclose(lat.e1, [2.0, 0.0])
    np.testing.assert_allclose(lat.e2, [1.0, math.sqrt(3.0)])
    for body in [disk256] + random_polygons[:4]:
        body_n, frame_map = normalize_frame(body)
        for v in (lat.e1, lat.e2, lat.e1 - lat.e2):
            assert body_n.norm(v) == pytest.approx(2.0, abs=1e-9)
        # the map actually carries the body onto the normalized one
        mapped = apply_linear(body, frame_map)
        rng = np.random.default_rng(2)
        dirs = rng.normal(size=(32, 2))
        np.testing.assert_allclose(mapped.norms(dirs), body_n.norms(dirs),
                                   rtol=1e-9)


def test_single_frame_frozen_geometry(disk256):
    w = assemble_witness(disk256, epsilon=0.0347, k=24, angles=[0.0])
    assert len(w.points) == 385
    assert len(w.graph.edges) == 770
    assert w.scaled
    fr = w.frames[0]
    assert fr.ell == 21
    assert fr.s_param == pytest.approx(23.0)
    assert fr.chain_len == 2
    assert fr.span == pytest.approx(4.0)
    assert fr.slack == pytest.approx(48.0)
    assert fr.junction_counts == (1, 1)
    sizes = {name: b - a for name, (a, b) in fr.slices.items()}
    assert sizes == {"ring": 294, "axis": 43, "offsets": 42,
                     "connector_plus": 3, "connector_minus": 3}


def test_cardinality_identity(disk256):
    # |points| = |double ring| + beam (4*ell + 1) + two chains + junctions
    for k, theta in ((24, 0.0), (16, 0.9), (32, 2.2)):
        w = assemble_witness(disk256, epsilon=0.05, k=k, angles=[theta])
        fr = w.frames[0]
        ring = len(lattice_ring(w.lattice, k))
        beam = 4 * fr.ell + 1
        assert len(w.points) == ring + beam + 2 * fr.chain_len + 2


def test_ell_exceeds_quarter_k(disk256):
    for k in (18, 20, 24, 32, 48):
        w = assemble_witness(disk256, epsilon=0.05, k=k, angles=[0.0])
        assert w.frames[0].ell > k / 4.0


def test_frame_constants_over_angle_sweep(disk256):
    # connector bounds at dyadic directions: small chains, short spans
    angles = [i * math.pi / 8 for i in range(8)]
    w = assemble_witness(disk256, epsilon=0.05, k=24, angles=angles)
    for fr in w.frames:
        assert fr.chain_len <= 13
        assert fr.span < 28.0
        assert 6 * (fr.chain_len + 2) <= 90.0


def test_witness_compatible_and_graph_consistent(disk256):
    w = assemble_witness(disk256, epsilon=0.05, k=12, angles=[0.0, 1.2])
    ok, report = is_compatible(w.body, w.points)
    assert ok, report
    rebuilt = build_graph(w.body, w.points, GraphKind.CONTACT)
    assert rebuilt.edge_set() == w.graph.edge_set()


def test_rigidity_certificates(disk256):
    w = assemble_witness(disk256, epsilon=0.05, k=12, angles=[0.0, 1.2])
    report = verify_rigidity(w, epsilon=0.05)
    assert report["compatible"]
    assert report["backbone_lattice_uniqueness"]
    assert report["beam_lattice_uniqueness"]


def test_identity_self_control(disk256):
    # measuring the witness against its own body through the identity map
    # must produce zero displacement and satisfy the beam identity exactly
    w = assemble_witness(disk256, epsilon=0.05, k=12, angles=[0.4])
    ident = signature_pin_identity(w, disk256, np.eye(2))
    assert ident["max_residual"] <= 1e-9
    assert max(r["rhs"] for r in ident["rows"]) <= 1e-9


def test_identity_composes_with_frame_map(disk256):
    # a witness over a rotated copy, checked against the original through
    # the rotation, still reports zero displacement: the certificate map
    # and the internal normalization compose
    rot = rotation(0.37)
    w = assemble_witness(apply_linear(disk256, rot), epsilon=0.05, k=12,
                         angles=[0.3, 1.1])
    ident = signature_pin_identity(w, disk256, rot)
    assert ident["max_residual"] <= 1e-9
    assert max(r["rhs"] for r in ident["rows"]) <= 1e-9


def test_pipeline_disk_hexagon(disk256, hexagon, cert_disk_hex):
    cert = cert_disk_hex
    w = assemble_witness(disk256, cert=cert, k=24, other=hexagon)
    assert len(w.frames) == 3
    report = verify_rigidity(w, epsilon=cert.epsilon, other=hexagon,
                             matrix=cert.matrix)
    assert report["compatible"]
    assert report["backbone_lattice_uniqueness"]
    assert report["beam_lattice_uniqueness"]
    assert report["identity"]["max_residual"] <= 1e-9
    # at the demonstration scale the beam displacement already beats the
    # per-direction scaled budget
    assert report["displacement_clause_scaled"]
    assert report["displacement_max"] == pytest.approx(5.2705, abs=1e-3)


def test_auto_tune_frozen(disk256):
    assert auto_tune_k(disk256, 0.036) == 337


def test_tuned_budget_beats_slack(disk256):
    eps = 0.05
    k = auto_tune_k(disk256, eps)
    w = assemble_witness(disk256, epsilon=eps, k=k, angles=[0.0])
    fr = w.frames[0]
    assert 4.0 * fr.ell * eps > fr.slack
    report = verify_rigidity(w, epsilon=eps, check_unique=False)
    assert report["frames"][0]["slack_clause"]
    # one ring below the tuned k the budget must not clear the slack
    w2 = assemble_witness(disk256, epsilon=eps, k=k - 1, angles=[0.0])
    fr2 = w2.frames[0]
    assert 4.0 * fr2.ell * eps <= fr2.slack


def test_default_k_from_epsilon(disk256):
    w = assemble_witness(disk256, epsilon=0.5, angles=[0.0])
    assert w.k == required_direction_count(0.5)
    assert not w.scaled


def test_witness_errors(disk256, cert_disk_hex):
    with pytest.raises(BeamTooShort):
        assemble_witness(disk256, epsilon=0.05, k=4, angles=[0.0])
    with pytest.raises(ValueError):
        assemble_witness(disk256)
    with pytest.raises(ValueError):
        assemble_witness(disk256, epsilon=0.01)  # too many points
    neg = type(cert_disk_hex)(separated=False, epsilon=0.0, residual=0.0,
                              level=2, matrix=np.eye(2),
                              residuals_by_level={2: 0.0})
    with pytest.raises(ValueError):
        assemble_witness(disk256, cert=neg)


def test_witness_json(disk256):
    w = assemble_witness(disk256, epsilon=0.05, k=12, angles=[0.0, 0.9])
    obj = w.to_json()
    assert obj["k"] == 12
    assert obj["scaled"] is True
    assert len(obj["components"]) == 2
    comp = obj["components"][0]
    assert {"theta", "ring", "beam", "s1", "s2", "z1", "z2", "t"} <= set(comp)
    assert obj["graph"]["n"] == len(w.points)
