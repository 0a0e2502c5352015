"""Canonical JSON, CSV and DOT serialization.

Canonical form: keys sorted, floats printed with 17 significant digits
(round-trip exact), arrays as nested lists.  Equal objects serialize to
identical bytes, which makes output files diffable and cacheable.
"""

from __future__ import annotations

import json

import numpy as np

from .bodies import SymmetricBody, body_from_spec, body_to_spec
from .graphs import EmbeddedGraph, GraphKind, PointSet, build_graph
from .intersection_witness import (NestedGadget, verify_nesting,
                                   verify_triangle_free, winding_fraction)


def _canonicalize(obj):
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, (float, np.floating)):
        # shortest round-trip repr: exact and byte-deterministic
        return float(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return _canonicalize(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): _canonicalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonicalize(v) for v in obj]
    return obj


def canonical_json(obj) -> str:
    return json.dumps(_canonicalize(obj), sort_keys=True, indent=None,
                      separators=(",", ":")) + "\n"


def save_json(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(obj))


def load_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def signature_csv(body: SymmetricBody, thetas) -> str:
    rows = ["theta,signature"]
    sig = body.signatures(np.asarray(thetas, dtype=float))
    for t, s in zip(thetas, sig):
        rows.append(f"{t:.17g},{s:.17g}")
    return "\n".join(rows) + "\n"


# -- witness bundles ---------------------------------------------------------


def bundle_graph(body: SymmetricBody, graph: EmbeddedGraph, extra: dict = None) -> dict:
    out = {
        "type": "graph",
        "body": body_to_spec(body),
        "graph": graph.to_json(),
    }
    if extra:
        out["extra"] = _canonicalize(extra)
    return out


def bundle_nested(gadget: NestedGadget) -> dict:
    return {
        "type": "nested",
        "body": body_to_spec(gadget.body),
        "frame_map": gadget.frame_map.tolist(),
        "depth": gadget.depth,
        "tail_policy": gadget.tail_policy,
        "radii": [int(r) for r in gadget.radii],
        "points": gadget.points.to_json(),
        "edges": [[int(i), int(j)] for i, j in gadget.graph.edges],
        "sigma": [s.tolist() for s in gadget.sigma],
        "tau": [t.tolist() for t in gadget.tau],
    }


def verify_bundle(obj: dict) -> tuple[bool, dict]:
    """Re-derive a bundle's graph from its body and points and re-run the
    invariants appropriate to its type."""
    kind = obj.get("type")
    if kind == "graph":
        body = body_from_spec(obj["body"])
        stored = EmbeddedGraph.from_json(obj["graph"])
        rebuilt = build_graph(body, stored.points, GraphKind(obj["graph"]["kind"])) \
            if stored.kind is not GraphKind.EPS_OVERLAP else None
        if rebuilt is None:
            return False, {"error": "eps-overlap bundles cannot be re-derived"}
        same = rebuilt.edge_set() == stored.edge_set()
        return same, {"edges_stored": len(stored.edges),
                      "edges_rebuilt": len(rebuilt.edges),
                      "edge_sets_equal": bool(same)}
    if kind == "nested":
        body = body_from_spec(obj["body"])
        points = PointSet.from_json(obj["points"])
        graph = build_graph(body, points, GraphKind.INTERSECTION)
        stored = {(min(i, j), max(i, j)) for i, j in obj["edges"]}
        same = graph.edge_set() == stored
        tri = verify_triangle_free(graph)
        sigma = [np.asarray(s, dtype=int) for s in obj["sigma"]]
        windings = [abs(winding_fraction(points.points[s])) for s in sigma]
        wind_ok = bool(np.allclose(windings, 1.0, atol=0.01))
        gadget = NestedGadget(body=body, frame_map=np.asarray(obj["frame_map"]),
                              depth=obj["depth"], tail_policy=obj["tail_policy"],
                              radii=obj["radii"], points=points, graph=graph,
                              sigma=sigma,
                              tau=[np.asarray(t, dtype=int) for t in obj["tau"]],
                              tails=[])
        nest = verify_nesting(gadget)
        ok = same and tri and wind_ok and nest["passed"]
        return ok, {"edge_sets_equal": bool(same), "triangle_free": bool(tri),
                    "windings_unit": wind_ok, "nesting": nest}
    return False, {"error": f"unknown bundle type {kind!r}"}
