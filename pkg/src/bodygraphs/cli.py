"""Command line interface.

Exit codes: 0 success, 2 negative verdict (the run worked and the answer
is "no"), 3 input error, 4 internal verification failure.

Every subcommand accepts --manifest PATH; the manifest records the
command, inputs, parameters, outputs (with content hashes), timings and
verdicts.  `rerun --manifest PATH` replays a recorded run; with --check
it also compares the fresh output hashes against the recorded ones.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import sys
import time

from . import jsonio, render
from .bodies import (DegenerateBody, InvalidBody, SingularMap, SymmetricBody,
                     body_from_spec, body_to_spec, has_urtc)
from .contact_witness import (AttachFailed, BeamTooShort, assemble_witness,
                              auto_tune_k, verify_rigidity)
from .graphs import (GraphKind, ManySolutions, NotCompatible, NotTouching,
                     PairTooClose, PointSet, build_eps_overlap, build_graph)
from .intersection_witness import (DepthTooSmall, NoConvergence, build_nested,
                                   build_radial, refine_to_contact,
                                   verify_alpha, verify_nesting,
                                   verify_triangle_free)
from .separation import find_separation

EXIT_OK = 0
EXIT_NEGATIVE = 2
EXIT_INPUT = 3
EXIT_VERIFY = 4

_KINDS = {
    "contact": GraphKind.CONTACT,
    "unit": GraphKind.UNIT_DISTANCE,
    "intersection": GraphKind.INTERSECTION,
    "eps": GraphKind.EPS_OVERLAP,
}


def _load_body(path: str, args) -> SymmetricBody:
    spec = jsonio.load_json(path)
    if not isinstance(spec, dict):
        raise InvalidBody(f"{path}: body spec must be a JSON object")
    spec = dict(spec)
    if getattr(args, "tolerance", None) is not None:
        spec["tolerance"] = args.tolerance
    if getattr(args, "segments", None) is not None:
        spec["segments"] = args.segments
    return body_from_spec(spec)


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _write(man: dict, role: str, path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    man["outputs"][role] = {"path": path, "sha256": _sha256(path)}


def _write_json(man: dict, role: str, path: str, obj) -> None:
    jsonio.save_json(path, obj)
    man["outputs"][role] = {"path": path, "sha256": _sha256(path)}


def _cmd_body(args, man) -> int:
    body = _load_body(args.spec, args)
    man["inputs"]["spec"] = args.spec
    flag, worst = has_urtc(body)
    man["verdicts"]["unique_triangle_property"] = bool(flag)
    out = {
        "vertices": len(body),
        "area": body.area,
        "inradius": body.inradius,
        "circumradius": body.circumradius,
        "unique_triangle_property": flag,
        "worst_edge_gauge": worst["edge_gauge_length"],
        "body": body_to_spec(body),
    }
    if args.json:
        _write_json(man, "json", args.json, out)
    if args.svg:
        scene = render.Scene()
        scene.add_body(body, opacity=0.3)
        _write(man, "svg", args.svg, scene.to_svg())
    if args.csv:
        thetas = [2.0 * math.pi * i / args.grid for i in range(args.grid)]
        _write(man, "csv", args.csv, jsonio.signature_csv(body, thetas))
    print(f"vertices={len(body)} area={body.area:.6f} "
          f"urtc={'yes' if flag else 'no'}")
    return EXIT_OK


def _cmd_graph(args, man) -> int:
    body = _load_body(args.spec, args)
    points = PointSet.from_json(jsonio.load_json(args.points))
    man["inputs"].update(spec=args.spec, points=args.points)
    kind = _KINDS[args.kind]
    if kind is GraphKind.EPS_OVERLAP:
        if args.eps is None:
            raise InvalidBody("eps graphs need --eps")
        graph = build_eps_overlap(body, points, args.eps)
    else:
        graph = build_graph(body, points, kind)
    man["verdicts"]["edges"] = int(len(graph.edges))
    if args.json:
        _write_json(man, "json", args.json, jsonio.bundle_graph(body, graph))
    if args.dot:
        _write(man, "dot", args.dot, graph.to_dot())
    if args.svg:
        _write(man, "svg", args.svg,
               render.render_drawing(body, points.points, graph.edges))
    print(f"n={graph.n} edges={len(graph.edges)} kind={graph.kind.value}")
    return EXIT_OK


def _cmd_separate(args, man) -> int:
    """Full pipeline: separation certificate, then a contact witness for
    the separated pair, then the rigidity report."""
    body_a = _load_body(args.spec, args)
    body_b = _load_body(args.spec_b, args)
    man["inputs"].update(spec=args.spec, spec_b=args.spec_b)

    for label, body in (("first", body_a), ("second", body_b)):
        flag, worst = has_urtc(body)
        if not flag:
            man["verdicts"]["urtc"] = {
                "body": label, "violating_edge": worst}
            print(f"NotURTC: {label} body has a boundary edge of gauge "
                  f"length {worst['edge_gauge_length']:.6f} > 1 from "
                  f"{worst['edge_start']} to {worst['edge_end']}; "
                  "equilateral triples over it do not extend uniquely, "
                  "so no witness applies", file=sys.stderr)
            return EXIT_NEGATIVE
    man["verdicts"]["urtc"] = True

    t0 = time.perf_counter()
    cert = find_separation(body_a, body_b, max_level=args.max_level,
                           margin=args.margin, seeds=args.seeds)
    man["timings"]["separation"] = time.perf_counter() - t0
    man["verdicts"]["separated"] = bool(cert.separated)
    man["verdicts"]["epsilon"] = float(cert.epsilon)
    man["verdicts"]["residual"] = float(cert.residual)
    if args.json:
        _write_json(man, "certificate", args.json, cert.to_json())
    if not cert.separated:
        print(f"EquivalentUpToTolerance: residual {cert.residual:.3e} at "
              f"level {cert.level}; no witness emitted")
        return EXIT_NEGATIVE

    if args.k is not None:
        k = args.k
    elif args.scaled:
        k = auto_tune_k(body_a, cert.epsilon)
    else:
        k = None
    t0 = time.perf_counter()
    witness = assemble_witness(body_a, cert=cert, k=k, other=body_b)
    man["timings"]["witness"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    report = verify_rigidity(witness, epsilon=cert.epsilon, other=body_b,
                             matrix=cert.matrix)
    man["timings"]["rigidity"] = time.perf_counter() - t0
    rigid = (report["compatible"]
             and report["backbone_lattice_uniqueness"]
             and report["beam_lattice_uniqueness"]
             and report["identity"]["max_residual"] <= 1e-9)
    man["verdicts"]["rigid"] = bool(rigid)
    if args.witness_json:
        _write_json(man, "witness", args.witness_json,
                    {"witness": witness.to_json(), "report": report})
    if args.svg:
        _write(man, "svg", args.svg, render.render_drawing(
            witness.body, witness.points.points, witness.graph.edges))
    print(f"separated=True epsilon={cert.epsilon:.9g} level={cert.level} "
          f"k={witness.k} frames={len(witness.frames)} "
          f"points={len(witness.points)} rigid={'yes' if rigid else 'no'}")
    return EXIT_OK if rigid else EXIT_VERIFY


def _cmd_witness_contact(args, man) -> int:
    body = _load_body(args.spec, args)
    man["inputs"]["spec"] = args.spec
    angles = None
    if args.angles:
        angles = [float(a) for a in args.angles.split(",")]
    if args.tune and args.epsilon is not None:
        k = auto_tune_k(body, args.epsilon)
        print(f"tuned k={k}")
        if angles is None:
            # the tuned budget is certified per direction; default to the
            # direction the tuning ran at rather than a full sweep
            angles = [0.0]
    else:
        k = args.k
    witness = assemble_witness(body, epsilon=args.epsilon, k=k, angles=angles)
    report = verify_rigidity(witness, epsilon=args.epsilon,
                             check_unique=not args.no_unique)
    ok = report.get("backbone_lattice_uniqueness", True) and \
        report.get("beam_lattice_uniqueness", True)
    man["verdicts"]["rigid"] = bool(ok)
    if args.json:
        _write_json(man, "json", args.json, {"witness": witness.to_json(),
                                             "report": report})
    if args.svg:
        _write(man, "svg", args.svg, render.render_drawing(
            witness.body, witness.points.points, witness.graph.edges))
    print(f"k={witness.k} frames={len(witness.frames)} "
          f"points={len(witness.points)} edges={len(witness.graph.edges)} "
          f"rigid={'yes' if ok else 'no'}")
    return EXIT_OK if ok else EXIT_VERIFY


def _cmd_witness_intersection(args, man) -> int:
    body = _load_body(args.spec, args)
    man["inputs"]["spec"] = args.spec
    if args.mode == "nested":
        gadget = build_nested(body, args.depth, tail=args.tail)
        tri = verify_triangle_free(gadget.graph)
        nest = verify_nesting(gadget)
        man["verdicts"].update(triangle_free=bool(tri),
                               nested=bool(nest["passed"]))
        if args.json:
            _write_json(man, "json", args.json, jsonio.bundle_nested(gadget))
        if args.svg:
            pts = gadget.points.points
            _write(man, "svg", args.svg, render.render_drawing(
                gadget.body, pts, gadget.graph.edges,
                cycles=[s for s in gadget.sigma]))
        print(f"depth={gadget.depth} points={len(gadget.points)} "
              f"triangle_free={tri} nested={nest['passed']}")
        return EXIT_OK if (tri and nest["passed"]) else EXIT_VERIFY
    gadget = build_radial(body, args.k, depth=args.depth_override)
    rep = verify_alpha(gadget, ring_sample=args.ring_sample)
    man["verdicts"]["alpha"] = bool(rep["passed"])
    print(f"k={gadget.k} depth={gadget.depth} "
          f"ray_points={len(gadget.ray_points)} alpha={rep['passed']}")
    return EXIT_OK if rep["passed"] else EXIT_VERIFY


def _cmd_refine(args, man) -> int:
    body = _load_body(args.spec, args)
    man["inputs"]["spec"] = args.spec
    graph, report = refine_to_contact(body, ks=tuple(args.ks))
    man["verdicts"]["passed"] = bool(report["passed"])
    if args.json:
        _write_json(man, "json", args.json, {"report": report,
                                             "graph": graph.to_json()})
    print(f"stages={[s['min_distance'] for s in report['stages']]} "
          f"contact_edges={report['contact_edges']}")
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def _cmd_verify(args, man) -> int:
    obj = jsonio.load_json(args.bundle)
    man["inputs"]["bundle"] = args.bundle
    ok, report = jsonio.verify_bundle(obj)
    man["verdicts"]["passed"] = bool(ok)
    print(jsonio.canonical_json(report), end="")
    return EXIT_OK if ok else EXIT_VERIFY


def _cmd_render(args, man) -> int:
    obj = jsonio.load_json(args.graph)
    man["inputs"]["graph"] = args.graph
    if not isinstance(obj, dict) or obj.get("type") != "graph":
        raise InvalidBody("render expects a graph bundle")
    body = body_from_spec(obj["body"])
    from .graphs import EmbeddedGraph
    graph = EmbeddedGraph.from_json(obj["graph"])
    _write(man, "svg", args.svg, render.render_drawing(
        body, graph.points.points, graph.edges))
    print(f"wrote {args.svg}")
    return EXIT_OK


def _cmd_rerun(args, man) -> int:
    recorded = jsonio.load_json(args.manifest_in)
    if not isinstance(recorded, dict) or "argv" not in recorded:
        raise InvalidBody("rerun expects a run manifest with an argv field")
    man["inputs"]["manifest"] = args.manifest_in
    code = main(list(recorded["argv"]))
    man["verdicts"]["exit_code"] = code
    if args.check:
        fresh = {role: _sha256(out["path"])
                 for role, out in recorded.get("outputs", {}).items()}
        stale = {role: out["sha256"]
                 for role, out in recorded.get("outputs", {}).items()}
        man["verdicts"]["outputs_identical"] = fresh == stale
        if fresh != stale:
            print("rerun outputs differ from the recorded hashes",
                  file=sys.stderr)
            return EXIT_VERIFY
    return code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="bodygraphs",
        description="Contact, unit-distance and intersection graphs of "
                    "translates of a symmetric convex body")
    p.add_argument("--tolerance", type=float, default=None,
                   help="override the body tolerance")
    p.add_argument("--segments", type=int, default=None,
                   help="override the body discretization density")
    p.add_argument("--manifest", default=None,
                   help="write a run manifest (command, inputs, parameters, "
                        "outputs, timings, verdicts) to this path")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("body", help="inspect a body spec")
    b.add_argument("--spec", required=True)
    b.add_argument("--json")
    b.add_argument("--svg")
    b.add_argument("--csv", help="write (theta, rho) signature samples")
    b.add_argument("--grid", type=int, default=360,
                   help="signature sample count for --csv")
    b.set_defaults(func=_cmd_body)

    g = sub.add_parser("graph", help="classify a point set into a graph")
    g.add_argument("--spec", required=True)
    g.add_argument("--points", required=True)
    g.add_argument("--kind", choices=sorted(_KINDS), default="contact")
    g.add_argument("--eps", type=float)
    g.add_argument("--json")
    g.add_argument("--dot")
    g.add_argument("--svg")
    g.set_defaults(func=_cmd_graph)

    s = sub.add_parser(
        "separate",
        help="certify two bodies apart, then witness the separation")
    s.add_argument("--spec", required=True)
    s.add_argument("--spec-b", required=True)
    s.add_argument("--max-level", type=int, default=6)
    s.add_argument("--margin", type=float, default=0.01)
    s.add_argument("--seeds", type=int, default=16)
    s.add_argument("--k", type=int, default=None,
                   help="frame count override for the witness stage")
    s.add_argument("--scaled", action="store_true",
                   help="build the scaled witness at an auto-tuned k "
                        "instead of the full direction count")
    s.add_argument("--json", help="certificate output path")
    s.add_argument("--witness-json", help="witness + report output path")
    s.add_argument("--svg")
    s.set_defaults(func=_cmd_separate)

    w = sub.add_parser("witness", help="build a witness assembly")
    wsub = w.add_subparsers(dest="witness_kind", required=True)

    wc = wsub.add_parser("contact", help="rigid ring-and-beam frames")
    wc.add_argument("--spec", required=True)
    wc.add_argument("--k", type=int)
    wc.add_argument("--epsilon", type=float)
    wc.add_argument("--angles", help="comma separated directions (radians)")
    wc.add_argument("--tune", action="store_true",
                    help="auto-tune k until the beam budget beats the slack")
    wc.add_argument("--no-unique", action="store_true")
    wc.add_argument("--json")
    wc.add_argument("--svg")
    wc.set_defaults(func=_cmd_witness_contact)

    wi = wsub.add_parser("intersection", help="nested or radial gadgets")
    wi.add_argument("--spec", required=True)
    wi.add_argument("--mode", choices=("nested", "radial"), default="nested")
    wi.add_argument("--depth", type=int, default=3)
    wi.add_argument("--tail", choices=("packing", "min"), default="packing")
    wi.add_argument("--k", type=int, default=1)
    wi.add_argument("--depth-override", type=int, default=None)
    wi.add_argument("--ring-sample", type=int, default=16)
    wi.add_argument("--json")
    wi.add_argument("--svg")
    wi.set_defaults(func=_cmd_witness_intersection)

    r = sub.add_parser("refine", help="drive overlap plans to exact contact")
    r.add_argument("--spec", required=True)
    r.add_argument("--ks", type=int, nargs="+", default=[8, 16, 32])
    r.add_argument("--json")
    r.set_defaults(func=_cmd_refine)

    v = sub.add_parser("verify", help="re-check a saved bundle")
    v.add_argument("--bundle", required=True)
    v.set_defaults(func=_cmd_verify)

    d = sub.add_parser("render", help="render a graph bundle to SVG")
    d.add_argument("--graph", required=True)
    d.add_argument("--svg", required=True)
    d.set_defaults(func=_cmd_render)

    rr = sub.add_parser("rerun", help="replay a recorded run manifest")
    rr.add_argument("--manifest", dest="manifest_in", required=True,
                    help="manifest to replay")
    rr.add_argument("--check", action="store_true",
                    help="fail unless the replay reproduces the recorded "
                         "output hashes")
    rr.set_defaults(func=_cmd_rerun)
    return p


def _strip_manifest(argv) -> list:
    out, skip = [], False
    for tok in argv:
        if skip:
            skip = False
            continue
        if tok == "--manifest":
            skip = True
            continue
        if tok.startswith("--manifest="):
            continue
        out.append(tok)
    return out


def _parameters(args) -> dict:
    skip = {"func", "command", "witness_kind", "manifest", "manifest_in",
            "spec", "spec_b", "points", "bundle", "graph",
            "json", "witness_json", "svg", "dot", "csv"}
    return {k: v for k, v in sorted(vars(args).items())
            if k not in skip and v is not None and not callable(v)}


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    man = {
        "type": "run-manifest",
        "command": args.command if args.command != "witness"
        else f"witness {args.witness_kind}",
        "argv": _strip_manifest(argv),
        "inputs": {},
        "parameters": _parameters(args),
        "outputs": {},
        "timings": {},
        "verdicts": {},
    }
    start = time.perf_counter()
    try:
        code = args.func(args, man)
    except (NotCompatible, PairTooClose, NotTouching, ManySolutions,
            BeamTooShort, AttachFailed, DepthTooSmall, NoConvergence) as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        man["verdicts"]["error"] = f"{type(exc).__name__}: {exc}"
        code = EXIT_VERIFY
    except (InvalidBody, DegenerateBody, SingularMap, FileNotFoundError,
            render.EmptyScene, KeyError, ValueError, OSError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        man["verdicts"]["error"] = f"{type(exc).__name__}: {exc}"
        code = EXIT_INPUT
    man["timings"]["total"] = time.perf_counter() - start
    man["exit_code"] = code
    if args.manifest:
        jsonio.save_json(args.manifest, man)
    return code


if __name__ == "__main__":
    sys.exit(main())
