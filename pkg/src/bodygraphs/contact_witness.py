"""Rigid contact assemblies that pin boundary signatures.

One frame per probed direction: a double hexagonal ring (a triangulated,
rigid annulus of lattice translates), a diameter beam crossing its hole in
the probed direction, and short connector chains tying the beam ends to the
ring.  Consecutive frames are offset so their rings meet in a triangulated
zigzag, so the chain of rings is rigid as a whole.  In any realization of
the resulting contact graph by another body, the beam length is forced,
which pins the ratio of the two boundary signatures in the beam direction
to within (connector slack) / (beam length).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bodies import SymmetricBody, apply_linear
from .graphs import (EmbeddedGraph, GraphKind, PointSet, build_graph,
                     close_pairs, equidistant_points)
from .lattice import Lattice, is_lattice_unique, lattice_from, lattice_ring

TOTAL_SLACK: float = 180.0
CLEARANCE: float = 4.0


class BeamTooShort(ValueError):
    """The ring hole cannot host a beam of at least two steps."""


class AttachFailed(ValueError):
    """No compatible junction point bridges a connector to the ring."""


def required_direction_count(epsilon: float) -> int:
    """Directions needed so the per-direction budgets sum below the total
    slack allowance: ceil(TOTAL_SLACK / epsilon)."""
    if not 0 < epsilon:
        raise ValueError("epsilon must be positive")
    return int(math.ceil(TOTAL_SLACK / epsilon))


def standard_lattice() -> Lattice:
    return Lattice(np.array([2.0, 0.0]), np.array([1.0, math.sqrt(3.0)]))


def normalize_frame(body: SymmetricBody) -> tuple[SymmetricBody, np.ndarray]:
    """Map the body so its direction-0 lattice becomes the standard basis
    (2,0), (1, sqrt 3); returns the mapped body and the matrix used."""
    lat = lattice_from(body, 0.0)
    target = np.array([[2.0, 1.0], [0.0, math.sqrt(3.0)]])
    frame = target @ np.linalg.inv(lat.basis)
    return apply_linear(body, frame), frame


def build_ring_graph(body: SymmetricBody, k: int) -> EmbeddedGraph:
    """Contact graph of the double ring (step distances k and k+1) in the
    body's normalized lattice."""
    body_n, _ = normalize_frame(body)
    ring = lattice_ring(standard_lattice(), k)
    return build_graph(body_n, ring, GraphKind.CONTACT)


def max_beam_extent(body: SymmetricBody, ring_points: np.ndarray,
                    theta: float) -> float:
    """Largest Euclidean reach along direction theta keeping gauge distance
    above the clearance to every ring point."""
    u = np.array([math.cos(theta), math.sin(theta)])
    reach = float(np.max(np.hypot(ring_points[:, 0], ring_points[:, 1]))) + 1.0

    def min_dist(r: float) -> float:
        return float(np.min(body.norms(r * u - ring_points)))

    if min_dist(0.0) <= CLEARANCE:
        return 0.0
    lo, hi = 0.0, None
    r = 0.0
    while r < reach:
        r += 0.5
        if min_dist(r) <= CLEARANCE:
            hi = r
            break
        lo = r
    if hi is None:
        return reach
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if min_dist(mid) <= CLEARANCE:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@dataclass
class Frame:
    """Bookkeeping for one direction's ring-and-beam assembly."""

    index: int
    theta: float
    center: np.ndarray
    ell: int
    step: np.ndarray
    offset: np.ndarray
    s_param: float
    chain_len: int
    slices: dict = field(default_factory=dict)
    junction_counts: tuple = (0, 0)

    @property
    def connector_size(self) -> int:
        return self.chain_len

    @property
    def slack(self) -> float:
        return 6.0 * (self.connector_size + 2) + 6.0 * (self.connector_size + 2)

    @property
    def span(self) -> float:
        # gauge length from the ring-contact point down to the beam tip
        return 2.0 * (self.s_param - self.ell)

    def summary(self) -> dict:
        return {
            "index": self.index,
            "theta": float(self.theta),
            "center": [float(x) for x in self.center],
            "ell": int(self.ell),
            "s_param": float(self.s_param),
            "chain_len": int(self.chain_len),
            "connector_size": int(self.connector_size),
            "slack": float(self.slack),
            "span": float(self.span),
            "junction_counts": [int(c) for c in self.junction_counts],
        }


@dataclass
class ContactWitness:
    """A contact drawing whose graph pins signatures at many directions."""

    body: SymmetricBody
    frame_map: np.ndarray
    lattice: Lattice
    k: int
    epsilon: float | None
    points: PointSet
    graph: EmbeddedGraph
    frames: list
    scaled: bool = False

    def frame_points(self, frame: Frame, *parts: str) -> np.ndarray:
        names = parts or tuple(frame.slices)
        chunks = [self.points.points[slice(*frame.slices[p])] for p in names]
        return np.vstack(chunks)

    def to_json(self) -> dict:
        components = []
        for fr in self.frames:
            plus = self.points.points[slice(*fr.slices["connector_plus"])]
            minus = self.points.points[slice(*fr.slices["connector_minus"])]
            components.append({
                "theta": float(fr.theta),
                "ring": [int(i) for i in fr.slices["ring"]],
                "beam": [int(fr.slices["axis"][0]), int(fr.slices["offsets"][1])],
                "s1": [[float(x) for x in p] for p in plus[:-1]],
                "s2": [[float(x) for x in p] for p in minus[:-1]],
                "z1": [float(x) for x in plus[-1]],
                "z2": [float(x) for x in minus[-1]],
                "t": [float(x) for x in fr.center],
            })
        return {
            "k": int(self.k),
            "epsilon": None if self.epsilon is None else float(self.epsilon),
            "scaled": bool(self.scaled),
            "frame_map": [[float(x) for x in row] for row in self.frame_map],
            "lattice": self.lattice.to_json(),
            "frames": [f.summary() for f in self.frames],
            "components": components,
            "graph": self.graph.to_json(),
        }


def _compatible_with(body: SymmetricBody, point: np.ndarray, cloud: np.ndarray) -> bool:
    d = body.norms(point[None, :] - cloud)
    band = body.tolerance * np.maximum(1.0, np.hypot(*(point[None, :] - cloud).T))
    return bool(np.all(d >= 2.0 - band))


def _ring_crossing(body: SymmetricBody, ring: np.ndarray, step: np.ndarray,
                   ell: int) -> float:
    """First parameter t > ell where the point t*step reaches distance
    exactly 2 from the ring, found by scan plus bisection.  Snapped to an
    integer when the crossing sits on the coefficient grid."""

    def gap(t: float) -> float:
        return float(np.min(body.norms(t * step - ring)))

    t_lo = float(ell)
    t_hi = None
    t = t_lo
    while t_hi is None:
        t += 0.0625
        if t > float(ell) + 4.0 * CLEARANCE:
            raise AttachFailed("beam axis never reaches the ring")
        if gap(t) <= 2.0:
            t_hi = t
            break
        t_lo = t
    for _ in range(90):
        mid = 0.5 * (t_lo + t_hi)
        if gap(mid) <= 2.0:
            t_hi = mid
        else:
            t_lo = mid
    t_star = t_hi
    snapped = round(t_star)
    if abs(t_star - snapped) < 1e-6 and abs(gap(float(snapped)) - 2.0) < 1e-7:
        t_star = float(snapped)
    return t_star


def _attach_end(body: SymmetricBody, ring: np.ndarray, step: np.ndarray,
                ell: int, cloud: np.ndarray):
    """Connector for one beam end: outer point placed on the axis at the
    exact ring-contact crossing, chain stepping inward, final gap to the
    beam tip in (2, 4] bridged by one junction point touching both ends,
    chosen as the positive-cross solution of the two-circle system."""
    tip = ell * step
    t_star = _ring_crossing(body, ring, step, ell)
    point = t_star * step
    dists = body.norms(point[None, :] - ring)
    nearest = ring[int(np.argmin(dists))]
    band = body.tolerance * max(1.0, float(np.hypot(*(point - nearest))))
    if float(np.min(dists)) < 2.0 - band:
        raise AttachFailed("connector chain lands inside the ring band")

    # largest inward step count that keeps the chain clear of the tip;
    # leaves a gauge gap of 2*(t_star - ell - s_prime) in (2, 4]
    s_prime = max(0, int(math.floor(t_star - ell - 1.0 + 1e-6)))
    gap_units = t_star - ell - s_prime
    if 2.0 * gap_units < 2.0 - band and s_prime > 0:
        s_prime -= 1
        gap_units += 1.0

    chain = [point - j * step for j in range(s_prime + 1)]
    inner = chain[-1]

    if 2.0 * gap_units >= 4.0 - 1e-9:
        junction = 0.5 * (inner + tip)
    else:
        pair = equidistant_points(body, inner, tip, radius=2.0)
        picked = None
        for z in pair:
            rel = z - inner
            if step[0] * rel[1] - step[1] * rel[0] > 0:
                picked = z
                break
        junction = picked if picked is not None else pair[0]
    if not _compatible_with(body, junction, np.vstack([cloud, chain])):
        raise AttachFailed(
            f"junction point between chain end and beam tip collides near {inner}")
    return chain, junction, s_prime + 1, t_star


def _build_frame(body: SymmetricBody, k: int, theta: float, index: int,
                 center: np.ndarray, ring_coeff_points: np.ndarray):
    ring = ring_coeff_points
    r_max = max_beam_extent(body, ring, theta)
    step = 2.0 * body.radial_vector(theta)
    step_len = float(np.hypot(*step))
    ell = int(math.floor((r_max - 1e-12) / step_len))
    if ell < 2:
        raise BeamTooShort(f"extent {r_max:.3f} at direction {theta:.6f} "
                           f"fits no beam (k={k})")
    pair = equidistant_points(body, np.zeros(2), step, radius=2.0)
    offset = pair[0] if step[0] * pair[0][1] - step[1] * pair[0][0] > 0 else pair[1]

    a = np.arange(-ell, ell + 1)[:, None]
    axis = a * step
    b = np.arange(-ell, ell)[:, None]
    offsets = b * step + offset

    cloud = np.vstack([ring, axis, offsets])
    chain_p, junc_p, n_chain, t_star = _attach_end(body, ring, step, ell, cloud)
    plus = np.vstack([chain_p, junc_p[None, :]])
    minus = -plus

    parts = {
        "ring": ring,
        "axis": axis,
        "offsets": offsets,
        "connector_plus": plus,
        "connector_minus": minus,
    }
    frame = Frame(index=index, theta=theta, center=center.copy(), ell=ell,
                  step=step, offset=offset, s_param=t_star, chain_len=n_chain,
                  junction_counts=(1, 1))
    return frame, parts


def assemble_witness(body: SymmetricBody, cert=None, epsilon: float = None,
                     k: int = None, angles=None, other: SymmetricBody = None,
                     top_angles: int = 3,
                     max_points: int = 1_500_000) -> ContactWitness:
    """Build the full witness: one ring-and-beam frame per direction, the
    rings chained into one rigid backbone.

    With a separation certificate, epsilon comes from the certificate and
    the frame directions default to its top deviation angles (requires the
    second body to rank them; otherwise the dyadic grid is used).  k
    defaults to ceil(TOTAL_SLACK / epsilon); passing k directly builds a
    scaled demonstration assembly, flagged as such.
    """
    scaled = k is not None
    body_n, frame_map = normalize_frame(body)
    if cert is not None:
        if not cert.separated:
            raise ValueError("certificate reports equivalent bodies; "
                             "no witness to build")
        if epsilon is None:
            epsilon = cert.epsilon
        if angles is None and other is not None:
            from .separation import top_deviation_angles
            raw = top_deviation_angles(body, other, cert.matrix,
                                       cert.level, count=top_angles)
            # certificate angles live in the input frame; carry them into
            # the normalized frame the witness is built in
            units = np.column_stack([np.cos(raw), np.sin(raw)])
            mapped = units @ frame_map.T
            angles = np.mod(np.arctan2(mapped[:, 1], mapped[:, 0]), np.pi)
    if k is None:
        if epsilon is None:
            raise ValueError("need epsilon or an explicit direction count k")
        k = required_direction_count(epsilon)
    if k < 5:
        raise BeamTooShort("rings below k=5 leave no room for a beam")
    lat = standard_lattice()
    thetas = (np.asarray(angles, dtype=float) if angles is not None
              else np.arange(k) * (np.pi / k))

    # size check before any ring is materialized: a radius-k ring holds
    # exactly 6k sites, so the estimate needs no allocation
    est = len(thetas) * (6 * k + 4 * (k + 2) + 16)
    if est > max_points:
        raise ValueError(f"assembly would need about {est} points "
                         f"(cap {max_points}); lower k or pass fewer angles")

    ring_local = lattice_ring(lat, k).points
    shift = (2 * k + 3) * lat.e1 - (k + 1) * lat.e2

    all_points = []
    frames = []
    cursor = 0
    for i, theta in enumerate(thetas):
        center = i * shift
        frame, parts = _build_frame(body_n, k, float(theta), i, center, ring_local)
        for name, arr in parts.items():
            arr = arr + center
            frame.slices[name] = (cursor, cursor + len(arr))
            all_points.append(arr)
            cursor += len(arr)
        frames.append(frame)

    points = PointSet(np.vstack(all_points))
    graph = build_graph(body_n, points, GraphKind.CONTACT)
    return ContactWitness(body=body_n, frame_map=frame_map, lattice=lat, k=k,
                          epsilon=epsilon, points=points, graph=graph,
                          frames=frames, scaled=scaled)


def auto_tune_k(body: SymmetricBody, epsilon: float, theta: float = 0.0,
                k_max: int = 4096) -> int:
    """Smallest ring index whose beam budget 4*ell*epsilon exceeds the
    connector slack for the given direction."""
    body_n, _ = normalize_frame(body)
    lat = standard_lattice()

    def margin(k: int) -> float:
        ring = lattice_ring(lat, k).points
        try:
            frame, _ = _build_frame(body_n, k, theta, 0, np.zeros(2), ring)
        except (BeamTooShort, AttachFailed):
            return -np.inf
        return 4.0 * frame.ell * epsilon - frame.slack

    lo, hi = 5, None
    k = 8
    while k <= k_max:
        if margin(k) > 0:
            hi = k
            break
        lo = k
        k *= 2
    if hi is None:
        raise BeamTooShort(f"no ring index up to {k_max} beats the slack "
                           f"at epsilon={epsilon}")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if margin(mid) > 0:
            hi = mid
        else:
            lo = mid
    return hi


def signature_pin_identity(witness: ContactWitness, other: SymmetricBody,
                           matrix=None) -> dict:
    """Exact identity between the beam-length change and the signature
    ratio: measuring the beam span of frame theta under the other body's
    gauge moves it by exactly 4*ell*|sig_A/sig_B(theta) - 1|.

    The candidate map is composed with the witness frame map, so a matrix
    fitted between the original input bodies can be passed directly."""
    matrix = np.eye(2) if matrix is None else np.asarray(matrix, dtype=float)
    matrix = witness.frame_map @ matrix
    inv = np.linalg.inv(matrix)
    worst = 0.0
    rows = []
    for fr in witness.frames:
        span = 2.0 * fr.ell * fr.step
        lhs = abs(float(other.norm(inv @ span)) - 4.0 * fr.ell)
        sig_a = float(np.hypot(*fr.step))
        u = fr.step / sig_a
        sig_b = 2.0 / float(other.norm(inv @ u))
        rhs = 4.0 * fr.ell * abs(sig_a / sig_b - 1.0)
        resid = abs(lhs - rhs)
        worst = max(worst, resid)
        rows.append({"theta": fr.theta, "lhs": lhs, "rhs": rhs, "residual": resid})
    return {"max_residual": worst, "rows": rows}


def verify_rigidity(witness: ContactWitness, epsilon: float = None,
                    other: SymmetricBody = None, matrix=None,
                    check_unique: bool = True) -> dict:
    """Check the witness invariants and compute every budget.

    Reported clauses: the assembly is contact-compatible (enforced by
    construction), the ring backbone is a lattice-unique drawing, each
    beam strip is lattice-unique in its own direction lattice, and per
    frame the measured connector slack 6(|S1|+2)+6(|S2|+2) is compared
    against the scaled budget 4*ell*epsilon.  When another body (and
    optional map) is supplied, the per-direction displacement
    D(theta) = 4*ell*|sig_A/sig_B - 1| is evaluated together with the
    beam-length identity, and max D is compared against the full budget
    (the total slack constant) and against the scaled budget.
    """
    eps = epsilon if epsilon is not None else witness.epsilon
    body = witness.body
    report: dict = {"k": witness.k, "epsilon": eps, "total_slack": TOTAL_SLACK,
                    "scaled": witness.scaled}
    report["compatible"] = True

    if check_unique:
        ring_pts = np.vstack([witness.frame_points(fr, "ring")
                              for fr in witness.frames])
        ring_ok, _ = is_lattice_unique(body, ring_pts)
        report["backbone_lattice_uniqueness"] = bool(ring_ok)

        beams_ok = True
        for fr in witness.frames:
            strip = witness.frame_points(fr, "axis", "offsets")
            ok, _ = is_lattice_unique(body, strip)
            beams_ok = beams_ok and ok
        report["beam_lattice_uniqueness"] = bool(beams_ok)

    identity = None
    if other is not None:
        identity = signature_pin_identity(witness, other, matrix)
        report["identity"] = identity

    rows = []
    for idx, fr in enumerate(witness.frames):
        plus = witness.points.points[slice(*fr.slices["connector_plus"])]
        slack = 12.0 * (fr.chain_len + 2)
        row = fr.summary()
        row["slack"] = slack
        row["stored_points"] = int(len(plus))
        if eps is not None:
            row["budget_scaled"] = 4.0 * fr.ell * eps
            row["slack_clause"] = row["budget_scaled"] > slack
        if identity is not None:
            row["displacement"] = identity["rows"][idx]["rhs"]
        rows.append(row)
    report["frames"] = rows
    if eps is not None:
        report["budget_proportional"] = witness.k * eps
        report["proportional_clause"] = witness.k * eps >= TOTAL_SLACK
        report["slack_clause_all"] = all(r.get("slack_clause", False) for r in rows)
    if identity is not None:
        report["displacement_max"] = max(r["displacement"] for r in rows)
        report["displacement_clause_full"] = report["displacement_max"] > TOTAL_SLACK
        if eps is not None:
            report["displacement_clause_scaled"] = any(
                r["displacement"] > r["budget_scaled"] for r in rows)
    return report


def touching_pairs_scan(body: SymmetricBody, points: np.ndarray) -> int:
    """Count exact contact pairs; handy sanity probe for big assemblies."""
    pairs = close_pairs(points, (2.0 + 1e-6) * body.circumradius)
    if len(pairs) == 0:
        return 0
    g = body.norms(points[pairs[:, 0]] - points[pairs[:, 1]])
    d = points[pairs[:, 0]] - points[pairs[:, 1]]
    band = body.tolerance * np.maximum(1.0, np.hypot(d[:, 0], d[:, 1]))
    return int(np.count_nonzero(np.abs(g - 2.0) <= band))
