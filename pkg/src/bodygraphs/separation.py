"""Telling bodies apart through boundary signatures.

The signature of a body at direction theta is the diameter of its boundary
chord through the origin along theta.  Two bodies whose lattice drawings
could coincide must have signatures agreeing up to a linear change of
coordinates, so the sup ratio deviation after the best-fit linear map is a
separation certificate: a positive residual keeps a whole neighborhood of
graphs apart.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .bodies import SymmetricBody, rotation

EQUIVALENCE_THRESHOLD: float = 1e-6


@dataclass(frozen=True)
class DirectionSet:
    """Dyadic direction grid: angles i*pi/2^level for i = 0..2^level - 1."""

    level: int
    thetas: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("level must be >= 0")
        t = np.arange(1 << self.level) * (np.pi / (1 << self.level))
        object.__setattr__(self, "thetas", t)

    def __len__(self) -> int:
        return 1 << self.level

    @property
    def units(self) -> np.ndarray:
        return np.column_stack([np.cos(self.thetas), np.sin(self.thetas)])


def mapped_signatures(body: SymmetricBody, matrix: np.ndarray, thetas) -> np.ndarray:
    """Signatures of matrix(body) without materializing the image polygon:
    the boundary radius of M(K) along u is 1 / gauge_K(M^-1 u)."""
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    units = np.column_stack([np.cos(thetas), np.sin(thetas)])
    inv = np.linalg.inv(matrix)
    return 2.0 / body.norms(units @ inv.T)


def signature_deviation(body_a: SymmetricBody, body_b: SymmetricBody,
                        matrix=None, directions: DirectionSet | int = 4) -> float:
    """Sup over the direction set of the symmetric ratio error between the
    signature of body_a and of matrix(body_b): max(r, 1/r) - 1 per angle."""
    if isinstance(directions, int):
        directions = DirectionSet(directions)
    if matrix is None:
        matrix = np.eye(2)
    matrix = np.asarray(matrix, dtype=float).reshape(2, 2)
    sig_a = body_a.signatures(directions.thetas)
    sig_b = mapped_signatures(body_b, matrix, directions.thetas)
    ratio = sig_b / sig_a
    return float(np.max(np.maximum(ratio, 1.0 / ratio))) - 1.0


def top_deviation_angles(body_a: SymmetricBody, body_b: SymmetricBody,
                         matrix, level: int, count: int = 3) -> np.ndarray:
    """Directions of the certificate's grid ranked by per-angle ratio error,
    largest first; these carry the separation content."""
    directions = DirectionSet(level)
    matrix = np.asarray(matrix, dtype=float).reshape(2, 2)
    sig_a = body_a.signatures(directions.thetas)
    sig_b = mapped_signatures(body_b, matrix, directions.thetas)
    ratio = sig_b / sig_a
    dev = np.maximum(ratio, 1.0 / ratio) - 1.0
    order = np.argsort(-dev, kind="stable")
    return directions.thetas[order[:count]]


def _second_moment(body: SymmetricBody) -> np.ndarray:
    """Area-normalized second moment matrix, by fan triangulation from the
    interior origin."""
    v = body.vertices
    w = np.roll(v, -1, axis=0)
    c = v[:, 0] * w[:, 1] - v[:, 1] * w[:, 0]
    outer_vv = np.einsum("ni,nj->nij", v, v)
    outer_ww = np.einsum("ni,nj->nij", w, w)
    outer_vw = np.einsum("ni,nj->nij", v, w)
    tri = (outer_vv + outer_ww) / 12.0 + (outer_vw + outer_vw.transpose(0, 2, 1)) / 24.0
    sigma = np.einsum("n,nij->ij", c, tri)
    return sigma / (c.sum() / 2.0)


def _isotropic_map(body: SymmetricBody) -> np.ndarray:
    """Map sending the body to isotropic position (identity second moment)."""
    sigma = _second_moment(body)
    vals, vecs = np.linalg.eigh(sigma)
    if np.any(vals <= 0):
        raise ValueError("degenerate second moment")
    return vecs @ np.diag(1.0 / np.sqrt(vals)) @ vecs.T


def fit_linear_map(body_a: SymmetricBody, body_b: SymmetricBody,
                   directions: DirectionSet | int = 4, seeds: int = 16,
                   max_iter: int = 600, init=None) -> tuple[np.ndarray, float]:
    """Best linear map of body_b onto body_a under the signature deviation.

    Bodies in isotropic position differ by an orthogonal map at most, so the
    seed grid sweeps rotations and reflections between the two isotropic
    frames; an optional init matrix (e.g. the previous level's answer) joins
    the candidate list.  Each strong candidate is polished twice: first on
    the mean squared log-ratio, which is smooth and shares the sup
    objective's zero set, then on the sup deviation itself.
    """
    if isinstance(directions, int):
        directions = DirectionSet(directions)
    iso_a = _isotropic_map(body_a)
    iso_b = _isotropic_map(body_b)
    inv_a = np.linalg.inv(iso_a)

    units = directions.units
    log_a = np.log(body_a.signatures(directions.thetas))

    def log_ratios(m: np.ndarray) -> np.ndarray:
        inv = np.linalg.inv(m)
        return np.log(2.0 / body_b.norms(units @ inv.T)) - log_a

    def objective(params: np.ndarray) -> float:
        m = params.reshape(2, 2)
        if abs(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]) < 1e-9:
            return 1e9
        # identical to the sup ratio deviation: max(r, 1/r) = e^|log r|
        return float(np.expm1(np.max(np.abs(log_ratios(m)))))

    def surrogate(params: np.ndarray) -> float:
        m = params.reshape(2, 2)
        if abs(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]) < 1e-9:
            return 1e9
        d = log_ratios(m)
        return float(np.mean(d * d))

    candidates = []
    if init is not None:
        init = np.asarray(init, dtype=float).reshape(2, 2)
        candidates.append((objective(init.ravel()), init))
    for i in range(max(1, seeds)):
        phi = np.pi * i / max(1, seeds)
        for flip in (np.eye(2), np.diag([1.0, -1.0])):
            seed = inv_a @ rotation(phi) @ flip @ iso_b
            candidates.append((objective(seed.ravel()), seed))
    candidates.sort(key=lambda t: t[0])

    best_val = candidates[0][0]
    best_m = candidates[0][1]
    for val, seed in candidates[:6]:
        pre = optimize.minimize(surrogate, seed.ravel(), method="Nelder-Mead",
                                options={"maxiter": max_iter, "xatol": 1e-13,
                                         "fatol": 1e-26, "adaptive": True})
        res = optimize.minimize(objective, pre.x, method="Nelder-Mead",
                                options={"maxiter": max_iter, "xatol": 1e-12,
                                         "fatol": 1e-14, "adaptive": True})
        if res.fun < best_val:
            best_val = float(res.fun)
            best_m = res.x.reshape(2, 2)
    res = optimize.minimize(objective, best_m.ravel(), method="Nelder-Mead",
                            options={"maxiter": 4 * max_iter, "xatol": 1e-13,
                                     "fatol": 1e-15, "adaptive": True})
    if res.fun < best_val:
        best_val = float(res.fun)
        best_m = res.x.reshape(2, 2)
    return best_m, best_val


@dataclass
class SeparationCertificate:
    """Outcome of the staged separation search."""

    separated: bool
    epsilon: float
    residual: float
    level: int
    matrix: np.ndarray
    residuals_by_level: dict

    def to_json(self) -> dict:
        return {
            "separated": bool(self.separated),
            "epsilon": float(self.epsilon),
            "residual": float(self.residual),
            "level": int(self.level),
            "matrix": [[float(x) for x in row] for row in self.matrix],
            "residuals_by_level": {str(k): float(v)
                                   for k, v in self.residuals_by_level.items()},
        }


def find_separation(body_a: SymmetricBody, body_b: SymmetricBody,
                    max_level: int = 6, margin: float = 0.01, seeds: int = 16,
                    threshold: float = EQUIVALENCE_THRESHOLD) -> SeparationCertificate:
    """Search increasing direction levels for a stable positive residual.

    Stops early once the residual has stabilized (relative change below
    margin between consecutive levels) at a clearly positive value; bodies
    whose final residual stays below the threshold are reported as not
    separated.  The certified overlap margin is half the residual.
    """
    if max_level < 2:
        raise ValueError("max_level must be >= 2")
    residuals: dict[int, float] = {}
    best_m = np.eye(2)
    level_used = 2
    prev = None
    warm = None
    for level in range(2, max_level + 1):
        m, r = fit_linear_map(body_a, body_b, DirectionSet(level),
                              seeds=seeds, init=warm)
        residuals[level] = r
        best_m, level_used = m, level
        warm = m
        if prev is not None and r > 100 * threshold:
            if abs(r - prev) <= margin * max(r, 1e-12):
                break
        prev = r
    residual = residuals[level_used]
    separated = residual > threshold
    return SeparationCertificate(
        separated=separated,
        epsilon=residual / 2.0 if separated else 0.0,
        residual=residual,
        level=level_used,
        matrix=best_m,
        residuals_by_level=residuals,
    )
