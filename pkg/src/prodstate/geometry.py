"""Inscribed triangles and tetrahedra: extremal perimeters and their rigidity.

Near-optimal configurations occupy a vanishing neighbourhood of the regular
shapes, so ``check_lemma`` samples by perturbing a regular configuration
(random rotation plus tangent noise of controlled size) and keeps the samples
that satisfy each statement's hypothesis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.optimize import minimize
from scipy.spatial.transform import Rotation

from .errors import DomainError
from .gadgets import TETRAHEDRON

SQRT3 = math.sqrt(3.0)
SQRT6 = math.sqrt(6.0)
TRIANGLE_MAX = 3 * SQRT3
TETRA_MAX = 4 * SQRT6
TETRA_EDGE = 4 / SQRT6
ADJOINED_MAX = 40 + 8 * SQRT3


@dataclass(frozen=True, eq=False)
class InscribedSimplex:
    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] not in (3, 4) or pts.shape[1] not in (2, 3):
            raise DomainError("need 3 or 4 points in the plane or in space")
        if pts.shape[1] == 2:
            pts = np.hstack([pts, np.zeros((len(pts), 1))])
        if np.max(np.abs(np.linalg.norm(pts, axis=1) - 1)) > 1e-12:
            raise DomainError("simplex vertices must lie on the unit sphere")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def edge_lengths(self) -> np.ndarray:
        return edge_lengths(self.points)


def edge_lengths(points) -> np.ndarray:
    """Pairwise distances in ``combinations`` order; works on stacks (..., k, d)."""
    p = np.asarray(points, dtype=float)
    k = p.shape[-2]
    i, j = np.array(list(combinations(range(k), 2))).T
    return np.linalg.norm(p[..., i, :] - p[..., j, :], axis=-1)


def _pts(s):
    return s.points if isinstance(s, InscribedSimplex) else np.asarray(s, dtype=float)


def perimeter(s) -> float:
    return float(np.sum(edge_lengths(_pts(s))))


def squared_sum(s) -> float:
    return float(np.sum(edge_lengths(_pts(s)) ** 2))


def star_deviation_bound(eps: float, lam: float) -> float:
    """Largest possible ``|W v - sgn(v)|`` for a center whose star earns K (1 - eps)."""
    if not 0.0 <= eps <= 1.0:
        raise DomainError("eps must lie in [0, 1]")
    if not 0.0 <= lam < 1.0:
        raise DomainError("lambda must lie in [0, 1)")
    return 2.0 * math.sqrt(eps) * math.sqrt((1 + lam**2) / (1 - lam**2))


def t_score(s: float) -> float:
    """Best squared-length sum of a triangle erected on a chord of length s."""
    if not 0.0 <= s <= 2.0:
        raise DomainError("chord length must lie in [0, 2]")
    return 4.0 + s * s + math.sqrt(max(16.0 - 4.0 * s * s, 0.0))


def star_deviation(w_diag, v) -> tuple[float, float]:
    """``(|W v - sgn(v)|, lambda)`` for a unit center vector v.

    ``sgn(v)`` is the normalized projection of v onto the unit-weight axes.
    """
    w = np.asarray(w_diag, dtype=float)
    top = np.isclose(w, 1.0)
    lam = float(np.max(w[~top])) if np.any(~top) else 0.0
    proj = np.where(top, v, 0.0)
    npj = np.linalg.norm(proj)
    if npj == 0:
        return math.inf, lam
    return float(np.linalg.norm(w * v - proj / npj)), lam


# --------------------------------------------------------------------------
# sampling helpers


def _random_rotations(rng, count: int) -> np.ndarray:
    return Rotation.random(count, random_state=rng).as_matrix()


def _tangent_perturb(rng, pts: np.ndarray, scale: np.ndarray) -> np.ndarray:
    """Move each point along a random tangent direction, then renormalize."""
    noise = rng.standard_normal(pts.shape)
    noise -= np.sum(noise * pts, axis=-1, keepdims=True) * pts
    noise /= np.linalg.norm(noise, axis=-1, keepdims=True)
    mags = rng.uniform(0, 1, pts.shape[:-1] + (1,)) * scale[..., None, None]
    out = pts + mags * noise
    return out / np.linalg.norm(out, axis=-1, keepdims=True)


def _regular_triangles(rng, count: int) -> np.ndarray:
    phase = rng.uniform(0, 2 * np.pi, count)[:, None]
    ang = phase + np.array([0, 2 * np.pi / 3, 4 * np.pi / 3])[None, :]
    return np.stack([np.cos(ang), np.sin(ang)], axis=-1)


def _perturb_circle(rng, pts2: np.ndarray, scale: np.ndarray) -> np.ndarray:
    ang = np.arctan2(pts2[..., 1], pts2[..., 0])
    ang = ang + rng.uniform(-1, 1, ang.shape) * scale[:, None]
    return np.stack([np.cos(ang), np.sin(ang)], axis=-1)


def _regular_tetrahedra(rng, count: int) -> np.ndarray:
    rots = _random_rotations(rng, count)
    return np.einsum("nij,kj->nki", rots, TETRAHEDRON)


@dataclass
class LemmaReport:
    lemma: str
    samples: int
    passed: int
    failed: int
    worst_margin: float
    params: dict = field(default_factory=dict)
    fitted_constant: float | None = None

    @property
    def ok(self) -> bool:
        return self.failed == 0 and self.samples > 0

    def to_json(self) -> dict:
        return {
            "lemma": self.lemma,
            "samples": self.samples,
            "passed": self.passed,
            "failed": self.failed,
            "worst_margin": self.worst_margin,
            "fitted_constant": self.fitted_constant,
            "params": self.params,
            "ok": self.ok,
        }


def _report(lemma, margins: np.ndarray, params, fitted=None) -> LemmaReport:
    failed = int(np.sum(margins < 0))
    return LemmaReport(
        lemma,
        int(len(margins)),
        int(len(margins)) - failed,
        failed,
        float(np.min(margins)) if len(margins) else math.nan,
        params,
        fitted,
    )


def _collect(sampler, samples: int, max_rounds: int = 200) -> np.ndarray:
    """Draw batches until ``samples`` hypothesis-satisfying samples are kept."""
    kept, total = [], 0
    for _ in range(max_rounds):
        batch = sampler(max(samples - total, 256))
        if len(batch):
            kept.append(batch)
            total += len(batch)
        if total >= samples:
            break
    return np.concatenate(kept)[:samples] if kept else np.zeros((0,))


# --------------------------------------------------------------------------
# individual statements


def _check_star(samples: int, rng, eps_max: float = 1.0) -> LemmaReport:
    """Star graphs with random stretch, center and leaves; bound must hold."""
    margins = []
    K = 6
    while len(margins) < samples:
        w2 = rng.uniform(0, 1)
        w3 = rng.uniform(0, w2)
        if rng.uniform() < 0.25:
            w2 = 1.0  # two unit-weight axes
        w = np.array([1.0, w2, w3])
        if w[2] >= 1.0:
            continue
        # centers near the heavy axes, at a random distance
        top = np.isclose(w, 1.0)
        base = rng.standard_normal(3) * top
        base /= np.linalg.norm(base)
        v = base + rng.uniform(0, 1.0) ** 2 * rng.standard_normal(3)
        v /= np.linalg.norm(v)
        # leaves: mostly antipodal to the center, some random
        leaves = np.repeat(-v[None, :], K, axis=0)
        noise = rng.uniform(0, 0.5) * rng.standard_normal((K, 3))
        leaves = leaves + noise
        leaves /= np.linalg.norm(leaves, axis=1, keepdims=True)
        value = 0.5 * np.sum(np.linalg.norm((v - leaves) * w, axis=1))
        eps = 1.0 - value / K
        if eps < 0 or eps > eps_max:
            continue
        dev, lam = star_deviation(w, v)
        margins.append(star_deviation_bound(eps, lam) - dev)
    return _report("A1star", np.array(margins), {"K": K})


def _check_triangle_interval(samples: int, rng, eps: float) -> LemmaReport:
    def sampler(count):
        tri = _regular_triangles(rng, count)
        tri = _perturb_circle(rng, tri, rng.uniform(0, 3 * math.sqrt(eps), count))
        lengths = edge_lengths(tri)
        keep = lengths.sum(axis=1) >= TRIANGLE_MAX - eps
        return lengths[keep]

    lengths = _collect(sampler, samples)
    margins = 3 * math.sqrt(eps) - np.max(np.abs(lengths - SQRT3), axis=1)
    return _report("A2", margins, {"eps": eps})


def _check_tetra_interval(samples: int, rng, eps: float) -> LemmaReport:
    def sampler(count):
        tet = _regular_tetrahedra(rng, count)
        tet = _tangent_perturb(rng, tet, rng.uniform(0, 3 * math.sqrt(eps), count))
        lengths = edge_lengths(tet)
        keep = lengths.sum(axis=1) >= TETRA_MAX - eps
        return lengths[keep]

    lengths = _collect(sampler, samples)
    margins = 4 * math.sqrt(eps) - np.max(np.abs(lengths - TETRA_EDGE), axis=1)
    return _report("A4", margins, {"eps": eps})


def _matching_distance(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """min over the two pairings of the larger matched distance; p, q are (N, 2, d)."""
    straight = np.maximum(np.linalg.norm(p[:, 0] - q[:, 0], axis=1), np.linalg.norm(p[:, 1] - q[:, 1], axis=1))
    crossed = np.maximum(np.linalg.norm(p[:, 0] - q[:, 1], axis=1), np.linalg.norm(p[:, 1] - q[:, 0], axis=1))
    return np.minimum(straight, crossed)


def _check_triangle_shared(samples: int, rng, delta: float, constant: float) -> LemmaReport:
    """Triangles ABC, ADE sharing A with all edges in sqrt(3) ± delta."""

    def sampler(count):
        first = _regular_triangles(rng, count)
        second = first.copy()
        if count:
            swap = rng.uniform(size=count) < 0.5
            second[swap, 1], second[swap, 2] = first[swap, 2], first[swap, 1]
        a = _perturb_circle(rng, first, rng.uniform(0, 2 * delta, count))
        b = _perturb_circle(rng, second, rng.uniform(0, 2 * delta, count))
        b[:, 0] = a[:, 0]
        ok = (np.max(np.abs(edge_lengths(a) - SQRT3), axis=1) <= delta) & (
            np.max(np.abs(edge_lengths(b) - SQRT3), axis=1) <= delta
        )
        return np.stack([a[ok], b[ok]], axis=1)

    pairs = _collect(sampler, samples)
    dist = _matching_distance(pairs[:, 0, 1:], pairs[:, 1, 1:])
    fitted = float(np.max(dist) / delta)
    return _report("A3", constant * delta - dist, {"delta": delta, "c": constant}, fitted)


def _check_tetra_shared(samples: int, rng, delta: float, eps: float, constant: float) -> LemmaReport:
    """Tetrahedra ABCD, AEFG with |B - E| <= eps and edges in 4/sqrt(6) ± delta."""

    def sampler(count):
        first = _regular_tetrahedra(rng, count)
        second = first.copy()
        swap = rng.uniform(size=count) < 0.5
        second[swap, 2], second[swap, 3] = first[swap, 3], first[swap, 2]
        a = _tangent_perturb(rng, first, rng.uniform(0, delta, count))
        b = _tangent_perturb(rng, second, rng.uniform(0, delta, count))
        b[:, 0] = a[:, 0]
        b[:, 1] = _tangent_perturb(rng, a[:, 1:2], rng.uniform(0, eps, count))[:, 0]
        be = np.linalg.norm(a[:, 1] - b[:, 1], axis=1)
        ok = (
            (np.max(np.abs(edge_lengths(a) - TETRA_EDGE), axis=1) <= delta)
            & (np.max(np.abs(edge_lengths(b) - TETRA_EDGE), axis=1) <= delta)
            & (be <= eps)
        )
        return np.stack([a[ok], b[ok]], axis=1)

    pairs = _collect(sampler, samples)
    dist = _matching_distance(pairs[:, 0, 2:], pairs[:, 1, 2:])
    fitted = float(np.max(dist) / (delta + eps))
    return _report("A5", constant * (delta + eps) - dist, {"delta": delta, "eps": eps, "c": constant}, fitted)


def adjoined_triangle_optimum(rng=None, starts: int = 20) -> tuple[float, np.ndarray]:
    """Maximize sum of t(s_ij) over six chord lengths with sum(s) <= 4 sqrt(6).

    SLSQP from random feasible starts, then a scan of the one-parameter family
    (s, r, r, r, r, r) with 5 r = 4 sqrt(6) - s as an independent check.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    cap = 2.0 - 1e-12

    def neg(s):
        return -sum(t_score(min(max(x, 0.0), 2.0)) for x in s)

    best_val, best_s = -math.inf, None
    cons = [{"type": "ineq", "fun": lambda s: TETRA_MAX - np.sum(s)}]
    for _ in range(starts):
        s0 = rng.uniform(0.3, 1.9, 6)
        s0 *= min(1.0, TETRA_MAX / s0.sum())
        res = minimize(neg, s0, method="SLSQP", bounds=[(0.0, cap)] * 6, constraints=cons, options={"ftol": 1e-14, "maxiter": 500})
        if res.success and -res.fun > best_val and np.sum(res.x) <= TETRA_MAX + 1e-9:
            best_val, best_s = -res.fun, res.x
    scan = np.linspace(0.0, 2.0, 200001)
    rest = (TETRA_MAX - scan) / 5
    ok = rest <= 2.0
    vals = np.array([t_score(a) + 5 * t_score(b) for a, b in zip(scan[ok], rest[ok])])
    k = int(np.argmax(vals))
    if vals[k] > best_val:
        best_val, best_s = float(vals[k]), np.array([scan[ok][k]] + [rest[ok][k]] * 5)
    return float(best_val), np.asarray(best_s)


def _check_adjoined_max(rng, tol: float = 1e-6, edge_tol: float = 1e-3) -> LemmaReport:
    value, s = adjoined_triangle_optimum(rng)
    margin = min(tol - abs(value - ADJOINED_MAX), edge_tol - float(np.max(np.abs(s - TETRA_EDGE))))
    rep = _report("A6max", np.array([margin]), {"value": value, "edges": s.tolist(), "target": ADJOINED_MAX})
    return rep


def check_lemma(
    lemma_id: str,
    samples: int = 10_000,
    seed: int = 0,
    eps: float = 1e-4,
    delta: float = 1e-3,
    constant: float | None = None,
) -> LemmaReport:
    rng = np.random.default_rng(seed)
    if lemma_id == "A1star":
        return _check_star(samples, rng)
    if lemma_id == "A2":
        return _check_triangle_interval(samples, rng, eps)
    if lemma_id == "A3":
        return _check_triangle_shared(samples, rng, delta, 5.0 if constant is None else constant)
    if lemma_id == "A4":
        return _check_tetra_interval(samples, rng, eps)
    if lemma_id == "A5":
        return _check_tetra_shared(samples, rng, delta, eps if eps else delta, 5.0 if constant is None else constant)
    if lemma_id == "A6max":
        return _check_adjoined_max(rng)
    raise DomainError(f"unknown lemma {lemma_id!r}; expected A1star, A2, A3, A4, A5 or A6max")


LEMMAS = ("A1star", "A2", "A3", "A4", "A5", "A6max")
