"""Exhaustive ground truth at desk scale.

``grid_search_vectors`` enumerates a polar grid for a *core* of vertices and
maximizes every remaining vertex on its own. The remaining vertices form an
independent set, so given the core their contributions separate. For
rotation-invariant objectives the first core vertex is pinned to the north
pole and the second to the zero meridian.

Grid certificate: each objective term is Lipschitz in each endpoint with
constant ``wmax / 2`` (mck: 1/2) in chord distance, and every sphere point is
within angle ``res / sqrt(2)`` of a grid point, so the grid maximum is within
``m * wmax * res / sqrt(2)`` of the true optimum.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, Timeout, TooLarge
from .graph import Graph
from .objectives import VectorAssignment, WeightMatrix, mck_value, wmc_value

MAXCUT_LIMIT = 24
COLORING_LIMIT = 20


# --------------------------------------------------------------------------
# Max-Cut and 3-Coloring


def brute_maxcut(g: Graph, chunk_bits: int = 16) -> tuple[int, list[int]]:
    """Exact Max-Cut. Label +1 for a clear bit, -1 for a set bit.

    Ties go to the smallest bitmask; that mask never has the top bit set
    (its complement cuts the same edges), so only half the masks are scanned.
    """
    n = g.n
    if n > MAXCUT_LIMIT:
        raise TooLarge(f"brute_maxcut handles at most {MAXCUT_LIMIT} vertices, got {n}")
    if n == 0 or g.m == 0:
        return 0, [1] * n
    e = g.edge_array()
    total = 1 << (n - 1)
    step = 1 << chunk_bits
    best_val, best_mask = -1, 0
    for start in range(0, total, step):
        masks = np.arange(start, min(start + step, total), dtype=np.int64)
        cut = np.zeros(len(masks), dtype=np.int64)
        for u, v in e:
            cut += ((masks >> u) ^ (masks >> v)) & 1
        k = int(np.argmax(cut))
        if cut[k] > best_val:
            best_val, best_mask = int(cut[k]), int(masks[k])
    labels = [-1 if (best_mask >> v) & 1 else 1 for v in range(n)]
    return best_val, labels


def brute_3coloring(g: Graph) -> list[int] | None:
    """Lexicographically smallest proper 3-coloring, or None."""
    n = g.n
    if n > COLORING_LIMIT:
        raise TooLarge(f"brute_3coloring handles at most {COLORING_LIMIT} vertices, got {n}")
    earlier = [[u for u in nb if u < v] for v, nb in enumerate(g.neighbors())]
    col = [-1] * n

    def place(v: int) -> bool:
        if v == n:
            return True
        for c in range(3):
            if all(col[u] != c for u in earlier[v]):
                col[v] = c
                if place(v + 1):
                    return True
        col[v] = -1
        return False

    return col if place(0) else None


# --------------------------------------------------------------------------
# grid search


@dataclass(frozen=True)
class OracleBudget:
    max_vertices: int = 5
    grid_resolution: float = 5.0  # degrees
    time_limit: float = 120.0  # seconds
    max_configs: int = 50_000_000

    def __post_init__(self):
        if self.max_vertices <= 0 or self.grid_resolution <= 0 or self.time_limit <= 0:
            raise DomainError("budget entries must be positive")
        steps = 360.0 / self.grid_resolution
        if abs(steps - round(steps)) > 1e-9:
            raise DomainError("grid resolution must divide 360 degrees")


@dataclass(frozen=True)
class Mck:
    k: int = 3


@dataclass(frozen=True)
class Wmc:
    w: WeightMatrix = WeightMatrix()


@dataclass(frozen=True)
class GridResult:
    value: float
    assignment: VectorAssignment
    grid_value: float
    error_bound: float
    polished: bool
    configs: int

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "assignment": self.assignment.to_json(),
            "grid_value": self.grid_value,
            "error_bound": self.error_bound,
            "polished": self.polished,
            "configs": self.configs,
        }


def sphere_grid(resolution: float, dim: int = 3) -> np.ndarray:
    """Polar grid with the poles included; a circle grid for ``dim == 2``."""
    step = math.radians(resolution)
    n_az = int(round(360.0 / resolution))
    az = np.arange(n_az) * step
    if dim == 2:
        return np.stack([np.cos(az), np.sin(az)], axis=1)
    if dim != 3:
        raise DomainError("grid search supports dimension 2 or 3")
    n_inc = int(math.ceil(180.0 / resolution - 1e-9))
    inc = np.linspace(0.0, math.pi, n_inc + 1)[1:-1]
    st, ct = np.sin(inc)[:, None], np.cos(inc)[:, None]
    body = np.stack(
        [st * np.cos(az)[None, :], st * np.sin(az)[None, :], np.broadcast_to(ct, (len(inc), n_az))],
        axis=2,
    ).reshape(-1, 3)
    return np.vstack([[0.0, 0.0, 1.0], body, [0.0, 0.0, -1.0]])


def meridian(resolution: float, dim: int = 3) -> np.ndarray:
    """Grid points with zero azimuth (the half great circle through the poles)."""
    if dim == 2:
        n = int(round(180.0 / resolution))
        t = np.linspace(0.0, math.pi, n + 1)
        return np.stack([np.cos(t), np.sin(t)], axis=1)
    n_inc = int(math.ceil(180.0 / resolution - 1e-9))
    inc = np.linspace(0.0, math.pi, n_inc + 1)
    return np.stack([np.sin(inc), np.zeros_like(inc), np.cos(inc)], axis=1)


def _independent_leftover(g: Graph) -> list[int]:
    """Greedy maximal independent set, lowest degree first."""
    nbrs = g.neighbors()
    order = sorted(range(g.n), key=lambda v: (len(nbrs[v]), v))
    chosen: set[int] = set()
    blocked: set[int] = set()
    for v in order:
        if v not in blocked:
            chosen.add(v)
            blocked.update(nbrs[v])
            blocked.add(v)
    return sorted(chosen)


def _symmetry(objective) -> str:
    """'full' (any rotation), 'axial' (rotations about z), else 'reflect'.

    Every diagonal stretch is invariant under the coordinate reflections.
    """
    if isinstance(objective, Mck):
        return "full"
    d = objective.w.diag
    if d[0] == d[1] == d[2]:
        return "full"
    return "axial" if d[0] == d[1] else "reflect"


def _axial_permutation(w: WeightMatrix) -> list[int] | None:
    """Coordinate order moving the odd-one-out weight to z, when two weights tie."""
    d = w.diag
    for odd in (0, 1):
        others = [i for i in range(3) if i != odd]
        if d[others[0]] == d[others[1]] != d[odd]:
            return others + [odd]
    return None


def _pair_terms(objective, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Objective contribution of an edge between broadcastable vector stacks."""
    if isinstance(objective, Mck):
        return 0.5 * (1.0 - np.sum(a * b, axis=-1))
    return 0.5 * np.linalg.norm((a - b) * objective.w.array, axis=-1)


def grid_search_vectors(
    g: Graph,
    objective: Mck | Wmc,
    budget: OracleBudget | None = None,
    polish: bool = True,
    core_points: np.ndarray | None = None,
    free_points: np.ndarray | None = None,
    symmetry: bool = True,
) -> GridResult:
    """Best assignment over a product of sphere grids.

    ``core_points`` / ``free_points`` override the grid used for core and
    independent vertices (for instance the two points ±x).
    """
    budget = budget or OracleBudget()
    if isinstance(objective, Wmc) and symmetry and core_points is None and free_points is None:
        perm = _axial_permutation(objective.w)
        if perm is not None and perm != [0, 1, 2]:
            inner = grid_search_vectors(g, Wmc(WeightMatrix(objective.w.array[perm])), budget, polish)
            back = np.argsort(perm)
            return replace(inner, assignment=VectorAssignment(inner.assignment.vectors[:, back]))
    dim = objective.k if isinstance(objective, Mck) else 3
    if isinstance(objective, Mck) and dim not in (2, 3):
        raise DomainError("grid search supports mck with k in {2, 3}")
    if g.n > budget.max_vertices and core_points is None:
        raise TooLarge(f"{g.n} vertices exceeds the oracle budget of {budget.max_vertices}")
    deadline = time.monotonic() + budget.time_limit
    grid = sphere_grid(budget.grid_resolution, dim)
    custom = core_points is not None
    core_grid = grid if core_points is None else np.asarray(core_points, dtype=float)
    free_grid = grid if free_points is None else np.asarray(free_points, dtype=float)

    free = _independent_leftover(g) if g.n > 1 else []
    core = [v for v in range(g.n) if v not in free]
    if not core and free:
        core, free = [free[0]], free[1:]

    # per-core-vertex candidate sets; symmetries of the objective pin the first ones
    cands = [core_grid] * len(core)
    kind = _symmetry(objective) if symmetry and not custom else None
    if kind == "full" and core:
        cands[0] = grid[:1]
        if len(core) > 1:
            cands[1] = meridian(budget.grid_resolution, dim)
    elif kind == "axial" and core:
        half = meridian(budget.grid_resolution, dim)
        cands[0] = half[half[:, 2] >= -1e-12]
    elif kind == "reflect" and core:
        cands[0] = grid[np.all(grid >= -1e-12, axis=1)]
    sizes = [len(c) for c in cands]
    configs = int(np.prod(sizes, dtype=float)) if sizes else 1
    if configs > budget.max_configs:
        raise TooLarge(f"{configs} grid configurations exceed the budget of {budget.max_configs}")

    pos = {v: k for k, v in enumerate(core)}
    core_edges = [(pos[u], pos[v]) for u, v in g.edges if u in pos and v in pos]
    nbrs = g.neighbors()
    free_nbrs = [[pos[u] for u in nbrs[v]] for v in free]

    # mck over the full grid has a closed-form free-vertex optimum; otherwise
    # every free vertex scans its grid
    scan_free = any(free_nbrs) and not (isinstance(objective, Mck) and free_points is None)
    chunk = max(1, 2**22 // len(free_grid)) if scan_free else 2**18
    best_val, best_core = -np.inf, None
    for start in range(0, configs, chunk):
        if time.monotonic() > deadline:
            raise Timeout("grid search exceeded its time limit")
        flat = np.arange(start, min(start + chunk, configs))
        idx = np.unravel_index(flat, sizes) if sizes else ()
        stack = np.empty((len(flat), len(core), dim))
        for k, c in enumerate(cands):
            stack[:, k] = c[idx[k]]
        vals = np.zeros(len(flat))
        for a, b in core_edges:
            vals += _pair_terms(objective, stack[:, a], stack[:, b])
        for nb in free_nbrs:
            if not nb:
                continue
            if not scan_free:
                s = stack[:, nb].sum(axis=1)
                vals += 0.5 * (len(nb) + np.linalg.norm(s, axis=1))
            else:
                contrib = np.zeros((len(flat), len(free_grid)))
                for u in nb:
                    contrib += _pair_matrix(objective, stack[:, u], free_grid)
                vals += contrib.max(axis=1)
        k = int(np.argmax(vals))
        if vals[k] > best_val:
            best_val, best_core = float(vals[k]), stack[k].copy()

    x = np.zeros((g.n, dim))
    if core:
        x[core] = best_core
    for v, nb in zip(free, free_nbrs):
        x[v] = _best_free(objective, x[[core[u] for u in nb]], free_grid, free_points is None)
    assignment = VectorAssignment.normalized(x) if g.n else VectorAssignment(np.zeros((0, dim)))
    value = _evaluate(g, objective, assignment)

    wmax = 1.0 if isinstance(objective, Mck) else max(objective.w.diag)
    bound = g.m * wmax * math.radians(budget.grid_resolution) / math.sqrt(2)
    grid_value = value
    polished = False
    if polish and g.m:
        pv, px = _polish(g, objective, assignment)
        # accept only inside the certificate window
        if pv >= value and pv <= grid_value + bound + 1e-9:
            value, assignment, polished = pv, px, True
    return GridResult(value, assignment, grid_value, bound, polished, configs)


def _pair_matrix(objective, y: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Edge contribution for every pair (y_b, p_f), via one matmul."""
    if isinstance(objective, Mck):
        return 0.5 * (1.0 - y @ p.T)
    w2 = objective.w.array ** 2
    d2 = ((y**2) @ w2)[:, None] + ((p**2) @ w2)[None, :] - 2.0 * ((y * w2) @ p.T)
    return 0.5 * np.sqrt(np.maximum(d2, 0.0))


def _best_free(objective, neighbours: np.ndarray, free_grid: np.ndarray, closed_form: bool) -> np.ndarray:
    if len(neighbours) == 0:
        return free_grid[0]
    if isinstance(objective, Mck) and closed_form:
        s = neighbours.sum(axis=0)
        ns = np.linalg.norm(s)
        if ns > 1e-12:
            return -s / ns
        return free_grid[0]
    vals = sum(_pair_terms(objective, nb[None, :], free_grid) for nb in neighbours)
    return free_grid[int(np.argmax(vals))]


def _evaluate(g: Graph, objective, assignment) -> float:
    if isinstance(objective, Mck):
        return mck_value(g, assignment)
    return wmc_value(g, objective.w, assignment)


def _polish(g: Graph, objective, assignment: VectorAssignment):
    from .solvers import coordinate_ascent_mck, mm_ascent_wmc

    if isinstance(objective, Mck):
        rep = coordinate_ascent_mck(g, objective.k, init=assignment)
        return rep.best_value, rep.best_assignment
    x, _, _ = mm_ascent_wmc(g, objective.w, assignment.vectors)
    va = VectorAssignment.normalized(x)
    return wmc_value(g, objective.w, va), va
