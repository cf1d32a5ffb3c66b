"""Heuristic solvers for the vector objectives and for product-state energy.

All solvers start from normalized standard-normal draws of
``numpy.random.default_rng(seed)`` (one row per vertex, drawn in vertex
order), so a run is a pure function of its arguments.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import constants
from .errors import DomainError
from .graph import Graph
from .hamiltonian import LocalHamiltonian, ProductState, _incident, local_field, product_energy
from .objectives import VectorAssignment, WeightMatrix, mck_value, wmc_gradient, wmc_value

MONOTONE_SLACK = 1e-12


class MonotonicityError(AssertionError):
    pass


@dataclass(frozen=True, eq=False)
class SolveReport:
    objective: str
    sense: str  # "max" or "min"
    best_value: float
    best_assignment: Any  # VectorAssignment | ProductState
    restarts: int
    iterations_per_restart: list[int]
    seed: int
    trajectory: list[float]
    config: dict = field(default_factory=dict)

    def better(self, other: "SolveReport") -> bool:
        if self.sense == "max":
            return other.best_value > self.best_value
        return other.best_value < self.best_value

    def to_json(self) -> dict:
        return {
            "objective": self.objective,
            "sense": self.sense,
            "best_value": self.best_value,
            "best_assignment": self.best_assignment.to_json(),
            "restarts": self.restarts,
            "iterations_per_restart": list(self.iterations_per_restart),
            "seed": self.seed,
            "trajectory": list(self.trajectory),
            "config": self.config,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def random_unit_vectors(n: int, k: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, k))
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    x = np.divide(x, norms, out=np.zeros_like(x), where=norms > 0)
    x[norms[:, 0] == 0, -1] = 1.0
    return x


def _neighbor_arrays(g: Graph) -> list[np.ndarray]:
    return [np.array(nb, dtype=int) for nb in g.neighbors()]


def _check_monotone(old: float, new: float, sense: str, what: str):
    slack = MONOTONE_SLACK * max(1.0, abs(old))
    if (sense == "max" and new < old - slack) or (sense == "min" and new > old + slack):
        raise MonotonicityError(f"{what}: objective moved the wrong way ({old!r} -> {new!r})")


def _start(init, n: int, k: int, seed: int) -> np.ndarray:
    if init is None:
        return random_unit_vectors(n, k, seed)
    x = np.array(init.vectors if hasattr(init, "vectors") else getattr(init, "bloch", init), dtype=float)
    if x.shape != (n, k):
        raise DomainError(f"initial point has shape {x.shape}, expected {(n, k)}")
    return x / np.linalg.norm(x, axis=1, keepdims=True)


# --------------------------------------------------------------------------
# MC_k


def mck_vertex_update(x: np.ndarray, nbrs: np.ndarray, zero: float = constants.ZERO_FIELD) -> np.ndarray:
    """Exact maximizer of the vertex's share of mck with neighbours fixed."""
    s = x[nbrs].sum(axis=0) if len(nbrs) else np.zeros(x.shape[1])
    ns = np.linalg.norm(s)
    return -s / ns if ns > zero else None


def coordinate_ascent_mck(
    g: Graph,
    k: int = 3,
    seed: int = 0,
    max_iters: int | None = None,
    tol: float | None = None,
    init=None,
) -> SolveReport:
    if k < 1:
        raise DomainError("k must be at least 1")
    max_iters = constants.SOLVER_MAX_ITERS if max_iters is None else max_iters
    tol = constants.SOLVER_TOL if tol is None else tol
    x = _start(init, g.n, k, seed)
    nbrs = _neighbor_arrays(g)
    value = mck_value(g, x)
    sweeps = 0
    while sweeps < max_iters:
        for i in range(g.n):
            new = mck_vertex_update(x, nbrs[i])
            if new is not None:
                x[i] = new
        sweeps += 1
        nxt = mck_value(g, x)
        _check_monotone(value, nxt, "max", "coordinate_ascent_mck")
        done = nxt - value < tol
        value = nxt
        if done:
            break
    config = {"solver": "coordinate_ascent_mck", "k": k, "max_iters": max_iters, "tol": tol}
    return SolveReport("mck", "max", value, VectorAssignment.normalized(x), 1, [sweeps], seed, [value], config)


# --------------------------------------------------------------------------
# W-linear Max-Cut


def _color_classes(g: Graph) -> list[np.ndarray]:
    """Greedy proper coloring in vertex order; isolated vertices are dropped."""
    nbrs = g.neighbors()
    color = [-1] * g.n
    for v in range(g.n):
        used = {color[u] for u in nbrs[v]}
        color[v] = next(c for c in range(len(used) + 1) if c not in used)
    classes: dict[int, list[int]] = {}
    for v in range(g.n):
        if nbrs[v]:
            classes.setdefault(color[v], []).append(v)
    return [np.array(classes[c]) for c in sorted(classes)]


def _class_edges(g: Graph, cls: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    nbrs = g.neighbors()
    src = np.concatenate([np.full(len(nbrs[v]), k) for k, v in enumerate(cls)])
    dst = np.concatenate([np.array(nbrs[v]) for v in cls])
    return src, dst


def mm_ascent_wmc(
    g: Graph,
    w: WeightMatrix | Any,
    x0: np.ndarray,
    max_iters: int | None = None,
    tol: float | None = None,
) -> tuple[np.ndarray, float, int]:
    """Per-vertex minorize-maximize sweeps.

    A vertex's share of wmc is convex in its vector, so it lies above its
    tangent plane; moving to the sphere point maximizing that plane never
    lowers it. The objective is therefore nondecreasing per update. Vertices
    of one color class share no edge, so each class is updated at once.
    """
    w = w if isinstance(w, WeightMatrix) else WeightMatrix(w)
    max_iters = constants.SOLVER_MAX_ITERS if max_iters is None else max_iters
    tol = constants.SOLVER_TOL if tol is None else tol
    wd = w.array
    x = np.array(x0, dtype=float)
    blocks = [(cls, *_class_edges(g, cls)) for cls in _color_classes(g)]
    value = wmc_value(g, w, x)
    sweeps = 0
    while sweeps < max_iters:
        for cls, src, dst in blocks:
            diff = (x[cls[src]] - x[dst]) * wd
            norms = np.sqrt(np.einsum("ij,ij->i", diff, diff))
            safe = norms >= 1e-12
            unit = np.zeros_like(diff)
            unit[safe] = diff[safe] / norms[safe, None]
            d = np.zeros((len(cls), 3))
            np.add.at(d, src, unit)
            d *= wd
            nd = np.sqrt(np.einsum("ij,ij->i", d, d))
            move = nd > constants.ZERO_FIELD
            x[cls[move]] = d[move] / nd[move, None]
        sweeps += 1
        nxt = wmc_value(g, w, x)
        _check_monotone(value, nxt, "max", "mm_ascent_wmc")
        done = nxt - value < tol
        value = nxt
        if done:
            break
    return x, value, sweeps


def subgradient_ascent_wmc(
    g: Graph,
    w: WeightMatrix | Any = (1.0, 1.0, 1.0),
    seed: int = 0,
    step0: float | None = None,
    max_iters: int | None = None,
    tol: float | None = None,
    polish: bool = True,
    init=None,
    step_schedule: Callable[[int], float] | None = None,
) -> SolveReport:
    """Projected subgradient ascent, best iterate kept, then optional MM polish."""
    w = w if isinstance(w, WeightMatrix) else WeightMatrix(w)
    step0 = constants.STEP0 if step0 is None else step0
    max_iters = min(constants.SOLVER_MAX_ITERS, 2000) if max_iters is None else max_iters
    schedule = step_schedule or (lambda t: step0 / np.sqrt(t + 1))
    x = _start(init, g.n, 3, seed)
    best_x, best = x.copy(), wmc_value(g, w, x)
    it = 0
    for it in range(1, max_iters + 1):
        grad = wmc_gradient(g, w, x)
        # tangent projection keeps the step on the sphere's first-order chart
        grad -= np.einsum("ij,ij->i", grad, x)[:, None] * x
        if np.max(np.abs(grad), initial=0.0) < 1e-14:
            break
        x = x + schedule(it - 1) * grad
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        val = wmc_value(g, w, x)
        if val > best:
            best, best_x = val, x.copy()
    iters = it
    if polish:
        best_x, best, sweeps = mm_ascent_wmc(g, w, best_x, tol=tol)
        iters += sweeps
    config = {
        "solver": "subgradient_ascent_wmc",
        "W": list(w.diag),
        "step0": step0,
        "max_iters": max_iters,
        "polish": polish,
    }
    assignment = VectorAssignment.normalized(best_x)
    return SolveReport("wmc", "max", wmc_value(g, w, assignment), assignment, 1, [iters], seed, [best], config)


# --------------------------------------------------------------------------
# product states


def solve_prod_state(
    ham: LocalHamiltonian,
    seed: int = 0,
    max_iters: int | None = None,
    tol: float | None = None,
    init=None,
) -> SolveReport:
    """Coordinate descent: each Bloch vector is set against its effective field."""
    max_iters = constants.SOLVER_MAX_ITERS if max_iters is None else max_iters
    tol = constants.SOLVER_TOL if tol is None else tol
    r = _start(init, ham.n, 3, seed)
    energy = product_energy(ham, r)
    incident = _incident(ham)
    sweeps = 0
    while sweeps < max_iters:
        for q in range(ham.n):
            if not incident[q]:
                continue
            gq, _ = local_field(ham, r, q)
            ng = np.linalg.norm(gq)
            if ng > constants.ZERO_FIELD:
                r[q] = -gq / ng
        sweeps += 1
        nxt = product_energy(ham, r)
        _check_monotone(energy, nxt, "min", "solve_prod_state")
        done = energy - nxt < tol
        energy = nxt
        if done:
            break
    config = {"solver": "solve_prod_state", "max_iters": max_iters, "tol": tol}
    state = ProductState.normalized(r)
    return SolveReport("energy", "min", product_energy(ham, state), state, 1, [sweeps], seed, [energy], config)


# --------------------------------------------------------------------------
# restarts


SOLVERS = {
    "mck": coordinate_ascent_mck,
    "wmc": subgradient_ascent_wmc,
    "prod": solve_prod_state,
}


def merge_reports(reports: list[SolveReport], seed: int) -> SolveReport:
    """Best report wins; ties go to the earliest restart."""
    best = reports[0]
    for rep in reports[1:]:
        if best.better(rep):
            best = rep
    return SolveReport(
        best.objective,
        best.sense,
        best.best_value,
        best.best_assignment,
        len(reports),
        [it for rep in reports for it in rep.iterations_per_restart],
        seed,
        [v for rep in reports for v in rep.trajectory],
        {**best.config, "restarts": len(reports), "seed": seed},
    )


def multi_restart(solver: Callable[..., SolveReport] | str, problem, restarts: int, seed: int = 0, **kwargs) -> SolveReport:
    """Run ``solver(problem, seed=seed + r, **kwargs)`` for r < restarts and keep the best."""
    if restarts < 1:
        raise DomainError("restarts must be at least 1")
    fn = SOLVERS[solver] if isinstance(solver, str) else solver
    args = problem if isinstance(problem, tuple) else (problem,)
    reports = [fn(*args, seed=seed + r, **kwargs) for r in range(restarts)]
    if restarts == 1:
        return reports[0]
    return merge_reports(reports, seed)
