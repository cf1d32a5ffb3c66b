"""Vector Max-Cut objectives.

    mck(G, s) = 1/2 sum_{ij in E} (1 - s_i . s_j)
    wmc(G, W, s) = 1/2 sum_{ij in E} |W s_i - W s_j|

with unit label vectors ``s_i`` and a non-negative diagonal stretch ``W``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import constants
from .errors import DimensionMismatch, DomainError
from .graph import Graph


@dataclass(frozen=True)
class WeightMatrix:
    diag: tuple[float, float, float]

    def __init__(self, diag: Sequence[float] = (1.0, 1.0, 1.0)):
        d = tuple(float(x) for x in diag)
        if len(d) != 3:
            raise DomainError("weight matrix needs three diagonal entries")
        if min(d) < 0 or max(d) <= 0:
            raise DomainError("weights must be non-negative with one nonzero")
        object.__setattr__(self, "diag", d)

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.diag)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.diag)

    def axes_by_weight(self) -> list[int]:
        """Axis indices ordered by descending weight (stable)."""
        return sorted(range(3), key=lambda i: -self.diag[i])

    def normalized(self) -> tuple[float, "WeightMatrix"]:
        """``(scale, W / scale)`` with the largest entry of ``W / scale`` equal to 1."""
        scale = max(self.diag)
        return scale, WeightMatrix([x / scale for x in self.diag])

    def canonical(self) -> "WeightMatrix":
        """Sorted descending, max entry 1."""
        _, w = self.normalized()
        return WeightMatrix(sorted(w.diag, reverse=True))

    @classmethod
    def parse(cls, text: str) -> "WeightMatrix":
        return cls([float(x) for x in text.split(",")])


@dataclass(frozen=True, eq=False)
class VectorAssignment:
    vectors: np.ndarray

    def __post_init__(self):
        arr = np.array(self.vectors, dtype=float)
        if arr.ndim != 2:
            raise DimensionMismatch("vectors must be a 2-d array (n, k)")
        if arr.size and np.max(np.abs(np.linalg.norm(arr, axis=1) - 1)) > constants.TOL_UNIT:
            raise DomainError("label vectors must have unit norm")
        arr.setflags(write=False)
        object.__setattr__(self, "vectors", arr)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @classmethod
    def normalized(cls, vectors) -> "VectorAssignment":
        arr = np.asarray(vectors, dtype=float)
        return cls(arr / np.linalg.norm(arr, axis=1, keepdims=True))

    def to_json(self) -> dict:
        return {"dim": self.dim, "vectors": self.vectors.tolist()}

    @classmethod
    def from_json(cls, data) -> "VectorAssignment":
        vecs = np.asarray(data["vectors"], dtype=float).reshape(-1, int(data.get("dim", 3)))
        return cls(vecs)


def _vectors(g: Graph, s, dim: int | None = None) -> np.ndarray:
    arr = s.vectors if isinstance(s, VectorAssignment) else np.asarray(s, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != g.n:
        raise DimensionMismatch(f"assignment has shape {arr.shape}, graph has {g.n} vertices")
    if dim is not None and arr.shape[1] != dim:
        raise DimensionMismatch(f"expected {dim}-dimensional vectors, got {arr.shape[1]}")
    return arr


def _weights(w) -> np.ndarray:
    if isinstance(w, WeightMatrix):
        return w.array
    return WeightMatrix(w).array


def mck_value(g: Graph, s) -> float:
    x = _vectors(g, s)
    if g.m == 0:
        return 0.0
    e = g.edge_array()
    return 0.5 * math.fsum(1.0 - np.einsum("ij,ij->i", x[e[:, 0]], x[e[:, 1]]))


def wmc_value(g: Graph, w, s) -> float:
    x = _vectors(g, s, 3)
    if g.m == 0:
        return 0.0
    e = g.edge_array()
    diff = (x[e[:, 0]] - x[e[:, 1]]) * _weights(w)
    # exact summation keeps large star gadgets accurate to ~1 ulp per edge
    return 0.5 * math.fsum(np.linalg.norm(diff, axis=1))


def wmc_gradient(g: Graph, w, s, zero: float = 1e-12) -> np.ndarray:
    """Euclidean (sub)gradient of ``wmc_value`` w.r.t. every label vector.

    Edges whose stretched endpoints coincide (distance < ``zero``) contribute 0.
    """
    x = _vectors(g, s, 3)
    wd = _weights(w)
    grad = np.zeros_like(x)
    if g.m == 0:
        return grad
    e = g.edge_array()
    diff = (x[e[:, 0]] - x[e[:, 1]]) * wd
    norms = np.linalg.norm(diff, axis=1)
    safe = norms >= zero
    unit = np.zeros_like(diff)
    unit[safe] = diff[safe] / norms[safe, None]
    contrib = 0.5 * unit * wd
    np.add.at(grad, e[:, 0], contrib)
    np.add.at(grad, e[:, 1], -contrib)
    return grad


def mck_values_batch(g: Graph, xs: np.ndarray) -> np.ndarray:
    """``mck_value`` for a stack of assignments of shape (N, n, k)."""
    if g.m == 0:
        return np.zeros(xs.shape[0])
    e = g.edge_array()
    dots = np.einsum("nek,nek->ne", xs[:, e[:, 0]], xs[:, e[:, 1]])
    return 0.5 * np.sum(1.0 - dots, axis=1)


def wmc_values_batch(g: Graph, w, xs: np.ndarray) -> np.ndarray:
    if g.m == 0:
        return np.zeros(xs.shape[0])
    e = g.edge_array()
    diff = (xs[:, e[:, 0]] - xs[:, e[:, 1]]) * _weights(w)
    return 0.5 * np.sum(np.linalg.norm(diff, axis=2), axis=1)
