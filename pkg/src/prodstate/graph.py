"""Simple undirected graphs and the ``n m`` / ``u v`` edge-list file format."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import InvalidGraph


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[tuple[int, int], ...]

    def __init__(self, n: int, edges: Iterable = ()):
        norm = []
        seen = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise InvalidGraph(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidGraph(f"edge ({u}, {v}) out of range for n={n}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise InvalidGraph(f"duplicate edge {key}")
            seen.add(key)
            norm.append(key)
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "edges", tuple(norm))

    @property
    def m(self) -> int:
        return len(self.edges)

    def edge_array(self) -> np.ndarray:
        return np.array(self.edges, dtype=int).reshape(-1, 2)

    def neighbors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def components(self) -> list[list[int]]:
        """Connected components as sorted vertex lists, ordered by smallest vertex."""
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in self.edges:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[max(ru, rv)] = min(ru, rv)
        groups: dict[int, list[int]] = {}
        for x in range(self.n):
            groups.setdefault(find(x), []).append(x)
        return [groups[k] for k in sorted(groups)]

    # -- file format ------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"{self.n} {self.m}"] + [f"{u} {v}" for u, v in self.edges]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Graph":
        rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        if not rows or len(rows[0]) != 2:
            raise InvalidGraph("first line must be 'n m'")
        n, m = int(rows[0][0]), int(rows[0][1])
        body = rows[1:]
        if len(body) != m:
            raise InvalidGraph(f"header says {m} edges, found {len(body)}")
        return cls(n, [(int(r[0]), int(r[1])) for r in body])

    @classmethod
    def read(cls, path) -> "Graph":
        return cls.from_text(Path(path).read_text())

    def write(self, path) -> None:
        Path(path).write_text(self.to_text())

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json(cls, data) -> "Graph":
        return cls(data["n"], data["edges"])


# -- standard families ------------------------------------------------------


def empty(n: int = 0) -> Graph:
    return Graph(n, [])


def path(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n: int) -> Graph:
    return Graph(n, combinations(range(n), 2))


def star(k: int) -> Graph:
    """Star with center 0 and leaves 1..k."""
    return Graph(k + 1, [(0, i) for i in range(1, k + 1)])


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, outer + spokes + inner)


def tetrahedron_with_triangles() -> Graph:
    """K4 on vertices 0..3 with an apex 4..9 adjoined to each of its six edges."""
    edges = []
    for apex, (a, b) in enumerate(combinations(range(4), 2), start=4):
        edges += [(a, b), (a, apex), (b, apex)]
    return Graph(10, edges)
