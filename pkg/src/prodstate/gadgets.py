"""Reduction compiler.

Two families live here:

* Hamiltonian gadgets turning a graph into a 2-local Hamiltonian over one
  fixed (anti)symmetric term, so that the minimum product-state energy is
  ``-2 * wmc`` of the graph for a stretch ``W`` read off the term.
* Graph reductions from Max-Cut and 3-Coloring to the vector objectives, with
  the forward encoders and the rounding decoders.

Output vertices are numbered originals first, then ancillas in sorted edge
order, so compilation is a deterministic function of its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Mapping, Sequence

import numpy as np

from . import constants
from .errors import (
    DegenerateWeights,
    DomainError,
    ImproperColoring,
    NotAntisymmetric,
    NotSymmetric,
    OneLocal,
)
from .graph import Graph
from .hamiltonian import LocalHamiltonian, Placement, product_energy
from .objectives import VectorAssignment, WeightMatrix, mck_value, wmc_value
from .pauli import (
    PauliDecomposition,
    Symmetry,
    as_hermitian4,
    decompose,
    normal_form_antisymmetric,
    normal_form_symmetric,
    recompose,
    symmetry_kind,
    unitary_from_rotation,
)

SQRT3 = math.sqrt(3.0)
SQRT6 = math.sqrt(6.0)

# regular tetrahedron inscribed in the unit sphere; the last vector is the
# one reserved for the t-vertices of every clique gadget
TETRAHEDRON = np.array(
    [
        [math.sqrt(8 / 9), 0.0, -1 / 3],
        [-math.sqrt(2 / 9), math.sqrt(2 / 3), -1 / 3],
        [-math.sqrt(2 / 9), -math.sqrt(2 / 3), -1 / 3],
        [0.0, 0.0, 1.0],
    ]
)

# equilateral triangle in the xy-plane
TRIANGLE = np.array(
    [[1.0, 0.0, 0.0], [-0.5, SQRT3 / 2, 0.0], [-0.5, -SQRT3 / 2, 0.0]]
)

K4_PAIRS = tuple(combinations(range(4), 2))


@dataclass(frozen=True)
class Role:
    """Provenance of one output vertex or qubit."""

    kind: str  # Original | CliqueAncilla | TriangleAncilla | StarLeaf | SinkLink | Sink | GadgetAncilla
    vertex: int | None = None
    edge: tuple[int, int] | None = None
    index: int | None = None

    def to_json(self) -> dict:
        out: dict[str, Any] = {"role": self.kind}
        if self.vertex is not None:
            out["v"] = self.vertex
        if self.edge is not None:
            out["edge"] = list(self.edge)
        if self.index is not None:
            out["i"] = self.index
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "Role":
        edge = data.get("edge")
        return cls(
            data["role"],
            data.get("v"),
            None if edge is None else (int(edge[0]), int(edge[1])),
            data.get("i"),
        )


@dataclass(frozen=True, eq=False)
class ReductionArtifact:
    kind: str
    source: Graph
    output: Graph | LocalHamiltonian
    threshold_yes: float | None
    threshold_no: float | None
    provenance: tuple[Role, ...]
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        size = self.output.n
        if len(self.provenance) != size:
            raise DomainError(f"provenance covers {len(self.provenance)} of {size} outputs")

    @property
    def objective(self) -> str:
        return self.params["objective"]

    @property
    def weight(self) -> WeightMatrix | None:
        w = self.params.get("W")
        return None if w is None else WeightMatrix(w)

    def evaluate(self, assignment) -> float:
        """Objective of the output instance at ``assignment``."""
        vecs = assignment.vectors if isinstance(assignment, VectorAssignment) else assignment
        if self.objective == "mck":
            return mck_value(self.output, vecs)
        if self.objective == "wmc":
            return wmc_value(self.output, self.weight, vecs)
        return product_energy(self.output, vecs)

    def role_count(self, kind: str) -> int:
        return sum(1 for r in self.provenance if r.kind == kind)

    def to_json(self) -> dict:
        out = self.output.to_json()
        return {
            "kind": self.kind,
            "source": self.source.to_json(),
            "output_type": "hamiltonian" if isinstance(self.output, LocalHamiltonian) else "graph",
            "output": out,
            "threshold_yes": self.threshold_yes,
            "threshold_no": self.threshold_no,
            "provenance": [r.to_json() for r in self.provenance],
            "params": self.params,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "ReductionArtifact":
        if data["output_type"] == "hamiltonian":
            output = LocalHamiltonian.from_json(data["output"])
        else:
            output = Graph.from_json(data["output"])
        return cls(
            data["kind"],
            Graph.from_json(data["source"]),
            output,
            data["threshold_yes"],
            data["threshold_no"],
            tuple(Role.from_json(r) for r in data["provenance"]),
            dict(data["params"]),
        )


def soundness_gap(m: int, constant: float | None = None) -> float:
    c = constants.GAP_CONSTANT if constant is None else constant
    return c / max(m, 1) ** 2


def _originals(g: Graph) -> list[Role]:
    return [Role("Original", vertex=v) for v in range(g.n)]


# --------------------------------------------------------------------------
# Hamiltonian gadgets


def _gadget_source(g) -> tuple[Graph, ReductionArtifact | None]:
    if isinstance(g, ReductionArtifact):
        if g.objective != "wmc":
            raise DomainError("Hamiltonian gadgets lift W-linear Max-Cut instances only")
        return g.output, g
    return g, None


def _lift_thresholds(inner: ReductionArtifact | None, per_wmc: float):
    if inner is None:
        return None, None
    return per_wmc * inner.threshold_yes, per_wmc * inner.threshold_no


def antisym_gadget_hamiltonian(h_anti, g, tol: float | None = None) -> ReductionArtifact:
    """Cycle gadget ``H^ab + H^bc + H^cd + H^da`` per edge, vertices at a and c.

    ``g`` may be a Graph or a W-MC ReductionArtifact; in the latter case the
    inner thresholds are mapped to energies (energy = -2 * wmc).
    """
    h = as_hermitian4(h_anti)
    if symmetry_kind(h, tol) is not Symmetry.Antisymmetric:
        raise NotAntisymmetric("term is not antisymmetric under SWAP")
    d = decompose(h)
    if np.linalg.norm(d.M) <= constants.TOL_CLASSIFY:
        raise OneLocal("antisymmetric term has no 2-qubit part")
    R, a, v_rot = normal_form_antisymmetric(d, tol)
    # rotate, strip the identity (it does not cancel around a cycle), scale to a = 1
    normalized = PauliDecomposition(
        np.array([[0, 0, 1], [0, 0, 0], [-1, 0, 0]], dtype=float),
        v_rot / a,
        -v_rot / a,
        0.0,
    )
    term = recompose(normalized)

    graph, inner = _gadget_source(g)
    n = graph.n
    placements = []
    provenance = _originals(graph)
    for e, (i, j) in enumerate(graph.edges):
        b, dd = n + 2 * e, n + 2 * e + 1
        provenance += [Role("GadgetAncilla", edge=(i, j), index=0), Role("GadgetAncilla", edge=(i, j), index=1)]
        for x, y in ((i, b), (b, j), (j, dd), (dd, i)):
            placements.append(Placement(0, x, y, 0.5))
    ham = LocalHamiltonian(n + 2 * graph.m, [term], placements)
    yes, no = _lift_thresholds(inner, -2.0)
    params = {
        "objective": "energy",
        "W": [1.0, 0.0, 1.0],
        "W_canonical": [1.0, 1.0, 0.0],
        "energy_per_wmc": -2.0,
        "rotation": R.tolist(),
        "unitary": [[[z.real, z.imag] for z in row] for row in unitary_from_rotation(R)],
        "scale": a,
        "identity": d.c,
        "global_scale": 0.5,
    }
    if inner is not None:
        params["inner"] = inner.kind
    return ReductionArtifact("antisym-ham", graph, ham, yes, no, tuple(provenance), params)


def sym_gadget_hamiltonian(h_sym, g, tol: float | None = None) -> ReductionArtifact:
    """Signed rectangle ``H^ab + H^cd - H^bd - H^ac`` per edge, vertices at a and d."""
    h = as_hermitian4(h_sym)
    if symmetry_kind(h, tol) is not Symmetry.Symmetric:
        raise NotSymmetric("term is not symmetric under SWAP")
    d = decompose(h)
    if np.linalg.norm(d.M) <= constants.TOL_CLASSIFY:
        raise OneLocal("symmetric term has no 2-qubit part")
    R, d_rot = normal_form_symmetric(d, tol)
    term = recompose(d_rot)
    w_diag = [abs(float(x)) for x in np.diag(d_rot.M)]

    graph, inner = _gadget_source(g)
    if inner is not None and not np.allclose(sorted(w_diag, reverse=True), sorted(inner.params["W"], reverse=True)):
        raise DomainError(f"term stretch {w_diag} does not match inner W {inner.params['W']}")
    n = graph.n
    placements = []
    provenance = _originals(graph)
    for e, (i, j) in enumerate(graph.edges):
        b, c = n + 2 * e, n + 2 * e + 1
        provenance += [Role("GadgetAncilla", edge=(i, j), index=0), Role("GadgetAncilla", edge=(i, j), index=1)]
        placements += [
            Placement(0, i, b, 0.5),
            Placement(0, c, j, 0.5),
            Placement(0, b, j, -0.5),
            Placement(0, i, c, -0.5),
        ]
    ham = LocalHamiltonian(n + 2 * graph.m, [term], placements)
    yes, no = _lift_thresholds(inner, -2.0)
    params = {
        "objective": "energy",
        "W": w_diag,
        "energy_per_wmc": -2.0,
        "rotation": R.tolist(),
        "unitary": [[[z.real, z.imag] for z in row] for row in unitary_from_rotation(R)],
        "global_scale": 0.5,
    }
    if inner is not None:
        params["inner"] = inner.kind
    return ReductionArtifact("sym-ham", graph, ham, yes, no, tuple(provenance), params)


def gadget_vertex_minimum(artifact: ReductionArtifact, vertex_bloch) -> float:
    """Closed-form minimum of a gadget Hamiltonian over its ancillas.

    Every edge contributes ``-|W (r_i - r_j)|`` once the global 1/2 is applied.
    """
    r = np.asarray(vertex_bloch, dtype=float)
    w = np.asarray(artifact.params["W"])
    e = artifact.source.edge_array()
    if len(e) == 0:
        return 0.0
    return -float(np.sum(np.linalg.norm((r[e[:, 0]] - r[e[:, 1]]) * w, axis=1)))


def gadget_ancilla_optimum(artifact: ReductionArtifact, vertex_bloch) -> np.ndarray:
    """Full Bloch array with every ancilla at its optimal position."""
    r = np.asarray(vertex_bloch, dtype=float)
    n = artifact.source.n
    full = np.zeros((artifact.output.n, 3))
    full[:n] = r
    ham = artifact.output
    M = ham.decompositions[0].M
    for e, (i, j) in enumerate(artifact.source.edges):
        delta = r[i] - r[j]
        if artifact.kind == "antisym-ham":
            u = M.T @ delta  # (r_a - r_c)^T M (r_b - r_d)
        else:
            u = M @ delta  # (r_b - r_c)^T M (r_a - r_d)
        nu = np.linalg.norm(u)
        u = u / nu if nu > constants.ZERO_FIELD else np.array([0.0, 0.0, 1.0])
        full[n + 2 * e] = -u
        full[n + 2 * e + 1] = u
    return full


# --------------------------------------------------------------------------
# graph reductions


def maxcut_to_wmc(
    g: Graph,
    w: WeightMatrix | Sequence[float],
    k_override: int | None = None,
    cut_target: int | None = None,
) -> ReductionArtifact:
    """Attach a K-star to every vertex so that optimal vectors sit on the heavy axis."""
    w = w if isinstance(w, WeightMatrix) else WeightMatrix(w)
    _, wn = w.normalized()
    diag = sorted(wn.diag, reverse=True)
    if diag[1] >= 1.0:
        raise DegenerateWeights(f"maximum weight entry of {w.diag} is not unique")
    axis = int(np.argmax(wn.diag))
    K = g.m**3 * g.n if k_override is None else int(k_override)
    if K < 0:
        raise DomainError("K must be non-negative")
    if cut_target is None:
        from .oracle import brute_maxcut

        cut_target = brute_maxcut(g)[0]

    n = g.n
    edges = list(g.edges)
    provenance = _originals(g)
    for v in range(n):
        for leaf in range(K):
            edges.append((v, n + v * K + leaf))
            provenance.append(Role("StarLeaf", vertex=v, index=leaf))
    out = Graph(n + n * K, edges)
    yes = cut_target + K * n
    params = {
        "objective": "wmc",
        "W": list(wn.diag),
        "axis": axis,
        "K": K,
        "C": cut_target,
        "m": g.m,
        "n": n,
    }
    return ReductionArtifact("maxcut-wmc", g, out, float(yes), yes - 0.5, tuple(provenance), params)


def threecolor_to_wmc_equal(g: Graph, gap_constant: float | None = None) -> ReductionArtifact:
    """Every edge becomes a 4-clique {i, j, k_ij, t_ij}; every t_ij links to one sink."""
    n, m = g.n, g.m
    edges = []
    provenance = _originals(g)
    for e, (i, j) in enumerate(g.edges):
        k, t = n + 2 * e, n + 2 * e + 1
        provenance += [
            Role("CliqueAncilla", edge=(i, j), index=0),
            Role("SinkLink", edge=(i, j)),
        ]
        edges += [(x, y) for x, y in combinations((i, j, k, t), 2)]
    sink = n + 2 * m
    edges += [(n + 2 * e + 1, sink) for e in range(m)]
    provenance.append(Role("Sink"))
    out = Graph(sink + 1, edges)
    yes = m * 2 * SQRT6 + m
    eps = soundness_gap(m, gap_constant)
    params = {"objective": "wmc", "W": [1.0, 1.0, 1.0], "m": m, "n": n, "eps": eps, "layout": "clique4"}
    return ReductionArtifact("3col-wmc-eq", g, out, yes, yes - eps, tuple(provenance), params)


def threecolor_to_wmc_twomax(
    g: Graph,
    k_override: int | None = None,
    gamma: float = 0.0,
    gap_constant: float | None = None,
) -> ReductionArtifact:
    """Every edge becomes a triangle with k_ij, then every vertex gets a K-star."""
    if not 0.0 <= gamma < 1.0:
        raise DegenerateWeights("need W = diag(1, 1, gamma) with 0 <= gamma < 1")
    n, m = g.n, g.m
    K = m**6 if k_override is None else int(k_override)
    if K < 0:
        raise DomainError("K must be non-negative")
    edges = []
    provenance = _originals(g)
    for e, (i, j) in enumerate(g.edges):
        k = n + e
        edges += [(i, j), (i, k), (j, k)]
        provenance.append(Role("TriangleAncilla", edge=(i, j)))
    mid = n + m
    for u in range(mid):
        for leaf in range(K):
            edges.append((u, mid + u * K + leaf))
            provenance.append(Role("StarLeaf", vertex=u, index=leaf))
    out = Graph(mid + mid * K, edges)
    yes = K * mid + m * 3 * SQRT3 / 2
    eps = soundness_gap(m, gap_constant)
    params = {
        "objective": "wmc",
        "W": [1.0, 1.0, float(gamma)],
        "K": K,
        "m": m,
        "n": n,
        "eps": eps,
        "layout": "triangle",
    }
    return ReductionArtifact("3col-wmc-2max", g, out, yes, yes - eps, tuple(provenance), params)


def threecolor_to_mc3(g: Graph, gap_constant: float | None = None) -> ReductionArtifact:
    """Every edge becomes a K4 {i, j, q, t} whose six edges each get a triangle apex."""
    n, m = g.n, g.m
    edges = []
    provenance = _originals(g)
    for e, (i, j) in enumerate(g.edges):
        base = n + 8 * e
        quad = (i, j, base, base + 1)
        provenance += [
            Role("CliqueAncilla", edge=(i, j), index=0),
            Role("SinkLink", edge=(i, j)),
        ]
        for p, (x, y) in enumerate(K4_PAIRS):
            apex = base + 2 + p
            a, b = quad[x], quad[y]
            edges += [(a, b), (a, apex), (b, apex)]
            provenance.append(Role("TriangleAncilla", edge=(i, j), index=p))
    sink = n + 8 * m
    edges += [(n + 8 * e + 1, sink) for e in range(m)]
    provenance.append(Role("Sink"))
    out = Graph(sink + 1, edges)
    yes = m * (10 + 2 * SQRT3) + m
    eps = soundness_gap(m, gap_constant)
    params = {"objective": "mck", "k": 3, "m": m, "n": n, "eps": eps, "layout": "clique4-apex"}
    return ReductionArtifact("3col-mc3", g, out, yes, yes - eps, tuple(provenance), params)


# --------------------------------------------------------------------------
# forward encoders


def _check_coloring(g: Graph, coloring) -> list[int]:
    col = [int(c) for c in coloring]
    if len(col) != g.n or any(c not in (0, 1, 2) for c in col):
        raise ImproperColoring("coloring must give each vertex a color in {0, 1, 2}")
    for u, v in g.edges:
        if col[u] == col[v]:
            raise ImproperColoring(f"edge ({u}, {v}) is monochromatic")
    return col


def _third(a: int, b: int) -> int:
    return 3 - a - b


def encode_coloring(artifact: ReductionArtifact, coloring) -> VectorAssignment:
    g = artifact.source
    col = _check_coloring(g, coloring)
    n, N = g.n, artifact.output.n
    x = np.zeros((N, 3))
    if artifact.kind in ("3col-wmc-eq", "3col-mc3"):
        x[:n] = TETRAHEDRON[col]
        stride = 2 if artifact.kind == "3col-wmc-eq" else 8
        for e, (i, j) in enumerate(g.edges):
            base = n + stride * e
            x[base] = TETRAHEDRON[_third(col[i], col[j])]
            x[base + 1] = TETRAHEDRON[3]
            if artifact.kind == "3col-mc3":
                quad = (i, j, base, base + 1)
                for p, (a, b) in enumerate(K4_PAIRS):
                    s = x[quad[a]] + x[quad[b]]
                    x[base + 2 + p] = -s / np.linalg.norm(s)
        x[N - 1] = -TETRAHEDRON[3]
    elif artifact.kind == "3col-wmc-2max":
        x[:n] = TRIANGLE[col]
        for e, (i, j) in enumerate(g.edges):
            x[n + e] = TRIANGLE[_third(col[i], col[j])]
        mid, K = n + g.m, artifact.params["K"]
        if K:
            x[mid:] = -np.repeat(x[:mid], K, axis=0)
    else:
        raise DomainError(f"{artifact.kind} is not a 3-Coloring reduction")
    return VectorAssignment(x)


def encode_cut(artifact: ReductionArtifact, labels) -> VectorAssignment:
    """Forward assignment of the Max-Cut reduction: ±e_axis, leaves antipodal."""
    if artifact.kind != "maxcut-wmc":
        raise DomainError("encode_cut needs a maxcut-wmc artifact")
    g = artifact.source
    s = np.asarray(labels, dtype=float)
    if s.shape != (g.n,) or not np.all(np.abs(s) == 1):
        raise DomainError("labels must be ±1 per original vertex")
    axis, K = artifact.params["axis"], artifact.params["K"]
    x = np.zeros((artifact.output.n, 3))
    x[: g.n, axis] = s
    if K:
        x[g.n :, axis] = -np.repeat(s, K)
    return VectorAssignment(x)


# --------------------------------------------------------------------------
# decoders


def cut_value(g: Graph, labels) -> int:
    return sum(1 for u, v in g.edges if labels[u] != labels[v])


def decode_cut(artifact: ReductionArtifact, assignment) -> tuple[list[int], int]:
    """Sign of each original vertex's heavy-axis coordinate (0 -> +1), and its cut value."""
    g = artifact.source
    vecs = assignment.vectors if isinstance(assignment, VectorAssignment) else np.asarray(assignment)
    axis = artifact.params.get("axis", 0)
    labels = [1 if vecs[v, axis] >= 0 else -1 for v in range(g.n)]
    return labels, cut_value(g, labels)


def _color_anchors(artifact: ReductionArtifact, e: int, i: int, j: int) -> list[int]:
    n = artifact.source.n
    if artifact.kind == "3col-wmc-eq":
        return [i, j, n + 2 * e, n + 2 * e + 1]
    if artifact.kind == "3col-mc3":
        return [i, j, n + 8 * e, n + 8 * e + 1]
    if artifact.kind == "3col-wmc-2max":
        return [i, j, n + e]
    raise DomainError(f"{artifact.kind} is not a 3-Coloring reduction")


def decode_coloring(artifact: ReductionArtifact, assignment) -> list[int] | None:
    """Round every original vertex to the nearest anchor-clique vector.

    The anchor is the smallest original edge of each component. Returns None
    when the rounding is improper or lands on a clique's reserved t-vector.
    """
    g = artifact.source
    vecs = assignment.vectors if isinstance(assignment, VectorAssignment) else np.asarray(assignment, dtype=float)
    if vecs.shape[0] != artifact.output.n:
        raise DomainError("assignment does not cover the output graph")
    if artifact.kind == "3col-wmc-2max":
        w = WeightMatrix(artifact.params["W"])
        keep = w.axes_by_weight()[:2]
        vecs = vecs[:, keep]
    edge_index = {e: k for k, e in enumerate(g.edges)}
    col = [0] * g.n
    for comp in g.components():
        members = set(comp)
        comp_edges = [e for e in g.edges if e[0] in members]
        if not comp_edges:
            continue
        i, j = comp_edges[0]
        anchors = vecs[_color_anchors(artifact, edge_index[(i, j)], i, j)]
        for v in comp:
            c = int(np.argmin(np.linalg.norm(anchors - vecs[v], axis=1)))
            if c == 3:
                return None
            col[v] = c
    for u, v in g.edges:
        if col[u] == col[v]:
            return None
    return col


def same_up_to_permutation(g: Graph, a: Sequence[int], b: Sequence[int]) -> bool:
    """Colorings agree after a color permutation on every component."""
    for comp in g.components():
        fwd: dict[int, int] = {}
        back: dict[int, int] = {}
        for v in comp:
            if fwd.setdefault(a[v], b[v]) != b[v] or back.setdefault(b[v], a[v]) != a[v]:
                return False
    return True


REDUCTIONS = {
    "maxcut-wmc": maxcut_to_wmc,
    "3col-wmc-eq": threecolor_to_wmc_equal,
    "3col-wmc-2max": threecolor_to_wmc_twomax,
    "3col-mc3": threecolor_to_mc3,
    "antisym-ham": antisym_gadget_hamiltonian,
    "sym-ham": sym_gadget_hamiltonian,
}
