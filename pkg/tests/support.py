"""Independent oracles, corpora and hypothesis strategies shared by the tests."""

import math

import numpy as np
from hypothesis import strategies as st

from prodstate import graph as gr
from prodstate.graph import Graph

TREE6 = Graph(6, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5)])

COLORABLE = {
    "edge": gr.path(2),
    "K3": gr.complete(3),
    "C5": gr.cycle(5),
    "P4": gr.path(4),
    "P5": gr.path(5),
    "S3": gr.star(3),
    "tree6": TREE6,
    "empty3": gr.empty(3),
    "two-edges": Graph(4, [(0, 1), (2, 3)]),
}

SMALL = {
    "edge": gr.path(2),
    "P3": gr.path(3),
    "K3": gr.complete(3),
    "C4": gr.cycle(4),
    "K4": gr.complete(4),
    "S3": gr.star(3),
}


# -- independent oracles -----------------------------------------------------
# These never call into the package's decomposition code.

PAULIS = [
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]]),
    np.diag([1.0 + 0j, -1.0]),
]


def ket_from_bloch(r):
    """cos(t/2)|0> + e^{ip} sin(t/2)|1> with r = (sin t cos p, sin t sin p, cos t)."""
    theta = math.acos(max(-1.0, min(1.0, r[2])))
    phi = math.atan2(r[1], r[0])
    return np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])


def embed_pair(h, a, b, n):
    """Dense 2^n operator of a 4x4 matrix on qubits (a, b), qubit 0 leftmost.

    Builds h (x) I on qubits (a, b, rest...) and permutes tensor legs.
    """
    rest = [q for q in range(n) if q not in (a, b)]
    full = np.kron(h, np.eye(2 ** len(rest)))
    order = [a, b] + rest
    t = full.reshape([2] * (2 * n))
    inv = np.argsort(order)
    perm = list(inv) + [n + i for i in inv]
    return t.transpose(perm).reshape(2**n, 2**n)


def dense_expectation(terms, placements, n, bloch):
    psi = np.ones(1, dtype=complex)
    for r in bloch:
        psi = np.kron(psi, ket_from_bloch(r))
    H = sum(w * embed_pair(terms[t], a, b, n) for t, a, b, w in placements)
    return float(np.real(psi.conj() @ H @ psi)) if placements else 0.0


def random_hermitian4(rng, scale=1.0):
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    return scale * (a + a.conj().T) / 2


def random_unit(rng, n=1, k=3):
    x = rng.standard_normal((n, k))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def random_rotation(rng):
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


# -- hypothesis strategies ---------------------------------------------------

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


@st.composite
def unit_vectors(draw, k=3):
    v = np.array([draw(finite) for _ in range(k)])
    n = np.linalg.norm(v)
    if n < 1e-3:
        v = np.eye(k)[0]
        n = 1.0
    return v / n


@st.composite
def hermitian4(draw):
    re = np.array([draw(finite) for _ in range(16)]).reshape(4, 4)
    im = np.array([draw(finite) for _ in range(16)]).reshape(4, 4)
    a = re + 1j * im
    return (a + a.conj().T) / 2


@st.composite
def small_graphs(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph(n, chosen)



# -- gadget ancilla grid -----------------------------------------------------


def polar_grid(step_deg):
    """Latitude/longitude grid on S^2 with both poles."""
    pts = [[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]
    for t in np.arange(step_deg, 180.0 - 1e-9, step_deg):
        th = np.radians(t)
        ph = np.radians(np.arange(0.0, 360.0, step_deg))
        pts += np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.full_like(ph, np.cos(th))], axis=1).tolist()
    return np.array(pts)


def grid_ancilla_min(ham, ri, rj, grid):
    """Minimum energy of a single-edge gadget over its two ancillas on ``grid``.

    Qubits are (vertex i, vertex j, ancilla 0, ancilla 1). Neither gadget
    couples its two ancillas, so the energy splits as E_0(a0) + E_1(a1) and
    each ancilla is scanned with the other held fixed.
    """
    from prodstate.hamiltonian import product_energy_batch

    base = np.array([ri, rj, grid[0], grid[0]], dtype=float)
    states = np.repeat(base[None], len(grid), axis=0)
    states[:, 2] = grid
    e0 = product_energy_batch(ham, states)
    states[:, 2] = grid[0]
    states[:, 3] = grid
    e1 = product_energy_batch(ham, states)
    return float(e0.min() + e1.min() - e0[0])


# -- acceptance bookkeeping --------------------------------------------------

# criterion number -> (passed, title, seconds, detail); printed by conftest
ACCEPTANCE = {}
