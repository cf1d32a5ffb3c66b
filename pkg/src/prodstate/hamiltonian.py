"""Weighted 2-local Hamiltonians and their product-state energies.

Qubit 0 is the leftmost tensor factor. A placement ``(t, a, b, weight)``
puts the first factor of term ``t`` on qubit ``a`` and the second on ``b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from . import constants
from .errors import DimensionMismatch, DomainError, TooLarge
from .pauli import I2, SIGMA, PauliDecomposition, as_hermitian4, decompose, term_from_json, term_to_json


@dataclass(frozen=True)
class Placement:
    t: int
    a: int
    b: int
    weight: float = 1.0


@dataclass(frozen=True, eq=False)
class LocalHamiltonian:
    n: int
    terms: tuple
    placements: tuple
    weight_cap: float = field(default=constants.WEIGHT_CAP, repr=False)

    def __post_init__(self):
        terms = tuple(as_hermitian4(t) for t in self.terms)
        placements = tuple(
            p if isinstance(p, Placement) else Placement(*p) for p in self.placements
        )
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "placements", placements)
        if self.n < 0:
            raise DomainError("qubit count must be non-negative")
        for p in placements:
            if not 0 <= p.t < len(terms):
                raise DomainError(f"term index {p.t} out of range")
            if p.a == p.b:
                raise DomainError(f"placement on a single qubit ({p.a}, {p.b})")
            if not (0 <= p.a < self.n and 0 <= p.b < self.n):
                raise DomainError(f"placement qubits ({p.a}, {p.b}) out of range")
            if not np.isfinite(p.weight) or abs(p.weight) > self.weight_cap:
                raise DomainError(f"weight {p.weight} not finite or above cap")
        object.__setattr__(self, "_decs", tuple(decompose(t) for t in terms))

    @property
    def decompositions(self) -> tuple[PauliDecomposition, ...]:
        return self._decs

    def scaled(self, factor: float) -> "LocalHamiltonian":
        return LocalHamiltonian(
            self.n,
            self.terms,
            [Placement(p.t, p.a, p.b, p.weight * factor) for p in self.placements],
            self.weight_cap,
        )

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "terms": [term_to_json(t) for t in self.terms],
            "placements": [
                {"t": p.t, "a": p.a, "b": p.b, "w": p.weight} for p in self.placements
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "LocalHamiltonian":
        return cls(
            int(data["n"]),
            [term_from_json(t) for t in data["terms"]],
            [
                Placement(int(p["t"]), int(p["a"]), int(p["b"]), float(p.get("w", 1.0)))
                for p in data["placements"]
            ],
        )


@dataclass(frozen=True, eq=False)
class ProductState:
    bloch: np.ndarray

    def __post_init__(self):
        arr = np.array(self.bloch, dtype=float).reshape(-1, 3)
        norms = np.linalg.norm(arr, axis=1)
        if arr.size and np.max(np.abs(norms - 1)) > constants.TOL_UNIT:
            raise DomainError("Bloch vectors must have unit norm")
        arr.setflags(write=False)
        object.__setattr__(self, "bloch", arr)

    @property
    def n(self) -> int:
        return len(self.bloch)

    @classmethod
    def normalized(cls, vectors) -> "ProductState":
        arr = np.asarray(vectors, dtype=float).reshape(-1, 3)
        return cls(arr / np.linalg.norm(arr, axis=1, keepdims=True))

    def to_json(self) -> dict:
        return {"bloch": self.bloch.tolist()}

    @classmethod
    def from_json(cls, data: Mapping) -> "ProductState":
        return cls(data["bloch"])


@dataclass(frozen=True)
class ProblemInstance:
    hamiltonian: LocalHamiltonian
    a: float
    b: float

    def __post_init__(self):
        if self.b < self.a:
            raise DomainError("thresholds must satisfy b >= a")


# --------------------------------------------------------------------------
# product-state energies


def _bloch_array(ham: LocalHamiltonian, state) -> np.ndarray:
    r = state.bloch if isinstance(state, ProductState) else np.asarray(state, dtype=float)
    if r.shape != (ham.n, 3):
        raise DimensionMismatch(f"expected {ham.n} Bloch vectors, got shape {r.shape}")
    return r


def product_energy(ham: LocalHamiltonian, state) -> float:
    """Energy of the pure product state with the given Bloch vectors."""
    r = _bloch_array(ham, state)
    total = 0.0
    for p in ham.placements:
        d = ham.decompositions[p.t]
        ra, rb = r[p.a], r[p.b]
        total += p.weight * (ra @ d.M @ rb + d.v @ ra + d.w @ rb + d.c)
    return float(total)


def product_energy_batch(ham: LocalHamiltonian, states: np.ndarray) -> np.ndarray:
    """Vectorised ``product_energy`` over a stack of shape (N, n, 3)."""
    states = np.asarray(states, dtype=float)
    if states.shape[1:] != (ham.n, 3):
        raise DimensionMismatch(f"expected (N, {ham.n}, 3), got {states.shape}")
    total = np.zeros(states.shape[0])
    for p in ham.placements:
        d = ham.decompositions[p.t]
        ra, rb = states[:, p.a], states[:, p.b]
        total += p.weight * (
            np.einsum("ni,ij,nj->n", ra, d.M, rb) + ra @ d.v + rb @ d.w + d.c
        )
    return total


def local_field(ham: LocalHamiltonian, r: np.ndarray, q: int) -> tuple[np.ndarray, float]:
    """Affine dependence of the energy on qubit ``q``: energy = g . r_q + const.

    Returns ``(g, const)`` with the other Bloch vectors held at ``r``.
    """
    g = np.zeros(3)
    const = 0.0
    for p in _incident(ham)[q]:
        d = ham.decompositions[p.t]
        if p.a == q:
            other = r[p.b]
            g += p.weight * (d.M @ other + d.v)
            const += p.weight * (d.w @ other + d.c)
        else:
            other = r[p.a]
            g += p.weight * (d.M.T @ other + d.w)
            const += p.weight * (d.v @ other + d.c)
    return g, const


def _incident(ham: LocalHamiltonian) -> list[list[Placement]]:
    cached = ham.__dict__.get("_incidence")
    if cached is None:
        cached = [[] for _ in range(ham.n)]
        for p in ham.placements:
            cached[p.a].append(p)
            cached[p.b].append(p)
        object.__setattr__(ham, "_incidence", cached)
    return cached


# --------------------------------------------------------------------------
# dense cross-checks


def _check_dense(ham: LocalHamiltonian, dense_limit: int | None):
    limit = constants.DENSE_LIMIT if dense_limit is None else dense_limit
    if ham.n > limit:
        raise TooLarge(f"{ham.n} qubits exceeds dense limit {limit}")


def _embed(ops: dict[int, np.ndarray], n: int) -> sp.csr_matrix:
    factors = [sp.csr_matrix(ops.get(q, I2)) for q in range(n)]
    return reduce(lambda x, y: sp.kron(x, y, format="csr"), factors)


def dense_matrix(ham: LocalHamiltonian, dense_limit: int | None = None) -> np.ndarray:
    """Full 2^n x 2^n matrix, built from the Pauli expansion of each term."""
    _check_dense(ham, dense_limit)
    dim = 2**ham.n
    total = sp.csr_matrix((dim, dim), dtype=complex)
    for p in ham.placements:
        d = ham.decompositions[p.t]
        piece = sp.csr_matrix((dim, dim), dtype=complex)
        for i in range(3):
            for j in range(3):
                if d.M[i, j] != 0:
                    piece = piece + d.M[i, j] * _embed({p.a: SIGMA[i], p.b: SIGMA[j]}, ham.n)
            if d.v[i] != 0:
                piece = piece + d.v[i] * _embed({p.a: SIGMA[i]}, ham.n)
            if d.w[i] != 0:
                piece = piece + d.w[i] * _embed({p.b: SIGMA[i]}, ham.n)
        if d.c != 0:
            piece = piece + d.c * sp.identity(dim, dtype=complex, format="csr")
        total = total + p.weight * piece
    return total.toarray()


def exact_min_energy(ham: LocalHamiltonian, dense_limit: int | None = None) -> float:
    H = dense_matrix(ham, dense_limit)
    if H.shape[0] == 1:
        return float(H[0, 0].real)
    return float(np.linalg.eigvalsh(H)[0])


def bloch_to_ket(r) -> np.ndarray:
    """+1 eigenvector of (I + r.s)/2, first nonzero amplitude real positive."""
    r = np.asarray(r, dtype=float)
    rho = (I2 + r[0] * SIGMA[0] + r[1] * SIGMA[1] + r[2] * SIGMA[2]) / 2
    evals, evecs = np.linalg.eigh(rho)
    psi = evecs[:, int(np.argmax(evals))]
    k = int(np.flatnonzero(np.abs(psi) > 1e-12)[0])
    return psi * (abs(psi[k]) / psi[k])


def product_ket(state) -> np.ndarray:
    r = state.bloch if isinstance(state, ProductState) else np.asarray(state, dtype=float)
    return reduce(np.kron, [bloch_to_ket(v) for v in r], np.ones(1, dtype=complex))


def expectation_via_dense(
    ham: LocalHamiltonian, state, dense_limit: int | None = None
) -> float:
    r = _bloch_array(ham, state)
    psi = product_ket(r)
    return float(np.real(psi.conj() @ dense_matrix(ham, dense_limit) @ psi))


def single_term_hamiltonian(h, n: int, edges: Sequence, weight: float = 1.0) -> LocalHamiltonian:
    """Convenience: one term placed on every ordered pair in ``edges``."""
    return LocalHamiltonian(n, [h], [Placement(0, a, b, weight) for a, b in edges])
