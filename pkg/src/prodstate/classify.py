"""Complexity classification of finite sets of 2-qubit terms.

``classify_prod`` is the product-state dichotomy (P iff every term is
1-local). ``classify_lh`` evaluates the Cubitt-Montanaro conditions for the
general ground-energy problem:

* every term 1-local                                    -> InP
* one rotation maps every term to a diagonal form
  (M = a e3 e3^T, v and w along e3)                     -> NPComplete
* one rotation maps every 2-qubit correlation matrix
  to a e3 e3^T, 1-local parts unconstrained             -> StoqMAComplete
* otherwise                                             -> QMAComplete
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import constants
from .pauli import decompose, rotation_between


class ProdComplexity(str, enum.Enum):
    InP = "InP"
    NPComplete = "NPComplete"


class LHClass(str, enum.Enum):
    InP = "InP"
    NPComplete = "NPComplete"
    StoqMAComplete = "StoqMAComplete"
    QMAComplete = "QMAComplete"


class AxisMode(str, enum.Enum):
    CorrelationOnly = "CorrelationOnly"
    CorrelationAndLocals = "CorrelationAndLocals"


@dataclass(frozen=True)
class LHComplexity:
    cls: LHClass
    witness: np.ndarray | None = None  # Rotation3 for NP / StoqMA

    def to_json(self) -> dict:
        return {
            "lh": self.cls.value,
            "witness_rotation": None if self.witness is None else self.witness.tolist(),
        }


def _tol(tol):
    return constants.TOL_CLASSIFY if tol is None else tol


def _term_list(terms) -> list[np.ndarray]:
    terms = [np.asarray(t, dtype=complex) for t in terms]
    if not terms:
        raise ValueError("term set must be nonempty")
    return terms


def is_one_local(h, tol: float | None = None) -> bool:
    return float(np.linalg.norm(decompose(h).M)) <= _tol(tol)


def classify_prod(terms: Iterable, tol: float | None = None) -> ProdComplexity:
    tol = _tol(tol)
    if all(is_one_local(h, tol) for h in _term_list(terms)):
        return ProdComplexity.InP
    return ProdComplexity.NPComplete


def _rank_one_residual(M: np.ndarray, u: np.ndarray) -> float:
    alpha = float(u @ M @ u)
    return float(np.linalg.norm(M - alpha * np.outer(u, u)))


def _parallel_residual(x: np.ndarray, u: np.ndarray) -> float:
    return float(np.linalg.norm(x - (x @ u) * u))


def find_common_axis(
    ms: Sequence,
    vs: Sequence = (),
    mode: AxisMode | str = AxisMode.CorrelationAndLocals,
    tol: float | None = None,
) -> np.ndarray | None:
    """Unit axis u with every M = a uu^T (and, in CorrelationAndLocals mode,
    every listed vector parallel to u), or None.

    Candidates are the dominant eigenvectors of the nonzero matrices and the
    directions of the nonzero vectors. A matrix that is rank one within tol
    has a unique axis, so checking these candidates is complete.
    """
    tol = _tol(tol)
    mode = AxisMode(mode)
    ms = [np.asarray(M, dtype=float) for M in ms]
    vs = [np.asarray(v, dtype=float) for v in vs] if mode is AxisMode.CorrelationAndLocals else []

    candidates = []
    for M in ms:
        if np.linalg.norm(M) > tol:
            evals, evecs = np.linalg.eigh((M + M.T) / 2)
            candidates.append(evecs[:, int(np.argmax(np.abs(evals)))])
    for v in vs:
        nv = np.linalg.norm(v)
        if nv > tol:
            candidates.append(v / nv)
    if not candidates:
        return np.array([0.0, 0.0, 1.0])

    for u in candidates:
        u = u / np.linalg.norm(u)
        ok = all(
            _rank_one_residual(M, u) <= tol * max(1.0, float(np.linalg.norm(M)))
            for M in ms
        ) and all(
            _parallel_residual(v, u) <= tol * max(1.0, float(np.linalg.norm(v)))
            for v in vs
        )
        if ok:
            # canonical sign: first nonzero component positive
            nz = np.flatnonzero(np.abs(u) > tol)
            if nz.size and u[nz[0]] < 0:
                u = -u
            return u
    return None


def classify_lh(terms: Iterable, tol: float | None = None) -> LHComplexity:
    tol = _tol(tol)
    decs = [decompose(h) for h in _term_list(terms)]
    two_local = [d for d in decs if np.linalg.norm(d.M) > tol]
    if not two_local:
        return LHComplexity(LHClass.InP)

    e3 = np.array([0.0, 0.0, 1.0])
    # a nonzero antisymmetric part can never match a uu^T
    if any(
        np.linalg.norm(d.M - d.M.T) > tol * max(1.0, float(np.linalg.norm(d.M)))
        for d in two_local
    ):
        return LHComplexity(LHClass.QMAComplete)

    axis = find_common_axis(
        [d.M for d in decs],
        [x for d in decs for x in (d.v, d.w)],
        AxisMode.CorrelationAndLocals,
        tol,
    )
    if axis is not None:
        return LHComplexity(LHClass.NPComplete, rotation_between(axis, e3))

    axis = find_common_axis([d.M for d in two_local], (), AxisMode.CorrelationOnly, tol)
    if axis is not None:
        return LHComplexity(LHClass.StoqMAComplete, rotation_between(axis, e3))
    return LHComplexity(LHClass.QMAComplete)
