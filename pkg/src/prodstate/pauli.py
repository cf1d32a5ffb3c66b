"""Pauli algebra of 2-qubit Hermitian terms.

A 2-qubit term ``h`` (4x4 Hermitian, qubit 0 is the left tensor factor) is
written as

    h = sum_ij M[i,j] s_i (x) s_j + sum_k v[k] s_k (x) I + w[k] I (x) s_k + c I (x) I

with ``s_1, s_2, s_3 = X, Y, Z``. ``M`` is the correlation matrix.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy.spatial.transform import Rotation as _ScipyRotation

from . import constants
from .errors import (
    InvalidRotation,
    NotHermitian,
    NotSkewSymmetric,
    NotSymmetricCorrelation,
    ZeroCorrelation,
)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA = (X, Y, Z)
PAULI_BY_NAME = {"I": I2, "X": X, "Y": Y, "Z": Z}

SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)

# Pauli-product basis as a (3, 3, 4, 4) stack and the two 1-local stacks.
_SS = np.array([[np.kron(a, b) for b in SIGMA] for a in SIGMA])
_SI = np.array([np.kron(a, I2) for a in SIGMA])
_IS = np.array([np.kron(I2, a) for a in SIGMA])


class Symmetry(str, enum.Enum):
    Symmetric = "Symmetric"
    Antisymmetric = "Antisymmetric"
    Neither = "Neither"


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PauliDecomposition:
    M: np.ndarray
    v: np.ndarray
    w: np.ndarray
    c: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "M", _frozen(self.M).reshape(3, 3))
        object.__setattr__(self, "v", _frozen(self.v).reshape(3))
        object.__setattr__(self, "w", _frozen(self.w).reshape(3))
        object.__setattr__(self, "c", float(self.c))

    def allclose(self, other: "PauliDecomposition", atol: float = 1e-12) -> bool:
        return (
            np.allclose(self.M, other.M, atol=atol, rtol=0)
            and np.allclose(self.v, other.v, atol=atol, rtol=0)
            and np.allclose(self.w, other.w, atol=atol, rtol=0)
            and abs(self.c - other.c) <= atol
        )

    def to_json(self) -> dict:
        return {
            "M": self.M.tolist(),
            "v": self.v.tolist(),
            "w": self.w.tolist(),
            "c": self.c,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "PauliDecomposition":
        return cls(data["M"], data["v"], data["w"], data.get("c", 0.0))


# --------------------------------------------------------------------------
# construction and validation


def pauli_term(coeffs: Mapping[str, float] | str) -> np.ndarray:
    """Build a 2-qubit term from Pauli labels.

    Accepts a mapping such as ``{"XX": 1, "ZI": 0.5}`` or a string such as
    ``"XX + YY - 2*ZZ + 0.5 XI"``.
    """
    if isinstance(coeffs, str):
        coeffs = _parse_pauli_string(coeffs)
    h = np.zeros((4, 4), dtype=complex)
    for label, coef in coeffs.items():
        label = label.strip().upper()
        if len(label) != 2 or any(p not in PAULI_BY_NAME for p in label):
            raise ValueError(f"bad Pauli label {label!r}")
        h += coef * np.kron(PAULI_BY_NAME[label[0]], PAULI_BY_NAME[label[1]])
    return h


_TERM_RE = re.compile(r"([+-]?)\s*([0-9.eE+-]*)\s*\*?\s*([IXYZ]{2})")


def _parse_pauli_string(text: str) -> dict[str, float]:
    out: dict[str, float] = {}
    compact = text.replace(" ", "")
    pos = 0
    for m in _TERM_RE.finditer(compact):
        if m.start() != pos:
            raise ValueError(f"cannot parse Pauli string {text!r}")
        sign, num, label = m.groups()
        coef = float(num) if num not in ("", "+", "-") else 1.0
        if sign == "-":
            coef = -coef
        out[label] = out.get(label, 0.0) + coef
        pos = m.end()
    if pos != len(compact) or not out:
        raise ValueError(f"cannot parse Pauli string {text!r}")
    return out


def hermitian_residual(h: np.ndarray) -> float:
    h = np.asarray(h)
    return float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0


def as_hermitian4(h, tol: float | None = None) -> np.ndarray:
    """Validate and return ``h`` as a 4x4 complex array."""
    tol = constants.TOL_HERM if tol is None else tol
    arr = np.asarray(h, dtype=complex)
    if arr.shape != (4, 4):
        raise NotHermitian(f"expected a 4x4 matrix, got shape {arr.shape}")
    res = hermitian_residual(arr)
    if res > tol:
        raise NotHermitian(f"Hermitian residual {res:.3g} exceeds {tol:.3g}")
    return arr


# --------------------------------------------------------------------------
# decomposition


def decompose(h, tol: float | None = None) -> PauliDecomposition:
    h = as_hermitian4(h, tol)
    M = np.einsum("ijab,ba->ij", _SS, h).real / 4
    v = np.einsum("kab,ba->k", _SI, h).real / 4
    w = np.einsum("kab,ba->k", _IS, h).real / 4
    c = np.trace(h).real / 4
    return PauliDecomposition(M, v, w, c)


def recompose(d: PauliDecomposition) -> np.ndarray:
    return (
        np.einsum("ij,ijab->ab", d.M, _SS)
        + np.einsum("k,kab->ab", d.v, _SI)
        + np.einsum("k,kab->ab", d.w, _IS)
        + d.c * np.eye(4)
    )


def swap_conjugate(h) -> np.ndarray:
    h = as_hermitian4(h)
    return SWAP @ h @ SWAP


def symmetry_kind(h, tol: float | None = None) -> Symmetry:
    tol = constants.TOL_SYMMETRY if tol is None else tol
    h = as_hermitian4(h)
    swapped = SWAP @ h @ SWAP
    if np.linalg.norm(h - swapped) <= tol:
        return Symmetry.Symmetric
    if np.linalg.norm(h + swapped) <= tol:
        return Symmetry.Antisymmetric
    return Symmetry.Neither


def symmetrize(h) -> np.ndarray:
    h = as_hermitian4(h)
    return h + SWAP @ h @ SWAP


# --------------------------------------------------------------------------
# local rotations


def check_rotation(R, tol: float | None = None) -> np.ndarray:
    tol = constants.TOL_ROTATION if tol is None else tol
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3):
        raise InvalidRotation(f"expected 3x3 rotation, got shape {R.shape}")
    if np.max(np.abs(R @ R.T - np.eye(3))) > tol:
        raise InvalidRotation("R is not orthogonal")
    if abs(np.linalg.det(R) - 1.0) > tol:
        raise InvalidRotation("det(R) != +1")
    return R


def rotate_decomposition(d: PauliDecomposition, R) -> PauliDecomposition:
    R = check_rotation(R)
    return PauliDecomposition(R @ d.M @ R.T, R @ d.v, R @ d.w, d.c)


def unitary_from_rotation(R) -> np.ndarray:
    """SU(2) lift of ``R``: ``U s.a U^dag = s.(R a)`` for every real 3-vector a.

    Uses the axis-angle quaternion with rotation angle in [0, pi], so
    ``U = cos(t/2) I - i sin(t/2) n.s``.
    """
    R = check_rotation(R)
    qx, qy, qz, qw = _ScipyRotation.from_matrix(R).as_quat()
    if qw < 0:
        qx, qy, qz, qw = -qx, -qy, -qz, -qw
    return qw * I2 - 1j * (qx * X + qy * Y + qz * Z)


def conjugate_term(h, U) -> np.ndarray:
    """Simultaneous conjugation ``(U (x) U) h (U (x) U)^dag``."""
    UU = np.kron(U, U)
    return UU @ np.asarray(h, dtype=complex) @ UU.conj().T


def rotation_between(a, b) -> np.ndarray:
    """Minimal rotation in SO(3) sending unit vector ``a`` onto unit vector ``b``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    k = np.cross(a, b)
    cos = float(a @ b)
    if cos < -1 + 1e-12:
        # antipodal: half-turn about any axis orthogonal to a
        trial = np.eye(3)[np.argmin(np.abs(a))]
        axis = np.cross(a, trial)
        axis /= np.linalg.norm(axis)
        return 2 * np.outer(axis, axis) - np.eye(3)
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + K + K @ K / (1 + cos)


# --------------------------------------------------------------------------
# normal forms


def normal_form_symmetric(
    d: PauliDecomposition, tol: float | None = None
) -> tuple[np.ndarray, PauliDecomposition]:
    """Rotate so that M is diagonal, entries sorted by descending |value|.

    Ties in |value| are broken by descending signed value.
    """
    tol = constants.TOL_SYMMETRY if tol is None else tol
    M = d.M
    if np.linalg.norm(M - M.T) > tol:
        raise NotSymmetricCorrelation("correlation matrix is not symmetric")
    evals, evecs = np.linalg.eigh((M + M.T) / 2)
    order = sorted(range(3), key=lambda i: (-round(abs(evals[i]), 12), -evals[i]))
    R = evecs[:, order].T.copy()
    if np.linalg.det(R) < 0:
        R[2] = -R[2]
    return R, rotate_decomposition(d, R)


def skew_axis(M) -> np.ndarray:
    """Axis vector a with ``M x = a x x`` for skew-symmetric M."""
    return np.array([M[2, 1], M[0, 2], M[1, 0]], dtype=float)


def normal_form_antisymmetric(
    d: PauliDecomposition, tol: float | None = None
) -> tuple[np.ndarray, float, np.ndarray]:
    """Rotate an antisymmetric term to ``a (XZ - ZX) + sum_k v'_k (s_k I - I s_k)``.

    Returns ``(R, a, v')`` with ``a > 0``.
    """
    tol = constants.TOL_SYMMETRY if tol is None else tol
    M = d.M
    if np.linalg.norm(M + M.T) > tol or np.linalg.norm(d.v + d.w) > tol:
        raise NotSkewSymmetric("term is not antisymmetric (need M skew, v = -w)")
    axis = skew_axis((M - M.T) / 2)
    a = float(np.linalg.norm(axis))
    if a <= tol:
        raise ZeroCorrelation("correlation matrix is zero")
    # XZ - ZX has M[0,2] = 1, M[2,0] = -1, i.e. axis +e_y
    R = rotation_between(axis / a, [0.0, 1.0, 0.0])
    return R, a, R @ d.v


# --------------------------------------------------------------------------
# JSON


def term_to_json(h) -> dict:
    h = np.asarray(h, dtype=complex)
    return {"matrix": [[[z.real, z.imag] for z in row] for row in h]}


def term_from_json(data) -> np.ndarray:
    """Parse ``{"matrix": 4x4 [re, im] pairs}`` or ``{"pauli": {...} | "XX+..."}``."""
    if "pauli" in data:
        return as_hermitian4(pauli_term(data["pauli"]))
    raw = np.asarray(data["matrix"], dtype=float)
    if raw.shape == (4, 4, 2):
        h = raw[..., 0] + 1j * raw[..., 1]
    elif raw.shape == (4, 4):
        h = raw.astype(complex)
    else:
        raise NotHermitian(f"bad matrix shape {raw.shape}")
    return as_hermitian4(h)
