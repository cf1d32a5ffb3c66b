"""Default numerical tolerances and gadget parameters.

Every default can be overridden through an environment variable named
``PRODSTATE_<NAME>`` (for example ``PRODSTATE_TOL_HERM=1e-8``).

=====================  =========  ==========================================
name                   default    used by
=====================  =========  ==========================================
TOL_HERM               1e-9       Hermiticity check of 2-qubit terms
TOL_ROTATION           1e-9       SO(3) / unitarity checks
TOL_SYMMETRY           1e-9       symmetric / antisymmetric term detection
TOL_CLASSIFY           1e-8       1-local test and common-axis search
TOL_UNIT               1e-12      unit-norm check for Bloch / label vectors
ZERO_FIELD             1e-12      zero field / zero neighbour-sum cut-off
DENSE_LIMIT            12         max qubits for dense matrices
WEIGHT_CAP             1e6        max abs weight in a LocalHamiltonian
SOLVER_TOL             1e-10      per-sweep improvement stopping rule
SOLVER_MAX_ITERS       10000      sweep / iteration cap
STEP0                  0.5        subgradient step  eta_t = STEP0/sqrt(t+1)
GAP_CONSTANT           1e-3       soundness gap  eps = GAP_CONSTANT / m^2
=====================  =========  ==========================================
"""

from __future__ import annotations

import os


def _env_float(name: str, default: float) -> float:
    raw = os.environ.get(f"PRODSTATE_{name}")
    return float(raw) if raw else default


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(f"PRODSTATE_{name}")
    return int(raw) if raw else default


TOL_HERM = _env_float("TOL_HERM", 1e-9)
TOL_ROTATION = _env_float("TOL_ROTATION", 1e-9)
TOL_SYMMETRY = _env_float("TOL_SYMMETRY", 1e-9)
TOL_CLASSIFY = _env_float("TOL_CLASSIFY", 1e-8)
TOL_UNIT = _env_float("TOL_UNIT", 1e-12)
ZERO_FIELD = _env_float("ZERO_FIELD", 1e-12)
DENSE_LIMIT = _env_int("DENSE_LIMIT", 12)
WEIGHT_CAP = _env_float("WEIGHT_CAP", 1e6)
SOLVER_TOL = _env_float("SOLVER_TOL", 1e-10)
SOLVER_MAX_ITERS = _env_int("SOLVER_MAX_ITERS", 10_000)
STEP0 = _env_float("STEP0", 0.5)
GAP_CONSTANT = _env_float("GAP_CONSTANT", 1e-3)


def as_dict() -> dict[str, float]:
    """Snapshot of the active defaults, embedded in CLI outputs."""
    return {
        "tol_herm": TOL_HERM,
        "tol_rotation": TOL_ROTATION,
        "tol_symmetry": TOL_SYMMETRY,
        "tol_classify": TOL_CLASSIFY,
        "tol_unit": TOL_UNIT,
        "zero_field": ZERO_FIELD,
        "dense_limit": DENSE_LIMIT,
        "weight_cap": WEIGHT_CAP,
        "solver_tol": SOLVER_TOL,
        "solver_max_iters": SOLVER_MAX_ITERS,
        "step0": STEP0,
        "gap_constant": GAP_CONSTANT,
    }
