"""Product-state energies of 2-local qubit Hamiltonians and Vector Max-Cut."""

from .classify import LHClass, ProdComplexity, classify_lh, classify_prod
from .errors import DomainError
from .gadgets import (
    ReductionArtifact,
    antisym_gadget_hamiltonian,
    decode_coloring,
    decode_cut,
    encode_coloring,
    encode_cut,
    maxcut_to_wmc,
    sym_gadget_hamiltonian,
    threecolor_to_mc3,
    threecolor_to_wmc_equal,
    threecolor_to_wmc_twomax,
)
from .graph import Graph
from .hamiltonian import LocalHamiltonian, Placement, ProductState, product_energy
from .objectives import VectorAssignment, WeightMatrix, mck_value, wmc_value
from .pauli import PauliDecomposition, Symmetry, decompose, pauli_term, recompose, symmetry_kind
from .solvers import SolveReport, coordinate_ascent_mck, multi_restart, solve_prod_state, subgradient_ascent_wmc

__version__ = "0.1.0"
