"""Partition functions of 3-body Ising models on color-code lattices.

The library maps the partition function of a 3-body Ising model living on a
trivalent, face-3-colorable lattice (a 2-colex) to a quantum expectation
value on the associated color-code stabilizer state, and estimates it by
classical stabilizer sampling.  Exact enumeration oracles, a direct-overlap
baseline estimator, and a dense-statevector emulation of the measurement
protocol are included for verification.
"""

from .colex import (
    Colex,
    ColexValidationError,
    DerivedQuantities,
    InvalidDimensionsError,
    derived_quantities,
    generate_hexagonal,
    generate_square_octagon,
    incidence_matrix,
    load_colex,
    save_colex,
    validate,
    vertex_face_triples,
)
from .estimator import (
    EstimateResult,
    SamplePlan,
    compare_methods,
    estimate_expectation,
    estimate_overlap_baseline,
    plan_samples,
)
from .gf2 import (
    DEFAULT_ENUM_CAP,
    BitMatrix,
    BitVector,
    CapExceededError,
    MembershipSolver,
    column_space_basis,
    enumerate_codewords,
    is_self_orthogonal,
    nullspace_basis,
    rank,
    solve_membership,
)
from .ising import (
    IsingModel,
    LocalPhase,
    LocalPhases,
    energy,
    exact_Z_spin_enumeration,
    exact_Z_via_expectation,
    exact_expectation_codeword_sum,
    exact_overlap,
    gamma,
    local_phases,
)
from .qsim import (
    DEFAULT_QUBIT_CAP,
    DenseState,
    build_omega_dense,
    dense_distribution,
    diagonalize_A,
    emulate_quantum_protocol,
)
from .stabilizer import Tableau, apply_clifford, apply_clifford_all, css_tableau, sample_basis

__version__ = "0.1.0"

__all__ = [
    "BitMatrix",
    "BitVector",
    "CapExceededError",
    "Colex",
    "ColexValidationError",
    "DEFAULT_ENUM_CAP",
    "DEFAULT_QUBIT_CAP",
    "DenseState",
    "DerivedQuantities",
    "EstimateResult",
    "InvalidDimensionsError",
    "IsingModel",
    "LocalPhase",
    "LocalPhases",
    "MembershipSolver",
    "SamplePlan",
    "Tableau",
    "apply_clifford",
    "apply_clifford_all",
    "build_omega_dense",
    "column_space_basis",
    "compare_methods",
    "css_tableau",
    "dense_distribution",
    "derived_quantities",
    "diagonalize_A",
    "emulate_quantum_protocol",
    "energy",
    "enumerate_codewords",
    "estimate_expectation",
    "estimate_overlap_baseline",
    "exact_Z_spin_enumeration",
    "exact_Z_via_expectation",
    "exact_expectation_codeword_sum",
    "exact_overlap",
    "gamma",
    "generate_hexagonal",
    "generate_square_octagon",
    "incidence_matrix",
    "is_self_orthogonal",
    "load_colex",
    "local_phases",
    "nullspace_basis",
    "plan_samples",
    "rank",
    "sample_basis",
    "save_colex",
    "solve_membership",
    "validate",
    "vertex_face_triples",
]
