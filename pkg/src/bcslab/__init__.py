"""Finite-lattice laboratory for the effective potential of the
attractive-delta many-electron system."""

from .model import (
    DispersionSpec,
    FieldConfig,
    ModelSpec,
    Momentum,
    MomentumSet,
    TransferSet,
    autocorrelation,
    autocorrelation_all,
    bcs_config,
    build_momentum_set,
    build_transfer_set,
    dispersion,
    field_norm,
    nondegeneracy_check,
    random_config,
)
from .potential import (
    ExternalField,
    PotentialValue,
    SingularMatrixError,
    assemble_block,
    logdet,
    phi_matrix,
    potential_external,
    potential_external_reduced,
    potential_full,
    potential_real,
    potential_reduced,
    propagators,
    reduced_matrix,
    tilted_field,
    vbcs_cosh,
    vbcs_sum,
)
from .gap import (
    GapConvergenceError,
    GapSolution,
    critical_coupling,
    gap_lhs,
    solve_gap,
    solve_gap_external,
    vbcs_r,
)
from .bound import BoundReport, bound_report, hadamard_rhs, overlap_prime_sq, overlap_sq
from .expansion import (
    QuadraticForm,
    analytic_hessian,
    coefficients,
    coefficients_external,
    decomposition_lhs,
    fd_hessian,
    remainder,
    u2_external,
    v2,
)
from .gaussian import (
    GaussianReport,
    eps_int2,
    free_bubble,
    gaussian_report,
    lambda2,
    lambda2_zero,
    pair_factor,
    pair_oracle,
    z2,
)

__version__ = "0.1.0"
