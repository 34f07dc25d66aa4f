"""Arrival-time operator algebra and spectral dynamics for the free 1+1D Dirac particle."""

from .exact import QQi, Sym
from .pauli import (
    ConstraintViolation,
    DiracPair,
    Mat2,
    ROTATED_PAIR,
    STANDARD_PAIR,
    anticommutator,
    commutator,
    make_dirac_pair,
    pauli_decompose,
    pauli_recompose,
    sample_dirac_pair,
    sigma,
)
from .params import PhysParams
from .grids import MomentumGrid, SingularGrid, SpinorGrid, TailMass
from .bdalgebra import (
    OperatorPoly,
    UnsupportedTerm,
    apply_in_momentum_rep,
    bd_left_mul_p,
    bd_right_mul_p,
    commutator_with_hamiltonian,
    serialize_operator_poly,
)
from .conjugacy import (
    ConstraintSystem,
    GammaTable,
    Inconsistent,
    WindowTooSmall,
    build_constraints,
    solve_minimal,
    toa_operator_psi,
    verify_conjugacy,
)
from .fv import (
    NearSingularU,
    SingularAtZero,
    UMatrixField,
    apply_h_phi,
    apply_h_psi,
    apply_t0,
    apply_t_hat,
    apply_t_phi_closed,
    conjugate_toa_numeric,
    du_inv_dp,
    t0_scalar,
    t_hat_coeffs,
    u_matrix,
)
from .dynamics import (
    DensityField,
    SupportViolation,
    density_movie,
    evolve,
    nonrel_limit_check,
    parity_apply,
    parity_commutator,
    to_position,
    toa_eigenfunction,
)

__version__ = "0.1.0"
