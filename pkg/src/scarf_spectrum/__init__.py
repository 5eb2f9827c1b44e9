"""Bound states of the generalized trigonometric Scarf well, two ways.

The same spectrum is computed independently by an asymptotic-iteration
engine with plateau-of-stability analysis and by diagonalizing the
tridiagonal wave-operator matrix in a weighted Jacobi basis, then
cross-validated against the closed-form solvable limit.
"""

__version__ = "0.1.0"

from .algebra import (
    EnergyPolynomial,
    RootSet,
    StructuredRational,
    real_roots,
    rf_add,
    rf_derivative,
    rf_equal,
    rf_eval,
    rf_mul,
)
from .aim import (
    AimState,
    CharacteristicPair,
    PlateauReport,
    SpectrumResult,
    aim_iterate,
    aim_spectrum,
    aim_wavefunction,
    delta_energy_polynomial,
    make_case1_pair,
    make_case2_pair,
    make_general_pair,
    plateau_scan,
    recommend_y0,
    termination_delta,
)
from .errors import (
    CoefficientOverflowError,
    DomainError,
    PoleOnPathError,
    SingularPointError,
    ValidationError,
    ZeroPolynomialError,
)
from .jacobi import JacobiOrder, basis_eval, basis_norm, jacobi_eval, y_matrix_element
from .potential import (
    ScarfParams,
    derive_params,
    dimensionless_energy,
    physical_energy,
    potential_value,
    scarf_closed_spectrum,
)
from .tra import (
    ConvergenceStudy,
    TraSolution,
    TridiagonalMatrix,
    build_wave_matrix,
    convergence_study,
    expansion_coefficients,
    sturm_count_below,
    tra_spectrum,
    tra_wavefunction,
    tridiag_eigenvalues,
)

__all__ = [name for name in dir() if not name.startswith("_")]
