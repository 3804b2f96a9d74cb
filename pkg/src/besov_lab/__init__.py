"""Numerical workbench for dual moduli of continuity and Besov functionals.

Computes the classical and variational (dual-norm) moduli of continuity of
sampled functions on R^n (n <= 3) and on finite-dimensional Gaussian space,
and machine-verifies the two-sided comparisons, embedding inequalities, and
spectral approximation bounds that connect them, with their explicit
constants.
"""

from .errors import (
    BesovLabError,
    CoverageError,
    DomainExceededError,
    InvalidWeightError,
    OptimizerDivergedError,
    ParameterDomainError,
    QuadratureOrderError,
    UnresolvedScaleWarning,
    UsageError,
)
from .grids import (
    BesovParams,
    GridFunction,
    ModulusCurve,
    besov_seminorm,
    heat_semigroup,
    lp_norm,
    omega_curve,
    omega_p,
    shift,
)
from .numerics import BracketedValue
from .sigma import (
    AdjointCurve,
    VectorFieldCandidate,
    V_functional,
    adjoint_transform,
    sandwich_factor,
    sigma_constructive,
    sigma_tilde_variational,
    sigma_upper,
    sigma_variational,
)
from .embedding import (
    EmbeddingConstant,
    MonotoneWeight,
    embedding_constant,
    local_energy_check,
    newtonian_gradient_field,
    stieltjes_integral,
    tail_measure_check,
    ulyanov_LU_check,
    ulyanov_U_check,
    unit_sphere_area,
)
from .gaussian import (
    GaussianFieldCandidate,
    HermiteFunction,
    HermiteGrid,
    a_gamma,
    c_t,
    gauss_constant,
    gaussian_besov_functionals,
    hypercontractivity_check,
    lipschitz_composition_check,
    log_sobolev_embedding_check,
    ou_semigroup,
    sigma_gamma_upper,
    sigma_gamma_variational,
)
from .chaos import (
    ChaosDecomposition,
    best_approx,
    chaos_decompose,
    hermite_eval,
    jackson_stechkin_check,
)
from .reports import CheckReport, emit_curve_data
from .suites import SuiteConfig, run_suite

__version__ = "0.1.0"
