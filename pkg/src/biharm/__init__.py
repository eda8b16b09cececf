"""Entire solutions of Delta^2 u + u^-q = 0 on R^3 by integral fixed point.

The package solves u = P + v with v a fixed point of the kernel convolution
v -> (1/8 pi) int K(x, y) (P + |v|)^-q dy, K either |x - y| (unshifted) or
|x - y| - |y| (shifted), and verifies the result against the differential
equation, against independent re-evaluations of the integral, against an
integral identity of Pohozaev type, and against a radial ODE integrator.
"""

from .model import (AxisymmetricGrid, ConfigError, ContinuationSpec, GridSpec,
                    NonFiniteError, Profile, QuadraticPolynomial, RadialGrid,
                    SolutionReport, SolveConfig, ValidationResult,
                    load_profile_csv, report_json, save_profile_csv,
                    validate_config, x_norm)
from .kernels import (axisym_kernel, kernel_row, legendre_mode_kernel,
                      mc_kernel_oracle, mode_kernel_table, radial_kernel)
from .operator import (ContinuationResult, IterationState, OperatorContext,
                       SphericalReduction, apply_T, continuation_eps_to_zero,
                       solve_fixed_point)
from .analysis import (GrowthFit, InsufficientTailError, NotIntegrableError,
                       check_hessian_decay, compute_beta, decompose,
                       fit_growth, hessian_decay_rate, ray_values,
                       tail_correction_rows, tail_power_fit)
from .verify import (IntegralResidualResult, PDEResidualResult,
                     PohozaevResult, RadialLaplacian, exact_q7_laplacian,
                     exact_q7_profile, exact_q7_value, integral_residual,
                     pde_residual, pohozaev_residual)
from .shooting import (BisectResult, BracketNotFoundError, Trajectory,
                       bisect_growth_threshold, borderline_exponent,
                       integrate_radial, threshold_growth_diagnostics,
                       universal_coefficient)

__version__ = "1.0.0"

__all__ = [
    "AxisymmetricGrid", "BisectResult", "BracketNotFoundError", "ConfigError",
    "ContinuationResult", "ContinuationSpec", "GridSpec", "GrowthFit",
    "InsufficientTailError", "IntegralResidualResult", "IterationState",
    "NonFiniteError", "NotIntegrableError", "OperatorContext",
    "PDEResidualResult", "PohozaevResult", "Profile", "QuadraticPolynomial",
    "RadialGrid", "RadialLaplacian", "SolutionReport", "SolveConfig",
    "SphericalReduction", "Trajectory", "ValidationResult", "apply_T",
    "axisym_kernel", "bisect_growth_threshold", "borderline_exponent",
    "check_hessian_decay", "compute_beta", "continuation_eps_to_zero",
    "decompose", "exact_q7_laplacian", "exact_q7_profile", "exact_q7_value",
    "fit_growth", "hessian_decay_rate", "integral_residual",
    "integrate_radial", "kernel_row", "legendre_mode_kernel",
    "load_profile_csv", "mc_kernel_oracle", "mode_kernel_table",
    "pde_residual", "pohozaev_residual", "radial_kernel", "ray_values",
    "report_json", "save_profile_csv", "solve_fixed_point",
    "tail_correction_rows", "tail_power_fit", "threshold_growth_diagnostics",
    "universal_coefficient", "validate_config", "x_norm",
]
