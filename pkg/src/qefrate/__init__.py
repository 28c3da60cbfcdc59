"""Growth rates of quadratic-exponential costs for stable linear quantum
stochastic systems driven by vacuum fields.

Three independent routes to the same number: direct frequency-domain
quadrature of a matrix log-determinant, a Riccati-equation march in the
risk parameter, and a finite-horizon integral-operator oracle.
"""

from .errors import (DegeneracyError, DimensionError, FeasibilityError,
                     ModelError, NumericalError, ParameterError, QefError,
                     SingularityError, SizeError, StabilityError,
                     StructureError)
from .homotopy import (HomotopyTrace, d_second_derivative_check,
                       rate_by_homotopy, rate_by_homotopy_from_grid,
                       u_direct, u_ode_step)
from .horizon import (ConvergenceStudy, HorizonEstimate, convergence_study,
                      discretize_kernels, ln_xi, ln_xi_from_matrices)
from .io import load_model, write_csv, write_summary
from .model import (KernelSample, OqhoParams, StateSpace, build_j_matrix,
                    from_state_space, kernel_at, realize)
from .onemode import (OneModeParams, ab_functions, extract_mu, onemode_drift,
                      onemode_trig)
from .quadrature import QuadratureConfig
from .rate import (RateResult, classical_v, contour_e, frequency_profile,
                   log_det_d, lqg_rate, small_theta_expansion, tail_bound,
                   theta_threshold, upsilon, upsilon_from_grid,
                   worst_case_lqg_bound)
from .spectral import (SpectralGrid, SpectralSample, TrigBundle,
                       feasibility_margin, sample_grid, spectral_sample,
                       transfer, trig_bundle)
from .twomode import two_mode_example

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "QefError", "ModelError", "DimensionError", "StabilityError",
    "DegeneracyError", "ParameterError", "StructureError",
    "FeasibilityError", "NumericalError", "SingularityError", "SizeError",
    # model
    "OqhoParams", "StateSpace", "KernelSample", "build_j_matrix",
    "realize", "from_state_space", "kernel_at",
    # spectral
    "SpectralSample", "SpectralGrid", "TrigBundle", "transfer",
    "spectral_sample", "sample_grid", "trig_bundle", "feasibility_margin",
    # quadrature
    "QuadratureConfig",
    # rate
    "RateResult", "log_det_d", "upsilon", "upsilon_from_grid",
    "classical_v", "theta_threshold", "lqg_rate", "small_theta_expansion",
    "contour_e", "tail_bound", "worst_case_lqg_bound", "frequency_profile",
    # homotopy
    "HomotopyTrace", "u_direct", "u_ode_step", "rate_by_homotopy",
    "rate_by_homotopy_from_grid", "d_second_derivative_check",
    # horizon
    "HorizonEstimate", "ConvergenceStudy", "discretize_kernels", "ln_xi",
    "ln_xi_from_matrices", "convergence_study",
    # one-mode closed forms
    "OneModeParams", "extract_mu", "onemode_drift", "ab_functions",
    "onemode_trig",
    # io / examples
    "load_model", "write_csv", "write_summary", "two_mode_example",
]
