"""Hardy's Z function, its smoothed approximate functional equation, and the
growth of its integral.
"""

from hardyz.errors import (
    BudgetExceededError,
    DomainError,
    HypothesisError,
    InsufficientDataError,
    NoSaddleError,
    ToleranceError,
    WindowCollisionError,
)
from hardyz.oscillatory import (
    gaussian_integral,
    gaussian_moment,
    oscillatory_quadrature,
    saddle_point_eval,
)
from hardyz.phase import PhaseFunction, split_ranges
from hardyz.primitive import (
    IntegralRecord,
    ScanResult,
    alternating_sqrt_sum,
    exponent_fit,
    integrate_z_afe,
    integrate_z_direct,
    primitive_scan,
    sum3_main_term,
)
from hardyz.smoothing import SmoothingKernel, make_kernel, rho
from hardyz.special_fns import (
    Method,
    ZSample,
    afe_z_k1,
    chi,
    hardy_z,
    riemann_siegel_z,
    theta_loggamma,
    zeta_critical_oracle,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError", "DomainError", "HypothesisError", "InsufficientDataError",
    "NoSaddleError", "ToleranceError", "WindowCollisionError",
    "gaussian_integral", "gaussian_moment", "oscillatory_quadrature", "saddle_point_eval",
    "PhaseFunction", "split_ranges",
    "IntegralRecord", "ScanResult", "alternating_sqrt_sum", "exponent_fit",
    "integrate_z_afe", "integrate_z_direct", "primitive_scan", "sum3_main_term",
    "SmoothingKernel", "make_kernel", "rho",
    "Method", "ZSample", "afe_z_k1", "chi", "hardy_z", "riemann_siegel_z",
    "theta_loggamma", "zeta_critical_oracle",
]
