"""Number and phase distributions of spin-j (angular momentum) states."""
from .analysis import (
    ScalingFit,
    WidthReport,
    circular_stats,
    fwhm,
    interference_minima,
    number_width,
    peak_fwhm_at,
    scaling_fit,
    width_report,
)
from .distributions import (
    NumberDistribution,
    PhaseDistribution,
    PhaseKernel,
    number_distribution,
    number_moments,
    phase_distribution,
    phase_distribution_oracle,
    phase_kernel,
    q_function,
    q_normalization_check,
)
from .exceptions import (
    ConsistencyError,
    DegenerateStateError,
    DomainError,
    GridTooCoarseError,
    PeakError,
    ResolutionError,
    SpinPhaseError,
    UndefinedMeanError,
)
from .specfun import (
    MLevel,
    SignedLogValue,
    SpinJ,
    beta_fn,
    ln_binomial,
    ln_factorial,
    ln_gamma,
    wigner_d_m0_pi2,
    wigner_d_pi2,
    wigner_d_pi2_matrix,
)
from .states import (
    CoherentSpec,
    DensityMatrix,
    PureState,
    cat_state,
    coherent_state,
    density_of,
    diagonal_mixture,
    squeezed_state,
)

__version__ = "0.1.0"
