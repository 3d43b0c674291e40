"""GUE eigenvalue gap statistics toolkit.

Samples GUE matrices, computes semicircle-renormalised eigenvalue gaps,
evaluates the Gaudin-Mehta gap law from the sine-kernel Fredholm
determinant, and runs Monte Carlo certificates for the concentration
bounds satisfied by unit-mean log-concave random variables.
"""

from .sampler import HermitianMatrix, SeedSpec, principal_minor, sample_gue
from .eigen import (
    Spectrum,
    Tridiagonal,
    hermitian_eigenvalues,
    householder_tridiagonalize,
    tridiagonal_eigenvalues,
)
from .semicircle import (
    GapObservations,
    gap_scale,
    renormalize_gaps,
    sc_cdf,
    sc_density,
    sc_quantile,
)
from .logconcave import (
    BoundReport,
    EmpiricalSample,
    call_option_integral,
    exp_upper_tail_bound,
    logconcavity_diagnostic,
    put_option_integral,
    verify_gruenbaum,
    verify_lower_tail,
    verify_lv_tail,
    verify_moments,
    verify_upper_tail,
)
from .gaudin_mehta import (
    FredholmEvaluation,
    fredholm_E,
    gap_cdf,
    gap_density,
    gm_mean,
    sine_kernel,
)
from .experiments import (
    ExperimentConfig,
    RigiditySample,
    compare_to_gm,
    gt_experiment,
    run_gap_experiment,
    verify_rigidity,
    verify_thm_main,
)

__version__ = "0.1.0"
