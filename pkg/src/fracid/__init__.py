"""Identification of fractional orders and coefficients in subdiffusion with memory.

The observation is the space integral ``psi(t)`` of the solution on a short
initial interval.  :func:`identify_pipeline` fits it with a regularised
power/Jacobi series and recovers the leading order, a second order and,
optionally, a constant coefficient.
"""

from .basis import DesignBasis, design_matrix, gram_matrix, jacobi_shifted
from .directsim import DirectConfig, solve_direct
from .fraccore import (
    PowerSeries,
    caputo_product,
    caputo_series,
    gamma_fn,
    kernel_convolve,
    mittag_leffler,
    omega,
    rl_convolve,
    series_product,
)
from .identify import (
    DegenerateObservationError,
    Estimate,
    ReconConfig,
    cfun_delta,
    ffun_delta,
    identify_pipeline,
    nu1_at,
    nu2_at,
    rho_at,
)
from .model import (
    UNKNOWN_CONSTANT,
    UNKNOWN_LEAD,
    UNKNOWN_SECOND,
    FDOType,
    ModelSpec,
    Observation,
    OperatorSpec,
    Term,
)
from .problems import NoiseKind, NoiseSpec, default_times, sample_observation
from .regularize import (
    FitResult,
    RegularizationGrid,
    Selection,
    SelectionError,
    fit_observation,
    quasiopt_select,
    tikhonov_solve,
)

__version__ = "0.1.0"
