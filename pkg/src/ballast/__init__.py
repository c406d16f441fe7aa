"""ballast: constrained ADMM solvers for imaging inverse problems.

Solves ``min phi(x) subject to ||B x - y|| <= epsilon`` for deconvolution,
inpainting, and partial Fourier observation models, with l1 (wavelet-frame)
or isotropic-TV penalties.  Every observation model ships a closed-form
O(n log n) shifted-normal inverse, so iterations never call an inner solver.
"""

from .frames import OrthogonalHaar, UndecimatedHaar
from .harness import (
    ExperimentReport,
    ProblemInstance,
    RunSetup,
    build_experiment,
    canonical_experiment_name,
    isnr,
    cartoon,
    deblur_instance,
    epsilon_rule,
    experiment_names,
    fourier_phantom_instance,
    fourier_squares_instance,
    inpainting_instance,
    make_blur_kernel,
    mse,
    radial_mask,
    random_squares,
    relative_error,
    run_experiment,
    shepp_logan,
)
from .operators import (
    CapabilityError,
    CircularConvolution,
    CountingOperator,
    LinearOperator,
    PartialFourier,
    PixelMask,
    SynthesisOperator,
    add_noise,
)
from .prox import (
    BallConstraint,
    IsotropicTV,
    L1Norm,
    project_ball,
    soft_threshold,
    tv_norm,
    tv_prox,
)
from .solver import (
    Block,
    DivergenceError,
    IterationRecord,
    SolveResult,
    SolverConfig,
    SolverState,
    SplitSpec,
    admm2_solve,
    admm2_step,
    check_stop,
    solve_analysis,
    solve_penalized,
)
from .validate import run_suite

__version__ = "0.1.0"

__all__ = [
    "OrthogonalHaar",
    "UndecimatedHaar",
    "ExperimentReport",
    "ProblemInstance",
    "RunSetup",
    "build_experiment",
    "canonical_experiment_name",
    "isnr",
    "cartoon",
    "deblur_instance",
    "epsilon_rule",
    "experiment_names",
    "fourier_phantom_instance",
    "fourier_squares_instance",
    "inpainting_instance",
    "make_blur_kernel",
    "mse",
    "radial_mask",
    "random_squares",
    "relative_error",
    "run_experiment",
    "shepp_logan",
    "CapabilityError",
    "CircularConvolution",
    "CountingOperator",
    "LinearOperator",
    "PartialFourier",
    "PixelMask",
    "SynthesisOperator",
    "add_noise",
    "BallConstraint",
    "IsotropicTV",
    "L1Norm",
    "project_ball",
    "soft_threshold",
    "tv_norm",
    "tv_prox",
    "Block",
    "DivergenceError",
    "IterationRecord",
    "SolveResult",
    "SolverConfig",
    "SolverState",
    "SplitSpec",
    "admm2_solve",
    "admm2_step",
    "check_stop",
    "solve_analysis",
    "solve_penalized",
    "run_suite",
    "__version__",
]
