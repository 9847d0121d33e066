"""Solver and verification suite for the time-fractional Telegraph equation

    (d_t^rho)^2 u + 2*alpha*d_t^rho u - u_xx = f(x, t)

on (0, pi) x (0, T] with Riemann-Liouville time derivatives of order
rho in (0, 1), Dirichlet boundary conditions and weighted initial data
lim J^(rho-1) d^rho u = phi0, lim J^(rho-1) u = phi1.

Layers:

* ``mlf``            Mittag-Leffler / Prabhakar special functions
* ``fracops``        fractional integral, derivative, limits, discrete oracle
* ``scalar_cauchy``  closed-form scalar mode solver (both branches)
* ``laplace_oracle`` independent Laplace-inversion verification path
* ``spectral``       sine-series assembly of the full field
* ``verify``         theorem-level property checks and fitted constants
* ``config/runner``  validated run configs and file-producing commands
* ``service``        FastAPI wrapper; ``cli`` the thin command-line client
"""

__version__ = "0.1.0"

from .fracops import (
    SingularFunctionSamples,
    gl_derivative_grid,
    graded_grid,
    rl_derivative,
    rl_integral,
    rl_limit,
)
from .laplace_oracle import LaplaceSymbol, laplace_symbol, talbot_invert
from .mlf import MLQuery, ml_eval, ml_values, prabhakar_eval, prabhakar_values
from .scalar_cauchy import (
    BranchPair,
    ConvolutionKernel,
    ModeParams,
    ModeTrajectory,
    branch_pair,
    ml_convolve,
    solve_scalar,
)
from .sources import PowerPoly
from .spectral import (
    Bubble,
    CallableSpace,
    ProblemSpec,
    SinePoly,
    SolutionField,
    ZeroSpace,
    assemble_solution,
    evaluate_derivatives,
    initial_condition_errors,
    residual,
    sine_coefficients,
    sources_from_callable,
)

__all__ = [
    "__version__",
    "MLQuery",
    "ml_eval",
    "ml_values",
    "prabhakar_eval",
    "prabhakar_values",
    "SingularFunctionSamples",
    "graded_grid",
    "rl_integral",
    "rl_derivative",
    "rl_limit",
    "gl_derivative_grid",
    "PowerPoly",
    "ModeParams",
    "BranchPair",
    "ModeTrajectory",
    "ConvolutionKernel",
    "branch_pair",
    "ml_convolve",
    "solve_scalar",
    "LaplaceSymbol",
    "laplace_symbol",
    "talbot_invert",
    "ProblemSpec",
    "SolutionField",
    "ZeroSpace",
    "SinePoly",
    "Bubble",
    "CallableSpace",
    "sine_coefficients",
    "sources_from_callable",
    "assemble_solution",
    "evaluate_derivatives",
    "residual",
    "initial_condition_errors",
]
