"""Linear and semilinear Klein-Gordon equations on the contracting FLRW background.

Solves Phi_tt - n Phi_t - e^{2t} Laplacian Phi + m^2 Phi = e^{-Gamma t} F(Phi)
through hypergeometric integral kernels, with independent ODE oracles.
"""

from .analysis import (classify, certify_K0_bound, certify_K1_bound, feasible_domain_sample, fit_growth_exponent,
                       lifespan_I, lifespan_inverse, lifespan_lower_bound)
from .errors import (ConfigError, DegenerateWindow, DomainError, FlrwKgError, GridTooSmall, Inapplicable,
                     InvalidArgs, MaxIter, NoContraction, NonConvergence, NotInvertible, QuadratureDivergence,
                     SingularBoundary, StiffnessFailure)
from .kernels import kernel_E, kernel_K0, kernel_K1, phi
from .nonlinearity import apply_nonlinearity
from .oracle import ModeProblem, StepperConfig, mode_solve_linear, mol_solve_semilinear
from .params import CurvedMass, ModelParams, NonlinearitySpec
from .semilinear import ConvergenceReport, TimeMesh, XNormMonitor, lipschitz_probe, picard_solve
from .specfun import bessel_jy, gauss_sum, hyp2f1
from .trace import SolutionTrace
from .transform import LinearProblem, QuadratureSpec, apply_G, apply_K, solve_linear
from .waveprop import Grid, GridField, ee_propagate, sobolev_norm

__version__ = "0.1.0"

__all__ = [
    "apply_G",
    "apply_K",
    "apply_nonlinearity",
    "bessel_jy",
    "certify_K0_bound",
    "certify_K1_bound",
    "classify",
    "ConfigError",
    "ConvergenceReport",
    "CurvedMass",
    "DegenerateWindow",
    "DomainError",
    "ee_propagate",
    "feasible_domain_sample",
    "fit_growth_exponent",
    "FlrwKgError",
    "gauss_sum",
    "Grid",
    "GridField",
    "GridTooSmall",
    "hyp2f1",
    "Inapplicable",
    "InvalidArgs",
    "kernel_E",
    "kernel_K0",
    "kernel_K1",
    "lifespan_I",
    "lifespan_inverse",
    "lifespan_lower_bound",
    "LinearProblem",
    "lipschitz_probe",
    "MaxIter",
    "mode_solve_linear",
    "ModelParams",
    "ModeProblem",
    "mol_solve_semilinear",
    "NoContraction",
    "NonConvergence",
    "NonlinearitySpec",
    "NotInvertible",
    "phi",
    "picard_solve",
    "QuadratureDivergence",
    "QuadratureSpec",
    "SingularBoundary",
    "sobolev_norm",
    "SolutionTrace",
    "solve_linear",
    "StepperConfig",
    "StiffnessFailure",
    "TimeMesh",
    "XNormMonitor",
]
