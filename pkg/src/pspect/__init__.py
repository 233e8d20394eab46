"""Spectrum, nodal solutions and bifurcation branches of the radial
p-Laplacian with sign-changing weight on the unit ball."""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    IntegrationError,
    NegativeSequenceAbsent,
    PreconditionError,
    PspectError,
)
from .greens import GpProfile, SourceTerm, apply_Gp, as_source, residual
from .nodal import (
    Branch,
    BranchPoint,
    GammaInterval,
    NodalSearch,
    NodalSolution,
    Nonlinearity,
    Perturbation,
    find_nodal,
    gamma_intervals,
    solution_residual,
    trace_branch,
    verify_bifurcation_points,
)
from .pfuncs import Exponent, PTrigTable, phi_p, phi_p_inv, pi_p, sin_p
from .radial_ivp import Problem, Trajectory, origin_startup, shoot
from .report import CheckReport
from .spectrum import (
    Eigenpair,
    EigenResult,
    Spectrum,
    closed_form_mu,
    compute_spectrum,
    crossing_index,
    find_eigenvalues,
    miss_and_count,
    rayleigh_mu1,
    trace_eigenvalues_in_p,
    verify_p_continuity,
    verify_sturm,
    verify_weight_monotonicity,
    verify_zero_proliferation,
)
from .weights import Weight
