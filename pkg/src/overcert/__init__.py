"""Certification of solutions to overdetermined polynomial systems.

Square subsystems are solved and alpha-certified; Taylor residuals of the
full system then separate true solutions from excess ones.  Root counts for
the excess come from Khovanskii bases and Newton-Okounkov bodies.
"""

from .certify import (
    ChainResult,
    ClassifiedCandidate,
    IndResult,
    Label,
    LiaisonChainSpec,
    LiaisonResult,
    SetResult,
    alg_ind,
    alg_set,
    liaison_chain,
    liaison_classify,
    random_matrix,
    separation_gap,
    square_up,
)
from .errors import *  # noqa: F401,F403
from .newton import (
    ALPHA_THRESHOLD,
    AlphaCertificate,
    Candidate,
    RateSchedule,
    alpha_below_threshold,
    beta,
    certify_candidate,
    certify_square,
    certify_with_fallback,
    distance,
    distinct,
    gamma_bound,
    newton_step,
    refine,
    same_root,
    separate_all,
)
from .poly import (
    GREVLEX,
    MonomialOrder,
    Polynomial,
    PolySystem,
    bezout_bound,
    bw_norm_sq,
    eval_poly,
    jacobian,
    partial,
    taylor_coefficients,
    variables,
)
from .residual import NotRejected, Rejected, TaylorResidualReport, refine_and_reject, residual_report, taylor_residual
from .rootcount import (
    FailsAt,
    GradedElement,
    GradedValueSet,
    OkounkovBody,
    RootCountInput,
    RootCountReport,
    VerifiedUpTo,
    basis_values,
    d_L,
    khovanskii_verify,
    lattice_index,
    lead_valuation,
    okounkov_body,
    root_count,
    value_space,
    volume,
)
from .scalar import QI, dyadic_round, sqrt_lower, sqrt_upper, to_exact
from .solver import SolveConfig, multistart_solve

__version__ = "0.1.0"
