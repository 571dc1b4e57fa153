"""Boundary-preserving Lamperti-splitting integrators for scalar SDEs on bounded domains.

The package simulates scalar Ito SDEs dX = f(X) dt + g(X) dB whose solution
lives in a bounded open interval.  The Lamperti-splitting (LS) scheme maps the
state through the Lamperti transform, advances the transformed drift exactly
(or by an Euler substep) and adds the Brownian shift, which confines every
iterate strictly to the interior of the domain.  Baseline schemes
(Euler-Maruyama, semi-implicit Euler-Maruyama, tamed Euler) and a coupled
Monte Carlo harness for boundary-preservation tables and strong-convergence
experiments are included.
"""

from .core import (
    AuditCheck,
    AuditReport,
    BrownianPath,
    Domain,
    SdeModel,
    TimeGrid,
    audit_model,
    coarsen_increments,
    make_uniform_grid,
    sample_brownian_path,
)
from .lambertw import lambert_w0, lambert_w0_from_log
from .models import (
    AllenCahnParams,
    MODEL_IDS,
    NagumoParams,
    SisParams,
    allen_cahn_exact_flow,
    allen_cahn_model,
    ls_one_step_closed_form,
    make_model,
    nagumo_exact_flow,
    nagumo_model,
    sis_exact_flow,
    sis_model,
)
from .integrators import (
    SCHEME_IDS,
    SchemeKind,
    SubstepReport,
    Trajectory,
    em_step,
    estimate_substep_constant,
    euler_ode_substep,
    ls_step,
    reconstruct_via_representation,
    sem_step,
    simulate_trajectory,
    te_step,
)
from .experiments import (
    BoundaryStats,
    ErrorReport,
    InitialCondition,
    boundary_experiment,
    fit_convergence_rate,
    path_comparison,
    reference_trajectory,
    strong_error_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "AuditCheck",
    "AuditReport",
    "AllenCahnParams",
    "BoundaryStats",
    "BrownianPath",
    "Domain",
    "ErrorReport",
    "InitialCondition",
    "MODEL_IDS",
    "NagumoParams",
    "SCHEME_IDS",
    "SchemeKind",
    "SdeModel",
    "SisParams",
    "SubstepReport",
    "TimeGrid",
    "Trajectory",
    "allen_cahn_exact_flow",
    "allen_cahn_model",
    "audit_model",
    "boundary_experiment",
    "coarsen_increments",
    "em_step",
    "estimate_substep_constant",
    "euler_ode_substep",
    "fit_convergence_rate",
    "lambert_w0",
    "lambert_w0_from_log",
    "ls_one_step_closed_form",
    "ls_step",
    "make_model",
    "make_uniform_grid",
    "nagumo_exact_flow",
    "nagumo_model",
    "path_comparison",
    "reconstruct_via_representation",
    "reference_trajectory",
    "sample_brownian_path",
    "sem_step",
    "simulate_trajectory",
    "sis_exact_flow",
    "sis_model",
    "strong_error_experiment",
    "te_step",
]
