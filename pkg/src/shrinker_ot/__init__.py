"""Optimal-transport toolbox for gradient shrinking solitons.

Model geometries, quadrature discretizations of the pullback and Gaussian
measures, exact and entropic Wasserstein solvers, and numerical certificates
for the transport inequalities these measures satisfy.
"""

from .errors import (
    AbsoluteContinuityError,
    CapacityError,
    ConsistencyError,
    ConvergenceError,
    CutLocusError,
    DomainError,
    FitError,
    NumericError,
)
from .bounds import (
    EntropyResult,
    PotentialBound,
    alpha_constant,
    check_main_bound,
    check_minimum_point_bound,
    check_restricted_bound,
    check_second_moment,
    entropy,
    fit_potential_bound,
    gamma_integral,
)
from .models import (
    CylinderModel,
    GaussianModel,
    ShrinkerModel,
    SphereModel,
    make_model,
    unit_sphere_area,
)
from .quadrature import (
    DiscreteMeasure,
    discretize_gaussian,
    discretize_manifold,
    discretize_pullback,
    growth_bound_check,
    moments,
    restrict,
    second_moment,
)
from .reports import BoundReport
from .transport import (
    Coupling,
    TransportResult,
    check_lsi,
    check_talagrand,
    cost_matrix,
    fisher_information,
    relative_entropy,
    reweight,
    solve_exact,
    solve_sinkhorn,
    wasserstein_1d,
)

__version__ = "0.1.0"

__all__ = [
    "AbsoluteContinuityError",
    "BoundReport",
    "CapacityError",
    "ConsistencyError",
    "ConvergenceError",
    "Coupling",
    "CutLocusError",
    "CylinderModel",
    "DiscreteMeasure",
    "DomainError",
    "EntropyResult",
    "FitError",
    "GaussianModel",
    "NumericError",
    "PotentialBound",
    "ShrinkerModel",
    "SphereModel",
    "TransportResult",
    "alpha_constant",
    "check_lsi",
    "check_main_bound",
    "check_minimum_point_bound",
    "check_restricted_bound",
    "check_second_moment",
    "check_talagrand",
    "cost_matrix",
    "discretize_gaussian",
    "discretize_manifold",
    "discretize_pullback",
    "entropy",
    "fisher_information",
    "fit_potential_bound",
    "gamma_integral",
    "growth_bound_check",
    "make_model",
    "moments",
    "relative_entropy",
    "restrict",
    "reweight",
    "second_moment",
    "solve_exact",
    "solve_sinkhorn",
    "unit_sphere_area",
    "wasserstein_1d",
]
