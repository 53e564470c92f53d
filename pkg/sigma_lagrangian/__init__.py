"""Sphere-foliated Lagrangian immersions.

~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

Closed-form geometry of immersions of R x S^{n-1} into C^n foliated by round
(n-1)-spheres, finite-difference oracles for every closed form, and the profile ODE
of the Hamiltonian-stationary family with its phase analysis.

Basic usage:

    >>> from sigma_lagrangian import lagrangian_angle, make_preset
    >>> spec = make_preset("standard_circle", {"n": 3})
    >>> round(lagrangian_angle(spec, 0.0, [1.0, 0.0, 0.0]), 6)
    1.570796

:license: MIT, see LICENSE for more details.
"""

from sigma_lagrangian._version import __version__
from sigma_lagrangian.artifact_io import (
    phase_portrait_data,
    read_mesh_csv,
    sample_mesh,
    sample_point_table,
    write_mesh,
)
from sigma_lagrangian.exceptions import (
    ArtifactIOError,
    BranchResolutionError,
    ConstructionError,
    DomainError,
    InternalError,
    MeshExportError,
    NoFixedPointError,
    NumericError,
    QuadratureError,
    SigmaError,
    SingularityError,
    UndefinedAngleError,
    ValidationError,
    WrongComponentError,
)
from sigma_lagrangian.foliation_core import (
    curvature_scalar_B,
    delta_beta_poly_f,
    eval_immersion,
    induced_metric,
    lagrangian_angle,
    mean_curvature_coeffs,
    mean_curvature_vector,
    orthonormal_frame,
    tangent_frame,
)
from sigma_lagrangian.hs_dynamics import (
    HSTrajectory,
    classify,
    energy,
    fixed_points,
    hs_rhs,
    integrate,
)
from sigma_lagrangian.models import (
    CatalogEntry,
    EnergyClass,
    EnergyTag,
    Family,
    FDConfig,
    HSParams,
    HSState,
    Mesh,
    PhaseResult,
    ResidualReport,
    RunConfig,
    SamplePlan,
    StarInstance,
)
from sigma_lagrangian.oracle_verify import check_star_condition, run_verification
from sigma_lagrangian.phase_analysis import (
    classify_catalog,
    detect_self_intersection,
    phi_type1,
    phi_type2,
    phi_type3,
)
from sigma_lagrangian.profile_curves import (
    CenterVelocity,
    FoliatedSpec,
    ProfileCurve,
    eval_profile,
    make_preset,
)
from sigma_lagrangian.sweep import SweepRunner

__all__ = [
    "__version__",
    "ArtifactIOError",
    "BranchResolutionError",
    "ConstructionError",
    "DomainError",
    "InternalError",
    "MeshExportError",
    "NoFixedPointError",
    "NumericError",
    "QuadratureError",
    "SigmaError",
    "SingularityError",
    "UndefinedAngleError",
    "ValidationError",
    "WrongComponentError",
    "CatalogEntry",
    "CenterVelocity",
    "EnergyClass",
    "EnergyTag",
    "FDConfig",
    "Family",
    "FoliatedSpec",
    "HSParams",
    "HSState",
    "HSTrajectory",
    "Mesh",
    "PhaseResult",
    "ProfileCurve",
    "ResidualReport",
    "RunConfig",
    "SamplePlan",
    "StarInstance",
    "SweepRunner",
    "check_star_condition",
    "classify",
    "classify_catalog",
    "curvature_scalar_B",
    "delta_beta_poly_f",
    "detect_self_intersection",
    "energy",
    "eval_immersion",
    "eval_profile",
    "fixed_points",
    "hs_rhs",
    "induced_metric",
    "integrate",
    "lagrangian_angle",
    "make_preset",
    "mean_curvature_coeffs",
    "mean_curvature_vector",
    "orthonormal_frame",
    "phase_portrait_data",
    "phi_type1",
    "phi_type2",
    "phi_type3",
    "read_mesh_csv",
    "run_verification",
    "sample_mesh",
    "sample_point_table",
    "tangent_frame",
    "write_mesh",
]
