"""Exact construction and numerical verification of orthotoric and
projective-bundle Kahler metrics.

The package splits into an exact layer (rational polytopes, compactification
profiles, polynomial conditions, all over ``fractions.Fraction``) and a float
layer (chart-level metric assembly with finite-difference curvature checks).
The command line front end in :mod:`orthotoric.cli` drives both from TOML
files and emits deterministic JSON reports.
"""

from .cli import VERSION as __version__
from .cli import RunConfig, main, run
from .exact import (
    Polynomial,
    count_roots_halfopen,
    count_roots_open,
    elem_sym,
    gauss_legendre,
    gauss_legendre_integrate,
    hermite_normal_form,
    int_det,
    lagrange_interpolate,
    poly_integrate_interval,
    rational_str,
    real_roots,
    solve_linear_system,
    to_rational,
)
from .geometry import (
    BaseFactor,
    CalabiData,
    ChartPoint,
    CurvatureReport,
    MetricField,
    curvature,
    eval_line_bundle_metric,
    eval_metric,
    eval_orthotoric_metric,
    line_bundle_data,
    momentum_spectrum,
    orthotoric_data,
    orthotoric_field,
    sample_points,
    verify_einstein,
    verify_extremal,
    verify_hamiltonian,
)
from .polytopes import (
    RationalDelzantPolytope,
    RationalLattice,
    canonical_hessian,
    check_toric_boundary,
    dual_pairing_check,
    ke_surface_polytope,
    ke_surface_signed_labels,
    orthotoric_simplex,
    verify_delzant,
)
from .profiles import (
    ThetaProfile,
    WeightedProjectiveTag,
    bochner_flat_profile,
    check_orthocompact,
    fubini_study_profile,
    ke_surface_profiles,
    orthotoric_H,
    orthotoric_hessian_field,
    profile_labels,
    sigma_to_roots,
)
from .wbf import (
    BlowdownResult,
    ExtremalResult,
    LineBundleProblem,
    WbfSolution,
    blowdown_problem,
    bochner_flat_check,
    check_integrality,
    check_sign_conditions,
    cp2xcp3_problem,
    extremal_profile_l1,
    h_eval,
    h_exact,
    h_jacobian,
    koiso_sakane_problem,
    solution_to_calabi,
    solve_B,
    solve_blowdown,
    solve_wbf,
    two_factor_problem,
)

__all__ = [
    "__version__",
    "main",
    "run",
    "RunConfig",
    "Polynomial",
    "count_roots_halfopen",
    "count_roots_open",
    "elem_sym",
    "gauss_legendre",
    "gauss_legendre_integrate",
    "hermite_normal_form",
    "int_det",
    "lagrange_interpolate",
    "poly_integrate_interval",
    "rational_str",
    "real_roots",
    "solve_linear_system",
    "to_rational",
    "BaseFactor",
    "CalabiData",
    "ChartPoint",
    "CurvatureReport",
    "MetricField",
    "curvature",
    "eval_line_bundle_metric",
    "eval_metric",
    "eval_orthotoric_metric",
    "line_bundle_data",
    "momentum_spectrum",
    "orthotoric_data",
    "orthotoric_field",
    "sample_points",
    "verify_einstein",
    "verify_extremal",
    "verify_hamiltonian",
    "RationalDelzantPolytope",
    "RationalLattice",
    "canonical_hessian",
    "check_toric_boundary",
    "dual_pairing_check",
    "ke_surface_polytope",
    "ke_surface_signed_labels",
    "orthotoric_simplex",
    "verify_delzant",
    "ThetaProfile",
    "WeightedProjectiveTag",
    "bochner_flat_profile",
    "check_orthocompact",
    "fubini_study_profile",
    "ke_surface_profiles",
    "orthotoric_H",
    "orthotoric_hessian_field",
    "profile_labels",
    "sigma_to_roots",
    "BlowdownResult",
    "ExtremalResult",
    "LineBundleProblem",
    "WbfSolution",
    "blowdown_problem",
    "bochner_flat_check",
    "check_integrality",
    "check_sign_conditions",
    "cp2xcp3_problem",
    "extremal_profile_l1",
    "h_eval",
    "h_exact",
    "h_jacobian",
    "koiso_sakane_problem",
    "solution_to_calabi",
    "solve_B",
    "solve_blowdown",
    "solve_wbf",
    "two_factor_problem",
]
