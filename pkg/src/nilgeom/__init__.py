"""Numerical geometric measure theory on graded nilpotent groups."""

__version__ = "0.1.0"

from .algebra import GradedAlgebra, builtin_group, builtin_group_names, load_group
from .bch import (
    CompiledGroupLaw,
    bch_series,
    compile_group_law,
    dilate,
    inverse,
    multiply,
)
from .grassmann import (
    GrassmannianConstants,
    GrassmannianNet,
    HorizontalSubgroup,
    VerticalComplement,
    dist_to_subgroup,
    estimate_cG,
    grass_net,
    make_horizontal,
    make_vertical,
    project_h,
    project_v,
    rho,
    sample_horizontal_frames,
    upsilon_lower_bound,
    vertical_conjugate,
)
from .calculus import (
    DIFF_SCALES,
    HHomomorphism,
    LipschitzMap,
    SeminormSample,
    area_check,
    gen_fixture,
    lifted_circle_map,
    metric_diff,
    metric_jacobian,
    pansu_diff,
)
from .measures import (
    ConeSpec,
    CoveringEstimate,
    DecayProfile,
    PointMeasure,
    TestDictionary,
    blowup_test,
    cone_contains,
    cone_excess,
    cone_excess_profile,
    default_dictionary,
    density_profile,
    estimate_lambda,
    fit_tangent,
    geometric_scales,
    haar_constant,
    hausdorff_estimate,
    lipschitz_cover,
    load_measure,
    magnify,
    tube_bound_check,
    tube_contains,
    unit_ball_volume,
)
from .norms import HomogeneousNorm, default_norm, hdist, hnorm, make_norm, sample_unit_sphere
from .acceptance import CRITERIA, CriterionResult, canonical_json, run_criterion, run_all

__all__ = [
    "CRITERIA",
    "CriterionResult",
    "canonical_json",
    "run_criterion",
    "run_all",
    "GrassmannianConstants",
    "GrassmannianNet",
    "HorizontalSubgroup",
    "VerticalComplement",
    "dist_to_subgroup",
    "estimate_cG",
    "grass_net",
    "make_horizontal",
    "make_vertical",
    "project_h",
    "project_v",
    "rho",
    "sample_horizontal_frames",
    "upsilon_lower_bound",
    "vertical_conjugate",
    "GradedAlgebra",
    "builtin_group",
    "builtin_group_names",
    "load_group",
    "CompiledGroupLaw",
    "bch_series",
    "compile_group_law",
    "dilate",
    "inverse",
    "multiply",
    "DIFF_SCALES",
    "HHomomorphism",
    "LipschitzMap",
    "SeminormSample",
    "area_check",
    "gen_fixture",
    "lifted_circle_map",
    "metric_diff",
    "metric_jacobian",
    "pansu_diff",
    "ConeSpec",
    "CoveringEstimate",
    "DecayProfile",
    "PointMeasure",
    "TestDictionary",
    "blowup_test",
    "cone_contains",
    "cone_excess",
    "cone_excess_profile",
    "default_dictionary",
    "density_profile",
    "estimate_lambda",
    "fit_tangent",
    "geometric_scales",
    "haar_constant",
    "hausdorff_estimate",
    "lipschitz_cover",
    "load_measure",
    "magnify",
    "tube_bound_check",
    "tube_contains",
    "unit_ball_volume",
    "HomogeneousNorm",
    "default_norm",
    "hdist",
    "hnorm",
    "make_norm",
    "sample_unit_sphere",
    "__version__",
]
