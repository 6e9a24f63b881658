"""Morse data, normal cycles and curvature measures of piecewise-linear sets."""

from .complex import (
    SimplicialComplex,
    build_complex,
    full_subcomplex,
    link,
    sample_generic_covector,
    subcomplex,
    subdivide_by_level,
    upper_link,
)
from .euler import (
    ConstructibleFunction,
    cf_add,
    cf_indicator,
    cf_scale,
    chi_o,
    chi_top_compact,
    euler_integral,
)
from .integral_geometry import (
    IntrinsicVolumes,
    TubeExperiment,
    crofton_estimate,
    fit_tube_polynomial,
    hausdorff_measure_exact,
    intrinsic_volumes_convex,
    tube_volume_mc,
)
from .morse import (
    JumpMeasure,
    MorseDataSlice,
    bl_distance,
    convergence_harness,
    index_sum_check,
    jump_identity_check,
    jump_measure,
    morse_index,
    morse_slice,
    superlevel_chi,
)
from .normal_cycle import (
    NormalCycle,
    build_normal_cycle,
    check_cycle_2d,
    check_legendrian,
    cone_extend,
    slice_at,
)

__version__ = "0.1.0"

__all__ = [
    "ConstructibleFunction",
    "IntrinsicVolumes",
    "JumpMeasure",
    "MorseDataSlice",
    "NormalCycle",
    "SimplicialComplex",
    "TubeExperiment",
    "bl_distance",
    "build_complex",
    "build_normal_cycle",
    "cf_add",
    "cf_indicator",
    "cf_scale",
    "check_cycle_2d",
    "check_legendrian",
    "chi_o",
    "chi_top_compact",
    "cone_extend",
    "convergence_harness",
    "crofton_estimate",
    "euler_integral",
    "fit_tube_polynomial",
    "full_subcomplex",
    "hausdorff_measure_exact",
    "index_sum_check",
    "intrinsic_volumes_convex",
    "jump_identity_check",
    "jump_measure",
    "link",
    "morse_index",
    "morse_slice",
    "sample_generic_covector",
    "slice_at",
    "subcomplex",
    "subdivide_by_level",
    "superlevel_chi",
    "tube_volume_mc",
    "upper_link",
]
