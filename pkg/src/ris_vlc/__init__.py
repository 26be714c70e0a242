"""Deterministic simulator and optimization toolkit for mirror-assisted
indoor visible light communication links.

Covers Lambertian LED-to-photodiode channels with occlusion and random
device orientation, wall first reflections, steerable mirror arrays,
metaheuristic angle optimization, NOMA power allocation, and
intensity-constrained MIMO capacity bounds.
"""

from .channel import (
    ChannelGain,
    LedTx,
    PathKind,
    PdRx,
    WallPatch,
    WallPatchSet,
    concentrator_gain,
    incidence_cosine,
    lambertian_index,
    los_gain,
    radiant_intensity,
    wall_first_reflection_gain,
)
from .geometry import (
    CylinderBlocker,
    LinkGeometry,
    Room,
    WallRect,
    link_geometry,
    los_visible,
    ray_cylinder_intersect,
)
from .metrics import (
    IntensityConstraints,
    NoiseModel,
    SecrecyScenario,
    electrical_snr,
    link_rate,
    secrecy_rate,
    sum_rate,
)
from .mimo import (
    CapacityQuery,
    ConstraintCheck,
    MimoChannel,
    RegimeError,
    assemble_channel,
    check_intensity_constraints,
    mimo_capacity,
    parallel_capacity,
    qr_capacity,
)
from .noma import (
    NomaAllocation,
    best_two_user_allocation,
    noma_rates,
    order_users,
    tdma_equal_share_rates,
    validate_allocation,
)
from .optimize import (
    AngleSolution,
    BoundedProblem,
    OptResult,
    PsoParams,
    ScaParams,
    grid_search_oracle,
    optimize_mirror_angles,
    pso_optimize,
    random_angle_baseline,
    sca_optimize,
)
from .orientation import (
    DeviceOrientation,
    OrientationModel,
    laplace_inverse_cdf,
    sample_orientation,
)
from .ris import (
    LcReceiverConfig,
    MirrorArray,
    apply_lc_receiver_gain,
    array_gain,
    mirror_element_gain,
    mirror_normal,
    specular_reflect,
)
from .scenario import (
    BlockerPopulation,
    ConfigError,
    LinkEvaluation,
    Scenario,
    StudyStatistics,
    TrialResult,
    UserSpec,
    benchmark_scenario,
    blockage_study,
    blocked_benchmark_scenario,
    load_scenario,
    orientation_benchmark_scenario,
    orientation_study,
    run_study,
    run_trial,
    single_mirror_benchmark_scenario,
    study_statistics,
)

__version__ = "0.1.0"

__all__ = [
    "AngleSolution",
    "BlockerPopulation",
    "BoundedProblem",
    "CapacityQuery",
    "ChannelGain",
    "ConfigError",
    "ConstraintCheck",
    "CylinderBlocker",
    "DeviceOrientation",
    "IntensityConstraints",
    "LcReceiverConfig",
    "LedTx",
    "LinkEvaluation",
    "LinkGeometry",
    "MimoChannel",
    "MirrorArray",
    "NoiseModel",
    "NomaAllocation",
    "OptResult",
    "OrientationModel",
    "PathKind",
    "PdRx",
    "PsoParams",
    "RegimeError",
    "Room",
    "ScaParams",
    "Scenario",
    "SecrecyScenario",
    "StudyStatistics",
    "TrialResult",
    "UserSpec",
    "WallPatch",
    "WallPatchSet",
    "WallRect",
    "apply_lc_receiver_gain",
    "array_gain",
    "assemble_channel",
    "benchmark_scenario",
    "best_two_user_allocation",
    "blockage_study",
    "blocked_benchmark_scenario",
    "check_intensity_constraints",
    "concentrator_gain",
    "electrical_snr",
    "grid_search_oracle",
    "incidence_cosine",
    "lambertian_index",
    "laplace_inverse_cdf",
    "link_geometry",
    "link_rate",
    "load_scenario",
    "los_gain",
    "los_visible",
    "mimo_capacity",
    "mirror_element_gain",
    "mirror_normal",
    "noma_rates",
    "optimize_mirror_angles",
    "order_users",
    "orientation_benchmark_scenario",
    "orientation_study",
    "parallel_capacity",
    "pso_optimize",
    "qr_capacity",
    "radiant_intensity",
    "random_angle_baseline",
    "ray_cylinder_intersect",
    "run_study",
    "run_trial",
    "sample_orientation",
    "sca_optimize",
    "secrecy_rate",
    "single_mirror_benchmark_scenario",
    "specular_reflect",
    "study_statistics",
    "sum_rate",
    "tdma_equal_share_rates",
    "validate_allocation",
    "wall_first_reflection_gain",
]
