"""Numerical toolbox for multidimensional Rovella-like attractors.

The package follows the geometry it models: ``interval_maps`` holds the
one-dimensional quotient families and their tent conjugacies,
``torusphere`` the sphere cocycle built over them, ``pliss`` the
hyperbolic-time selection machinery, ``flow_model`` the sectioned flow
with its saddle passage and return maps, ``solenoid`` the contracting
disk dynamics in the fibers, and ``measures`` the statistical probes.
Hot orbit kernels live in ``_kernels`` with a compiled core and a pure
NumPy fallback chosen at import time (set ``ROVELLA_PURE_PYTHON=1`` to
force the fallback); ``rovellalab._kernels.IMPL`` names the active one.
"""

from ._kernels import IMPL as KERNEL_IMPL
from .errors import (
    ConvergenceError,
    DegeneracyError,
    HypothesisViolationError,
    InputDomainError,
    NonDifferentiableError,
    PoleError,
    ProjectionUndefinedError,
    RovellaError,
    SpecError,
    StableManifoldError,
    StructuralError,
)
from .interval_maps import (
    ConjugacyTable,
    FixedPointReport,
    MapKind,
    MapSpec,
    eval_derivative,
    eval_map,
    find_fixed_points,
    itinerary,
    orbit,
    solve_conjugacy,
)
from .torusphere import (
    BirkhoffFactors,
    CocycleFactors,
    DominationProfile,
    EnsembleLyapunov,
    LyapunovEstimate,
    birkhoff_log_factors,
    chart_embed,
    cocycle_factors,
    domination_profile,
    domination_ratio,
    lyapunov_ensemble,
    lyapunov_estimate,
    step_g,
)
from .pliss import (
    Abv0Constants,
    Abv0Result,
    HyperbolicTimeParams,
    InducedBoundReport,
    PlissReport,
    abv0_pipeline,
    hyperbolic_times,
    induced_time_bound,
    pliss_times,
    truncated_log_distance,
)
from .flow_model import (
    CrossSectionPoint,
    ReturnDiagnostics,
    SaddleSpec,
    SuspensionStats,
    induced_sphere_map,
    return_map_R0,
    return_map_composed,
    return_orbit,
    return_time,
    sink_leaf,
    suspension_exponent,
)
from .solenoid import (
    FiberClusterReport,
    SolenoidSpec,
    attractor_sample,
    empirical_fiber_diameter,
    fiber_cluster_count,
    fiber_diameter_bound,
    step_S,
)
from .measures import (
    BasinReport,
    ConditionProbeReport,
    EnsembleIntegrability,
    IntegrabilityReport,
    InvarianceReport,
    OrbitStats,
    RecurrenceReport,
    abv0_orbit_driver,
    basin_fraction,
    condition_A_probe,
    condition_C_probe,
    condition_D_probe,
    conjugacy_sampler,
    density_histogram,
    integrability_ensemble,
    log_dist_integrability,
    nonflatness_probe,
    pushforward_invariance_check,
    recurrence_fraction,
    slow_recurrence_probe,
)

__version__ = "0.1.0"
