"""First-order splitting methods: closed-form linear convergence rates,
optimal step-sizes, efficiency regions, operator building blocks, fixed-point
drivers, numerical certification, and benchmark experiments."""

from .exceptions import (
    ConstructionError,
    ConvergenceFailure,
    DivergenceError,
    DomainError,
    ParameterError,
)
from .rates import (
    Algorithm,
    OptimalChoice,
    ProblemParams,
    RateResult,
    Setting,
    admissible_interval,
    averaged_constant,
    coco_optimal,
    coco_rate,
    opt_optimal,
    opt_rate,
    rate_curve,
    single_operator_rate,
)
from .regions import RegionLabel, best_by_enumeration, classify, eta, region_map
from .operators import (
    Composite,
    DiagonalQuadratic,
    Huber,
    LinearMap,
    OrthonormalComposite,
    QuadraticFidelity,
    QuadraticPlusProxable,
    SemiOrthogonalComposite,
    SmoothFunction,
    Zero,
    difference_operator,
    haar_transform,
    huber_gradient,
    huber_prox,
    huber_value,
    odd_even_split,
    orthonormal_prox,
    scaled_shifted_prox,
    semiorthogonal_prox,
)
from .solvers import (
    FixedPointOperator,
    IterationTrace,
    banach_picard,
    drs_operator,
    ea_operator,
    empirical_rate,
    fbs_operator,
    ppa_operator,
    prs_operator,
)
from .verification import (
    CertificationReport,
    GaussianPairSampler,
    OperatorUnderTest,
    build_example1,
    check_averaged,
    check_cocoercive,
    check_lipschitz,
    check_strongly_monotone,
    contraction_fuzz,
)
from .experiments import DenoiseConfig, RestoreConfig, run_denoise, run_restore

__version__ = "0.1.0"
