"""Large-deviation toolkit for Markov-switched evolutions with small jumps.

The package builds the scaled pre-limit model for a finite-state switching
chain with per-state jump measures, verifies that its exponential (nonlinear)
generator converges to the averaged limit generator on perturbed test
functions, and exploits the limit cumulant for rate functions, exponential
tilting, and Monte Carlo diagnostics.
"""

from .chain import (
    ChainAnalysis,
    ChainModel,
    ChainPath,
    analyze_chain,
    simulate_chain,
    solve_poisson,
)
from .config import ModelConfig, dumps, load_config, parse_config
from .errors import (
    BudgetExceeded,
    ConfigError,
    DegenerateSample,
    DomainError,
    LevyLdpError,
    NegativeIntensity,
    NoConvergence,
    NonPositiveVariance,
    OverflowGuard,
    SingularSystem,
    SolvabilityViolated,
)
from .exp_gen import (
    ConvergenceReport,
    PerturbedTestFunction,
    ScalePair,
    build_perturbed,
    convergence_sweep,
    jump_expansion_residual,
    jump_part,
    prelimit_generator,
    switching_expansion_defect,
    switching_part,
)
from .jump_model import (
    JumpModel,
    PrelimitMeasure,
    ValidationReport,
    build_prelimit,
    sigma_squared,
    validate_conditions,
)
from .ldp import RateFunction, TiltedModel, grid_legendre, rate_function, tilt
from .limit_gen import (
    LimitGenerator,
    TestFunction,
    apply_limit_generator,
    apply_state_generator,
    build_limit_generator,
    constant_function,
    cumulant,
    cumulant_curvature,
    cumulant_prime,
    default_family,
    linear_function,
    sin_function,
    tanh_function,
)
from .reference import single_state, three_state, two_state
from .simulate import (
    PrelimitSample,
    ScgfEstimate,
    SimConfig,
    estimate_scgf,
    simulate_limit,
    simulate_prelimit,
    simulate_prelimit_events,
)

__version__ = "0.1.0"
