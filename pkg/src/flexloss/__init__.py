"""Flexibility design for a two-server loss system with prolonged non-dedicated service.

Three designs are compared: independent servers, partial flexibility (only
type-1 customers may overflow to server 2) and full flexibility (both types may
overflow). A customer served at the other type's server is served at rate
``gamma`` instead of 1.
"""

from ._accel import BACKEND, NUMBA_ENABLED
from .analysis import (
    LevelSetCurve,
    RegimeOrdering,
    ThresholdSet,
    classify_regime,
    critical_rho_symmetric,
    gamma_b,
    gamma_g,
    gamma_r,
    optimal_design,
    thresholds,
    trace_level_sets,
)
from .closed_form import ClosedFormCase, throughput_closed
from .core import (
    FlexibilityDesign,
    ServerOccupancy,
    StationaryDistribution,
    SystemParams,
    SystemState,
    state_space,
    validate_params,
)
from .ctmc import GeneratorMatrix, build_generator, stationary_distribution, throughput
from .errors import (
    BracketError,
    CaseMismatch,
    ConfigError,
    DomainError,
    FlexlossError,
    InconsistentOrdering,
    OrderingViolation,
    SingularChain,
    TieBreakUnresolved,
    UnsupportedDesign,
)
from .simulate import SimConfig, ThroughputEstimate, simulate, validate_against_analytic

__version__ = "0.1.0"
