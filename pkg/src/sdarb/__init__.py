"""Stochastic-arbitrage detection in discrete single-period derivative markets.

A market is a finite payoff grid carrying an objective and a risk-neutral
measure.  The package constructs the cheapest payoff distributed like the
underlying, prices minimal payoffs under four stochastic-order
constraints by linear (and mixed-integer) programming, and exposes the
equivalences between mispricing and kernel non-monotonicity as checkable
properties.
"""

from .errors import (
    EmptyMass,
    FlatKernelRegion,
    GNotMonotone,
    LengthMismatch,
    MuNotProbability,
    NonIncreasingAtoms,
    NonpositiveKernel,
    NotProbability,
    PreconditionInadequate,
    SdarbError,
    SolverError,
    UnknownMethod,
    ZeroMass,
)
from .measures import (
    DiscreteMeasure,
    MarketModel,
    PayoffProfile,
    StepFunction,
    cdf,
    is_adequate,
    is_kernel_monotone,
    kernel_distribution,
    market_from_json,
    market_price,
    market_to_json,
    new_market,
    price,
    pushforward,
    quantile,
    read_market,
    write_market,
)
from .arbitrage import (
    MinPriceResult,
    Prop1Report,
    Prop2Report,
    check_prop1,
    check_prop2,
    has_stochastic_arbitrage,
    min_price,
    min_price_to_json,
    report_to_json,
    ssd_lower_bound,
)
from .discretize import (
    ConvergenceRecord,
    DensityTable,
    continuous_ompd,
    convergence_study,
    discretize_density,
    market_from_tables,
    read_density_csv,
    risk_neutral_from_kernel,
    tabulated_function,
    write_density_csv,
)
from .experiments import (
    DENSITY_SPAN,
    EXPERIMENT_INTERVAL,
    hump_kernel,
    monotone_kernel,
    synthetic_density,
)
from .ompd import OmpdReport, ompd, ompd_price, verify_ompd
from .orders import (
    OrderRelation,
    dominates,
    dominates_cv,
    dominates_fsd,
    dominates_ssd,
    expected_shortfall,
    same_distribution,
)
from .rearrange import (
    hardy_littlewood_bounds,
    hardy_majorization_holds,
    is_comonotone,
    is_countermonotone,
    quantile_product_integral,
)
from .suites import SuiteResult, random_market, run_suite

__version__ = "0.1.0"
