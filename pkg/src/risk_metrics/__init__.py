"""Classical, compounded and log-space Sharpe ratios for i.i.d. return streams."""

from .errors import (
    AlignmentError,
    ApproximationDomainError,
    DomainError,
    EmptyInputError,
    InsufficientDataError,
    OutOfRangeError,
    ParseError,
    RiskMetricsError,
    UndefinedMetricError,
)
from .ingest import (
    RollingWindowConfig,
    SeriesFile,
    align_risk_free,
    annual_to_per_period,
    parse_series,
    read_series,
    rolling_windows,
    serialize_series,
    to_return_series,
)
from .logspace import LogValue
from .montecarlo import (
    DistributionSpec,
    OracleCheck,
    SimulationResult,
    analytic_moments,
    oracle_check,
    simulate_annual,
)
from .returns import (
    MomentSummary,
    ReturnSeries,
    excess_returns,
    log_moments,
    moments,
    prices_to_returns,
)
from .sharpe import (
    AnnualMoments,
    CompoundedSharpe,
    SharpeReport,
    annual_moments,
    annual_variance_binomial,
    classical_sharpe,
    compounded_sharpe,
    compounded_sharpe_approx,
    full_report,
    log_sharpe,
    log_sharpe_equivalent,
)

__version__ = "0.1.0"
