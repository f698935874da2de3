"""Event study of announcement effects on stock returns.

Three methods are provided: an additive market model with a normal Z test
(M1), the additive model with a bootstrap tail test (M2), and a
multiplicative model with compounded returns and a bootstrap tail test (M3).
"""

from .abnormal_returns import (
    AbnormalSeries,
    CumulativeStat,
    ModelKind,
    aar,
    acar,
    ar_multiplicative,
    car,
    mean_acar,
    std_acar,
)
from .bootstrap import EmpiricalDistribution, ScenarioConfig, generate, percentile_of
from .errors import (
    DegenerateRegressorError,
    DomainError,
    EventStudyError,
    InsufficientDataError,
    PriceDataError,
)
from .inference import (
    Direction,
    Method,
    TestConfig,
    Verdict,
    empirical_verdict,
    method1_aggregate,
    method1_per_event,
)
from .market_model import (
    AdditiveFit,
    MultiplicativeFit,
    fit_additive,
    fit_multiplicative,
    predict_additive,
    predict_multiplicative,
)
from .study import (
    CrossTable,
    EventRecord,
    StudyReport,
    cross_table,
    divergence_rates,
    export_histogram,
    fixture_events,
    load_events_csv,
    run_study,
    summarize,
)
from .timeseries import (
    AlignedReturns,
    PriceSeries,
    ReturnSeries,
    WindowSpec,
    align,
    compute_returns,
    load_price_csv,
    locate_event,
    slice_window,
)

__version__ = "0.1.0"
