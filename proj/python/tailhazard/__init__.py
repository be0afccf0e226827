"""Peaks-over-threshold extremes: recurrence-interval and exceedance modeling,
copula-corrected hazard probabilities and alarm backtesting."""

from tailhazard._core import (  # noqa: F401
    BacktestConfig,
    BacktestReport,
    BacktestRun,
    CopulaChoice,
    CopulaFamily,
    CopulaFit,
    Date,
    DayRecord,
    DescriptiveStats,
    EventSeries,
    ExtremeSpec,
    GeneratorSpec,
    GPDFit,
    HazardModel,
    Pairing,
    PriceSeries,
    PseudoSample,
    ReturnSeries,
    RIFamily,
    RIFit,
    RocCurve,
    Side,
    copula_cdf,
    copula_pdf,
    describe,
    embed_in_returns,
    extract_events,
    fit_copula,
    fit_gpd,
    fit_ri,
    gpd_cdf,
    gpd_pdf,
    hazard_joint,
    hazard_ri,
    load_price_series,
    load_return_series,
    make_pseudo_sample,
    pearson_test,
    quantile,
    ri_cdf,
    ri_pdf,
    run_backtest,
    sample_copula,
    sample_event_process,
    sample_gpd,
    sample_ri,
    save_return_series,
    select_copula,
    sweep_roc,
    to_returns,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
