"""Study runner: all three methods over an event list, plus report tables."""

from __future__ import annotations

import csv
import datetime as dt
import io
import logging
import math
from dataclasses import dataclass, field
from os import PathLike
from pathlib import Path
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from . import abnormal_returns as ar
from .abnormal_returns import CumulativeStat, ModelKind
from .bootstrap import EmpiricalDistribution, ScenarioConfig, generate
from .errors import EventStudyError, InsufficientDataError
from .inference import (
    ALL_METHODS,
    DIRECTIONS,
    Direction,
    Method,
    TestConfig,
    Verdict,
    empirical_verdict,
    method1_aggregate,
    method1_per_event,
    z_direction,
)
from .market_model import fit_additive, fit_multiplicative
from .timeseries import (
    Offsets,
    PriceSeries,
    WindowSpec,
    align,
    compute_returns,
    load_price_csv,
    locate_event,
    slice_window,
    window_length,
)

log = logging.getLogger(__name__)

# Abnormal returns below this fraction of the estimation window's largest
# absolute stock return are floating-point residue of an exact fit.
NOISE_FLOOR = 1e-12

EVENTS_HEADER = ("firm", "ticker", "announcement_date")


class MissingPriceDataError(InsufficientDataError):
    """No price file exists for a ticker."""


class UnknownEventError(KeyError):
    pass


@dataclass(frozen=True)
class EventRecord:
    firm_name: str
    ticker: str
    announcement_date: dt.date

    @property
    def event_id(self) -> str:
        return f"{self.ticker}@{self.announcement_date.isoformat()}"


def load_events_csv(source: Union[str, PathLike, io.TextIOBase]) -> list[EventRecord]:
    """Read a ``firm,ticker,announcement_date`` CSV, keeping file order."""
    if isinstance(source, (str, PathLike)):
        with open(source, newline="", encoding="utf-8-sig") as fh:
            return load_events_csv(fh)
    reader = csv.reader(source)
    events = []
    header = None
    for lineno, row in enumerate(reader, start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if header is None:
            header = tuple(c.strip().lower() for c in row)
            if header != EVENTS_HEADER:
                raise EventStudyError(f"expected header 'firm,ticker,announcement_date' at line {lineno}")
            continue
        if len(row) != 3:
            raise EventStudyError(f"malformed event row at line {lineno}")
        firm, ticker, day = (c.strip() for c in row)
        try:
            date = dt.date.fromisoformat(day)
        except ValueError:
            raise EventStudyError(f"bad announcement date {day!r} at line {lineno}") from None
        events.append(EventRecord(firm, ticker, date))
    return events


def fixture_events() -> list[EventRecord]:
    """The 45 published DDoS announcements bundled with the package."""
    path = Path(__file__).with_name("data") / "events.csv"
    return load_events_csv(path)


PriceSource = Callable[[str], PriceSeries]


def directory_source(directory: Union[str, PathLike]) -> PriceSource:
    """Price source reading ``<directory>/<ticker>.csv``."""
    root = Path(directory)

    def load(ticker: str) -> PriceSeries:
        path = root / f"{ticker}.csv"
        if not path.is_file():
            raise MissingPriceDataError(f"no price file for {ticker} at {path}")
        return load_price_csv(path, instrument_id=ticker)

    return load


def mapping_source(prices: Mapping[str, PriceSeries]) -> PriceSource:
    def load(ticker: str) -> PriceSeries:
        try:
            return prices[ticker]
        except KeyError:
            raise MissingPriceDataError(f"no price data for {ticker}") from None

    return load


@dataclass(frozen=True)
class WindowResult:
    window: Offsets
    acar: Optional[float]
    car: Optional[float]
    z: Optional[float]
    percentile_additive: Optional[float]
    percentile_multiplicative: Optional[float]
    verdicts: dict[Method, Verdict]


@dataclass(frozen=True)
class EventResult:
    event: EventRecord
    day0: dt.date
    additive: dict
    multiplicative: dict
    windows: tuple[WindowResult, ...]
    histograms: dict = field(default_factory=dict)

    def verdict(self, window: Offsets, method: Method) -> Verdict:
        for w in self.windows:
            if w.window == tuple(window):
                return w.verdicts[method]
        raise KeyError(window)


@dataclass(frozen=True)
class SkippedEvent:
    event: EventRecord
    reason: str


@dataclass
class StudyReport:
    """Verdict lattice, diagnostics and the configuration that produced them."""

    config: dict
    methods: tuple[Method, ...]
    windows: tuple[Offsets, ...]
    results: list[EventResult] = field(default_factory=list)
    skipped: list[SkippedEvent] = field(default_factory=list)
    failed: list[SkippedEvent] = field(default_factory=list)

    def result(self, event_id: str) -> EventResult:
        for r in self.results:
            if r.event.event_id == event_id:
                return r
        raise UnknownEventError(event_id)


@dataclass(frozen=True)
class CrossTable:
    """Verdict-pair counts; rows follow ``method_a``, columns ``method_b``.

    Both axes are ordered Positive, NoImpact, Negative.
    """

    method_a: Method
    method_b: Method
    counts: np.ndarray

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64).reshape(3, 3)
        if np.any(counts < 0):
            raise ValueError("counts must be non-negative")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def agreement(self) -> float:
        return float(np.trace(self.counts)) / self.total if self.total else float("nan")

    def count(self, a: Direction, b: Direction) -> int:
        return int(self.counts[DIRECTIONS.index(a), DIRECTIONS.index(b)])


def _config_echo(window_spec, scenario_config, test_config, methods, hist_bins, market_id) -> dict:
    return {
        "seed": scenario_config.seed,
        "scenario_count": scenario_config.scenario_count,
        "estimation": list(window_spec.estimation),
        "windows": [list(w) for w in window_spec.event_windows],
        "z_critical": test_config.z_critical,
        "tail_fraction": test_config.tail_fraction,
        "methods": [m.value for m in methods],
        "hist_bins": hist_bins,
        "market": market_id,
    }


def _m1_verdict(acar_value: float, n_days: int, residual_std: float, config: TestConfig, window) -> Verdict:
    if residual_std > 0:
        return method1_per_event(acar_value, n_days, residual_std, config, window)
    # Perfect in-sample fit: any nonzero ACAR is infinitely many standard deviations out.
    z = 0.0 if acar_value == 0 else math.copysign(math.inf, acar_value)
    return Verdict(z_direction(z, config.z_critical), z, Method.M1, window)


def _denoise(values: np.ndarray, floor: float) -> np.ndarray:
    return np.where(np.abs(values) <= floor, 0.0, values)


def _run_event(
    event: EventRecord,
    market_returns,
    source: PriceSource,
    window_spec: WindowSpec,
    scenario_config: ScenarioConfig,
    test_config: TestConfig,
    methods: tuple[Method, ...],
    hist_bins: Optional[int],
    workers: int,
) -> EventResult:
    stock = compute_returns(source(event.ticker))
    aligned = align(stock, market_returns)
    day0 = locate_event(aligned, event.announcement_date)
    estimation = slice_window(aligned, day0, window_spec.estimation)
    event_slices = [slice_window(aligned, day0, w) for w in window_spec.event_windows]

    add_fit = fit_additive(estimation)
    mult_fit = fit_multiplicative(estimation)
    floor = NOISE_FLOOR * float(np.max(np.abs(estimation.stock)))
    pools = {
        ModelKind.ADDITIVE: _denoise(add_fit.residuals, floor),
        ModelKind.MULTIPLICATIVE: _denoise(mult_fit.residuals, floor),
    }
    residual_std = add_fit.residual_std if np.any(pools[ModelKind.ADDITIVE]) else 0.0

    dists: dict[tuple[ModelKind, int], EmpiricalDistribution] = {}
    histograms = {}

    def distribution(kind: ModelKind, n_days: int) -> EmpiricalDistribution:
        key = (kind, n_days)
        if key not in dists:
            dists[key] = generate(pools[kind], n_days, scenario_config.with_mode(kind), workers=workers)
            if hist_bins:
                histograms[key] = export_histogram(dists[key], hist_bins)
        return dists[key]

    window_results = []
    for offsets, rows in zip(window_spec.event_windows, event_slices):
        n_days = window_length(offsets)
        add_series = ar.additive_abnormal_series(add_fit, rows, offsets[0])
        mult_series = ar.multiplicative_abnormal_series(mult_fit, rows, offsets[0])
        add_series = ar.AbnormalSeries(ModelKind.ADDITIVE, add_series.offsets, _denoise(add_series.values, floor))
        mult_series = ar.AbnormalSeries(
            ModelKind.MULTIPLICATIVE, mult_series.offsets, _denoise(mult_series.values, floor)
        )
        acar_stat = ar.cumulate(add_series)
        car_stat = ar.cumulate(mult_series)
        verdicts: dict[Method, Verdict] = {}
        z = p_add = p_mult = None
        if Method.M1 in methods:
            verdicts[Method.M1] = _m1_verdict(acar_stat.value, n_days, residual_std, test_config, offsets)
            z = verdicts[Method.M1].statistic
        if Method.M2 in methods:
            verdicts[Method.M2] = empirical_verdict(distribution(ModelKind.ADDITIVE, n_days), acar_stat, test_config)
            p_add = verdicts[Method.M2].statistic
        if Method.M3 in methods:
            verdicts[Method.M3] = empirical_verdict(
                distribution(ModelKind.MULTIPLICATIVE, n_days), car_stat, test_config
            )
            p_mult = verdicts[Method.M3].statistic
        window_results.append(
            WindowResult(offsets, acar_stat.value, car_stat.value, z, p_add, p_mult, verdicts)
        )

    return EventResult(
        event=event,
        day0=aligned.dates[day0].astype(dt.date),
        additive={
            "alpha_hat": add_fit.alpha_hat,
            "beta_hat": add_fit.beta_hat,
            "residual_std": residual_std,
            "n_obs": add_fit.n_obs,
        },
        multiplicative={
            "ln_alpha_hat": mult_fit.ln_alpha_hat,
            "beta_hat": mult_fit.beta_hat,
            "alpha_hat": mult_fit.alpha_hat,
            "n_obs": mult_fit.n_obs,
        },
        windows=tuple(window_results),
        histograms=histograms,
    )


def run_study(
    events: Sequence[EventRecord],
    price_source: Union[PriceSource, Mapping[str, PriceSeries], str, PathLike],
    market: PriceSeries,
    window_spec: WindowSpec = WindowSpec(),
    scenario_config: ScenarioConfig = ScenarioConfig(),
    test_config: TestConfig = TestConfig(),
    methods: Iterable[Method] = ALL_METHODS,
    hist_bins: Optional[int] = None,
    workers: int = 1,
) -> StudyReport:
    """Run every requested method on every event.

    Events whose data cannot support the windows (missing file, too little
    history, announcement past the data) are recorded in ``skipped``; other
    per-event errors go to ``failed``. Results keep the input order.
    """
    methods = tuple(m for m in ALL_METHODS if m in {Method(m) for m in methods})
    if not methods:
        raise ValueError("at least one method is required")
    if hist_bins is not None and hist_bins < 1:
        raise ValueError("hist_bins must be at least 1")
    ids = [e.event_id for e in events]
    if len(set(ids)) != len(ids):
        raise ValueError("event ids (ticker@date) must be unique")

    if isinstance(price_source, (str, PathLike)):
        source = directory_source(price_source)
    elif isinstance(price_source, Mapping):
        source = mapping_source(price_source)
    else:
        source = price_source

    market_returns = compute_returns(market)
    report = StudyReport(
        config=_config_echo(window_spec, scenario_config, test_config, methods, hist_bins, market.instrument_id),
        methods=methods,
        windows=window_spec.event_windows,
    )
    for event in events:
        try:
            result = _run_event(
                event, market_returns, source, window_spec, scenario_config,
                test_config, methods, hist_bins, workers,
            )
        except InsufficientDataError as exc:
            log.info("skipping %s: %s", event.event_id, exc)
            report.skipped.append(SkippedEvent(event, str(exc)))
        except EventStudyError as exc:
            log.warning("event %s failed: %s", event.event_id, exc)
            report.failed.append(SkippedEvent(event, str(exc)))
        else:
            report.results.append(result)
    return report


def summarize(report: StudyReport, method: Method, event_id: Optional[str] = None):
    """Per-event ``(positive, negative, no_impact)`` window counts.

    Returns a dict keyed by event id, or a single tuple when ``event_id``
    is given.
    """
    method = Method(method)
    if method not in report.methods:
        raise KeyError(f"method {method.value} not in report")
    if event_id is not None:
        return _count(report.result(event_id), method)
    return {r.event.event_id: _count(r, method) for r in report.results}


def _count(result: EventResult, method: Method) -> tuple[int, int, int]:
    directions = [w.verdicts[method].direction for w in result.windows]
    return (
        directions.count(Direction.POSITIVE),
        directions.count(Direction.NEGATIVE),
        directions.count(Direction.NO_IMPACT),
    )


def cross_table(report: StudyReport, method_a: Method, method_b: Method) -> CrossTable:
    method_a, method_b = Method(method_a), Method(method_b)
    for m in (method_a, method_b):
        if m not in report.methods:
            raise KeyError(f"method {m.value} not in report")
    counts = np.zeros((3, 3), dtype=np.int64)
    for result in report.results:
        for w in result.windows:
            i = DIRECTIONS.index(w.verdicts[method_a].direction)
            j = DIRECTIONS.index(w.verdicts[method_b].direction)
            counts[i, j] += 1
    return CrossTable(method_a, method_b, counts)


def divergence_rates(table: CrossTable) -> tuple[float, float]:
    """Fractions of cells where the row method over- and under-flags.

    Overestimate: row method says Positive/Negative, column method says
    NoImpact. Underestimate: the reverse. Both are over the table total.
    """
    total = table.total
    if total == 0:
        raise ValueError("cross-table is empty")
    none = DIRECTIONS.index(Direction.NO_IMPACT)
    flagged = [DIRECTIONS.index(Direction.POSITIVE), DIRECTIONS.index(Direction.NEGATIVE)]
    over = int(table.counts[flagged, none].sum())
    under = int(table.counts[none, flagged].sum())
    return over / total, under / total


def export_histogram(dist: EmpiricalDistribution, bin_count: int) -> list[tuple[float, float, int]]:
    """Equal-width bins over ``[min, max]`` as ``(low, high, count)`` rows."""
    if bin_count < 1:
        raise ValueError("bin_count must be at least 1")
    values = dist.values
    lo, hi = float(values[0]), float(values[-1])
    if lo == hi:
        counts = np.zeros(bin_count, dtype=np.int64)
        counts[0] = values.size
        edges = np.full(bin_count + 1, lo)
    else:
        counts, edges = np.histogram(values, bins=bin_count, range=(lo, hi))
    return [(float(edges[i]), float(edges[i + 1]), int(counts[i])) for i in range(bin_count)]


def aggregate_m1(report: StudyReport) -> dict[Offsets, Optional[dict]]:
    """Cross-sectional mean/std/Z of ACAR per window over all events."""
    out = {}
    for i, window in enumerate(report.windows):
        values = [r.windows[i].acar for r in report.results]
        entry = None
        if len(values) >= 2:
            entry = {"k": len(values), "mean_acar": ar.mean_acar(values), "std_acar": ar.std_acar(values)}
            entry["z"] = method1_aggregate(values) if entry["std_acar"] > 0 else None
        out[window] = entry
    return out
