"""Price ingestion, return computation, date alignment and window slicing.

All offsets are trading-day offsets over an aligned return series: offset 0
is the first trading day on or after the announcement date.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
from dataclasses import dataclass, field
from os import PathLike
from typing import BinaryIO, Iterable, TextIO, Union

import numpy as np

from .errors import InsufficientDataError, PriceDataError

Offsets = tuple[int, int]

DEFAULT_ESTIMATION: Offsets = (-201, -2)
DEFAULT_EVENT_WINDOWS: tuple[Offsets, ...] = ((-1, 1), (-1, 3), (-1, 5), (-1, 7), (-1, 9))

PRICE_HEADER = ("date", "adjusted_close")


def _frozen(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


def _check_increasing(dates: np.ndarray, what: str) -> None:
    if dates.size > 1 and not np.all(dates[1:] > dates[:-1]):
        raise PriceDataError(f"{what}: dates must be strictly increasing")


@dataclass(frozen=True)
class PriceSeries:
    """Adjusted close prices of one instrument, ascending by date."""

    instrument_id: str
    dates: np.ndarray
    prices: np.ndarray

    def __post_init__(self):
        dates = _frozen(self.dates, "datetime64[D]")
        prices = _frozen(self.prices, np.float64)
        if dates.shape != prices.shape or dates.ndim != 1:
            raise PriceDataError(f"{self.instrument_id}: dates and prices differ in shape")
        _check_increasing(dates, self.instrument_id)
        if np.any(~(prices > 0)):
            raise PriceDataError(f"{self.instrument_id}: every price must be positive")
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "prices", prices)

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class ReturnSeries:
    """One-day simple returns, each dated at the later of its two prices."""

    instrument_id: str
    dates: np.ndarray
    returns: np.ndarray

    def __post_init__(self):
        dates = _frozen(self.dates, "datetime64[D]")
        returns = _frozen(self.returns, np.float64)
        if dates.shape != returns.shape or dates.ndim != 1:
            raise PriceDataError(f"{self.instrument_id}: dates and returns differ in shape")
        _check_increasing(dates, self.instrument_id)
        if np.any(~(returns > -1)):
            raise PriceDataError(f"{self.instrument_id}: returns must exceed -1")
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "returns", returns)

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class AlignedReturns:
    """Stock and market returns on the trading dates both series share."""

    dates: np.ndarray
    stock: np.ndarray
    market: np.ndarray

    def __post_init__(self):
        dates = _frozen(self.dates, "datetime64[D]")
        stock = _frozen(self.stock, np.float64)
        market = _frozen(self.market, np.float64)
        if not (dates.shape == stock.shape == market.shape) or dates.ndim != 1:
            raise PriceDataError("aligned columns differ in length")
        _check_increasing(dates, "aligned returns")
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "stock", stock)
        object.__setattr__(self, "market", market)

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class WindowSpec:
    """Estimation range and event windows, as inclusive trading-day offsets."""

    estimation: Offsets = DEFAULT_ESTIMATION
    event_windows: tuple[Offsets, ...] = field(default=DEFAULT_EVENT_WINDOWS)

    def __post_init__(self):
        est = tuple(int(v) for v in self.estimation)
        windows = tuple(tuple(int(v) for v in w) for w in self.event_windows)
        for lo, hi in (est, *windows):
            if lo > hi:
                raise ValueError(f"offset range [{lo}, {hi}] is empty")
        if not windows:
            raise ValueError("at least one event window is required")
        if len(set(windows)) != len(windows):
            raise ValueError("event windows must be distinct")
        first_event_day = min(lo for lo, _ in windows)
        if est[1] >= first_event_day:
            raise ValueError("estimation range must end before every event window starts")
        object.__setattr__(self, "estimation", est)
        object.__setattr__(self, "event_windows", windows)

    @property
    def estimation_length(self) -> int:
        return window_length(self.estimation)

    @property
    def window_lengths(self) -> tuple[int, ...]:
        return tuple(window_length(w) for w in self.event_windows)


def window_length(offsets: Offsets) -> int:
    lo, hi = offsets
    return hi - lo + 1


def format_window(offsets: Offsets) -> str:
    return f"{offsets[0]}:{offsets[1]}"


def parse_windows(text: str) -> tuple[Offsets, ...]:
    """Parse ``"-1:1,-1:3"`` into ``((-1, 1), (-1, 3))``."""
    windows = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        lo, sep, hi = part.rpartition(":")
        if not sep:
            raise ValueError(f"window {part!r} is not of the form lo:hi")
        windows.append((int(lo), int(hi)))
    return tuple(windows)


def _text_stream(source) -> TextIO:
    if isinstance(source, (str, PathLike)):
        return open(source, newline="", encoding="utf-8-sig")
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(bytes(source).decode("utf-8-sig"), newline="")
    if isinstance(source, io.TextIOBase):
        return source
    return io.TextIOWrapper(source, encoding="utf-8-sig", newline="")


def load_price_csv(
    source: Union[BinaryIO, TextIO, bytes, str, PathLike], instrument_id: str = ""
) -> PriceSeries:
    """Read a ``date,adjusted_close`` CSV into a :class:`PriceSeries`.

    ``source`` may be a path, raw bytes, or an open binary or text stream.
    Rows may appear in any order; the result is sorted by date.

    Raises:
        PriceDataError: on a bad header, a malformed row, a non-positive
            price or a repeated date. The message names the file line.
    """
    stream = _text_stream(source)
    close = isinstance(source, (str, PathLike))
    try:
        return _parse_price_rows(csv.reader(stream), instrument_id)
    finally:
        if close:
            stream.close()


def _parse_price_rows(rows: Iterable[list[str]], instrument_id: str) -> PriceSeries:
    label = f"{instrument_id}: " if instrument_id else ""
    seen: dict[dt.date, int] = {}
    prices: list[float] = []
    header_seen = False
    for lineno, row in enumerate(rows, start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        if not header_seen:
            if tuple(cell.strip().lower() for cell in row) != PRICE_HEADER:
                raise PriceDataError(f"{label}expected header 'date,adjusted_close' at line {lineno}")
            header_seen = True
            continue
        if len(row) != 2:
            raise PriceDataError(f"{label}malformed row at line {lineno}: expected 2 fields")
        try:
            day = dt.date.fromisoformat(row[0].strip())
            price = float(row[1].strip())
        except ValueError as exc:
            raise PriceDataError(f"{label}malformed row at line {lineno}: {exc}") from None
        if not price > 0 or not np.isfinite(price):
            raise PriceDataError(f"{label}non-positive price at line {lineno}")
        if day in seen:
            raise PriceDataError(
                f"{label}duplicate date {day.isoformat()} at line {lineno} (first at line {seen[day]})"
            )
        seen[day] = lineno
        prices.append(price)
    if not header_seen:
        raise PriceDataError(f"{label}empty price file")
    dates = np.array(list(seen), dtype="datetime64[D]")
    values = np.array(prices, dtype=np.float64)
    order = np.argsort(dates, kind="stable")
    return PriceSeries(instrument_id, dates[order], values[order])


def compute_returns(prices: PriceSeries) -> ReturnSeries:
    """Simple one-day returns ``(p[t] - p[t-1]) / p[t-1]``, dated at ``t``."""
    if len(prices) < 1:
        raise PriceDataError(f"{prices.instrument_id}: no price observations")
    p = prices.prices
    returns = (p[1:] - p[:-1]) / p[:-1]
    return ReturnSeries(prices.instrument_id, prices.dates[1:], returns)


def align(stock: ReturnSeries, market: ReturnSeries) -> AlignedReturns:
    """Pair stock and market returns on the dates present in both series.

    Dates found in only one input are dropped, never interpolated.
    """
    dates, i_stock, i_market = np.intersect1d(
        stock.dates, market.dates, assume_unique=True, return_indices=True
    )
    if dates.size == 0:
        raise InsufficientDataError(
            f"no common trading dates between {stock.instrument_id or 'stock'} "
            f"and {market.instrument_id or 'market'}"
        )
    return AlignedReturns(dates, stock.returns[i_stock], market.returns[i_market])


def locate_event(aligned: AlignedReturns, announcement_date) -> int:
    """Index of day 0: the first aligned row dated on or after the announcement."""
    if len(aligned) == 0:
        raise InsufficientDataError("aligned series is empty")
    day = np.datetime64(announcement_date, "D")
    index = int(np.searchsorted(aligned.dates, day, side="left"))
    if index >= len(aligned):
        raise InsufficientDataError(
            f"event beyond data range: {day} is after the last date {aligned.dates[-1]}"
        )
    return index


def slice_window(aligned: AlignedReturns, event_index: int, offsets: Offsets) -> AlignedReturns:
    """Rows at trading-day offsets ``[lo, hi]`` around ``event_index``."""
    lo, hi = offsets
    if lo > hi:
        raise ValueError(f"offset range [{lo}, {hi}] is empty")
    if event_index + lo < 0:
        raise InsufficientDataError(
            f"insufficient history: window [{lo}, {hi}] needs {-lo} trading days before "
            f"the event, only {event_index} available (short by {-(event_index + lo)})"
        )
    available_after = len(aligned) - 1 - event_index
    if hi > available_after:
        raise InsufficientDataError(
            f"insufficient post-event data: window [{lo}, {hi}] needs {hi} trading days after "
            f"the event, only {available_after} available (short by {hi - available_after})"
        )
    sl = slice(event_index + lo, event_index + hi + 1)
    return AlignedReturns(aligned.dates[sl], aligned.stock[sl], aligned.market[sl])
