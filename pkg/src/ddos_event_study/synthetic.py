"""Synthetic price data for exercising the pipeline end to end.

Nothing here resembles real market history. Stocks follow an additive
market model with Gaussian noise on a weekday calendar. Tickers with an
exchange suffix (``VIV.PA``) also lose a few random dates, which mimics
foreign holidays that the index calendar does not share.
"""

from __future__ import annotations

import datetime as dt
from pathlib import Path
from typing import Sequence

import numpy as np

from .timeseries import PriceSeries

MARKET_ID = "GSPC"


def business_days(start: dt.date, end: dt.date) -> np.ndarray:
    days = np.arange(np.datetime64(start, "D"), np.datetime64(end, "D") + 1)
    return days[np.is_busday(days)]


def prices_from_returns(returns: np.ndarray, start_price: float = 100.0) -> np.ndarray:
    return start_price * np.concatenate(([1.0], np.cumprod(1.0 + returns)))


def synthetic_dataset(
    tickers: Sequence[str],
    seed: int = 0,
    start: dt.date = dt.date(2009, 6, 1),
    end: dt.date = dt.date(2017, 3, 31),
    market_sigma: float = 0.01,
) -> tuple[PriceSeries, dict[str, PriceSeries]]:
    """Market series plus one price series per distinct ticker."""
    rng = np.random.default_rng(seed)
    dates = business_days(start, end)
    market_returns = rng.normal(0.0003, market_sigma, dates.size - 1)
    market = PriceSeries(MARKET_ID, dates, prices_from_returns(market_returns, 1000.0))

    stocks = {}
    for ticker in dict.fromkeys(tickers):
        alpha = rng.normal(0.0, 0.0003)
        beta = rng.uniform(0.6, 1.4)
        sigma = rng.uniform(0.008, 0.02)
        returns = alpha + beta * market_returns + rng.normal(0.0, sigma, market_returns.size)
        returns = np.clip(returns, -0.5, 0.5)
        prices = prices_from_returns(returns, rng.uniform(10, 200))
        keep = np.ones(dates.size, dtype=bool)
        if "." in ticker:
            keep[1:] = rng.random(dates.size - 1) > 0.02
        stocks[ticker] = PriceSeries(ticker, dates[keep], prices[keep])
    return market, stocks


def price_csv(series: PriceSeries) -> str:
    lines = ["date,adjusted_close"]
    lines += [f"{d},{p!r}" for d, p in zip(series.dates.astype(str), series.prices.tolist())]
    return "\n".join(lines) + "\n"


def write_dataset(out_dir, market: PriceSeries, stocks: dict[str, PriceSeries]) -> Path:
    """Write ``<out_dir>/market.csv`` and ``<out_dir>/prices/<ticker>.csv``."""
    root = Path(out_dir)
    (root / "prices").mkdir(parents=True, exist_ok=True)
    (root / "market.csv").write_text(price_csv(market), encoding="utf-8")
    for ticker, series in stocks.items():
        (root / "prices" / f"{ticker}.csv").write_text(price_csv(series), encoding="utf-8")
    return root
