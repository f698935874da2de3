import datetime as dt

import numpy as np
import pytest

from ddos_event_study.synthetic import business_days, prices_from_returns
from ddos_event_study.timeseries import AlignedReturns, PriceSeries


def aligned_from(stock, market, start="2014-01-01"):
    stock = np.asarray(stock, dtype=float)
    dates = np.datetime64(start) + np.arange(stock.size)
    return AlignedReturns(dates, stock, np.asarray(market, dtype=float))


def event_prices(stock_returns, market_returns, start=dt.date(2013, 1, 1), ticker="XYZ"):
    """Price series for a stock and the market on a shared weekday calendar."""
    n = len(market_returns) + 1
    dates = business_days(start, start + dt.timedelta(days=2 * n + 30))[:n]
    stock = PriceSeries(ticker, dates, prices_from_returns(np.asarray(stock_returns), 50.0))
    market = PriceSeries("MKT", dates, prices_from_returns(np.asarray(market_returns), 1000.0))
    return stock, market


@pytest.fixture
def rng():
    return np.random.default_rng(20170101)


ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
