import datetime as dt
import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ddos_event_study.errors import InsufficientDataError, PriceDataError
from ddos_event_study.timeseries import (
    PriceSeries,
    ReturnSeries,
    WindowSpec,
    align,
    compute_returns,
    load_price_csv,
    locate_event,
    parse_windows,
    slice_window,
)

from conftest import aligned_from


def series(prices, start="2014-03-24"):
    dates = np.datetime64(start) + np.arange(len(prices))
    return PriceSeries("X", dates, prices)


class TestLoadPriceCsv:
    def test_two_rows(self):
        s = load_price_csv(io.BytesIO(b"date,adjusted_close\n2014-03-27,100.0\n2014-03-28,101.0"))
        assert len(s) == 2
        assert s.dates.tolist() == [dt.date(2014, 3, 27), dt.date(2014, 3, 28)]
        assert s.prices.tolist() == [100.0, 101.0]

    def test_zero_price_names_line(self):
        data = b"date,adjusted_close\n2014-03-27,100.0\n2014-03-28,0\n"
        with pytest.raises(PriceDataError, match="non-positive price at line 3"):
            load_price_csv(io.BytesIO(data))

    def test_negative_price(self):
        with pytest.raises(PriceDataError, match="line 2"):
            load_price_csv(b"date,adjusted_close\n2014-03-27,-5\n")

    def test_unsorted_input_is_sorted(self):
        ordered = load_price_csv(b"date,adjusted_close\n2014-03-26,99\n2014-03-27,100\n2014-03-28,101\n")
        shuffled = load_price_csv(b"date,adjusted_close\n2014-03-28,101\n2014-03-26,99\n2014-03-27,100\n")
        assert np.array_equal(ordered.dates, shuffled.dates)
        assert np.array_equal(ordered.prices, shuffled.prices)

    def test_duplicate_date(self):
        with pytest.raises(PriceDataError, match="duplicate date 2014-03-27 at line 3"):
            load_price_csv(b"date,adjusted_close\n2014-03-27,100\n2014-03-27,101\n")

    @pytest.mark.parametrize(
        "row", ["2014-03-28", "2014-03-28,abc", "28/03/2014,100", "2014-03-28,100,7"]
    )
    def test_malformed_row(self, row):
        with pytest.raises(PriceDataError, match="malformed row at line 3"):
            load_price_csv(f"date,adjusted_close\n2014-03-27,100\n{row}\n".encode())

    def test_bad_header(self):
        with pytest.raises(PriceDataError, match="header"):
            load_price_csv(b"Date,Close\n2014-03-27,100\n")

    def test_path_and_text_stream(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("date,adjusted_close\n2014-03-27,100\n")
        assert len(load_price_csv(path)) == 1
        assert len(load_price_csv(io.StringIO(path.read_text()))) == 1


class TestComputeReturns:
    def test_constant(self):
        assert compute_returns(series([100, 100, 100])).returns.tolist() == [0.0, 0.0]

    def test_up_down(self):
        r = compute_returns(series([100, 110, 99]))
        np.testing.assert_allclose(r.returns, [0.10, -0.10], rtol=0, atol=1e-15)
        assert r.dates[0] == np.datetime64("2014-03-25")

    def test_single_price(self):
        assert len(compute_returns(series([100]))) == 0

    @given(st.lists(st.floats(0.01, 1e4), min_size=1, max_size=60))
    def test_prices_reconstructed(self, prices):
        r = compute_returns(series(prices)).returns
        rebuilt = prices[0] * np.concatenate(([1.0], np.cumprod(1 + r)))
        np.testing.assert_allclose(rebuilt, prices, rtol=1e-9)


def returns(dates, values, name="X"):
    return ReturnSeries(name, np.array(dates, dtype="datetime64[D]"), values)


class TestAlign:
    def test_identical_dates(self):
        d = ["2014-01-02", "2014-01-03", "2014-01-06"]
        a = align(returns(d, [0.1, 0.2, 0.3]), returns(d, [0.01, 0.02, 0.03]))
        assert a.stock.tolist() == [0.1, 0.2, 0.3]
        assert a.market.tolist() == [0.01, 0.02, 0.03]

    def test_extra_holiday_dropped(self):
        stock = returns(["2014-01-02", "2014-01-03", "2014-01-06"], [0.1, 0.2, 0.3])
        market = returns(["2014-01-02", "2014-01-06"], [0.01, 0.03])
        a = align(stock, market)
        assert a.dates.tolist() == [dt.date(2014, 1, 2), dt.date(2014, 1, 6)]
        assert a.stock.tolist() == [0.1, 0.3]

    def test_disjoint(self):
        with pytest.raises(InsufficientDataError, match="no common"):
            align(returns(["2014-01-02"], [0.1]), returns(["2014-01-03"], [0.1]))

    @given(
        st.sets(st.integers(0, 40), min_size=1),
        st.sets(st.integers(0, 40), min_size=1),
    )
    def test_commutative_content(self, days_a, days_b):
        if not days_a & days_b:
            return
        base = np.datetime64("2014-01-01")
        da, db = sorted(days_a), sorted(days_b)
        a = returns([base + d for d in da], [d / 100 for d in da])
        b = returns([base + d for d in db], [-d / 1000 for d in db])
        ab, ba = align(a, b), align(b, a)
        assert np.array_equal(ab.dates, ba.dates)
        assert np.array_equal(ab.stock, ba.market)
        assert np.array_equal(ab.market, ba.stock)


class TestLocateEvent:
    aligned = aligned_from([0.0] * 5, [0.0] * 5, start="2014-03-24")  # Mon..Fri

    def test_trading_day(self):
        assert locate_event(self.aligned, dt.date(2014, 3, 26)) == 2

    def test_weekend_maps_to_monday(self):
        weekdays = np.array(["2014-03-27", "2014-03-28", "2014-03-31", "2014-04-01"], dtype="datetime64[D]")
        a = aligned_from([0.0] * 4, [0.0] * 4)
        a = type(a)(weekdays, a.stock, a.market)
        assert locate_event(a, "2014-03-29") == 2

    def test_beyond_range(self):
        with pytest.raises(InsufficientDataError, match="event beyond data range"):
            locate_event(self.aligned, dt.date(2014, 4, 1))


class TestSliceWindow:
    aligned = aligned_from(np.arange(300) / 1e4, np.zeros(300))

    def test_event_window(self):
        w = slice_window(self.aligned, 250, (-1, 1))
        assert len(w) == 3
        np.testing.assert_array_equal(w.stock, self.aligned.stock[249:252])

    def test_insufficient_history(self):
        with pytest.raises(InsufficientDataError, match="insufficient history.*short by 51"):
            slice_window(self.aligned, 150, (-201, -2))

    def test_insufficient_post_event(self):
        with pytest.raises(InsufficientDataError, match="insufficient post-event data"):
            slice_window(self.aligned, 295, (-1, 9))

    def test_single_day(self):
        w = slice_window(self.aligned, 10, (0, 0))
        assert len(w) == 1 and w.stock[0] == self.aligned.stock[10]

    def test_default_lengths(self):
        spec = WindowSpec()
        assert len(slice_window(self.aligned, 250, spec.estimation)) == 200
        assert [len(slice_window(self.aligned, 250, w)) for w in spec.event_windows] == [3, 5, 7, 9, 11]

    @given(st.integers(0, 299), st.integers(-300, 300), st.integers(0, 20))
    def test_length_property(self, idx, lo, span):
        hi = lo + span
        try:
            w = slice_window(self.aligned, idx, (lo, hi))
        except InsufficientDataError:
            assert idx + lo < 0 or idx + hi >= 300
        else:
            assert len(w) == hi - lo + 1


class TestWindowSpec:
    def test_defaults(self):
        spec = WindowSpec()
        assert spec.estimation_length == 200
        assert spec.window_lengths == (3, 5, 7, 9, 11)

    def test_estimation_must_precede(self):
        with pytest.raises(ValueError, match="before"):
            WindowSpec((-10, -1), ((-1, 1),))

    def test_parse(self):
        assert parse_windows("-1:1, -1:3") == ((-1, 1), (-1, 3))
        with pytest.raises(ValueError):
            parse_windows("-1-1")


def test_series_are_immutable():
    s = series([100.0, 101.0])
    with pytest.raises(ValueError):
        s.prices[0] = 1.0
