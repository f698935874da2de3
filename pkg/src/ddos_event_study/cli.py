"""Command-line entry points.

``ddos-event-study`` runs the study and writes its reports;
``ddos-event-study-synth`` writes a synthetic price dataset for the
bundled event list.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .bootstrap import DEFAULT_SCENARIOS, ScenarioConfig
from .errors import EventStudyError
from .inference import ALL_METHODS, Method, TestConfig
from .reporting import write_outputs
from .study import fixture_events, load_events_csv, run_study
from .synthetic import synthetic_dataset, write_dataset
from .timeseries import (
    DEFAULT_ESTIMATION,
    DEFAULT_EVENT_WINDOWS,
    WindowSpec,
    format_window,
    load_price_csv,
    parse_windows,
)

log = logging.getLogger("ddos_event_study")


def _methods(text: str) -> tuple[Method, ...]:
    try:
        return tuple(Method.parse(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"unknown method in {text!r}") from exc


def _windows(text: str):
    try:
        return parse_windows(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _estimation(text: str):
    windows = _windows(text)
    if len(windows) != 1:
        raise argparse.ArgumentTypeError("estimation must be a single lo:hi range")
    return windows[0]


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    default_windows = ",".join(format_window(w) for w in DEFAULT_EVENT_WINDOWS)
    p = argparse.ArgumentParser(
        prog="ddos-event-study",
        description="Event study of announcements on stock returns (Z test and two bootstrap tests).",
    )
    p.add_argument("--events", type=Path, help="CSV with firm,ticker,announcement_date (default: bundled 45 events)")
    p.add_argument("--prices-dir", type=Path, required=True, help="directory of <ticker>.csv price files")
    p.add_argument("--market", type=Path, required=True, help="market index price CSV")
    p.add_argument("--scenarios", type=int, default=DEFAULT_SCENARIOS)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--tail", type=float, default=0.10)
    p.add_argument("--z-critical", type=float, default=1.282)
    p.add_argument("--windows", type=_windows, default=DEFAULT_EVENT_WINDOWS, help=f"default {default_windows!r}")
    p.add_argument("--estimation", type=_estimation, default=DEFAULT_ESTIMATION, help="default '-201:-2'")
    p.add_argument("--methods", type=_methods, default=ALL_METHODS, help="subset of m1,m2,m3")
    p.add_argument("--out", type=Path, default=Path("out"))
    p.add_argument("--hist-bins", type=int, default=None, help="write bootstrap histograms with this many bins")
    p.add_argument("--workers", type=int, default=1, help="threads per bootstrap run; never changes results")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        window_spec = WindowSpec(args.estimation, args.windows)
        scenario_config = ScenarioConfig(args.scenarios, args.seed)
        test_config = TestConfig(args.z_critical, args.tail)
        events = load_events_csv(args.events) if args.events else fixture_events()
        market = load_price_csv(args.market, instrument_id=args.market.stem)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    report = run_study(
        events,
        args.prices_dir,
        market,
        window_spec=window_spec,
        scenario_config=scenario_config,
        test_config=test_config,
        methods=args.methods,
        hist_bins=args.hist_bins,
        workers=args.workers,
    )
    write_outputs(report, args.out)
    log.info("wrote reports for %d events to %s", len(report.results), args.out)
    for failure in report.failed:
        print(f"event {failure.event.event_id} aborted: {failure.reason}", file=sys.stderr)
    return 1 if report.failed else 0


def synth_main(argv=None) -> int:
    p = argparse.ArgumentParser(prog="ddos-event-study-synth", description="Write a synthetic price dataset.")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--events", type=Path, help="event CSV whose tickers get price files (default: bundled)")
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    try:
        events = load_events_csv(args.events) if args.events else fixture_events()
    except (OSError, EventStudyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    market, stocks = synthetic_dataset([e.ticker for e in events], seed=args.seed)
    root = write_dataset(args.out, market, stocks)
    print(f"market: {root / 'market.csv'}\nprices: {root / 'prices'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
