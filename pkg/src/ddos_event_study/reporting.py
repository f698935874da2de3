"""Text, JSON and CSV renderings of a :class:`StudyReport`.

Every output is a pure function of the report, so identical reports give
byte-identical files.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from pathlib import Path

from .abnormal_returns import ModelKind
from .inference import DIRECTIONS, Method
from .study import StudyReport, aggregate_m1, cross_table, divergence_rates, summarize
from .timeseries import format_window

_SHORT = {"Positive": "+ve", "NoImpact": "No", "Negative": "-ve"}


def _num(x):
    if x is None:
        return None
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    return x


def report_dict(report: StudyReport) -> dict:
    events = []
    for r in report.results:
        windows = []
        for w in r.windows:
            windows.append({
                "window": list(w.window),
                "acar": _num(w.acar),
                "car": _num(w.car),
                "z": _num(w.z),
                "percentile_additive": _num(w.percentile_additive),
                "percentile_multiplicative": _num(w.percentile_multiplicative),
                "verdicts": {m.value: w.verdicts[m].direction.value for m in report.methods},
            })
        events.append({
            "event_id": r.event.event_id,
            "firm": r.event.firm_name,
            "ticker": r.event.ticker,
            "announcement_date": r.event.announcement_date.isoformat(),
            "day0": r.day0.isoformat(),
            "additive_fit": {k: _num(v) for k, v in r.additive.items()},
            "multiplicative_fit": {k: _num(v) for k, v in r.multiplicative.items()},
            "windows": windows,
        })
    pairs = list(itertools.combinations(report.methods, 2))
    crosstabs = {}
    for a, b in pairs:
        table = cross_table(report, a, b)
        crosstabs[f"{a.value}_{b.value}"] = table.counts.tolist()
    aggregate = {
        format_window(w): ({k: _num(v) for k, v in e.items()} if e else None)
        for w, e in aggregate_m1(report).items()
    } if Method.M1 in report.methods else {}
    return {
        "config": report.config,
        "events": events,
        "skipped": [{"event_id": s.event.event_id, "reason": s.reason} for s in report.skipped],
        "failed": [{"event_id": s.event.event_id, "reason": s.reason} for s in report.failed],
        "crosstabs": crosstabs,
        "m1_aggregate": aggregate,
    }


def render_json(report: StudyReport) -> str:
    return json.dumps(report_dict(report), indent=2) + "\n"


def render_text(report: StudyReport) -> str:
    out = io.StringIO()
    cfg = report.config
    out.write("DDoS announcement event study\n")
    out.write("=" * 30 + "\n")
    for key in ("market", "seed", "scenario_count", "estimation", "windows",
                "z_critical", "tail_fraction", "methods", "hist_bins"):
        out.write(f"{key:>15}: {cfg[key]}\n")
    out.write(
        f"\nevents analysed: {len(report.results)}  skipped: {len(report.skipped)}"
        f"  failed: {len(report.failed)}\n\n"
    )

    header = f"{'firm':<24} {'ticker':<10} {'date':<10}"
    for m in report.methods:
        header += f" | {m.value} +ve -ve  No"
    out.write(header + "\n" + "-" * len(header) + "\n")
    summaries = {m: summarize(report, m) for m in report.methods}
    for r in report.results:
        line = f"{r.event.firm_name[:24]:<24} {r.event.ticker[:10]:<10} {r.event.announcement_date.isoformat()}"
        for m in report.methods:
            pos, neg, none = summaries[m][r.event.event_id]
            line += f" |    {pos:>3} {neg:>3} {none:>3}"
        out.write(line + "\n")

    if report.skipped:
        out.write("\nskipped events\n")
        for s in report.skipped:
            out.write(f"  {s.event.event_id}: {s.reason}\n")
    if report.failed:
        out.write("\nfailed events\n")
        for s in report.failed:
            out.write(f"  {s.event.event_id}: {s.reason}\n")

    for a, b in itertools.combinations(report.methods, 2):
        table = cross_table(report, a, b)
        out.write(f"\ncross-table {a.value} (rows) vs {b.value} (columns)\n")
        out.write(f"{'':>6}" + "".join(f"{_SHORT[d.value]:>6}" for d in DIRECTIONS) + "\n")
        for i, d in enumerate(DIRECTIONS):
            out.write(f"{_SHORT[d.value]:>6}" + "".join(f"{int(c):>6}" for c in table.counts[i]) + "\n")
        if table.total:
            over, under = divergence_rates(table)
            out.write(
                f"agreement {table.agreement:.2%}; {a.value} overestimates {over:.2%}, "
                f"underestimates {under:.2%} of {table.total} periods\n"
            )

    if Method.M1 in report.methods and report.results:
        out.write("\ncross-sectional ACAR (all events)\n")
        for w, e in aggregate_m1(report).items():
            if e is None:
                continue
            z = "n/a" if e["z"] is None else f"{e['z']:+.4f}"
            out.write(
                f"  [{format_window(w)}] K={e['k']} mean {e['mean_acar']:+.6f} "
                f"std {e['std_acar']:.6f} Z {z}\n"
            )
    return out.getvalue()


def crosstab_csv(report: StudyReport, a: Method, b: Method) -> str:
    table = cross_table(report, a, b)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"{a.value}\\{b.value}", *(d.value for d in DIRECTIONS)])
    for i, d in enumerate(DIRECTIONS):
        writer.writerow([d.value, *(int(c) for c in table.counts[i])])
    return buf.getvalue()


def histogram_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["bin_low", "bin_high", "count"])
    for low, high, count in rows:
        writer.writerow([repr(low), repr(high), count])
    return buf.getvalue()


def histogram_filename(ticker: str, date, window, mode: ModelKind) -> str:
    return f"hist_{ticker}-{date.strftime('%Y%m%d')}_{format_window(window)}_{mode.value}.csv"


def write_outputs(report: StudyReport, out_dir) -> list[Path]:
    """Write report.txt, report.json, cross-table and histogram CSVs."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def put(name: str, text: str) -> None:
        path = out / name
        path.write_text(text, encoding="utf-8", newline="")
        written.append(path)

    put("report.txt", render_text(report))
    put("report.json", render_json(report))
    for a, b in itertools.combinations(report.methods, 2):
        put(f"crosstab_{a.value}_{b.value}.csv", crosstab_csv(report, a, b))
    for r in report.results:
        for w in r.windows:
            n_days = w.window[1] - w.window[0] + 1
            for mode in ModelKind:
                rows = r.histograms.get((mode, n_days))
                if rows is not None:
                    name = histogram_filename(r.event.ticker, r.event.announcement_date, w.window, mode)
                    put(name, histogram_csv(rows))
    return written
