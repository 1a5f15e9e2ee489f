"""CSV ingestion and report serialisation."""

from __future__ import annotations

import csv
import io
import json
import math

from pathexp.coexplosive import CoExplosionReport
from pathexp.diagnostics import STATISTICS, window_trace
from pathexp.errors import InteriorGap, MalformedCsv, NonMonotonePeriods
from pathexp.pipeline import SeriesAnalysis
from pathexp.series import RawSeries

SCHEMA_VERSION = 1

CORE_COLUMNS = [
    "series", "start_period", "end_period", "nc_mean", "nc_positivity", "lgs",
    "log_linearity", "gate", "failing", "score", "class",
]
EXTENDED_COLUMNS = [s for s in STATISTICS if s not in CORE_COLUMNS] + [
    "implied_rho", "log_ok", "width", "growth", "d1", "d2", "d3", "d4",
]


def _cell(raw: str, label: str, row: int) -> float | None:
    raw = raw.strip()
    if raw == "":
        return None
    try:
        value = float(raw)
    except ValueError:
        raise MalformedCsv(f"non-numeric cell {raw!r}", series=label, row=row) from None
    if not math.isfinite(value):
        raise MalformedCsv(f"non-finite cell {raw!r}", series=label, row=row)
    return value


def read_csv(path) -> list[RawSeries]:
    """Read a wide CSV: first column periods, one column per series."""
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_csv(fh.read(), source=str(path))


def parse_csv(text: str, source: str = "<string>") -> list[RawSeries]:
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if any(c.strip() for c in r)]
    if len(rows) < 2:
        raise MalformedCsv("need a header row and at least one data row", file=source)
    header = [h.strip() for h in rows[0]]
    if len(header) < 2:
        raise MalformedCsv("need a period column and at least one series column", file=source)
    labels = header[1:]
    periods, columns = [], [[] for _ in labels]
    for lineno, row in enumerate(rows[1:], 2):
        if len(row) != len(header):
            raise MalformedCsv(
                f"row has {len(row)} cells, header has {len(header)}", file=source, row=lineno
            )
        try:
            periods.append(int(row[0].strip()))
        except ValueError:
            raise MalformedCsv(f"period {row[0]!r} is not an integer", file=source, row=lineno) from None
        for col, label, cell in zip(columns, labels, row[1:]):
            col.append(_cell(cell, label, lineno))

    for prev, cur, lineno in zip(periods, periods[1:], range(3, len(periods) + 2)):
        if cur != prev + 1:
            raise NonMonotonePeriods(
                f"period {cur} follows {prev}; periods must increase by one", file=source, row=lineno
            )

    out = []
    for label, col in zip(labels, columns):
        present = [i for i, v in enumerate(col) if v is not None]
        if not present:
            raise MalformedCsv("series has no values", file=source, series=label)
        lo, hi = present[0], present[-1]
        for i in range(lo, hi + 1):
            if col[i] is None:
                raise InteriorGap(
                    f"series {label!r} has a blank at row {i + 2}", file=source, series=label, row=i + 2
                )
        out.append(RawSeries(label, periods[lo : hi + 1], col[lo : hi + 1]))
    return out


def _num(x):
    """Round for reports; 10 significant digits keep reports stable under rescaling of the input."""
    if x is None:
        return None
    if isinstance(x, bool):
        return x
    return float(f"{x:.10g}")


def episode_rows(analyses: list[SeriesAnalysis], extended: bool = True) -> list[dict]:
    rows = []
    for a in analyses:
        for e in a.episodes:
            d = e.diagnostics
            v = e.verdict
            row = {
                "series": a.label,
                "start_period": e.window.start_period,
                "end_period": e.window.end_period,
                "nc_mean": _num(d.nc_mean),
                "nc_positivity": _num(d.nc_positivity),
                "lgs": _num(d.lgs),
                "log_linearity": _num(d.get("log_linearity")),
                "gate": "pass" if v.gate_passed else "fail",
                "failing": ";".join(v.gate.failing),
                "score": _num(v.score),
                "class": v.label,
            }
            if extended:
                for name in STATISTICS:
                    if name not in row:
                        row[name] = _num(d.get(name))
                row["implied_rho"] = _num(d.implied_rho)
                row["log_ok"] = d.log_ok
                row["width"] = e.window.width
                row["growth"] = _num(e.window.growth)
                for j, x in enumerate(v.d, 1):
                    row[f"d{j}"] = _num(x)
            rows.append(row)
    rows.sort(key=lambda r: (r["series"], r["start_period"]))
    return rows


def _csv_value(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_csv_value(r.get(c)) for c in columns])
    return buf.getvalue()


def report_json(command: str, payload: dict) -> str:
    doc = {"schema_version": SCHEMA_VERSION, "command": command, **payload}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def coexplosion_dict(rep: CoExplosionReport) -> dict:
    d = rep.to_dict()
    for key in ("jaccard", "spearman", "kendall", "sign_concordance"):
        d[key] = _num(d[key])
    for group in ("episodes_1", "episodes_2"):
        for ep in d[group]:
            ep["score"] = _num(ep["score"])
    for pair in d["cooccurring_pairs"]:
        for ep in pair:
            ep["score"] = _num(ep["score"])
    return d


PLOT_COLUMNS = ["series", "window_start", "window_end", "period", "y_norm", "g", "nc", "ell"]


def plot_rows(analyses: list[SeriesAnalysis]) -> list[dict]:
    rows = []
    for a in sorted(analyses, key=lambda a: a.label):
        for e in a.episodes:
            for r in window_trace(a.series, e.window):
                rows.append(
                    {
                        "series": a.label,
                        "window_start": e.window.start_period,
                        "window_end": e.window.end_period,
                        **{k: _num(v) if k != "period" else v for k, v in r.items()},
                    }
                )
    return rows
