import csv
import io
import json
from pathlib import Path

import numpy as np
import pytest

from pathexp import csvio
from pathexp.classify import GateConfig, ThresholdVector
from pathexp.cli import main
from pathexp.errors import InteriorGap, MalformedCsv, NonMonotonePeriods
from pathexp.simulate import DgpSpec, gen_ar1

DATA = Path(__file__).parent / "data"
FIXTURE = DATA / "arrivals.csv"
FAST = ["--calibrate-n", "60"]


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


# --- CSV ingestion -----------------------------------------------------------------

def test_single_series_file():
    (s,) = csvio.read_csv(FIXTURE)
    assert s.label == "arrivals" and len(s) == 64
    assert s.periods[0] == 1950 and s.periods[-1] == 2013


def test_multi_column_labels():
    text = "year,a,b,c,d\n" + "".join(f"{2000 + i},{i + 1},{i + 2},{i + 3},{i + 4}\n" for i in range(8))
    assert [s.label for s in csvio.parse_csv(text)] == ["a", "b", "c", "d"]


def test_head_and_tail_blanks_trim():
    text = "year,a,b\n2000,,1\n2001,1,2\n2002,2,3\n2003,3,\n"
    a, b = csvio.parse_csv(text)
    assert a.periods.tolist() == [2001, 2002, 2003]
    assert b.periods.tolist() == [2000, 2001, 2002]


def test_interior_gap_names_series_and_row():
    with pytest.raises(InteriorGap) as exc:
        csvio.parse_csv("year,a\n2000,1\n2001,\n2002,3\n", source="f.csv")
    assert exc.value.context["series"] == "a" and exc.value.context["row"] == 3


@pytest.mark.parametrize(
    "text, error",
    [
        ("year,a\n2000,1,2\n", MalformedCsv),
        ("year,a\n2000,abc\n", MalformedCsv),
        ("year,a\n2000,inf\n", MalformedCsv),
        ("year,a\nx,1\n", MalformedCsv),
        ("year\n2000\n", MalformedCsv),
        ("year,a\n", MalformedCsv),
        ("year,a\n2000,\n2001,\n", MalformedCsv),
        ("year,a\n2001,1\n2000,2\n", NonMonotonePeriods),
        ("year,a\n2000,1\n2002,2\n", NonMonotonePeriods),
    ],
)
def test_csv_errors(text, error):
    with pytest.raises(error):
        csvio.parse_csv(text)


# --- analyze -----------------------------------------------------------------------

def _hand_gate(values, t0, t1):
    y = np.asarray(values[t0 : t1 + 1]) / values[0]
    nc = [(y[k] - 2 * y[k - 1] + y[k - 2]) / y[k - 2] for k in range(2, len(y))]
    ell = np.diff(np.log(y))
    lgs = max(0.0, 1 - np.std(ell, ddof=1) / abs(ell.mean()))
    return np.mean(nc), np.mean(np.asarray(nc) > 0), lgs


def test_analyze_fixture_one_pass_row(capsys):
    code, out, err = run(capsys, "analyze", FIXTURE, "--gate", "strict", *FAST)
    assert code == 0, err
    (row,) = rows(out)
    assert row["gate"] == "pass" and row["failing"] == ""
    assert (row["start_period"], row["end_period"]) == ("1997", "2005")
    assert row["class"] in ("None", "Mild", "Moderate", "Strong")
    # gate arithmetic by hand, straight from the file
    (s,) = csvio.read_csv(FIXTURE)
    nc, ncp, lgs = _hand_gate(s.values, 47, 55)
    assert float(row["nc_mean"]) == pytest.approx(nc, rel=1e-9)
    assert float(row["nc_positivity"]) == pytest.approx(ncp)
    assert float(row["lgs"]) == pytest.approx(lgs, rel=1e-9)
    g = GateConfig()
    assert nc >= g.nc_min and ncp >= g.ncp_min and lgs >= g.lgs_min


def test_analyze_json_and_extended(capsys):
    code, out, _ = run(capsys, "analyze", FIXTURE, "--format", "json", *FAST)
    doc = json.loads(out)
    assert doc["schema_version"] == 1 and doc["command"] == "analyze"
    assert doc["gate"]["lgs_min"] == 0.7
    assert len(doc["episodes"]) == 1 and "alpha2_norm" in doc["episodes"][0]
    code, out, _ = run(capsys, "analyze", FIXTURE, "--extended", *FAST)
    assert "implied_rho" in out.splitlines()[0]


def _write_panel(path, scale=1.0):
    cols = {}
    for seed in range(6):
        cols[f"s{seed}"] = gen_ar1(DgpSpec("ar1", rho=1.06, T=60), seed=seed).values
    with open(path, "w") as fh:
        fh.write("year," + ",".join(cols) + "\n")
        for i in range(60):
            fh.write(f"{1960 + i}," + ",".join(repr(float(v[i] * scale)) for v in cols.values()) + "\n")


def test_reports_scale_invariant(tmp_path, capsys):
    _write_panel(tmp_path / "a.csv")
    _write_panel(tmp_path / "b.csv", scale=1000.0)
    outs = []
    for name in ("a.csv", "b.csv"):
        code, out, _ = run(capsys, "analyze", tmp_path / name, "--extended", *FAST)
        assert code == 0
        outs.append(out)
    assert len(rows(outs[0])) >= 4
    assert outs[0] == outs[1]


def test_analyze_rows_sorted(tmp_path, capsys):
    _write_panel(tmp_path / "a.csv")
    _, out, _ = run(capsys, "analyze", tmp_path / "a.csv", *FAST)
    keys = [(r["series"], int(r["start_period"])) for r in rows(out)]
    assert keys == sorted(keys)


def test_plot_data(tmp_path, capsys):
    plot = tmp_path / "plot.csv"
    code, _, _ = run(capsys, "analyze", FIXTURE, "--plot-data", plot, *FAST)
    assert code == 0
    body = rows(plot.read_text())
    assert len(body) == 9
    assert set(csvio.PLOT_COLUMNS) == set(body[0])


def test_thresholds_file_round_trip(tmp_path, capsys):
    doc = tmp_path / "thr.txt"
    code, _, _ = run(capsys, "calibrate", "--n", "40", "--calibrate-T", "64", "--out", doc)
    assert code == 0
    t = ThresholdVector.load(doc)
    assert t.metadata["T"] == "64" and t.metadata["n"] == "40"
    assert ThresholdVector.loads(t.dumps()).thresholds == t.thresholds
    code, out, _ = run(capsys, "analyze", FIXTURE, "--thresholds", doc)
    assert code == 0 and len(rows(out)) == 1


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"gate": "empirical", "format": "json", "calibrate_n": 30}))
    _, out, _ = run(capsys, "analyze", FIXTURE, "--config", cfg)
    assert json.loads(out)["gate"]["lgs_min"] == 0.35
    _, out, _ = run(capsys, "analyze", FIXTURE, "--config", cfg, "--gate", "strict")
    assert json.loads(out)["gate"]["lgs_min"] == 0.7


# --- errors ------------------------------------------------------------------------

def _error(err):
    return json.loads(err.strip().splitlines()[-1])


def test_missing_file_error_record(capsys):
    code, _, err = run(capsys, "analyze", "/nonexistent/x.csv")
    assert code == 2
    assert _error(err)["context"]["file"] == "/nonexistent/x.csv"


def test_interior_gap_error_record(tmp_path, capsys):
    p = tmp_path / "gap.csv"
    p.write_text("year,a\n2000,1\n2001,\n2002,3\n")
    code, _, err = run(capsys, "analyze", p)
    rec = _error(err)
    assert code == 2 and rec["error"] == "InteriorGap" and rec["context"]["series"] == "a"


def test_two_threshold_sources_rejected(tmp_path, capsys):
    code, _, err = run(capsys, "analyze", FIXTURE, "--thresholds", tmp_path / "t", "--calibrate-T", "80")
    assert code == 2 and _error(err)["error"] == "ConfigError"


def test_bad_config_keys(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"colour": "blue"}))
    code, _, err = run(capsys, "analyze", FIXTURE, "--config", cfg)
    assert code == 2 and "colour" in _error(err)["message"]


def test_unknown_pair_label(capsys):
    code, _, err = run(capsys, "co-analyze", FIXTURE, "--pair", "arrivals", "nope", *FAST)
    assert code == 2 and "nope" in _error(err)["message"]


# --- co-analyze and simulate ----------------------------------------------------------

def test_co_analyze_self_pair(tmp_path, capsys):
    p = tmp_path / "pair.csv"
    (s,) = csvio.read_csv(FIXTURE)
    p.write_text("year,x,y\n" + "".join(f"{t},{float(v)!r},{float(v)!r}\n" for t, v in zip(s.periods, s.values)))
    code, out, _ = run(capsys, "co-analyze", p, "--format", "json", *FAST)
    doc = json.loads(out)
    assert code == 0
    assert doc["jaccard"] == 1.0
    assert doc["classification"] == ("Borderline" if len(doc["cooccurring_pairs"]) < 2 else "CoExplosive")
    code, out, _ = run(capsys, "co-analyze", p, "--pair", "y", "x", *FAST)
    assert rows(out)[0]["series_1"] == "y"


def test_simulate_byte_identical(tmp_path, capsys):
    outs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        code, _, err = run(capsys, "simulate", "--n", "8", "--out-dir", d)
        assert code == 0, err
        outs.append({f: (d / f).read_bytes() for f in ("regimes.csv", "scenarios.csv", "study.json")})
    assert outs[0] == outs[1]
    doc = json.loads(outs[0]["study.json"])
    assert doc["meta"]["seed"] == 20240101
