"""Command-line interface: ``analyze``, ``co-analyze``, ``calibrate``, ``simulate``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from pathexp import csvio
from pathexp.classify import GateConfig, ThresholdVector, calibrate
from pathexp.coexplosive import classify_pair
from pathexp.errors import ConfigError, PathExpError
from pathexp.pipeline import analyze_series
from pathexp.simulate import DEFAULT_SEED, DgpSpec, run_study
from pathexp.windows import WindowConfig

DEFAULTS = {
    "gate": "strict",
    "thresholds": None,
    "calibrate_T": None,
    "calibrate_n": 500,
    "seed": DEFAULT_SEED,
    "max_windows": 2,
    "w_max": 15,
    "plot_data": None,
    "format": "csv",
    "out": None,
    "n": 500,
    "rho": 1.04,
    "sigma": 0.10,
    "out_dir": None,
    "pair": None,
    "extended": False,
}


def _add_common(p):
    p.add_argument("--config", help="JSON file of option values; flags override it")
    p.add_argument("--seed", type=int, help=f"RNG seed (default {DEFAULT_SEED})")
    p.add_argument("--max-windows", type=int, dest="max_windows")
    p.add_argument("--w-max", type=int, dest="w_max")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--out", help="output file (default: stdout)")


def _add_scoring(p):
    p.add_argument("--gate", choices=("strict", "empirical"))
    p.add_argument("--thresholds", help="threshold document written by `calibrate`")
    p.add_argument("--calibrate-T", type=int, dest="calibrate_T",
                   help="calibrate thresholds in-run at this sample length")
    p.add_argument("--calibrate-n", type=int, dest="calibrate_n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pathexp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="date, gate and score episodes in every series of a CSV")
    p.add_argument("csv")
    _add_common(p)
    _add_scoring(p)
    p.add_argument("--plot-data", dest="plot_data", help="write per-window tidy CSV here")
    p.add_argument("--extended", action="store_true", default=None,
                   help="include all twelve statistics in the report")

    p = sub.add_parser("co-analyze", help="co-explosion report for a pair of series")
    p.add_argument("csv")
    p.add_argument("--pair", nargs=2, metavar=("A", "B"), help="series labels (default: first two)")
    _add_common(p)
    _add_scoring(p)

    p = sub.add_parser("calibrate", help="write a threshold document")
    _add_common(p)
    p.add_argument("--calibrate-T", type=int, dest="calibrate_T", help="sample length (default 80)")
    p.add_argument("--n", type=int, help="replications (default 500)")
    p.add_argument("--rho", type=float, help="calibration AR root (default 1.04)")
    p.add_argument("--sigma", type=float, help="innovation sd (default 0.10)")

    p = sub.add_parser("simulate", help="run the Monte Carlo study")
    _add_common(p)
    p.add_argument("--n", type=int, help="replications per regime/scenario (default 500)")
    p.add_argument("--thresholds", help="use these thresholds instead of calibrating in-run")
    p.add_argument("--out-dir", dest="out_dir", help="write regimes.csv, scenarios.csv, study.json here")
    return parser


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults < config file < explicit flags."""
    opts = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}", file=args.config) from None
        unknown = sorted(set(cfg) - set(DEFAULTS))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}", file=args.config)
        opts.update(cfg)
    for key, value in vars(args).items():
        if value is not None and key != "config":
            opts[key] = value
    return opts


def _window_cfg(opts) -> WindowConfig:
    return WindowConfig(w_max=opts["w_max"], max_windows=opts["max_windows"])


def _thresholds(opts, series_length: int) -> ThresholdVector:
    if opts["thresholds"] and opts["calibrate_T"]:
        raise ConfigError("give either --thresholds or --calibrate-T, not both")
    if opts["thresholds"]:
        try:
            return ThresholdVector.load(opts["thresholds"])
        except OSError as exc:
            raise ConfigError(f"cannot read thresholds: {exc}", file=opts["thresholds"]) from None
    T = opts["calibrate_T"] or series_length
    return calibrate(T=T, n=opts["calibrate_n"], seed=opts["seed"], window_cfg=_window_cfg(opts))


def _emit(text: str, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _analyses(opts, series):
    thresholds = _thresholds(opts, max(len(s) for s in series))
    gate = GateConfig.named(opts["gate"])
    wcfg = _window_cfg(opts)
    out = []
    for s in series:
        out.append(analyze_series(s, wcfg, gate, thresholds))
    return out, thresholds, gate


def cmd_analyze(opts):
    series = csvio.read_csv(opts["csv"])
    analyses, thresholds, gate = _analyses(opts, series)
    rows = csvio.episode_rows(analyses)
    if opts["format"] == "json":
        text = csvio.report_json(
            "analyze",
            {
                "gate": {"name": opts["gate"], "nc_min": gate.nc_min, "ncp_min": gate.ncp_min,
                         "lgs_min": gate.lgs_min},
                "thresholds": thresholds.thresholds,
                "calibration": thresholds.metadata,
                "series": sorted(s.label for s in series),
                "episodes": rows,
            },
        )
    else:
        cols = csvio.CORE_COLUMNS + (csvio.EXTENDED_COLUMNS if opts["extended"] else [])
        text = csvio.rows_to_csv(rows, cols)
    _emit(text, opts["out"])
    if opts["plot_data"]:
        Path(opts["plot_data"]).write_text(
            csvio.rows_to_csv(csvio.plot_rows(analyses), csvio.PLOT_COLUMNS), encoding="utf-8"
        )


def cmd_co_analyze(opts):
    series = csvio.read_csv(opts["csv"])
    by_label = {s.label: s for s in series}
    if opts["pair"]:
        missing = [lab for lab in opts["pair"] if lab not in by_label]
        if missing:
            raise ConfigError(f"no series named {', '.join(missing)}", file=opts["csv"])
        chosen = [by_label[lab] for lab in opts["pair"]]
    else:
        if len(series) < 2:
            raise ConfigError("co-analyze needs two series", file=opts["csv"])
        chosen = series[:2]
    (a1, a2), _, _ = _analyses(opts, chosen)
    rep = classify_pair(a1.passing, a2.passing, a1.label, a2.label)
    d = csvio.coexplosion_dict(rep)
    if opts["format"] == "json":
        text = csvio.report_json("co-analyze", d)
    else:
        cols = ["series_1", "series_2", "n_passing_1", "n_passing_2", "n_pairs", "jaccard",
                "spearman", "kendall", "sign_concordance", "classification"]
        row = {**d, "n_passing_1": len(d["episodes_1"]), "n_passing_2": len(d["episodes_2"]),
               "n_pairs": len(d["cooccurring_pairs"])}
        text = csvio.rows_to_csv([row], cols)
    _emit(text, opts["out"])


def cmd_calibrate(opts):
    regime = DgpSpec("ar1", rho=opts["rho"], sigma=opts["sigma"])
    tv = calibrate(regime, T=opts["calibrate_T"] or 80, n=opts["n"], seed=opts["seed"],
                   window_cfg=_window_cfg(opts))
    _emit(tv.dumps(), opts["out"])


def cmd_simulate(opts):
    thresholds = ThresholdVector.load(opts["thresholds"]) if opts["thresholds"] else None
    table = run_study(n=opts["n"], seed=opts["seed"], thresholds=thresholds,
                      window_cfg=_window_cfg(opts))
    if opts["out_dir"]:
        out = Path(opts["out_dir"])
        out.mkdir(parents=True, exist_ok=True)
        (out / "regimes.csv").write_text(table.regimes_csv(), encoding="utf-8")
        (out / "scenarios.csv").write_text(table.scenarios_csv(), encoding="utf-8")
        (out / "study.json").write_text(table.to_json(), encoding="utf-8")
    if opts["format"] == "json":
        _emit(table.to_json(), opts["out"])
    elif opts["out"] or not opts["out_dir"]:
        _emit(table.regimes_csv() + "\n" + table.scenarios_csv(), opts["out"])


COMMANDS = {
    "analyze": cmd_analyze,
    "co-analyze": cmd_co_analyze,
    "calibrate": cmd_calibrate,
    "simulate": cmd_simulate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        opts = resolve(args)
        COMMANDS[args.command](opts)
    except PathExpError as exc:
        sys.stderr.write(json.dumps(exc.to_record(), sort_keys=True, default=str) + "\n")
        return 2
    except OSError as exc:
        rec = {"error": type(exc).__name__, "message": str(exc), "context": {"file": exc.filename}}
        sys.stderr.write(json.dumps(rec, sort_keys=True, default=str) + "\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
