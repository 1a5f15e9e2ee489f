"""Data-generating processes and the Monte Carlo replication harness.

Every replication draws from its own generator seeded by
``(seed, stream, replication_index)``, so results do not depend on the order
in which replications run.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy.signal import lfilter

from pathexp.classify import CLASSES, GateConfig, ThresholdVector, calibrate
from pathexp.coexplosive import BORDERLINE, CO_EXPLOSIVE, J_MIN, classify_pair
from pathexp.diagnostics import STATISTICS, compute_diagnostics
from pathexp.errors import ConfigError, PathExpError
from pathexp.pipeline import analyze_series
from pathexp.series import RawSeries, normalize
from pathexp.windows import WindowConfig, detect_windows

SCHEMA_VERSION = 1
DEFAULT_SEED = 20240101

# Independent random streams for each part of a study.
_STREAMS = {
    "calibration": 1,
    "strong": 11,
    "mild": 12,
    "unit_root": 13,
    "i2": 14,
    "strong_co": 21,
    "mild_co": 22,
    "independent_halves": 23,
    "spurious_i2": 24,
}


def replication_rng(seed: int, stream: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, stream, index])


@dataclass(frozen=True)
class DgpSpec:
    kind: str = "ar1"  # "ar1" or "i2"
    rho: float = 1.0
    sigma: float = 0.10
    T: int = 80
    burn_in: int = 50
    y_init: float = 1.0

    def __post_init__(self):
        if self.kind not in ("ar1", "i2"):
            raise ConfigError(f"unknown DGP kind {self.kind!r}")
        # sigma == 0 is allowed as the noise-free limit
        if self.sigma < 0:
            raise ConfigError("sigma must be >= 0")
        if self.T < 10 or self.burn_in < 0:
            raise ConfigError("need T >= 10 and burn_in >= 0")

    def with_length(self, T: int) -> "DgpSpec":
        return replace(self, T=T)

    def describe(self) -> str:
        if self.kind == "i2":
            return f"I2(sigma={self.sigma!r},T={self.T},burn_in={self.burn_in})"
        return f"AR1(rho={self.rho!r},sigma={self.sigma!r},T={self.T},burn_in={self.burn_in})"


REGIMES = {
    "strong": DgpSpec("ar1", rho=1.10),
    "mild": DgpSpec("ar1", rho=1.04),
    "unit_root": DgpSpec("ar1", rho=1.00),
    "i2": DgpSpec("i2"),
}


@dataclass(frozen=True)
class ScenarioSpec:
    kind: str
    r: float | None = None
    sigma: float = 0.10
    T: int = 80
    burn_in: int = 50

    _RHOS = {
        "strong_co": (1.10, 1.10),
        "mild_co": (1.10, 1.04),
        "independent_halves": (1.10, 1.10),
        "spurious_i2": (None, None),
    }

    def __post_init__(self):
        if self.kind not in self._RHOS:
            raise ConfigError(f"unknown scenario {self.kind!r}")
        if self.r is None:
            object.__setattr__(self, "r", 0.80 if self.kind.endswith("_co") else 0.0)
        if not -1.0 < self.r < 1.0:
            raise ConfigError("innovation correlation must lie in (-1, 1)")

    @property
    def dgps(self) -> tuple[DgpSpec, DgpSpec]:
        r1, r2 = self._RHOS[self.kind]
        if r1 is None:
            return (DgpSpec("i2", sigma=self.sigma, T=self.T, burn_in=self.burn_in),) * 2
        return (
            DgpSpec("ar1", rho=r1, sigma=self.sigma, T=self.T, burn_in=self.burn_in),
            DgpSpec("ar1", rho=r2, sigma=self.sigma, T=self.T, burn_in=self.burn_in),
        )

    def detection_spans(self):
        """Index ranges each series' detector may use (``None`` = whole sample)."""
        if self.kind == "independent_halves":
            half = self.T // 2
            return (0, half - 1), (half, self.T - 1)
        return None, None


SCENARIOS = {k: ScenarioSpec(k) for k in ("strong_co", "mild_co", "independent_halves", "spurious_i2")}


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _ar1_path(rho: float, y_init: float, eps: np.ndarray) -> np.ndarray:
    y, _ = lfilter([1.0], [1.0, -rho], eps, zi=[rho * y_init])
    return y


def _i2_path(eps: np.ndarray) -> np.ndarray:
    return np.cumsum(np.cumsum(eps))


def _finish(spec: DgpSpec, path: np.ndarray, label: str) -> RawSeries:
    return RawSeries(label, np.arange(spec.T), path[spec.burn_in :])


def gen_ar1(spec: DgpSpec, rho: float | None = None, seed=0, label: str = "ar1") -> RawSeries:
    """``y_t = rho y_{t-1} + e_t`` started at ``y_init``; burn-in discarded."""
    rho = spec.rho if rho is None else rho
    eps = spec.sigma * _rng(seed).standard_normal(spec.burn_in + spec.T)
    return _finish(spec, _ar1_path(rho, spec.y_init, eps), label)


def gen_i2(spec: DgpSpec, seed=0, label: str = "i2") -> RawSeries:
    """Double cumulative sum of Gaussian shocks from zero level and slope."""
    eps = spec.sigma * _rng(seed).standard_normal(spec.burn_in + spec.T)
    return _finish(spec, _i2_path(eps), label)


def gen_series(spec: DgpSpec, seed=0, label: str | None = None) -> RawSeries:
    if spec.kind == "i2":
        return gen_i2(spec, seed, label or "i2")
    return gen_ar1(spec, seed=seed, label=label or "ar1")


def pair_innovations(scenario: ScenarioSpec, seed=0) -> tuple[np.ndarray, np.ndarray]:
    """Cholesky-correlated Gaussian shocks with correlation ``scenario.r``."""
    n = scenario.burn_in + scenario.T
    z = _rng(seed).standard_normal((2, n))
    r = scenario.r
    e1 = scenario.sigma * z[0]
    e2 = scenario.sigma * (r * z[0] + np.sqrt(1.0 - r * r) * z[1])
    return e1, e2


def gen_pair(scenario: ScenarioSpec, seed=0) -> tuple[RawSeries, RawSeries]:
    e1, e2 = pair_innovations(scenario, seed)
    out = []
    for k, (spec, eps) in enumerate(zip(scenario.dgps, (e1, e2)), 1):
        if spec.kind == "i2":
            path = _i2_path(eps)
        else:
            path = _ar1_path(spec.rho, spec.y_init, eps)
        out.append(_finish(spec, path, f"{scenario.kind}_{k}"))
    return out[0], out[1]


def calibration_pool(regime: DgpSpec, n: int, seed: int, window_cfg: WindowConfig | None = None):
    """Window-level statistic values pooled over ``n`` replications."""
    cfg = window_cfg or WindowConfig()
    pooled = {name: [] for name in STATISTICS}
    n_windows = 0
    for i in range(n):
        raw = gen_series(regime, replication_rng(seed, _STREAMS["calibration"], i))
        try:
            s = normalize(raw)
        except PathExpError:
            continue
        for w in detect_windows(s, cfg):
            d = compute_diagnostics(s, w)
            n_windows += 1
            for name in STATISTICS:
                v = d.get(name)
                if v is not None:
                    pooled[name].append(v)
    for name in STATISTICS:
        pooled[name].sort()
    return pooled, n_windows


def _analyze_or_empty(raw, cfg, gate, thresholds, within=None):
    try:
        return analyze_series(raw, cfg, gate, thresholds, within=within).episodes
    except PathExpError as exc:
        if type(exc).__name__ == "ZeroOrigin":
            return []
        raise


def _mean(xs):
    return float(np.mean(xs)) if len(xs) else None


def regime_row(name, spec, gate, thresholds, n, seed, cfg) -> dict:
    """Window, gate and class aggregates for one regime under one gate."""
    n_windows, none, rep_any, mild_plus, all_zero = [], 0, 0, 0, True
    flags = {"all": [], "nc": [], "ncp": [], "lgs": []}
    nc_vals, lgs_vals = [], []
    best = {c: 0 for c in CLASSES}
    for i in range(n):
        raw = gen_series(spec, replication_rng(seed, _STREAMS[name], i), label=name)
        try:
            eps = _analyze_or_empty(raw, cfg, gate, thresholds)
        except PathExpError as exc:
            exc.context["replication"] = i
            exc.context["regime"] = name
            raise
        n_windows.append(len(eps))
        none += not eps
        for e in eps:
            g = e.verdict.gate
            flags["all"].append(g.passed)
            flags["nc"].append(g.nc)
            flags["ncp"].append(g.ncp)
            flags["lgs"].append(g.lgs)
            nc_vals.append(e.diagnostics.nc_mean)
            lgs_vals.append(e.diagnostics.lgs)
            if e.verdict.score != 0:
                all_zero = False
        rep_any += any(e.verdict.gate_passed for e in eps)
        top = max((CLASSES.index(e.verdict.label) for e in eps), default=0)
        best[CLASSES[top]] += 1
        mild_plus += top >= 1
    return {
        "regime": name,
        "dgp": spec.describe(),
        "lgs_gate": gate.lgs_min,
        "mean_windows": _mean(n_windows),
        "pct_none": none / n,
        "gate_all": _mean(flags["all"]),
        "gate_nc": _mean(flags["nc"]),
        "gate_ncp": _mean(flags["ncp"]),
        "gate_lgs": _mean(flags["lgs"]),
        "rep_gate_any": rep_any / n,
        "nc_mean": _mean(nc_vals),
        "lgs_mean": _mean(lgs_vals),
        "score_zero_all": all_zero,
        "mild_or_above": mild_plus / n,
        **{f"class_{c.lower()}": best[c] / n for c in CLASSES},
    }


def scenario_row(name, scenario, gate, thresholds, n, seed, cfg) -> dict:
    """Overlap and classification aggregates for one pair scenario under one gate."""
    js, rhos, classified, borderline = [], [], 0, 0
    span1, span2 = scenario.detection_spans()
    for i in range(n):
        y1, y2 = gen_pair(scenario, replication_rng(seed, _STREAMS[name], i))
        try:
            p1 = [e for e in _analyze_or_empty(y1, cfg, gate, thresholds, span1) if e.verdict.gate_passed]
            p2 = [e for e in _analyze_or_empty(y2, cfg, gate, thresholds, span2) if e.verdict.gate_passed]
        except PathExpError as exc:
            exc.context["replication"] = i
            exc.context["scenario"] = name
            raise
        rep = classify_pair(p1, p2, y1.label, y2.label)
        js.append(rep.jaccard)
        if rep.spearman is not None:
            rhos.append(rep.spearman)
        classified += rep.classification == CO_EXPLOSIVE
        borderline += rep.classification == BORDERLINE
    return {
        "scenario": name,
        "r": scenario.r,
        "lgs_gate": gate.lgs_min,
        "j_mean": _mean(js),
        "pct_j_ge": float(np.mean(np.asarray(js) >= J_MIN)),
        "spearman_mean": _mean(rhos),
        "spearman_defined": len(rhos),
        "pct_classified": classified / n,
        "pct_borderline": borderline / n,
    }


def config_hash(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


@dataclass
class ReplicationTable:
    regimes: list[dict] = field(default_factory=list)
    scenarios: list[dict] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def regime(self, name: str, lgs_gate: float) -> dict:
        for row in self.regimes:
            if row["regime"] == name and row["lgs_gate"] == lgs_gate:
                return row
        raise KeyError((name, lgs_gate))

    def scenario(self, name: str, lgs_gate: float) -> dict:
        for row in self.scenarios:
            if row["scenario"] == name and row["lgs_gate"] == lgs_gate:
                return row
        raise KeyError((name, lgs_gate))

    def _tag(self, row):
        return {**row, "seed": self.meta.get("seed"), "n": self.meta.get("n"),
                "config_hash": self.meta.get("config_hash")}

    def to_json(self) -> str:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "meta": self.meta,
            "regimes": [self._tag(r) for r in self.regimes],
            "scenarios": [self._tag(r) for r in self.scenarios],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    @staticmethod
    def _csv(rows) -> str:
        buf = io.StringIO()
        if not rows:
            return ""
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(v) for k, v in row.items()})
        return buf.getvalue()

    def regimes_csv(self) -> str:
        return self._csv([self._tag(r) for r in self.regimes])

    def scenarios_csv(self) -> str:
        return self._csv([self._tag(r) for r in self.scenarios])


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return f"{v:.6f}"
    return v


def run_study(
    regimes=tuple(REGIMES),
    scenarios=tuple(SCENARIOS),
    n: int = 500,
    seed: int = DEFAULT_SEED,
    lgs_gates=(0.35, 0.70),
    thresholds: ThresholdVector | None = None,
    window_cfg: WindowConfig | None = None,
    calibration_n: int | None = None,
) -> ReplicationTable:
    """Run the single-series and co-explosive simulation study.

    Thresholds are calibrated in-run on the mild explosive regime when not
    supplied. Each regime and scenario is evaluated under every LGS gate in
    ``lgs_gates``.
    """
    cfg = window_cfg or WindowConfig()
    if thresholds is None:
        thresholds = calibrate(T=80, n=calibration_n or n, seed=seed, window_cfg=cfg)
    table = ReplicationTable()
    table.meta = {
        "seed": seed,
        "n": n,
        "window_config": asdict(cfg),
        "lgs_gates": list(lgs_gates),
        "thresholds": {k: thresholds[k] for k in STATISTICS},
        "calibration": dict(sorted(thresholds.metadata.items())),
    }
    table.meta["config_hash"] = config_hash(
        {**table.meta, "regimes": list(regimes), "scenarios": list(scenarios)}
    )
    for lgs in lgs_gates:
        gate = GateConfig(lgs_min=lgs)
        for name in regimes:
            table.regimes.append(regime_row(name, REGIMES[name], gate, thresholds, n, seed, cfg))
        for name in scenarios:
            table.scenarios.append(scenario_row(name, SCENARIOS[name], gate, thresholds, n, seed, cfg))
    return table
