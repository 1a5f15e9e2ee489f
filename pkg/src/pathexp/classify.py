"""Stage A gate, Stage B composite intensity score, and threshold calibration."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from pathexp.diagnostics import LAYERS, STATISTICS, DiagnosticSet
from pathexp.errors import ConfigError, MalformedCsv, NoWindows

RHO_MIN = 1.032
STRICT_LGS = 0.70
EMPIRICAL_LGS = 0.35
LAYER_WEIGHTS = (1.0, 1.5, 3.0, 1.5)
CLASS_BOUNDS = ((0.75, "Strong"), (0.57, "Moderate"), (0.36, "Mild"))
CLASSES = ("None", "Mild", "Moderate", "Strong")


@dataclass(frozen=True)
class GateConfig:
    nc_min: float = (RHO_MIN - 1.0) ** 2
    ncp_min: float = 0.60
    lgs_min: float = STRICT_LGS

    def __post_init__(self):
        if not 0.0 <= self.ncp_min <= 1.0:
            raise ConfigError(f"ncp_min must lie in [0, 1], got {self.ncp_min}")

    @classmethod
    def named(cls, name: str) -> "GateConfig":
        if name == "strict":
            return cls(lgs_min=STRICT_LGS)
        if name == "empirical":
            return cls(lgs_min=EMPIRICAL_LGS)
        raise ConfigError(f"unknown gate {name!r}; expected 'strict' or 'empirical'")


@dataclass(frozen=True)
class GateResult:
    nc: bool
    ncp: bool
    lgs: bool

    @property
    def passed(self) -> bool:
        return self.nc and self.ncp and self.lgs

    @property
    def failing(self) -> list[str]:
        return [name for name, ok in (("NC", self.nc), ("NCP", self.ncp), ("LGS", self.lgs)) if not ok]


@dataclass(frozen=True)
class EpisodeVerdict:
    gate: GateResult
    d: tuple[float, float, float, float]
    score: float
    label: str
    notes: tuple[str, ...] = ()

    @property
    def gate_passed(self) -> bool:
        return self.gate.passed


@dataclass
class ThresholdVector:
    """Per-statistic calibration thresholds plus the regime they came from."""

    thresholds: dict[str, float]
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        missing = [s for s in STATISTICS if s not in self.thresholds]
        if missing:
            raise ConfigError(f"threshold vector lacks {', '.join(missing)}")
        bad = [s for s in STATISTICS if not math.isfinite(self.thresholds[s])]
        if bad:
            raise ConfigError(f"non-finite thresholds for {', '.join(bad)}")

    def __getitem__(self, name: str) -> float:
        return self.thresholds[name]

    @property
    def sample_length(self) -> int | None:
        t = self.metadata.get("T")
        return int(t) if t is not None else None

    def dumps(self) -> str:
        lines = ["# pathexp threshold vector", "[metadata]"]
        lines += [f"{k} = {self.metadata[k]}" for k in sorted(self.metadata)]
        lines.append("[thresholds]")
        lines += [f"{name} = {self.thresholds[name]!r}" for name in STATISTICS]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "ThresholdVector":
        section = None
        meta, thr = {}, {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("[") and line.endswith("]"):
                section = line[1:-1]
                continue
            key, sep, value = line.partition("=")
            if not sep or section not in ("metadata", "thresholds"):
                raise MalformedCsv(f"bad threshold document line {lineno}: {raw!r}", line=lineno)
            key, value = key.strip(), value.strip()
            if section == "metadata":
                meta[key] = value
            else:
                try:
                    thr[key] = float(value)
                except ValueError:
                    raise MalformedCsv(f"non-numeric threshold on line {lineno}", line=lineno) from None
        return cls(thr, meta)

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path) -> "ThresholdVector":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())


def apply_gate(d: DiagnosticSet, g: GateConfig | None = None) -> GateResult:
    g = g or GateConfig()
    return GateResult(
        nc=d.nc_mean >= g.nc_min,
        ncp=d.nc_positivity >= g.ncp_min,
        lgs=d.lgs >= g.lgs_min,
    )


def class_for_score(s: float) -> str:
    for bound, label in CLASS_BOUNDS:
        if s >= bound:
            return label
    return "None"


def layer_fractions(d: DiagnosticSet, thresholds: ThresholdVector):
    """Per-layer share of the three statistics that reach their threshold.

    An absent (undefined) statistic counts as not reaching it.
    """
    fractions, notes = [], []
    for j, names in enumerate(LAYERS, 1):
        values = [d.get(n) for n in names]
        if all(v is None for v in values):
            notes.append(f"layer {j}: every statistic absent")
        hits = sum(1 for n, v in zip(names, values) if v is not None and v >= thresholds[n])
        fractions.append(hits / len(names))
    return tuple(fractions), tuple(notes)


def score(
    d: DiagnosticSet,
    thresholds: ThresholdVector | None,
    gate: GateResult,
    sample_length: int | None = None,
) -> EpisodeVerdict:
    """Weighted exceedance score; zero and class ``None`` unless the gate passed.

    ``thresholds`` may be omitted only when the gate has failed.
    """
    if not gate.passed:
        return EpisodeVerdict(gate, (0.0, 0.0, 0.0, 0.0), 0.0, "None")
    if thresholds is None:
        raise ConfigError("calibration thresholds are required to score a gate-passing episode")
    if sample_length is not None and thresholds.sample_length not in (None, sample_length):
        warnings.warn(
            f"thresholds calibrated at T={thresholds.sample_length}, scoring a series of length {sample_length}",
            stacklevel=2,
        )
    fr, notes = layer_fractions(d, thresholds)
    s = sum(w * x for w, x in zip(LAYER_WEIGHTS, fr)) / sum(LAYER_WEIGHTS)
    s = min(1.0, max(0.0, s))
    return EpisodeVerdict(gate, fr, s, class_for_score(s), notes)


def pooled_thresholds(pooled: dict[str, list[float]], q: float = 0.75) -> dict[str, float]:
    """Upper-quartile threshold of each statistic's pooled, defined values."""
    out = {}
    for name in STATISTICS:
        vals = np.sort(np.asarray([v for v in pooled.get(name, []) if v is not None], dtype=float))
        if len(vals) == 0:
            raise NoWindows(f"no defined values of {name} in calibration pool", statistic=name)
        out[name] = float(np.quantile(vals, q))
    return out


def calibrate(regime=None, T: int = 80, n: int = 500, seed: int = 0, window_cfg=None) -> ThresholdVector:
    """Simulate ``n`` paths of ``regime`` and take 75th-percentile thresholds.

    ``regime`` is a :class:`pathexp.simulate.DgpSpec`; the default is the
    mild explosive AR(1) with root 1.04 and innovation sd 0.10.
    """
    from pathexp.simulate import DgpSpec, calibration_pool

    regime = regime or DgpSpec(kind="ar1", rho=1.04)
    if n < 2:
        raise ConfigError("calibration needs n >= 2 replications")
    regime = regime.with_length(T)
    pooled, n_windows = calibration_pool(regime, n, seed, window_cfg)
    if n_windows == 0:
        raise NoWindows("calibration regime produced no windows", regime=regime.describe())
    meta = {
        "regime": regime.describe(),
        "kind": regime.kind,
        "rho": repr(regime.rho),
        "sigma": repr(regime.sigma),
        "T": str(T),
        "burn_in": str(regime.burn_in),
        "n": str(n),
        "seed": str(seed),
        "windows": str(n_windows),
        "quantile": "0.75",
    }
    return ThresholdVector(pooled_thresholds(pooled), meta)
