"""The twelve within-window path statistics, grouped in four layers.

Layer 1 looks at level geometry, layer 2 at growth-rate dynamics, layer 3 at
normalised curvature ``nc_t = d2_t / y_{t-2}`` and layer 4 at the log path.
Ratios whose denominator is exactly zero are reported as ``None`` and are
treated downstream as absent evidence, not as zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from pathexp.errors import AllDegenerate, TooShort, ZeroDenominator
from pathexp.series import NormalizedSeries, ols_linear, ols_quadratic, sample_sd, winsorize
from pathexp.windows import EpisodeWindow, growth_rates, pre_window_baseline

GR_CAP = 10.0
NC_GUARD = 1e-8

#: Statistic names in layer order; every one is oriented "larger is more explosive".
STATISTICS = (
    "alpha2_norm",
    "convexity_persistence",
    "mean_growth",
    "growth_trend_norm",
    "growth_sign_persistence",
    "growth_ratio",
    "nc_mean",
    "nc_positivity",
    "nc_trend_norm",
    "log_linearity",
    "lgs",
    "log_growth_trend",
)
LAYERS = (STATISTICS[0:3], STATISTICS[3:6], STATISTICS[6:9], STATISTICS[9:12])


@dataclass(frozen=True)
class Layer1:
    alpha2_norm: float
    convexity_persistence: float
    mean_growth: float


@dataclass(frozen=True)
class Layer2:
    growth_trend_norm: float | None
    growth_sign_persistence: float
    growth_ratio: float | None


@dataclass(frozen=True)
class Layer3:
    nc_mean: float
    nc_positivity: float
    nc_trend_norm: float | None


@dataclass(frozen=True)
class Layer4:
    log_linearity: float | None
    lgs: float
    log_growth_trend: float | None
    log_ok: bool
    implied_rho: float | None = None


@dataclass(frozen=True)
class DiagnosticSet:
    layer1: Layer1
    layer2: Layer2
    layer3: Layer3
    layer4: Layer4
    baseline: float | None = field(default=None, compare=False)

    @property
    def log_ok(self) -> bool:
        return self.layer4.log_ok

    @property
    def implied_rho(self) -> float | None:
        return self.layer4.implied_rho

    def get(self, name: str) -> float | None:
        for layer in (self.layer1, self.layer2, self.layer3, self.layer4):
            if hasattr(layer, name):
                return getattr(layer, name)
        raise KeyError(name)

    def as_dict(self) -> dict:
        out = {name: self.get(name) for name in STATISTICS}
        out["implied_rho"] = self.implied_rho
        out["log_ok"] = self.log_ok
        return out

    # convenience accessors for the gate statistics
    @property
    def nc_mean(self):
        return self.layer3.nc_mean

    @property
    def nc_positivity(self):
        return self.layer3.nc_positivity

    @property
    def lgs(self):
        return self.layer4.lgs


def _window(s: NormalizedSeries, w: EpisodeWindow, min_width: int = 4) -> np.ndarray:
    if w.width < min_width:
        raise TooShort(
            f"window needs width >= {min_width}", series=s.label, window=(w.start_period, w.end_period)
        )
    return np.asarray(s.values[w.start_index : w.end_index + 1], dtype=float)


def _ratio(num: float, den: float) -> float | None:
    return None if den == 0 else float(num / abs(den))


def layer1(s: NormalizedSeries, w: EpisodeWindow) -> Layer1:
    y = _window(s, w)
    ybar = float(np.mean(y))
    if ybar == 0:
        raise ZeroDenominator("window mean is zero", series=s.label, window=(w.start_period, w.end_period))
    a2 = ols_quadratic(y).a2
    d2 = y[2:] - 2.0 * y[1:-1] + y[:-2]
    g = growth_rates(y)[1:]
    g = g[np.isfinite(g)]
    return Layer1(
        alpha2_norm=float(a2 / ybar),
        convexity_persistence=float(np.mean(d2 > 0)),
        mean_growth=float(np.mean(g)) if len(g) else 0.0,
    )


def layer2(s: NormalizedSeries, w: EpisodeWindow, baseline: float | None = None) -> Layer2:
    y = _window(s, w)
    g = growth_rates(y)[1:]
    g = g[np.isfinite(g)]
    if len(g) < 3:
        raise TooShort("too few finite growth rates", series=s.label, window=(w.start_period, w.end_period))
    gbar = float(np.mean(g))
    slope = ols_linear(g).slope
    gp = float(np.mean(np.sign(g) == np.sign(gbar)))
    if baseline is None or baseline == 0:
        gr = None
    else:
        gr = float(np.clip(gbar / baseline, -GR_CAP, GR_CAP))
    return Layer2(_ratio(slope, gbar), gp, gr)


def normalised_curvature(s: NormalizedSeries, w: EpisodeWindow) -> np.ndarray:
    """Raw ``nc_t`` over ``t = t0+2 .. t1``; observations with a vanishing lagged level are dropped."""
    y = _window(s, w)
    d2 = y[2:] - 2.0 * y[1:-1] + y[:-2]
    lag2 = y[:-2]
    keep = np.abs(lag2) >= NC_GUARD
    return d2[keep] / lag2[keep]


def layer3(s: NormalizedSeries, w: EpisodeWindow) -> Layer3:
    nc = normalised_curvature(s, w)
    if len(nc) == 0:
        raise AllDegenerate(
            "every curvature observation has a vanishing lagged level",
            series=s.label,
            window=(w.start_period, w.end_period),
        )
    nc = winsorize(nc, 0.01, 0.99)
    ncbar = float(np.mean(nc))
    trend = ols_linear(nc).slope if len(nc) >= 3 else 0.0
    return Layer3(ncbar, float(np.mean(nc > 0)), _ratio(trend, ncbar))


def layer4(s: NormalizedSeries, w: EpisodeWindow) -> Layer4:
    y = _window(s, w)
    if np.any(y <= 0):
        return Layer4(0.0, 0.0, 0.0, log_ok=False, implied_rho=None)
    ly = np.log(y)
    fit = ols_linear(ly)
    span = w.end_index - w.start_index
    if fit.slope == 0:
        ll = None
    else:
        ll = float(1.0 - fit.residual_sd / (abs(fit.slope) * span))
    ell = np.diff(ly)
    lbar = float(np.mean(ell))
    lgs = 0.0 if lbar == 0 else max(0.0, 1.0 - sample_sd(ell) / abs(lbar))
    lgt = _ratio(ols_linear(ell).slope, lbar)
    return Layer4(ll, float(lgs), lgt, log_ok=True, implied_rho=math.exp(lbar))


def compute_diagnostics(s: NormalizedSeries, w: EpisodeWindow, lookback: int = 5) -> DiagnosticSet:
    """All twelve statistics for one window."""
    baseline = pre_window_baseline(s, w, lookback)
    return DiagnosticSet(
        layer1(s, w), layer2(s, w, baseline), layer3(s, w), layer4(s, w), baseline=baseline
    )


def window_trace(s: NormalizedSeries, w: EpisodeWindow) -> list[dict]:
    """Per-period values inside a window, for external plotting."""
    y = np.asarray(s.values[w.start_index : w.end_index + 1], dtype=float)
    g = growth_rates(y)
    nc = np.full(len(y), np.nan)
    d2 = y[2:] - 2.0 * y[1:-1] + y[:-2]
    with np.errstate(divide="ignore", invalid="ignore"):
        nc[2:] = np.where(np.abs(y[:-2]) >= NC_GUARD, d2 / y[:-2], np.nan)
        ell = np.full(len(y), np.nan)
        if np.all(y > 0):
            ell[1:] = np.diff(np.log(y))
    rows = []
    for i in range(len(y)):
        rows.append(
            {
                "period": int(s.periods[w.start_index + i]),
                "y_norm": float(y[i]),
                "g": None if np.isnan(g[i]) else float(g[i]),
                "nc": None if np.isnan(nc[i]) else float(nc[i]),
                "ell": None if np.isnan(ell[i]) else float(ell[i]),
            }
        )
    return rows
