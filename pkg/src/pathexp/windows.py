"""Endogenous episode-window detection on a normalised series.

Candidate windows open after a run of strictly positive second differences
and close on a run of strictly negative ones, or when the width cap or the
end of the series is reached. Candidates are then filtered on width and
absolute growth, spaced apart, and cut down to the most explosive few.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from pathexp.errors import ConfigError, TooShort
from pathexp.series import NormalizedSeries, second_diff


@dataclass(frozen=True)
class WindowConfig:
    open_run: int = 4
    close_run: int = 2
    w_min: int = 5
    w_max: int = 15
    min_growth: float = 0.10
    min_gap: int = 5
    max_windows: int = 2
    anchor: str = "run_start"
    keep: str = "earliest"

    def __post_init__(self):
        if self.anchor not in ("run_start", "run_end"):
            raise ConfigError(f"anchor must be 'run_start' or 'run_end', got {self.anchor!r}")
        if self.keep not in ("earliest", "largest_growth"):
            raise ConfigError(f"keep must be 'earliest' or 'largest_growth', got {self.keep!r}")
        if self.open_run < 1 or self.close_run < 1:
            raise ConfigError("open_run and close_run must be >= 1")
        if not 2 <= self.w_min <= self.w_max:
            raise ConfigError(f"need 2 <= w_min <= w_max, got {self.w_min}, {self.w_max}")
        if self.min_growth < 0 or self.min_gap < 0:
            raise ConfigError("min_growth and min_gap must be >= 0")
        if self.max_windows < 1:
            raise ConfigError("max_windows must be >= 1")

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class EpisodeWindow:
    start_index: int
    end_index: int
    start_period: int
    end_period: int
    growth: float

    @property
    def width(self) -> int:
        return self.end_index - self.start_index + 1

    def overlap(self, other: "EpisodeWindow") -> int:
        """Number of calendar periods shared with ``other``."""
        lo = max(self.start_period, other.start_period)
        hi = min(self.end_period, other.end_period)
        return max(0, hi - lo + 1)


def window_growth(values, t0: int, t1: int) -> float:
    base = values[t0]
    if base == 0:
        return math.nan
    return float(abs(values[t1] - values[t0]) / base)


def _candidates(values: np.ndarray, cfg: WindowConfig):
    """Yield raw ``(t0, t1)`` candidates, scanning left to right."""
    n = len(values)
    d2 = second_diff(values)  # d2[k] belongs to series index k + 2
    k = 0
    run = 0
    while k < len(d2):
        run = run + 1 if d2[k] > 0 else 0
        if run < cfg.open_run:
            k += 1
            continue
        t0 = k - cfg.open_run + 1 if cfg.anchor == "run_start" else k + 2
        cap = min(t0 + cfg.w_max - 1, n - 1)
        t1 = cap
        neg = 0
        j = k + 1
        # A closing run only matters while its first member sits at or before the cap.
        while j < len(d2) and (j + 2) - neg <= cap + 1:
            if d2[j] < 0:
                neg += 1
                if neg == cfg.close_run:
                    first_neg = j + 2 - cfg.close_run + 1
                    t1 = min(first_neg - 1, cap)
                    break
            else:
                neg = 0
            j += 1
        yield t0, t1
        k = t1 + 1
        run = 0


def detect_windows(
    s: NormalizedSeries, cfg: WindowConfig | None = None, within: tuple[int, int] | None = None
) -> list[EpisodeWindow]:
    """Detect candidate explosive windows.

    Parameters
    ----------
    s : NormalizedSeries
        Index-normalised series.
    cfg : WindowConfig, optional
        Detector settings; defaults follow :class:`WindowConfig`.
    within : (int, int), optional
        Inclusive index range the windows must lie in. Used by simulation
        scenarios that confine detection to part of the sample.

    Returns
    -------
    list of EpisodeWindow
        At most ``cfg.max_windows`` windows in temporal order.
    """
    cfg = cfg or WindowConfig()
    values = np.asarray(s.values, dtype=float)
    lo, hi = (0, len(values) - 1) if within is None else within
    lo = max(lo, 0)
    hi = min(hi, len(values) - 1)
    sub = values[lo : hi + 1]
    if len(sub) < cfg.open_run + 2:
        raise TooShort(
            f"window detection needs at least {cfg.open_run + 2} observations",
            series=s.label,
            length=len(sub),
        )

    kept = []
    for a, b in _candidates(sub, cfg):
        t0, t1 = a + lo, b + lo
        growth = window_growth(values, t0, t1)
        if t1 - t0 + 1 < cfg.w_min or not growth >= cfg.min_growth:
            continue
        if kept and t0 - kept[-1].end_index - 1 < cfg.min_gap:
            continue
        kept.append(
            EpisodeWindow(t0, t1, int(s.periods[t0]), int(s.periods[t1]), growth)
        )

    if len(kept) > cfg.max_windows and cfg.keep == "earliest":
        kept = kept[: cfg.max_windows]
    elif len(kept) > cfg.max_windows:
        kept = sorted(kept, key=lambda w: (-w.growth, w.start_index))[: cfg.max_windows]
        kept.sort(key=lambda w: w.start_index)
    return kept


def growth_rates(values) -> np.ndarray:
    """``g[t] = (v[t] - v[t-1]) / v[t-1]`` for ``t >= 1``; ``g[0]`` is NaN."""
    v = np.asarray(values, dtype=float)
    g = np.full(len(v), np.nan)
    with np.errstate(divide="ignore", invalid="ignore"):
        g[1:] = (v[1:] - v[:-1]) / v[:-1]
    g[~np.isfinite(g)] = np.nan
    return g


def pre_window_baseline(s: NormalizedSeries, w: EpisodeWindow, lookback: int = 5) -> float | None:
    """Mean growth rate over up to ``lookback`` periods strictly before the window.

    Returns ``None`` when fewer than two pre-window growth rates exist.
    """
    g = growth_rates(s.values)
    start = max(1, w.start_index - lookback)
    pre = g[start : w.start_index]
    pre = pre[np.isfinite(pre)]
    if len(pre) < 2:
        return None
    return float(np.mean(pre))
