"""Series primitives: normalisation, differencing, small-sample fits and ranks.

Everything here is a pure function of its inputs. Rank correlations return
``None`` when undefined (all values tied in either vector) so that callers
can tell "no evidence" apart from zero association.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from pathexp.errors import Empty, NonFinite, NonMonotonePeriods, TooShort, ZeroOrigin


@dataclass(frozen=True, eq=False)
class RawSeries:
    label: str
    periods: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        periods = np.asarray(self.periods, dtype=np.int64)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "periods", periods)
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or len(values) < 1:
            raise TooShort("series must hold at least one value", series=self.label)
        if len(periods) != len(values):
            raise TooShort("periods and values differ in length", series=self.label)
        if not np.all(np.isfinite(values)):
            raise NonFinite("series contains non-finite values", series=self.label)
        if len(periods) > 1 and not np.all(np.diff(periods) == 1):
            raise NonMonotonePeriods(
                "periods must increase with unit spacing", series=self.label
            )

    def __len__(self):
        return len(self.values)

    @classmethod
    def from_values(cls, values, label="series", start=0):
        values = np.asarray(values, dtype=float)
        return cls(label, np.arange(start, start + len(values)), values)


@dataclass(frozen=True, eq=False)
class NormalizedSeries:
    label: str
    periods: np.ndarray
    values: np.ndarray
    origin_value: float

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True, eq=False)
class LinearFit:
    intercept: float
    slope: float
    residuals: np.ndarray
    residual_sd: float


@dataclass(frozen=True, eq=False)
class QuadraticFit:
    a0: float
    a1: float
    a2: float
    residuals: np.ndarray = field(repr=False)


def normalize(s: RawSeries) -> NormalizedSeries:
    """Index-normalise a series to its first observation."""
    values = np.asarray(s.values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise NonFinite("series contains non-finite values", series=s.label)
    origin = float(values[0])
    if origin == 0.0:
        raise ZeroOrigin("first observation is zero; cannot index-normalise", series=s.label)
    out = values / origin
    out[0] = 1.0
    return NormalizedSeries(s.label, np.asarray(s.periods).copy(), out, origin)


def second_diff(v) -> np.ndarray:
    """``out[k] = v[k+2] - 2 v[k+1] + v[k]``; length ``len(v) - 2``."""
    v = np.asarray(v, dtype=float)
    if len(v) < 3:
        raise TooShort("second difference needs at least 3 values", length=len(v))
    return v[2:] - 2.0 * v[1:-1] + v[:-2]


def sample_sd(v) -> float:
    """Standard deviation with the n-1 denominator (0 for a single value)."""
    v = np.asarray(v, dtype=float)
    if len(v) < 2:
        return 0.0
    return float(np.std(v, ddof=1))


def quantile_bounds(v, lo_pct: float, hi_pct: float) -> tuple[float, float]:
    """Clamp bounds taken as the order statistics nearest to ``(n-1) p``.

    Bounds are always observed values, which keeps winsorisation idempotent.
    """
    x = np.sort(np.asarray(v, dtype=float))
    n = len(x)
    lo_idx = int(np.floor((n - 1) * lo_pct + 0.5))
    hi_idx = int(np.floor((n - 1) * hi_pct + 0.5))
    return float(x[lo_idx]), float(x[hi_idx])


def winsorize(v, lo_pct: float = 0.01, hi_pct: float = 0.99) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if len(v) == 0:
        raise Empty("cannot winsorise an empty vector")
    if not 0.0 <= lo_pct < hi_pct <= 1.0:
        raise ValueError(f"need 0 <= lo_pct < hi_pct <= 1, got {lo_pct}, {hi_pct}")
    lo, hi = quantile_bounds(v, lo_pct, hi_pct)
    return np.clip(v, lo, hi)


def ols_linear(y) -> LinearFit:
    """Intercept + slope fit of ``y`` on the clock ``0, 1, 2, ...``."""
    y = np.asarray(y, dtype=float)
    n = len(y)
    if n < 3:
        raise TooShort("linear fit needs at least 3 values", length=n)
    tau = np.arange(n, dtype=float)
    tc = tau - tau.mean()
    slope = float(np.dot(tc, y - y.mean()) / np.dot(tc, tc))
    intercept = float(y.mean() - slope * tau.mean())
    resid = y - (intercept + slope * tau)
    return LinearFit(intercept, slope, resid, sample_sd(resid))


def ols_quadratic(y) -> QuadraticFit:
    """Least-squares fit of ``y`` on ``1, tau, tau**2`` with ``tau = 0, 1, ...``."""
    y = np.asarray(y, dtype=float)
    n = len(y)
    if n < 4:
        raise TooShort("quadratic fit needs at least 4 values", length=n)
    # Centred clock keeps the design well conditioned; coefficients are mapped back.
    c = (n - 1) / 2.0
    u = np.arange(n, dtype=float) - c
    X = np.column_stack([np.ones(n), u, u * u])
    b, *_ = np.linalg.lstsq(X, y, rcond=None)
    a2 = b[2]
    a1 = b[1] - 2.0 * a2 * c
    a0 = b[0] - b[1] * c + a2 * c * c
    return QuadraticFit(float(a0), float(a1), float(a2), y - X @ b)


def _check_pair(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) != len(b):
        raise ValueError("rank correlation needs vectors of equal length")
    if len(a) < 2:
        raise TooShort("rank correlation needs at least 2 observations", length=len(a))
    return a, b


def spearman(a, b) -> float | None:
    """Pearson correlation of average ranks; ``None`` if either side is all ties."""
    a, b = _check_pair(a, b)
    ra = stats.rankdata(a)
    rb = stats.rankdata(b)
    ra -= ra.mean()
    rb -= rb.mean()
    den = np.sqrt(np.dot(ra, ra) * np.dot(rb, rb))
    if den == 0.0:
        return None
    return float(np.clip(np.dot(ra, rb) / den, -1.0, 1.0))


def kendall(a, b) -> float | None:
    """Kendall's tau-b; ``None`` if either side is all ties."""
    a, b = _check_pair(a, b)
    if np.all(a == a[0]) or np.all(b == b[0]):
        return None
    tau = stats.kendalltau(a, b, variant="b").statistic
    return float(np.clip(tau, -1.0, 1.0))
