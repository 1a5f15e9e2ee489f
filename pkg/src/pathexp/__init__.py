"""Detect, score and compare path-explosive episodes in time series."""

from pathexp.classify import (
    EpisodeVerdict,
    GateConfig,
    ThresholdVector,
    apply_gate,
    calibrate,
    class_for_score,
    score,
)
from pathexp.coexplosive import CoExplosionReport, classify_pair, concordance, match_episodes
from pathexp.diagnostics import STATISTICS, DiagnosticSet, compute_diagnostics
from pathexp.pipeline import Episode, SeriesAnalysis, analyze_series
from pathexp.series import NormalizedSeries, RawSeries, normalize
from pathexp.windows import EpisodeWindow, WindowConfig, detect_windows

__version__ = "0.1.0"

__all__ = [
    "CoExplosionReport",
    "DiagnosticSet",
    "Episode",
    "EpisodeVerdict",
    "EpisodeWindow",
    "GateConfig",
    "NormalizedSeries",
    "RawSeries",
    "STATISTICS",
    "SeriesAnalysis",
    "ThresholdVector",
    "WindowConfig",
    "analyze_series",
    "apply_gate",
    "calibrate",
    "class_for_score",
    "classify_pair",
    "compute_diagnostics",
    "concordance",
    "detect_windows",
    "match_episodes",
    "normalize",
    "score",
]
