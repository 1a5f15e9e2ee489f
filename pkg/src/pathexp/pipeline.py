"""Run detection, diagnostics, gate and score over one series."""

from __future__ import annotations

from dataclasses import dataclass

from pathexp.classify import EpisodeVerdict, GateConfig, ThresholdVector, apply_gate, score
from pathexp.diagnostics import DiagnosticSet, compute_diagnostics
from pathexp.errors import PathExpError
from pathexp.series import NormalizedSeries, RawSeries, normalize
from pathexp.windows import EpisodeWindow, WindowConfig, detect_windows


@dataclass(frozen=True)
class Episode:
    window: EpisodeWindow
    diagnostics: DiagnosticSet
    verdict: EpisodeVerdict

    @property
    def start_period(self):
        return self.window.start_period

    @property
    def end_period(self):
        return self.window.end_period

    @property
    def score(self):
        return self.verdict.score


@dataclass(frozen=True)
class SeriesAnalysis:
    series: NormalizedSeries
    episodes: list[Episode]

    @property
    def label(self):
        return self.series.label

    @property
    def passing(self) -> list[Episode]:
        return [e for e in self.episodes if e.verdict.gate_passed]


def analyze_episodes(
    s: NormalizedSeries,
    windows: list[EpisodeWindow],
    gate: GateConfig,
    thresholds: ThresholdVector | None,
    sample_length: int | None = None,
) -> list[Episode]:
    episodes = []
    for w in windows:
        try:
            d = compute_diagnostics(s, w)
        except PathExpError as exc:
            exc.context.setdefault("series", s.label)
            exc.context.setdefault("window", f"{w.start_period}-{w.end_period}")
            raise
        v = score(d, thresholds, apply_gate(d, gate), sample_length=sample_length)
        episodes.append(Episode(w, d, v))
    return episodes


def analyze_series(
    raw: RawSeries | NormalizedSeries,
    window_cfg: WindowConfig | None = None,
    gate: GateConfig | None = None,
    thresholds: ThresholdVector | None = None,
    within: tuple[int, int] | None = None,
) -> SeriesAnalysis:
    """Normalise, detect windows, and gate/score each one."""
    s = raw if isinstance(raw, NormalizedSeries) else normalize(raw)
    windows = detect_windows(s, window_cfg or WindowConfig(), within=within)
    return SeriesAnalysis(s, analyze_episodes(s, windows, gate or GateConfig(), thresholds))
