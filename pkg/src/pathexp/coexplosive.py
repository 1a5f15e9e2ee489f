"""Pairwise co-explosion: episode matching, Jaccard index, intensity concordance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from pathexp.series import kendall, spearman

J_MIN = 0.67
SPEARMAN_MIN = 0.60
SC_MIN = 0.67

NOT_CO_EXPLOSIVE = "NotCoExplosive"
BORDERLINE = "Borderline"
CO_EXPLOSIVE = "CoExplosive"


def _span(e):
    w = getattr(e, "window", e)
    return w.start_period, w.end_period


def _overlap(a, b) -> int:
    (s1, e1), (s2, e2) = _span(a), _span(b)
    return max(0, min(e1, e2) - max(s1, s2) + 1)


def match_episodes(w1, w2, min_overlap_frac: float = 0.0) -> list[tuple[int, int]]:
    """One-to-one matching of calendar-overlapping episodes.

    Pairs are taken greedily by largest overlap, ties going to the earliest
    intervals. ``min_overlap_frac`` optionally requires the overlap to cover
    that fraction of the shorter episode. Returns index pairs ``(i, j)`` in
    temporal order.
    """
    cands = []
    for i, a in enumerate(w1):
        for j, b in enumerate(w2):
            ov = _overlap(a, b)
            if ov < 1:
                continue
            shorter = min(_span(a)[1] - _span(a)[0], _span(b)[1] - _span(b)[0]) + 1
            if ov < min_overlap_frac * shorter:
                continue
            cands.append((-ov, sorted([_span(a), _span(b)]), i, j))
    cands.sort(key=lambda c: (c[0], c[1]))
    used1, used2, pairs = set(), set(), []
    for _, _, i, j in cands:
        if i in used1 or j in used2:
            continue
        used1.add(i)
        used2.add(j)
        pairs.append((i, j))
    pairs.sort(key=lambda p: sorted([_span(w1[p[0]]), _span(w2[p[1]])]))
    return pairs


def jaccard(n1: int, n2: int, n_pairs: int) -> float:
    den = n1 + n2 - n_pairs
    return n_pairs / den if den > 0 else 0.0


def sign_concordance(scores1, scores2) -> float | None:
    """Share of consecutive score increments whose signs agree in both series."""
    a = np.asarray(scores1, dtype=float)
    b = np.asarray(scores2, dtype=float)
    if len(a) < 2:
        return None
    return float(np.mean(np.sign(np.diff(a)) == np.sign(np.diff(b))))


@dataclass(frozen=True)
class Concordance:
    spearman: float | None
    kendall: float | None
    sign_concordance: float | None

    @property
    def determined(self) -> bool:
        return self.spearman is not None or self.sign_concordance is not None


def concordance(scores1, scores2) -> Concordance:
    """Rank and sign concordance of paired intensity scores (time ordered)."""
    if len(scores1) < 2:
        return Concordance(None, None, None)
    return Concordance(
        spearman(scores1, scores2), kendall(scores1, scores2), sign_concordance(scores1, scores2)
    )


@dataclass(frozen=True)
class CoExplosionReport:
    label_1: str
    label_2: str
    episodes_1: list
    episodes_2: list
    cooccurring_pairs: list[tuple]
    jaccard: float
    spearman: float | None
    kendall: float | None
    sign_concordance: float | None
    classification: str

    def to_dict(self) -> dict:
        def ep(e):
            s, t = _span(e)
            return {"start_period": s, "end_period": t, "score": getattr(e, "score", None)}

        return {
            "series_1": self.label_1,
            "series_2": self.label_2,
            "episodes_1": [ep(e) for e in self.episodes_1],
            "episodes_2": [ep(e) for e in self.episodes_2],
            "cooccurring_pairs": [[ep(a), ep(b)] for a, b in self.cooccurring_pairs],
            "jaccard": self.jaccard,
            "spearman": self.spearman,
            "kendall": self.kendall,
            "sign_concordance": self.sign_concordance,
            "classification": self.classification,
        }


def classify_pair(episodes_1, episodes_2, label_1="series_1", label_2="series_2",
                  min_overlap_frac: float = 0.0) -> CoExplosionReport:
    """Classify a pair from their gate-passing episodes.

    Episodes are objects with a ``window`` (or ``start_period``/``end_period``)
    and a ``score``; callers pass only gate-passing ones.
    """
    e1 = sorted(episodes_1, key=lambda e: _span(e)[0])
    e2 = sorted(episodes_2, key=lambda e: _span(e)[0])
    idx = match_episodes(e1, e2, min_overlap_frac)
    pairs = [(e1[i], e2[j]) for i, j in idx]
    j = jaccard(len(e1), len(e2), len(pairs))
    conc = concordance([a.score for a, _ in pairs], [b.score for _, b in pairs])

    if not e1 or not e2 or j < J_MIN:
        label = NOT_CO_EXPLOSIVE
    elif (conc.spearman is not None and conc.spearman >= SPEARMAN_MIN) or (
        conc.sign_concordance is not None and conc.sign_concordance >= SC_MIN
    ):
        label = CO_EXPLOSIVE
    elif not conc.determined:
        label = BORDERLINE
    else:
        label = NOT_CO_EXPLOSIVE
    return CoExplosionReport(
        label_1, label_2, e1, e2, pairs, j, conc.spearman, conc.kendall, conc.sign_concordance, label
    )
