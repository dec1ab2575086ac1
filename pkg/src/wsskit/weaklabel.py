"""Engagement-driven weak labeling rules and threshold calibration.

Each rule maps a news item's engagement statistics to fake / real / abstain:

* sentiment: population std of per-user sentiment scores above tau1 -> fake
* bias: mean absolute engager bias above tau2 -> fake
* credibility: mean engager credibility below tau3 -> fake

A rule abstains when fewer than ``min_support`` users back the statistic.
Labelers are pure functions; verdicts for one news item never depend on
another item's engagements.
"""

import statistics
from dataclasses import dataclass, replace

from wsskit.corpus import Dataset
from wsskit.errors import CalibrationError, ValidationError
from wsskit.ioutil import read_jsonl, write_jsonl
from wsskit.metrics import f1_score
from wsskit.signals import SignalTable

SOURCES = ("sentiment", "bias", "credibility")

FAKE, REAL, ABSTAIN = "fake", "real", "abstain"


@dataclass(frozen=True)
class WeakLabelerConfig:
    tau1: float = 0.5
    tau2: float = 0.5
    tau3: float = 0.5
    min_support: int = 3

    def __post_init__(self):
        if self.tau1 < 0:
            raise ValidationError("tau1 must be >= 0")
        if not 0.0 <= self.tau2 <= 1.0:
            raise ValidationError("tau2 must be in [0, 1]")
        if not 0.0 <= self.tau3 <= 1.0:
            raise ValidationError("tau3 must be in [0, 1]")
        if self.min_support < 1:
            raise ValidationError("min_support must be >= 1")


@dataclass(frozen=True)
class WeakLabelSet:
    source: str
    labels: dict  # news id -> fake | real | abstain


def _engagers_per_news(d: Dataset) -> dict:
    by_news = {n.id: [] for n in d.news}
    for e in d.engagements:
        by_news[e.news_id].append(e)
    return by_news


def _per_user_sentiment(engagements, sig: SignalTable) -> list:
    """One score per engaging user: the mean of their scored engagements."""
    per_user = {}
    for e in engagements:
        s = sig.sentiment_by_engagement.get(e.id)
        if s is None:
            continue
        per_user.setdefault(e.user_id, []).append(s)
    return [statistics.fmean(scores) for _, scores in sorted(per_user.items())]


def label_sentiment(d: Dataset, sig: SignalTable, cfg: WeakLabelerConfig) -> WeakLabelSet:
    """Fake when per-user sentiment scores disperse beyond tau1."""
    labels = {}
    for news_id, engs in _engagers_per_news(d).items():
        scores = _per_user_sentiment(engs, sig)
        if len(scores) < cfg.min_support:
            labels[news_id] = ABSTAIN
        else:
            labels[news_id] = FAKE if statistics.pstdev(scores) > cfg.tau1 else REAL
    return WeakLabelSet(source="sentiment", labels=labels)


def label_bias(d: Dataset, sig: SignalTable, cfg: WeakLabelerConfig) -> WeakLabelSet:
    """Fake when the mean absolute bias of engaging users exceeds tau2."""
    labels = {}
    for news_id, engs in _engagers_per_news(d).items():
        users = sorted({e.user_id for e in engs})
        if len(users) < cfg.min_support:
            labels[news_id] = ABSTAIN
        else:
            mean_abs = statistics.fmean(abs(sig.bias_by_user[u]) for u in users)
            labels[news_id] = FAKE if mean_abs > cfg.tau2 else REAL
    return WeakLabelSet(source="bias", labels=labels)


def label_credibility(d: Dataset, sig: SignalTable, cfg: WeakLabelerConfig) -> WeakLabelSet:
    """Fake when the mean credibility of engaging users falls below tau3."""
    labels = {}
    for news_id, engs in _engagers_per_news(d).items():
        users = sorted({e.user_id for e in engs})
        if len(users) < cfg.min_support:
            labels[news_id] = ABSTAIN
        else:
            mean_cred = statistics.fmean(sig.credibility_by_user[u] for u in users)
            labels[news_id] = FAKE if mean_cred < cfg.tau3 else REAL
    return WeakLabelSet(source="credibility", labels=labels)


LABELERS = {
    "sentiment": label_sentiment,
    "bias": label_bias,
    "credibility": label_credibility,
}


def label_all(d: Dataset, sig: SignalTable, cfg: WeakLabelerConfig) -> dict:
    """Run all three labelers; returns source -> WeakLabelSet."""
    return {source: fn(d, sig, cfg) for source, fn in LABELERS.items()}


def _rule_f1(weak: WeakLabelSet, clean: dict) -> float:
    pairs = [(clean[nid], lab) for nid, lab in weak.labels.items()
             if nid in clean and lab != ABSTAIN]
    if not pairs:
        return 0.0
    y_true = [t for t, _ in pairs]
    y_pred = [p for _, p in pairs]
    return f1_score(y_true, y_pred, positive=FAKE)


def calibrate_thresholds(d_validation: Dataset, sig: SignalTable, grid: dict,
                         base: WeakLabelerConfig = WeakLabelerConfig()) -> WeakLabelerConfig:
    """Grid-search each tau independently, maximizing rule F1 on the
    validation set's clean labels (abstains excluded).

    ``grid`` maps "tau1"/"tau2"/"tau3" to candidate lists; an absent or empty
    list keeps the base value. Ties go to the smaller tau. ``min_support`` is
    carried over unchanged.
    """
    clean = {n.id: n.clean_label for n in d_validation.news if n.clean_label is not None}
    observed = set(clean.values())
    if FAKE not in observed or REAL not in observed:
        raise CalibrationError("validation set needs at least one fake and one real label")

    chosen = base
    for tau_name, source in (("tau1", "sentiment"), ("tau2", "bias"), ("tau3", "credibility")):
        candidates = grid.get(tau_name) or []
        best_tau, best_f1 = None, -1.0
        for tau in sorted(candidates):
            cfg = replace(base, **{tau_name: tau})
            score = _rule_f1(LABELERS[source](d_validation, sig, cfg), clean)
            if score > best_f1:
                best_tau, best_f1 = tau, score
        if best_tau is not None:
            chosen = replace(chosen, **{tau_name: best_tau})
    return chosen


def save_weak_label_sets(sets, path) -> None:
    """Write label sets as JSON Lines rows {news_id, source, label}."""
    rows = []
    for ws in sets:
        for news_id, label in ws.labels.items():
            rows.append({"news_id": news_id, "source": ws.source, "label": label})
    write_jsonl(path, rows)


def load_weak_label_sets(path) -> dict:
    """Read label rows back into source -> WeakLabelSet."""
    by_source = {}
    for _, obj in read_jsonl(path):
        by_source.setdefault(str(obj["source"]), {})[str(obj["news_id"])] = str(obj["label"])
    return {source: WeakLabelSet(source=source, labels=labels)
            for source, labels in by_source.items()}
