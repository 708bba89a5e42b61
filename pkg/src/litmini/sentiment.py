"""Emotion and polarity classification with support-filtered aggregation.

Classification is delegated to providers speaking a small JSON wire
protocol. A deterministic keyword-lexicon double ships alongside the HTTP
client so the downstream pipelines stay testable offline; its rule tables
are contracts of this module, not a model of natural language.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import Protocol

import httpx
import numpy as np

from .cluster import Cluster, ClusterParams, agglomerate
from .corpus import Corpus
from .errors import ProviderUnavailable, UnknownLabel
from .index import KeywordQuery, VectorStore
from .search import candidate_sids

EMOTION_CLASSES: tuple[str, ...] = (
    "admiration", "amusement", "anger", "annoyance", "approval",
    "caring", "confusion", "curiosity", "desire", "disappointment",
    "disapproval", "disgust", "embarrassment", "excitement", "fear",
    "gratitude", "grief", "joy", "love", "nervousness", "optimism",
    "pride", "realization", "relief", "remorse", "sadness", "surprise",
)
NEUTRAL_LABEL = "neutral"
EMOTION_LABELS = frozenset(EMOTION_CLASSES) | {NEUTRAL_LABEL}

POLARITY_CLASSES: tuple[str, ...] = ("negative", "positive", "neutral")
POLARITY_LABELS = frozenset(POLARITY_CLASSES)

TASK_EMOTION = "emotion"
TASK_POLARITY = "polarity"

DEFAULT_MIN_SUPPORT = 100
DEFAULT_DROP_LABELS = frozenset({"neutral", "gratitude"})
DEFAULT_POLARITY_CLUSTER_PARAMS = ClusterParams(
    min_similarity=0.85, min_cluster_count=10)

DEFAULT_HTTP_TIMEOUT = 30.0


@dataclass(frozen=True)
class EmotionLabel:
    """One fine-grained emotion assignment for a single sentence."""

    label: str
    score: float

    def __post_init__(self):
        if self.label not in EMOTION_LABELS:
            raise UnknownLabel(f"not an emotion label: {self.label!r}")
        if not 0.0 <= float(self.score) <= 1.0:
            raise ValueError(f"score must lie in [0, 1], got {self.score!r}")


@dataclass(frozen=True)
class PolarityLabel:
    """Coarse negative/positive/neutral assignment for a single sentence."""

    label: str
    score: float

    def __post_init__(self):
        if self.label not in POLARITY_LABELS:
            raise UnknownLabel(f"not a polarity label: {self.label!r}")
        if not 0.0 <= float(self.score) <= 1.0:
            raise ValueError(f"score must lie in [0, 1], got {self.score!r}")


@dataclass(frozen=True)
class EmotionHistogram:
    """Label frequency table whose counts sum to total."""

    counts: Mapping[str, int]
    total: int

    def __post_init__(self):
        if any(count < 0 for count in self.counts.values()):
            raise ValueError("counts must be non-negative")
        if sum(self.counts.values()) != self.total:
            raise ValueError("counts must sum to total")


@dataclass(frozen=True)
class EmotionBreakdown:
    """Support-filtered histogram plus the sentence ids behind each label."""

    histogram: EmotionHistogram
    sids_by_label: Mapping[str, tuple[int, ...]]


class ClassifierProvider(Protocol):
    """Anything that labels a batch of texts for a classification task."""

    def classify(self, task: str,
                 texts: Sequence[str]) -> list[tuple[str, float]]:
        """Return one (label, score) pair per text, in input order."""
        ...


class LexiconClassifier:
    """Deterministic keyword classifier used as an offline stand-in.

    Rules are checked in order against the lowercased text and the first
    substring hit wins; texts matching no rule are neutral.
    """

    EMOTION_RULES: tuple[tuple[str, str], ...] = (
        ("unfortunately", "disappointment"),
        ("thank", "gratitude"),
        ("approv", "approval"),
        ("curious", "curiosity"),
    )
    POLARITY_RULES: tuple[tuple[str, str], ...] = (
        ("declines", "negative"),
        ("threat", "negative"),
        ("improves", "positive"),
        ("sustainable", "positive"),
    )

    def classify(self, task: str,
                 texts: Sequence[str]) -> list[tuple[str, float]]:
        if task == TASK_EMOTION:
            rules = self.EMOTION_RULES
        elif task == TASK_POLARITY:
            rules = self.POLARITY_RULES
        else:
            raise ValueError(f"unknown classification task: {task!r}")
        out = []
        for text in texts:
            lowered = text.lower()
            label = NEUTRAL_LABEL
            for needle, assigned in rules:
                if needle in lowered:
                    label = assigned
                    break
            out.append((label, 1.0))
        return out


class HttpClassifierProvider:
    """Provider speaking the classifier wire protocol.

    POST {url}/classify with {"task": ..., "texts": [...]} and expect
    {"labels": [{"label": ..., "score": ...}, ...]}. Connection failures,
    non-200 responses, and malformed bodies surface as ProviderUnavailable.
    """

    def __init__(self, url: str, timeout: float = DEFAULT_HTTP_TIMEOUT,
                 client: httpx.Client | None = None):
        self.url = url.rstrip("/")
        self._client = client or httpx.Client(timeout=timeout)

    def classify(self, task: str,
                 texts: Sequence[str]) -> list[tuple[str, float]]:
        try:
            resp = self._client.post(f"{self.url}/classify",
                                     json={"task": task, "texts": list(texts)})
        except httpx.HTTPError as exc:
            raise ProviderUnavailable(f"classifier {self.url}: {exc}") from exc
        if resp.status_code != 200:
            detail = _error_detail(resp)
            raise ProviderUnavailable(
                f"classifier {self.url} returned {resp.status_code}: {detail}")
        labels = resp.json().get("labels")
        if labels is None or len(labels) != len(texts):
            raise ProviderUnavailable(f"classifier {self.url}: malformed response")
        out = []
        for entry in labels:
            if not isinstance(entry, dict) or "label" not in entry or "score" not in entry:
                raise ProviderUnavailable(
                    f"classifier {self.url}: malformed label entry")
            out.append((str(entry["label"]), float(entry["score"])))
        return out


def _error_detail(resp: httpx.Response) -> str:
    try:
        return str(resp.json().get("error", resp.text))
    except ValueError:
        return resp.text


def classify_emotions(provider: ClassifierProvider,
                      texts: Sequence[str]) -> list[EmotionLabel]:
    """Label each text with one of the 27 emotions or neutral."""
    pairs = provider.classify(TASK_EMOTION, texts)
    if len(pairs) != len(texts):
        raise ProviderUnavailable(
            f"classifier returned {len(pairs)} labels for {len(texts)} texts")
    return [EmotionLabel(label=label, score=score) for label, score in pairs]


def classify_polarity(provider: ClassifierProvider,
                      texts: Sequence[str]) -> list[PolarityLabel]:
    """Label each text negative, positive, or neutral."""
    pairs = provider.classify(TASK_POLARITY, texts)
    if len(pairs) != len(texts):
        raise ProviderUnavailable(
            f"classifier returned {len(pairs)} labels for {len(texts)} texts")
    return [PolarityLabel(label=label, score=score) for label, score in pairs]


def emotion_pipeline(
    labeled: Iterable[tuple[int, EmotionLabel]],
    min_support: int = DEFAULT_MIN_SUPPORT,
    drop: frozenset[str] = DEFAULT_DROP_LABELS,
) -> EmotionBreakdown:
    """Aggregate labeled sentences into a support-filtered histogram.

    Labels in ``drop`` are discarded outright; of the rest, only labels
    backed by strictly more than ``min_support`` sentences survive. The
    result lists surviving labels by descending count (ties by label) with
    ascending sid lists.
    """
    by_label: dict[str, list[int]] = {}
    for sid, assigned in labeled:
        by_label.setdefault(assigned.label, []).append(int(sid))
    survivors: dict[str, tuple[int, ...]] = {}
    for label in sorted(by_label, key=lambda name: (-len(by_label[name]), name)):
        sids = by_label[label]
        if label in drop or len(sids) <= min_support:
            continue
        survivors[label] = tuple(sorted(sids))
    counts = {label: len(sids) for label, sids in survivors.items()}
    histogram = EmotionHistogram(counts=counts, total=sum(counts.values()))
    return EmotionBreakdown(histogram=histogram, sids_by_label=survivors)


def polarity_partition_and_cluster(
    corpus: Corpus,
    classifier: ClassifierProvider,
    store: VectorStore,
    polarity: str,
    keyword_query: KeywordQuery | None = None,
    params: ClusterParams | None = None,
) -> list[Cluster]:
    """Cluster the keyword-matched sentences carrying one polarity label.

    Matched sentences are classified in sid order; those labeled
    ``polarity`` are agglomerated using the store's vectors. Sentences
    absent from the store are ignored.
    """
    if polarity not in POLARITY_LABELS:
        raise UnknownLabel(f"not a polarity label: {polarity!r}")
    if params is None:
        params = DEFAULT_POLARITY_CLUSTER_PARAMS
    matched = candidate_sids(corpus, keyword_query)
    in_store = set(int(s) for s in store.sids.tolist())
    sids = [s for s in matched if s in in_store]
    if not sids:
        return []
    labels = classify_polarity(
        classifier, [corpus.record(sid).text for sid in sids])
    selected = [sid for sid, assigned in zip(sids, labels)
                if assigned.label == polarity]
    if not selected:
        return []
    positions = np.searchsorted(store.sids, np.asarray(selected, dtype=np.uint64))
    rows = store.matrix[positions]
    if not store.normalized:
        rows = rows.astype(np.float64)
        norms = np.linalg.norm(rows, axis=1, keepdims=True)
        norms[norms == 0.0] = 1.0
        rows = rows / norms
    return agglomerate(rows, selected, params)
