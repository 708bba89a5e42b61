"""Classification providers, histogram filtering, polarity clustering."""

import numpy as np
import pytest

from conftest import closed_port_url, corpus_from_docs
from litmini.cluster import ClusterParams, agglomerate
from litmini.embed import default_registry
from litmini.errors import ProviderUnavailable, UnknownLabel
from litmini.index import KeywordQuery, build_store
from litmini.sentiment import (
    DEFAULT_DROP_LABELS,
    DEFAULT_MIN_SUPPORT,
    DEFAULT_POLARITY_CLUSTER_PARAMS,
    EMOTION_CLASSES,
    EMOTION_LABELS,
    POLARITY_CLASSES,
    EmotionHistogram,
    EmotionLabel,
    HttpClassifierProvider,
    LexiconClassifier,
    PolarityLabel,
    classify_emotions,
    classify_polarity,
    emotion_pipeline,
    polarity_partition_and_cluster,
)


# -- label registries and types ----------------------------------------------

def test_emotion_registry_has_27_classes_plus_neutral():
    assert len(EMOTION_CLASSES) == 27
    assert "neutral" not in EMOTION_CLASSES
    assert len(EMOTION_LABELS) == 28
    for expected in ("admiration", "confusion", "approval", "disappointment"):
        assert expected in EMOTION_CLASSES


def test_polarity_registry():
    assert set(POLARITY_CLASSES) == {"negative", "positive", "neutral"}


def test_emotion_label_validation():
    EmotionLabel(label="joy", score=0.5)
    EmotionLabel(label="neutral", score=1.0)
    with pytest.raises(UnknownLabel):
        EmotionLabel(label="joyfulness", score=0.5)
    with pytest.raises(ValueError):
        EmotionLabel(label="joy", score=1.5)
    with pytest.raises(ValueError):
        EmotionLabel(label="joy", score=-0.1)


def test_polarity_label_validation():
    PolarityLabel(label="negative", score=0.9)
    with pytest.raises(UnknownLabel):
        PolarityLabel(label="sad", score=0.9)


def test_histogram_invariants():
    EmotionHistogram(counts={"joy": 2, "fear": 1}, total=3)
    with pytest.raises(ValueError):
        EmotionHistogram(counts={"joy": 2}, total=3)
    with pytest.raises(ValueError):
        EmotionHistogram(counts={"joy": -1}, total=-1)


# -- lexicon double ----------------------------------------------------------

def test_lexicon_emotion_rules():
    out = LexiconClassifier().classify("emotion", [
        "Unfortunately the station failed.",
        "We thank the funding agency.",
        "The board approves the plan.",
        "A curious pattern emerged.",
        "Plain statement of fact.",
    ])
    assert [label for label, _ in out] == [
        "disappointment", "gratitude", "approval", "curiosity", "neutral"]
    assert all(score == 1.0 for _, score in out)


def test_lexicon_emotion_first_match_wins():
    out = LexiconClassifier().classify(
        "emotion", ["Unfortunately we thank nobody."])
    assert out[0][0] == "disappointment"


def test_lexicon_polarity_rules():
    out = LexiconClassifier().classify("polarity", [
        "Snowpack declines rapidly.",
        "Drought is a growing threat.",
        "Water storage improves here.",
        "A sustainable outcome was reached.",
        "Plain statement of fact.",
    ])
    assert [label for label, _ in out] == [
        "negative", "negative", "positive", "positive", "neutral"]


def test_lexicon_polarity_negative_takes_priority():
    out = LexiconClassifier().classify(
        "polarity", ["Supply declines even as efficiency improves."])
    assert out[0][0] == "negative"


def test_lexicon_rejects_unknown_task():
    with pytest.raises(ValueError):
        LexiconClassifier().classify("stance", ["text"])


# -- classify operations -----------------------------------------------------

def test_classify_preserves_length_and_order():
    texts = ["Unfortunately rain.", "We thank you.", "Nothing here."]
    labels = classify_emotions(LexiconClassifier(), texts)
    assert len(labels) == 3
    assert [l.label for l in labels] == ["disappointment", "gratitude", "neutral"]


def test_classify_rejects_unknown_provider_label(fresh_provider):
    fresh_provider.classify_fn = lambda task, texts: [
        {"label": "joyfulness", "score": 0.5} for _ in texts]
    provider = HttpClassifierProvider(fresh_provider.url)
    with pytest.raises(UnknownLabel):
        classify_emotions(provider, ["some text"])


def test_classify_polarity_shape():
    labels = classify_polarity(LexiconClassifier(), ["a", "b"])
    assert [l.label for l in labels] == ["neutral", "neutral"]


# -- wire protocol -----------------------------------------------------------

def test_http_round_trip_matches_local_lexicon(fresh_provider):
    lexicon = LexiconClassifier()
    fresh_provider.classify_fn = lambda task, texts: [
        {"label": label, "score": score}
        for label, score in lexicon.classify(task, texts)]
    provider = HttpClassifierProvider(fresh_provider.url)
    texts = [
        "Unfortunately the gauge broke.",
        "Runoff improves downstream.",
        "We thank reviewers.",
        "Plain words.",
    ]
    via_wire = classify_emotions(provider, texts)
    local = classify_emotions(lexicon, texts)
    assert via_wire == local
    polarity_wire = classify_polarity(provider, texts)
    polarity_local = classify_polarity(lexicon, texts)
    assert polarity_wire == polarity_local


def test_http_request_payload_shape(fresh_provider):
    provider = HttpClassifierProvider(fresh_provider.url)
    classify_emotions(provider, ["one", "two"])
    path, payload = fresh_provider.requests[-1]
    assert path == "/classify"
    assert payload == {"task": "emotion", "texts": ["one", "two"]}


def test_http_unreachable_raises_provider_unavailable():
    provider = HttpClassifierProvider(closed_port_url(), timeout=0.5)
    with pytest.raises(ProviderUnavailable):
        classify_polarity(provider, ["text"])


def test_http_error_status_raises_provider_unavailable(fresh_provider):
    fresh_provider.fail_with = 503
    provider = HttpClassifierProvider(fresh_provider.url)
    with pytest.raises(ProviderUnavailable):
        classify_emotions(provider, ["text"])


def test_http_malformed_count_raises_provider_unavailable(fresh_provider):
    fresh_provider.classify_fn = lambda task, texts: [
        {"label": "neutral", "score": 1.0}]
    provider = HttpClassifierProvider(fresh_provider.url)
    with pytest.raises(ProviderUnavailable):
        classify_emotions(provider, ["one", "two"])


# -- emotion pipeline --------------------------------------------------------

def _labeled(counts):
    labeled = []
    sid = 0
    for label, count in counts.items():
        for _ in range(count):
            labeled.append((sid, EmotionLabel(label=label, score=1.0)))
            sid += 1
    return labeled


def test_pipeline_support_and_drop_filtering():
    labeled = _labeled({
        "approval": 4787,
        "disappointment": 1133,
        "gratitude": 2000,
        "neutral": 50000,
        "curiosity": 99,
    })
    breakdown = emotion_pipeline(labeled)
    assert breakdown.histogram.counts == {
        "approval": 4787, "disappointment": 1133}
    assert breakdown.histogram.total == 4787 + 1133
    assert set(breakdown.sids_by_label) == {"approval", "disappointment"}


def test_pipeline_all_neutral_empty():
    breakdown = emotion_pipeline(_labeled({"neutral": 300}))
    assert breakdown.histogram.counts == {}
    assert breakdown.histogram.total == 0
    assert breakdown.sids_by_label == {}


def test_pipeline_identity_with_no_filtering():
    labeled = _labeled({"joy": 3, "fear": 2, "neutral": 1, "gratitude": 1})
    breakdown = emotion_pipeline(labeled, min_support=0, drop=frozenset())
    assert breakdown.histogram.counts == {
        "joy": 3, "fear": 2, "neutral": 1, "gratitude": 1}
    assert breakdown.histogram.total == 7


def test_pipeline_support_bar_is_strict():
    breakdown = emotion_pipeline(_labeled({"joy": 100, "fear": 101}),
                                 min_support=100)
    assert breakdown.histogram.counts == {"fear": 101}


def test_pipeline_never_emits_dropped_or_undersupported():
    rng = np.random.default_rng(7)
    pool = list(EMOTION_CLASSES) + ["neutral"]
    for _ in range(25):
        labeled = [
            (sid, EmotionLabel(label=pool[int(rng.integers(len(pool)))], score=1.0))
            for sid in range(200)
        ]
        support = int(rng.integers(0, 20))
        breakdown = emotion_pipeline(labeled, min_support=support)
        for label, sids in breakdown.sids_by_label.items():
            assert label not in DEFAULT_DROP_LABELS
            assert len(sids) > support
            assert list(sids) == sorted(sids)
        assert breakdown.histogram.total == sum(
            len(s) for s in breakdown.sids_by_label.values())


def test_pipeline_orders_by_descending_count_then_label():
    labeled = _labeled({"fear": 5, "joy": 5, "anger": 7})
    breakdown = emotion_pipeline(labeled, min_support=0, drop=frozenset())
    assert list(breakdown.histogram.counts) == ["anger", "fear", "joy"]


def test_pipeline_defaults():
    assert DEFAULT_MIN_SUPPORT == 100
    assert DEFAULT_DROP_LABELS == frozenset({"neutral", "gratitude"})


# -- polarity partition and clustering ---------------------------------------

def polarity_fixture():
    negatives = [
        f"Snowpack declines across basin {chr(65 + i)} during spring." for i in range(4)
    ]
    positives = [
        "Reservoir management improves supply outcomes regionally.",
        "A sustainable allocation plan was adopted this year.",
    ]
    filler = ["An unrelated measurement note for completeness."]
    corpus = corpus_from_docs([
        ("WRes-2021-Basin study", "WRes", 2021, negatives + positives + filler),
    ])
    registry = default_registry()
    store = build_store(corpus, corpus.sids(kind="body"), registry, "PSTM_1")
    return corpus, store


def test_negative_partition_forms_one_cluster():
    corpus, store = polarity_fixture()
    clusters = polarity_partition_and_cluster(
        corpus, LexiconClassifier(), store, "negative",
        params=ClusterParams(min_similarity=0.5, min_cluster_count=4))
    assert len(clusters) == 1
    assert clusters[0].member_sids == (0, 1, 2, 3)


def test_partition_members_carry_requested_polarity():
    corpus, store = polarity_fixture()
    lexicon = LexiconClassifier()
    clusters = polarity_partition_and_cluster(
        corpus, lexicon, store, "negative",
        params=ClusterParams(min_similarity=0.5, min_cluster_count=1))
    member_sids = [s for c in clusters for s in c.member_sids]
    labels = classify_polarity(
        lexicon, [corpus.record(s).text for s in member_sids])
    assert all(l.label == "negative" for l in labels)


def test_zero_match_polarity_returns_empty():
    corpus, store = polarity_fixture()
    lexicon = LexiconClassifier()
    only_neutral_filter = KeywordQuery(groups=(("unrelated",),))
    clusters = polarity_partition_and_cluster(
        corpus, lexicon, store, "negative", keyword_query=only_neutral_filter,
        params=ClusterParams(min_similarity=0.5, min_cluster_count=1))
    assert clusters == []


def test_pipeline_equals_manual_composition():
    corpus, store = polarity_fixture()
    lexicon = LexiconClassifier()
    kq = KeywordQuery(groups=(("basin", "supply", "plan", "note"),))
    params = ClusterParams(min_similarity=0.3, min_cluster_count=1)
    got = polarity_partition_and_cluster(
        corpus, lexicon, store, "positive", keyword_query=kq, params=params)

    from litmini.search import candidate_sids
    matched = candidate_sids(corpus, kq)
    labels = classify_polarity(lexicon, [corpus.record(s).text for s in matched])
    selected = [s for s, l in zip(matched, labels) if l.label == "positive"]
    positions = np.searchsorted(store.sids, np.asarray(selected, dtype=np.uint64))
    want = agglomerate(store.matrix[positions], selected, params)
    assert [c.member_sids for c in got] == [c.member_sids for c in want]


def test_unknown_polarity_rejected():
    corpus, store = polarity_fixture()
    with pytest.raises(UnknownLabel):
        polarity_partition_and_cluster(
            corpus, LexiconClassifier(), store, "sad")


def test_default_cluster_params():
    assert DEFAULT_POLARITY_CLUSTER_PARAMS.min_similarity == 0.85
    assert DEFAULT_POLARITY_CLUSTER_PARAMS.min_cluster_count == 10


def test_default_size_floor_applies():
    texts = [
        f"Snowpack declines across alpine basin number {i} every winter season noticeably."
        for i in range(12)
    ]
    corpus = corpus_from_docs([("WRes-2021-Decline", "WRes", 2021, texts)])
    registry = default_registry()
    store = build_store(corpus, corpus.sids(kind="body"), registry, "PSTM_1")
    clusters = polarity_partition_and_cluster(
        corpus, LexiconClassifier(), store, "negative")
    assert len(clusters) == 1
    assert clusters[0].size == 12
