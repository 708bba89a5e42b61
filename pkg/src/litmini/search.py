"""Ensemble semantic search across the registered models.

Every model scores the same candidate set; the ensemble score is the plain
arithmetic mean, with per-sentence population variance and per-model
influence shares reported alongside. Selection helpers implement the strict
score threshold, top-N capping, and score bucketing used for reporting.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .corpus import KIND_BODY, KIND_CAPTION, Corpus, SentenceRecord
from .embed import ModelRegistry, normalize
from .errors import (
    BadEdges,
    DegenerateMatrix,
    EmptyQuery,
    EmptyScores,
    NoCandidates,
    NoCaptionIndex,
    UnknownModel,
)
from .index import KeywordQuery, VectorStore, keyword_filter, score_rows, top_k

DEFAULT_MIN_SCORE = 0.7
DEFAULT_MAX_SELECTION = 5000
DEFAULT_BUCKET_EDGES = (1.0, 0.8, 0.75, 0.7)


@dataclass
class SearchHit:
    sid: int
    per_model_scores: dict[str, float]
    ensemble_score: float
    variance: float
    rank: int


@dataclass(frozen=True)
class InfluenceReport:
    """Percentage of total score deviation contributed by each model."""

    shares: dict[str, float]


def embed_query(registry: ModelRegistry, model_abbr: str, text: str,
                unit: bool = True) -> np.ndarray:
    """Embed one query text, optionally unit-normalized to match stores."""
    if not text.strip():
        raise EmptyQuery("query text is empty")
    vector = registry.embed_batch(model_abbr, [text])[0]
    if unit:
        vector = normalize(vector)
    return vector


def _stores_by_abbr(stores) -> dict[str, VectorStore]:
    if isinstance(stores, Mapping):
        return dict(stores)
    return {s.model_abbr: s for s in stores}


def candidate_sids(
    corpus: Corpus,
    keyword_query: KeywordQuery | None = None,
    journal: str | None = None,
    years: tuple[int, int] | None = None,
    kind: str = KIND_BODY,
) -> list[int]:
    """Sentence ids passing the keyword prefilter and metadata filters."""
    if keyword_query is not None:
        sids = keyword_filter(corpus, keyword_query, kind=kind)
    else:
        sids = corpus.sids(kind=kind)
    if journal is None and years is None:
        return sids
    out = []
    for sid in sids:
        meta = corpus.meta_for(sid)
        if journal is not None and meta.journal_abbr != journal:
            continue
        if years is not None and not years[0] <= meta.year <= years[1]:
            continue
        out.append(sid)
    return out


def ensemble_search(
    corpus: Corpus,
    registry: ModelRegistry,
    stores: Mapping[str, VectorStore] | Sequence[VectorStore],
    query_text: str,
    models: Sequence[str] | None = None,
    k: int = 10,
    keyword_query: KeywordQuery | None = None,
    journal: str | None = None,
    years: tuple[int, int] | None = None,
    standardize: bool = False,
) -> list[SearchHit]:
    """Rank candidates by mean per-model inner product with the query.

    All models score the same candidate set: the keyword/metadata filtered
    body sentences present in every participating store. Models are combined
    in sorted-abbreviation order, so any permutation of the model list gives
    bit-identical results. With standardize=True each model's scores are
    z-scored over the candidate set before averaging (off by default: raw
    scores are averaged, matching normal usage).
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    corpus.require_nonempty()
    store_map = _stores_by_abbr(stores)
    chosen = sorted(set(models)) if models is not None else sorted(store_map)
    if not chosen:
        raise UnknownModel("no models selected")
    for abbr in chosen:
        registry.spec(abbr)
        if abbr not in store_map:
            raise UnknownModel(f"no vector store supplied for model {abbr!r}")
    sids = candidate_sids(corpus, keyword_query, journal, years)
    restrict = set(sids)
    for abbr in chosen:
        restrict &= set(int(s) for s in store_map[abbr].sids.tolist())
    if not restrict:
        raise NoCandidates("no candidate sentences match the filters")
    ordered_sids = np.asarray(sorted(restrict), dtype=np.uint64)
    score_matrix = np.empty((len(chosen), len(ordered_sids)), dtype=np.float64)
    for row, abbr in enumerate(chosen):
        store = store_map[abbr]
        query = embed_query(registry, abbr, query_text, unit=store.normalized)
        positions = np.searchsorted(store.sids, ordered_sids)
        score_matrix[row] = score_rows(store.matrix[positions], query)
    if standardize:
        means = score_matrix.mean(axis=1, keepdims=True)
        stds = score_matrix.std(axis=1, keepdims=True)
        stds[stds == 0.0] = 1.0
        score_matrix = (score_matrix - means) / stds
    ensemble = score_matrix.mean(axis=0)
    variance = score_matrix.var(axis=0)
    order = np.lexsort((ordered_sids, -ensemble))[:k]
    hits = []
    for rank, idx in enumerate(order, start=1):
        hits.append(SearchHit(
            sid=int(ordered_sids[idx]),
            per_model_scores={abbr: float(score_matrix[row, idx])
                              for row, abbr in enumerate(chosen)},
            ensemble_score=float(ensemble[idx]),
            variance=float(variance[idx]),
            rank=rank,
        ))
    return hits


def score_variance(scores: Sequence[float]) -> float:
    """Population variance (divide by n) of one sentence's per-model scores."""
    values = np.asarray(list(scores), dtype=np.float64)
    if values.size == 0:
        raise EmptyScores("variance needs at least one score")
    return float(values.var())


def model_influence(score_matrix: np.ndarray,
                    model_abbrs: Sequence[str]) -> InfluenceReport:
    """Share of total L2 deviation from the mean score, per model.

    For each model m, d_m is the L2 norm over sentences of (score_m - column
    mean); shares are d_m normalized to percentages. When every deviation is
    zero the shares are uniform.
    """
    matrix = np.asarray(score_matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] < 2:
        raise DegenerateMatrix("influence needs a models x sentences matrix with >= 2 models")
    if matrix.shape[1] < 1:
        raise DegenerateMatrix("influence needs at least one sentence column")
    if matrix.shape[0] != len(model_abbrs):
        raise DegenerateMatrix(
            f"{len(model_abbrs)} model names for {matrix.shape[0]} score rows")
    deviations = np.linalg.norm(matrix - matrix.mean(axis=0), axis=1)
    total = float(deviations.sum())
    if total == 0.0:
        share = 100.0 / matrix.shape[0]
        return InfluenceReport({abbr: share for abbr in model_abbrs})
    # Ratio before scaling: d/total is exact for two equal deviations, so a
    # symmetric pair of models reports exactly 50.0 each.
    return InfluenceReport({
        abbr: float(100.0 * (d / total)) for abbr, d in zip(model_abbrs, deviations)
    })


def influence_from_hits(hits: Sequence[SearchHit]) -> InfluenceReport:
    """Influence report over the per-model scores carried by ranked hits."""
    if not hits:
        raise DegenerateMatrix("influence needs at least one hit")
    abbrs = sorted(hits[0].per_model_scores)
    matrix = np.array([[h.per_model_scores[a] for h in hits] for a in abbrs])
    return model_influence(matrix, abbrs)


def threshold_select(hits: Sequence[SearchHit],
                     min_score: float = DEFAULT_MIN_SCORE,
                     max_n: int = DEFAULT_MAX_SELECTION) -> list[SearchHit]:
    """Hits scoring strictly above min_score, capped to the first max_n."""
    return [h for h in hits if h.ensemble_score > min_score][:max_n]


def hit_json(corpus: Corpus, hit: SearchHit) -> dict:
    """Wire shape of one ranked hit."""
    record = corpus.record(hit.sid)
    meta = corpus.meta_for(hit.sid)
    return {
        "sid": hit.sid,
        "text": record.text,
        "journal": meta.journal_abbr,
        "year": meta.year,
        "doc": record.doc_id,
        "scores": {abbr: float(score)
                   for abbr, score in sorted(hit.per_model_scores.items())},
        "ensemble": float(hit.ensemble_score),
        "variance": float(hit.variance),
        "rank": hit.rank,
    }


@dataclass(frozen=True)
class ScoreBucket:
    hi: float
    lo: float
    count: int
    closed_top: bool

    @property
    def label(self) -> str:
        closer = "]" if self.closed_top else ")"
        return f"[{self.lo:g},{self.hi:g}{closer}"


def score_buckets(hits: Sequence[SearchHit],
                  edges: Sequence[float] = DEFAULT_BUCKET_EDGES) -> list[ScoreBucket]:
    """Count hits into half-open buckets between descending edges.

    Bucket i spans [edges[i+1], edges[i]); the top bucket is closed at its
    upper edge so a perfect score is counted. Hits below the lowest edge are
    not counted anywhere.
    """
    edges = [float(e) for e in edges]
    if len(edges) < 2:
        raise BadEdges("need at least two edges")
    if any(b >= a for a, b in zip(edges, edges[1:])):
        raise BadEdges(f"edges must be strictly descending, got {edges}")
    if edges[0] > 1.0 + 1e-6 or edges[-1] < -1.0 - 1e-6:
        raise BadEdges(f"edges must lie within [-1, 1], got {edges}")
    counts = [0] * (len(edges) - 1)
    for hit in hits:
        s = hit.ensemble_score
        if s < edges[-1]:
            continue
        for i in range(1, len(edges)):
            if s >= edges[i]:
                counts[i - 1] += 1
                break
    return [ScoreBucket(hi=edges[i], lo=edges[i + 1], count=counts[i],
                        closed_top=(i == 0))
            for i in range(len(edges) - 1)]


def caption_search(
    corpus: Corpus,
    store: VectorStore | None,
    registry: ModelRegistry,
    query_text: str,
    k: int = 10,
) -> list[tuple[str | None, SentenceRecord, float]]:
    """Rank caption records against the query; results carry asset paths.

    Ranking semantics are exactly those of top_k over the caption store.
    """
    if store is None or store.count == 0:
        raise NoCaptionIndex("no caption index available")
    query = embed_query(registry, store.model_abbr, query_text, unit=store.normalized)
    out = []
    for sid, score in top_k(store, query, k):
        rec = corpus.record(sid)
        if rec.kind != KIND_CAPTION:
            raise NoCaptionIndex(f"store row sid {sid} is not a caption record")
        out.append((rec.asset, rec, score))
    return out
