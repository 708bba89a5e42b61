"""Threshold-driven agglomerative clustering of sentence embeddings.

Bottom-up merging over cosine similarity: start from singletons and keep
merging the most similar pair of clusters while that similarity reaches the
configured threshold. Average linkage updates use the exact size-weighted
recurrence, so each cluster pair's similarity equals the mean pairwise
similarity of its members (complete linkage tracks the minimum instead).
All ties are resolved on sentence ids, never on input order, so results are
deterministic for a given input set.

The similarity matrix is materialized in full and every merge rescans it;
that is quadratic memory and roughly cubic time in the worst case, which is
fine at the intended input sizes (thousands of points) and guarded by an
explicit cap beyond that.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .corpus import Corpus, SentenceRecord
from .errors import EmptyInput, InputTooLarge
from .index import KeywordQuery, VectorStore
from .search import candidate_sids

MAX_POINTS = 50_000
TIE_TOLERANCE = 1e-12

LINKAGE_AVERAGE = "average"
LINKAGE_COMPLETE = "complete"

DEFAULT_MIN_SIMILARITY = 0.7
DEFAULT_MIN_CLUSTER_COUNT = 10


@dataclass(frozen=True)
class ClusterParams:
    min_similarity: float = DEFAULT_MIN_SIMILARITY
    min_cluster_count: int = DEFAULT_MIN_CLUSTER_COUNT
    linkage: str = LINKAGE_AVERAGE

    def __post_init__(self):
        if not -1.0 <= self.min_similarity <= 1.0:
            raise ValueError(f"min_similarity {self.min_similarity} outside [-1, 1]")
        if self.min_cluster_count < 1:
            raise ValueError(f"min_cluster_count must be >= 1, got {self.min_cluster_count}")
        if self.linkage not in (LINKAGE_AVERAGE, LINKAGE_COMPLETE):
            raise ValueError(f"unknown linkage {self.linkage!r}")


@dataclass(frozen=True)
class MergeStep:
    """One merge: the linkage similarity and the two clusters' smallest sids."""

    similarity: float
    left_min_sid: int
    right_min_sid: int
    merged_size: int


@dataclass
class Cluster:
    cluster_id: int
    member_sids: tuple[int, ...]
    centroid: np.ndarray

    @property
    def size(self) -> int:
        return len(self.member_sids)


def agglomerate_trace(
    vectors: np.ndarray,
    sids: Sequence[int],
    params: ClusterParams,
) -> tuple[list[list[int]], list[MergeStep]]:
    """Run the merge loop; return the raw partition and the merge log.

    The partition contains every cluster regardless of size (the size floor
    is applied by agglomerate). Vectors are expected unit-normalized so the
    inner product is cosine similarity.

    Among pairs whose linkage similarity ties within 1e-12 of the best, the
    merged pair is the one whose (smaller min sid, larger min sid) key is
    smallest; for disjoint clusters of one partition that picks the same
    pair as comparing sorted member unions lexicographically.
    """
    sids = [int(s) for s in sids]
    n = len(sids)
    if n == 0:
        raise EmptyInput("clustering needs at least one vector")
    if n > MAX_POINTS:
        raise InputTooLarge(
            f"{n} points exceed the {MAX_POINTS}-point ceiling; "
            f"narrow the selection before clustering")
    if len(set(sids)) != n:
        raise ValueError("duplicate sids in clustering input")
    matrix = np.asarray(vectors, dtype=np.float64)
    if matrix.shape[0] != n:
        raise ValueError(f"{matrix.shape[0]} vectors for {n} sids")
    sim = matrix @ matrix.T
    np.fill_diagonal(sim, -np.inf)

    members: list[list[int] | None] = [[s] for s in sids]
    min_sid = list(sids)
    sizes = [1] * n
    active = [True] * n
    n_active = n
    log: list[MergeStep] = []

    while n_active >= 2:
        best = float(sim.max())
        if best < params.min_similarity:
            break
        rows, cols = np.nonzero(sim >= best - TIE_TOLERANCE)
        pair = None
        pair_key = None
        for i, j in zip(rows.tolist(), cols.tolist()):
            if i >= j:
                continue
            a, b = min_sid[i], min_sid[j]
            key = (a, b) if a < b else (b, a)
            if pair_key is None or key < pair_key:
                pair_key = key
                pair = (i, j)
        i, j = pair
        chosen_sim = float(sim[i, j])
        # fold j into i
        if params.linkage == LINKAGE_AVERAGE:
            merged_row = (sizes[i] * sim[i] + sizes[j] * sim[j]) / (sizes[i] + sizes[j])
        else:
            merged_row = np.minimum(sim[i], sim[j])
        sim[i, :] = merged_row
        sim[:, i] = merged_row
        sim[i, i] = -np.inf
        sim[j, :] = -np.inf
        sim[:, j] = -np.inf
        members[i] = sorted(members[i] + members[j])
        members[j] = None
        sizes[i] += sizes[j]
        min_sid[i] = min(min_sid[i], min_sid[j])
        active[j] = False
        n_active -= 1
        log.append(MergeStep(
            similarity=chosen_sim,
            left_min_sid=pair_key[0],
            right_min_sid=pair_key[1],
            merged_size=sizes[i],
        ))

    partition = [members[i] for i in range(n) if active[i]]
    partition.sort(key=lambda m: m[0])
    return partition, log


def _centroid(rows: np.ndarray) -> np.ndarray:
    mean = rows.astype(np.float64).mean(axis=0)
    norm = float(np.linalg.norm(mean))
    if norm < 1e-12:
        out = np.zeros(rows.shape[1], dtype=np.float32)
        out[0] = 1.0
        return out
    return (mean / norm).astype(np.float32)


def agglomerate(
    vectors: np.ndarray,
    sids: Sequence[int],
    params: ClusterParams,
) -> list[Cluster]:
    """Cluster unit vectors; drop undersized clusters; assign stable ids.

    Ids are 1-based in descending size order, ties by ascending smallest
    member sid. Centroids are unit-normalized member means (a mean that
    cancels to zero falls back to the first basis vector).
    """
    matrix = np.asarray(vectors, dtype=np.float64)
    partition, _ = agglomerate_trace(matrix, sids, params)
    row_of = {int(s): idx for idx, s in enumerate(sids)}
    survivors = [m for m in partition if len(m) >= params.min_cluster_count]
    survivors.sort(key=lambda m: (-len(m), m[0]))
    clusters = []
    for cid, member in enumerate(survivors, start=1):
        rows = matrix[[row_of[s] for s in member]]
        clusters.append(Cluster(
            cluster_id=cid,
            member_sids=tuple(member),
            centroid=_centroid(rows),
        ))
    return clusters


def top_clusters(clusters: Sequence[Cluster], n: int) -> list[Cluster]:
    """First n clusters in id order (ids already encode the size ranking)."""
    return list(clusters[:max(0, n)])


def representatives(
    cluster: Cluster,
    corpus: Corpus,
    vectors: np.ndarray,
    sids: Sequence[int],
    m: int,
) -> list[SentenceRecord]:
    """The m member sentences nearest the centroid, ties by ascending sid."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    row_of = {int(s): idx for idx, s in enumerate(sids)}
    centroid = cluster.centroid.astype(np.float64)
    scored = []
    for sid in cluster.member_sids:
        score = float(np.einsum("j,j->", np.asarray(vectors[row_of[sid]], dtype=np.float64),
                                centroid))
        scored.append((sid, score))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return [corpus.record(sid) for sid, _ in scored[:m]]


@dataclass
class TrendEntry:
    year: int
    total_points: int
    clusters: list[Cluster] = field(default_factory=list)


@dataclass
class TrendSeries:
    entries: list[TrendEntry] = field(default_factory=list)


def _unit_rows(rows: np.ndarray) -> np.ndarray:
    rows = rows.astype(np.float64)
    norms = np.linalg.norm(rows, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return rows / norms


def yearly_trends(
    corpus: Corpus,
    store: VectorStore,
    params: ClusterParams,
    keyword_query: KeywordQuery | None = None,
    top_n: int = 10,
) -> TrendSeries:
    """Cluster matched sentences independently for every year in the corpus.

    The series covers every year from the corpus's earliest to its latest
    document, including years with no matches (total_points 0, no clusters).
    Vectors come from the supplied store; matches missing from it are
    ignored.
    """
    corpus.require_nonempty()
    matched = candidate_sids(corpus, keyword_query)
    in_store = set(int(s) for s in store.sids.tolist())
    matched = [s for s in matched if s in in_store]
    years = [meta.year for meta in corpus.docs.values()]
    series = TrendSeries()
    by_year: dict[int, list[int]] = {}
    for sid in matched:
        by_year.setdefault(corpus.meta_for(sid).year, []).append(sid)
    for year in range(min(years), max(years) + 1):
        year_sids = by_year.get(year, [])
        entry = TrendEntry(year=year, total_points=len(year_sids))
        if year_sids:
            positions = np.searchsorted(store.sids, np.asarray(year_sids, dtype=np.uint64))
            rows = store.matrix[positions]
            if not store.normalized:
                rows = _unit_rows(rows)
            entry.clusters = top_clusters(agglomerate(rows, year_sids, params), top_n)
        series.entries.append(entry)
    return series


def planar_projection(vectors: np.ndarray) -> np.ndarray:
    """Project rows onto their two leading principal directions.

    Visualization aid only; coordinates carry no search or clustering
    semantics. Degenerate inputs yield zero-filled columns. Component signs
    are fixed so the largest-magnitude loading is positive.
    """
    rows = np.asarray(vectors, dtype=np.float64)
    if rows.ndim != 2:
        raise ValueError("vectors must be a 2-D array")
    out = np.zeros((rows.shape[0], 2))
    if rows.shape[0] == 0 or rows.shape[1] == 0:
        return out
    centered = rows - rows.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    for component in range(min(2, vt.shape[0])):
        axis = vt[component]
        if axis[int(np.argmax(np.abs(axis)))] < 0:
            axis = -axis
        out[:, component] = centered @ axis
    return out


def projection_points(clusters: Sequence[Cluster],
                      store: VectorStore) -> list[tuple[int, float, float, int]]:
    """(sid, x, y, cluster_id) scatter rows for the clustered members.

    Every member sid must be present in the store.
    """
    members = [(sid, c.cluster_id) for c in clusters for sid in c.member_sids]
    if not members:
        return []
    sids = np.asarray([sid for sid, _ in members], dtype=np.uint64)
    coords = planar_projection(store.matrix[np.searchsorted(store.sids, sids)])
    return [(sid, float(x), float(y), cluster_id)
            for (sid, cluster_id), (x, y) in zip(members, coords)]


def cluster_json(corpus: Corpus, cluster: Cluster, store: VectorStore,
                 reps: int = 3) -> dict:
    """Wire shape of one cluster, with its centroid-nearest member texts."""
    positions = np.searchsorted(
        store.sids, np.asarray(cluster.member_sids, dtype=np.uint64))
    records = representatives(cluster, corpus, store.matrix[positions],
                              list(cluster.member_sids), m=reps)
    return {
        "cluster_id": cluster.cluster_id,
        "size": cluster.size,
        "member_sids": list(cluster.member_sids),
        "representative_texts": [r.text for r in records],
    }


def points_json(clusters: Sequence[Cluster],
                store: VectorStore) -> list[dict]:
    """Wire shape of the scatter rows for the clustered members."""
    return [
        {"sid": sid, "x": x, "y": y, "cluster_id": cluster_id}
        for sid, x, y, cluster_id in projection_points(clusters, store)
    ]
