"""Per-model vector stores, keyword prefilter, exact top-k, context windows.

Stores are immutable once built. Search is an exact scan: scores are inner
products of float32 rows against the query, accumulated in float64, and the
top-k selection is deterministic with ties broken by ascending sentence id.
"""

from __future__ import annotations

import re
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import Corpus, SentenceRecord
from .embed import ModelRegistry
from .errors import (
    DimensionMismatch,
    EmptyQuery,
    StoreFormatError,
    ZeroVector,
)

MAGIC = b"MLMV"
FORMAT_VERSION = 1
FLAG_NORMALIZED = 0x01

MATCH_SUBSTRING = "substring"
MATCH_WORD_BOUNDARY = "word_boundary"


@dataclass
class VectorStore:
    """One model's embeddings over a sid subset, rows in ascending sid order."""

    model_abbr: str
    dim: int
    sids: np.ndarray      # (count,) uint64, strictly increasing
    matrix: np.ndarray    # (count, dim) float32
    normalized: bool = True

    @property
    def count(self) -> int:
        return int(self.sids.shape[0])

    def __post_init__(self):
        self.sids = np.asarray(self.sids, dtype=np.uint64)
        self.matrix = np.asarray(self.matrix, dtype=np.float32)
        if self.matrix.shape != (self.sids.shape[0], self.dim):
            raise DimensionMismatch(
                f"store matrix shape {self.matrix.shape} does not match "
                f"count {self.sids.shape[0]} and dim {self.dim}")
        if self.count > 1 and not np.all(self.sids[1:] > self.sids[:-1]):
            raise ValueError("store sids must be strictly increasing")


def build_store(
    corpus: Corpus,
    sids: Iterable[int],
    registry: ModelRegistry,
    model_abbr: str,
    normalize: bool = True,
    batch_size: int = 256,
) -> VectorStore:
    """Embed the given sentences with one model into a new store.

    Input sids are deduplicated and sorted so rows land in sid order; the
    result is deterministic whenever the provider is.
    """
    spec = registry.spec(model_abbr)
    ordered = sorted(set(int(s) for s in sids))
    matrix = np.empty((len(ordered), spec.dim), dtype=np.float32)
    for start in range(0, len(ordered), batch_size):
        chunk = ordered[start:start + batch_size]
        texts = [corpus.record(s).text for s in chunk]
        vectors = registry.embed_batch(model_abbr, texts)
        if normalize:
            norms = np.linalg.norm(vectors.astype(np.float64), axis=1)
            if np.any(norms == 0.0):
                bad = chunk[int(np.argmin(norms))]
                raise ZeroVector(f"model {model_abbr} embedded sid {bad} to a zero vector")
            vectors = (vectors.astype(np.float64) / norms[:, None]).astype(np.float32)
        matrix[start:start + len(chunk)] = vectors
    return VectorStore(
        model_abbr=model_abbr,
        dim=spec.dim,
        sids=np.asarray(ordered, dtype=np.uint64),
        matrix=matrix,
        normalized=normalize,
    )


# -- binary store format -----------------------------------------------------
# magic "MLMV" | version u32 | dim u32 | count u64 | name_len u16 |
# model_abbr bytes | flags u8 | count * sid u64 | count*dim f32 row-major
# All integers little-endian, no padding.

def save_store(store: VectorStore, path: str | Path) -> None:
    name = store.model_abbr.encode("utf-8")
    if len(name) > 0xFFFF:
        raise StoreFormatError("model abbreviation too long to encode")
    flags = FLAG_NORMALIZED if store.normalized else 0
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<IIQH", FORMAT_VERSION, store.dim, store.count, len(name)))
        f.write(name)
        f.write(struct.pack("<B", flags))
        f.write(store.sids.astype("<u8").tobytes())
        f.write(store.matrix.astype("<f4").tobytes())


def _take(buf: bytes, offset: int, size: int, what: str) -> tuple[bytes, int]:
    end = offset + size
    if end > len(buf):
        raise StoreFormatError(
            f"truncated store: needed {size} bytes for {what} at offset {offset}, "
            f"file has {len(buf)}")
    return buf[offset:end], end


def load_store(path: str | Path) -> VectorStore:
    buf = Path(path).read_bytes()
    raw, offset = _take(buf, 0, 4, "magic")
    if raw != MAGIC:
        raise StoreFormatError(f"bad magic {raw!r} at offset 0, expected {MAGIC!r}")
    raw, offset = _take(buf, offset, 18, "header")
    version, dim, count, name_len = struct.unpack("<IIQH", raw)
    if version != FORMAT_VERSION:
        raise StoreFormatError(f"unsupported version {version} at offset 4")
    if dim < 1:
        raise StoreFormatError(f"dim {dim} at offset 8 must be >= 1")
    raw, offset = _take(buf, offset, name_len, "model abbreviation")
    try:
        model_abbr = raw.decode("utf-8")
    except UnicodeDecodeError:
        raise StoreFormatError(f"model abbreviation at offset 22 is not UTF-8") from None
    raw, offset = _take(buf, offset, 1, "flags")
    flags = raw[0]
    sid_bytes = count * 8
    raw, offset = _take(buf, offset, sid_bytes, "sid array")
    sids = np.frombuffer(raw, dtype="<u8").copy()
    matrix_bytes = count * dim * 4
    raw, end = _take(buf, offset, matrix_bytes, "vector matrix")
    matrix = np.frombuffer(raw, dtype="<f4").copy().reshape(count, dim)
    if end != len(buf):
        raise StoreFormatError(f"{len(buf) - end} trailing bytes at offset {end}")
    if count > 1 and not np.all(sids[1:] > sids[:-1]):
        raise StoreFormatError(f"sid array at offset {offset - sid_bytes} is not strictly increasing")
    return VectorStore(
        model_abbr=model_abbr,
        dim=int(dim),
        sids=sids,
        matrix=matrix,
        normalized=bool(flags & FLAG_NORMALIZED),
    )


# -- keyword prefilter -------------------------------------------------------

@dataclass(frozen=True)
class KeywordQuery:
    """AND of groups; within a group, alternatives are OR-ed.

    Matching is always case-insensitive. Substring mode matches inside words
    ("rain" hits "train"); word-boundary mode requires a non-alphanumeric
    character or string edge on both sides.
    """

    groups: tuple[tuple[str, ...], ...]
    match_mode: str = MATCH_SUBSTRING

    def __post_init__(self):
        if not self.groups or any(not g for g in self.groups):
            raise EmptyQuery("keyword query needs at least one non-empty group")
        if any(not lit.strip() for g in self.groups for lit in g):
            raise EmptyQuery("keyword literals must be non-empty")
        if self.match_mode not in (MATCH_SUBSTRING, MATCH_WORD_BOUNDARY):
            raise ValueError(f"unknown match mode {self.match_mode!r}")


def parse_keyword_expr(expr: str, match_mode: str = MATCH_SUBSTRING) -> KeywordQuery:
    """Parse "a,b+c" style expressions: "," separates alternatives, "+" groups."""
    groups = []
    for part in expr.split("+"):
        literals = tuple(lit.strip() for lit in part.split(",") if lit.strip())
        if literals:
            groups.append(literals)
    if not groups:
        raise EmptyQuery(f"keyword expression {expr!r} contains no literals")
    return KeywordQuery(groups=tuple(groups), match_mode=match_mode)


def _group_matchers(q: KeywordQuery):
    if q.match_mode == MATCH_SUBSTRING:
        lowered = [tuple(lit.lower() for lit in g) for g in q.groups]
        return [lambda text, alts=alts: any(a in text for a in alts)
                for alts in lowered]
    patterns = [
        [re.compile(rf"(?<![0-9A-Za-z]){re.escape(lit)}(?![0-9A-Za-z])", re.IGNORECASE)
         for lit in g]
        for g in q.groups
    ]
    return [lambda text, pats=pats: any(p.search(text) for p in pats)
            for pats in patterns]


def keyword_filter(corpus: Corpus, q: KeywordQuery, kind: str | None = None) -> list[int]:
    """Ascending sids of records where every group has a matching alternative."""
    matchers = _group_matchers(q)
    lower_needed = q.match_mode == MATCH_SUBSTRING
    out = []
    for rec in corpus:
        if kind is not None and rec.kind != kind:
            continue
        text = rec.text.lower() if lower_needed else rec.text
        if all(m(text) for m in matchers):
            out.append(rec.sid)
    return out


# -- exact top-k -------------------------------------------------------------

def score_rows(matrix: np.ndarray, query: np.ndarray) -> np.ndarray:
    """Inner products of float32 rows against the query, accumulated in f64."""
    q64 = np.asarray(query, dtype=np.float64)
    return np.einsum("ij,j->i", matrix, q64, dtype=np.float64, casting="safe")


def top_k(
    store: VectorStore,
    query: np.ndarray,
    k: int,
    restrict: Sequence[int] | None = None,
) -> list[tuple[int, float]]:
    """Exact top-k rows by descending inner product, ties by ascending sid."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    query = np.asarray(query)
    if query.shape != (store.dim,):
        raise DimensionMismatch(
            f"query shape {query.shape} does not match store dim {store.dim}")
    if restrict is None:
        sids = store.sids
        matrix = store.matrix
    else:
        wanted = np.asarray(sorted(set(int(s) for s in restrict)), dtype=np.uint64)
        if store.count == 0 or wanted.size == 0:
            return []
        pos = np.minimum(np.searchsorted(store.sids, wanted), store.count - 1)
        rows = pos[store.sids[pos] == wanted]
        sids = store.sids[rows]
        matrix = store.matrix[rows]
    n = sids.shape[0]
    if n == 0:
        return []
    scores = score_rows(matrix, query)
    if k < n:
        kth = np.partition(scores, n - k)[n - k]
        keep = np.nonzero(scores >= kth)[0]
        order = keep[np.lexsort((sids[keep], -scores[keep]))][:k]
    else:
        order = np.lexsort((sids, -scores))
    return [(int(sids[i]), float(scores[i])) for i in order]


# -- context windows ---------------------------------------------------------

@dataclass
class ContextWindow:
    """A sentence with its in-document neighbors of the same kind."""

    center: SentenceRecord
    before: list[SentenceRecord] = field(default_factory=list)
    after: list[SentenceRecord] = field(default_factory=list)


def get_context(corpus: Corpus, sid: int, n_before: int, n_after: int) -> ContextWindow:
    """Up to n_before predecessors and n_after successors, same doc and kind."""
    center = corpus.record(sid)
    siblings = corpus.doc_sids(center.doc_id, center.kind)
    pos = center.pos
    lo = max(0, pos - max(0, n_before))
    hi = min(len(siblings), pos + 1 + max(0, n_after))
    return ContextWindow(
        center=center,
        before=[corpus.record(s) for s in siblings[lo:pos]],
        after=[corpus.record(s) for s in siblings[pos + 1:hi]],
    )
