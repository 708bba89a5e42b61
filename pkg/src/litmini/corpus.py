"""Sentence corpus data model and on-disk layout.

A corpus directory holds three files:

- ``sentences.jsonl``: one sentence record per line, sid-ordered
- ``documents.jsonl``: one document metadata record per line
- ``stats.tsv``: per-journal article/sentence counts plus a totals row
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .errors import EmptyCorpus, UnknownSid

SENTENCES_FILE = "sentences.jsonl"
DOCUMENTS_FILE = "documents.jsonl"
STATS_FILE = "stats.tsv"

KIND_BODY = "body"
KIND_CAPTION = "caption"


@dataclass(frozen=True)
class DocMeta:
    """Metadata parsed from a document's standardized filename."""

    doc_id: str
    journal_abbr: str
    year: int
    title: str
    source_path: str


@dataclass(frozen=True)
class SentenceRecord:
    """One filtered sentence: the atom of the whole system.

    ``pos`` is the 0-based position within the document, counted separately
    for body and caption records. ``asset`` is the image path attached to a
    caption record when a sidecar provided one.
    """

    sid: int
    doc_id: str
    pos: int
    text: str
    word_count: int
    kind: str = KIND_BODY
    asset: str | None = None


@dataclass(frozen=True)
class JournalStats:
    journal_abbr: str
    year_min: int
    year_max: int
    article_count: int
    sentence_count: int


@dataclass
class CorpusStats:
    """Per-journal rows plus a totals row mirroring the journal table."""

    rows: list[JournalStats] = field(default_factory=list)

    @property
    def total_articles(self) -> int:
        return sum(r.article_count for r in self.rows)

    @property
    def total_sentences(self) -> int:
        return sum(r.sentence_count for r in self.rows)


class Corpus:
    """In-memory view over the sentence and document stores.

    Sentence ids are dense (0..n-1) and records are kept in sid order, so
    sid lookup is positional. Per-document orderings are indexed per kind
    for context-window retrieval.
    """

    def __init__(self, records: list[SentenceRecord], docs: dict[str, DocMeta]):
        self.records = records
        self.docs = docs
        self._doc_kind_sids: dict[tuple[str, str], list[int]] = {}
        for i, rec in enumerate(records):
            if rec.sid != i:
                raise ValueError(f"sentence ids must be dense, got sid {rec.sid} at row {i}")
            self._doc_kind_sids.setdefault((rec.doc_id, rec.kind), []).append(rec.sid)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[SentenceRecord]:
        return iter(self.records)

    def record(self, sid: int) -> SentenceRecord:
        if not 0 <= sid < len(self.records):
            raise UnknownSid(f"sid {sid} not in corpus (0..{len(self.records) - 1})")
        return self.records[sid]

    def doc(self, doc_id: str) -> DocMeta:
        return self.docs[doc_id]

    def meta_for(self, sid: int) -> DocMeta:
        return self.docs[self.record(sid).doc_id]

    def sids(self, kind: str | None = None) -> list[int]:
        """All sids, optionally restricted to one record kind."""
        if kind is None:
            return [r.sid for r in self.records]
        return [r.sid for r in self.records if r.kind == kind]

    def doc_sids(self, doc_id: str, kind: str) -> list[int]:
        """Sids of one document's records of the given kind, in pos order."""
        return self._doc_kind_sids.get((doc_id, kind), [])

    def require_nonempty(self) -> None:
        if not self.records:
            raise EmptyCorpus("corpus holds no sentences")

    def stats(self) -> CorpusStats:
        """Recompute per-journal statistics from the stores."""
        per_journal: dict[str, dict] = {}
        doc_counts: dict[str, set[str]] = {}
        for meta in self.docs.values():
            j = per_journal.setdefault(
                meta.journal_abbr,
                {"year_min": meta.year, "year_max": meta.year, "sentences": 0},
            )
            j["year_min"] = min(j["year_min"], meta.year)
            j["year_max"] = max(j["year_max"], meta.year)
            doc_counts.setdefault(meta.journal_abbr, set()).add(meta.doc_id)
        for rec in self.records:
            per_journal[self.docs[rec.doc_id].journal_abbr]["sentences"] += 1
        rows = [
            JournalStats(
                journal_abbr=abbr,
                year_min=j["year_min"],
                year_max=j["year_max"],
                article_count=len(doc_counts[abbr]),
                sentence_count=j["sentences"],
            )
            for abbr, j in sorted(per_journal.items())
        ]
        return CorpusStats(rows=rows)


# -- serialization -----------------------------------------------------------

def record_to_json(rec: SentenceRecord, meta: DocMeta) -> dict:
    obj = {
        "sid": rec.sid,
        "doc": rec.doc_id,
        "journal": meta.journal_abbr,
        "year": meta.year,
        "pos": rec.pos,
        "kind": rec.kind,
        "wc": rec.word_count,
        "text": rec.text,
    }
    if rec.asset is not None:
        obj["asset"] = rec.asset
    return obj


def save_corpus(corpus: Corpus, out_dir: str | Path) -> None:
    """Write the sentence store, document store, and stats report.

    Output is deterministic for a given corpus: LF line endings, UTF-8,
    records in sid order, documents in doc_id order.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / SENTENCES_FILE, "w", encoding="utf-8", newline="\n") as f:
        for rec in corpus.records:
            f.write(json.dumps(record_to_json(rec, corpus.docs[rec.doc_id]), ensure_ascii=False))
            f.write("\n")
    with open(out / DOCUMENTS_FILE, "w", encoding="utf-8", newline="\n") as f:
        for doc_id in sorted(corpus.docs):
            m = corpus.docs[doc_id]
            f.write(json.dumps({
                "doc_id": m.doc_id,
                "journal": m.journal_abbr,
                "year": m.year,
                "title": m.title,
                "source_path": m.source_path,
            }, ensure_ascii=False))
            f.write("\n")
    write_stats_tsv(corpus.stats(), out / STATS_FILE)


def load_corpus(corpus_dir: str | Path) -> Corpus:
    d = Path(corpus_dir)
    docs: dict[str, DocMeta] = {}
    with open(d / DOCUMENTS_FILE, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            obj = json.loads(line)
            docs[obj["doc_id"]] = DocMeta(
                doc_id=obj["doc_id"],
                journal_abbr=obj["journal"],
                year=obj["year"],
                title=obj["title"],
                source_path=obj["source_path"],
            )
    records: list[SentenceRecord] = []
    with open(d / SENTENCES_FILE, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            obj = json.loads(line)
            records.append(SentenceRecord(
                sid=obj["sid"],
                doc_id=obj["doc"],
                pos=obj["pos"],
                text=obj["text"],
                word_count=obj["wc"],
                kind=obj["kind"],
                asset=obj.get("asset"),
            ))
    return Corpus(records, docs)


def write_stats_tsv(stats: CorpusStats, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("journal\tyear_min\tyear_max\tarticles\tsentences\n")
        for r in stats.rows:
            f.write(f"{r.journal_abbr}\t{r.year_min}\t{r.year_max}\t{r.article_count}\t{r.sentence_count}\n")
        if stats.rows:
            y0 = min(r.year_min for r in stats.rows)
            y1 = max(r.year_max for r in stats.rows)
            f.write(f"TOTAL\t{y0}\t{y1}\t{stats.total_articles}\t{stats.total_sentences}\n")
        else:
            f.write("TOTAL\t\t\t0\t0\n")


def iter_texts(corpus: Corpus, sids: Iterable[int]) -> list[str]:
    return [corpus.record(s).text for s in sids]
