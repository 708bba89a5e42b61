"""Sentence and document store behavior."""

import pytest

from litmini.corpus import (
    Corpus,
    DocMeta,
    SentenceRecord,
    load_corpus,
    save_corpus,
)
from litmini.errors import EmptyCorpus, UnknownSid


def _meta(doc_id="AlpRes-2020-Snow trends", journal="AlpRes", year=2020):
    return DocMeta(doc_id=doc_id, journal_abbr=journal, year=year,
                   title="Snow trends", source_path=doc_id + ".txt")


def _rec(sid, doc_id="AlpRes-2020-Snow trends", pos=0, kind="body", asset=None):
    return SentenceRecord(sid=sid, doc_id=doc_id, pos=pos,
                          text=f"sentence {sid}", word_count=12,
                          kind=kind, asset=asset)


def _small_corpus():
    meta = _meta()
    records = [_rec(0, pos=0), _rec(1, pos=1),
               _rec(2, pos=0, kind="caption", asset="figs/f1.png")]
    return Corpus(records, {meta.doc_id: meta})


def test_record_lookup_is_positional():
    corpus = _small_corpus()
    assert corpus.record(1).pos == 1
    assert corpus.meta_for(0).journal_abbr == "AlpRes"


def test_unknown_sid_raises():
    corpus = _small_corpus()
    with pytest.raises(UnknownSid):
        corpus.record(3)
    with pytest.raises(UnknownSid):
        corpus.record(-1)


def test_sids_filter_by_kind():
    corpus = _small_corpus()
    assert corpus.sids() == [0, 1, 2]
    assert corpus.sids(kind="caption") == [2]
    assert corpus.doc_sids("AlpRes-2020-Snow trends", "body") == [0, 1]


def test_non_dense_sids_rejected():
    meta = _meta()
    with pytest.raises(ValueError):
        Corpus([_rec(0), _rec(2)], {meta.doc_id: meta})


def test_empty_corpus_guard():
    corpus = Corpus([], {})
    with pytest.raises(EmptyCorpus):
        corpus.require_nonempty()


def test_stats_totals_match_store():
    corpus = _small_corpus()
    stats = corpus.stats()
    assert stats.total_articles == 1
    # totals equal store cardinality, caption rows included
    assert stats.total_sentences == len(corpus) == 3
    row = stats.rows[0]
    assert (row.journal_abbr, row.year_min, row.year_max) == ("AlpRes", 2020, 2020)


def test_save_load_round_trip(tmp_path):
    corpus = _small_corpus()
    save_corpus(corpus, tmp_path)
    loaded = load_corpus(tmp_path)
    assert len(loaded) == len(corpus)
    for sid in corpus.sids():
        assert loaded.record(sid) == corpus.record(sid)
    assert loaded.docs == corpus.docs


def test_save_is_deterministic(tmp_path):
    corpus = _small_corpus()
    a, b = tmp_path / "a", tmp_path / "b"
    save_corpus(corpus, a)
    save_corpus(corpus, b)
    for name in ("sentences.jsonl", "documents.jsonl", "stats.tsv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_sentence_rows_carry_wire_keys(tmp_path):
    save_corpus(_small_corpus(), tmp_path)
    import json
    lines = (tmp_path / "sentences.jsonl").read_text(encoding="utf-8").splitlines()
    first = json.loads(lines[0])
    assert set(first) == {"sid", "doc", "journal", "year", "pos", "kind", "wc", "text"}
    caption = json.loads(lines[2])
    assert caption["asset"] == "figs/f1.png"


def test_stats_tsv_has_totals_row(tmp_path):
    save_corpus(_small_corpus(), tmp_path)
    lines = (tmp_path / "stats.tsv").read_text(encoding="utf-8").splitlines()
    assert lines[0].split("\t") == ["journal", "year_min", "year_max", "articles", "sentences"]
    assert lines[-1].startswith("TOTAL\t")
