"""Turn source documents into a filtered, position-indexed sentence corpus.

Documents are extracted-text files named ``abbrev-year-title`` (hyphen,
en dash, and em dash are interchangeable separators). Page breaks are form
feeds, paragraph blocks are separated by blank lines. Reference sections are
cut, figure/table captions are diverted to a caption side channel, and the
remaining body text is segmented into sentences kept only when their word
count lies in the configured range.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import (
    KIND_BODY,
    KIND_CAPTION,
    Corpus,
    CorpusStats,
    DocMeta,
    SentenceRecord,
    save_corpus,
)
from .errors import EmptyDocument, MalformedFilename

# Separators accepted in filenames; only the first two splits are structural,
# the title may itself contain any of them.
_SEPARATORS = "-–—"
_SEP_RE = re.compile(f"[{_SEPARATORS}]")
_EXT_RE = re.compile(r"\.[A-Za-z][A-Za-z0-9]{0,4}$")

MIN_WORDS = 10
MAX_WORDS = 256

DEFAULT_ABBREVIATIONS = frozenset({
    "et al.", "Fig.", "Tab.",          # fixed by the splitting convention
    "e.g.", "i.e.", "cf.", "Eq.", "Figs.", "Tabs.",
})

_CAPTION_PREFIXES = ("Figure ", "Fig. ", "Table ", "Tab. ")
_REFERENCES_RE = re.compile(r"^(references|bibliography)\s*:?\s*$", re.IGNORECASE)


def parse_filename(name: str) -> DocMeta:
    """Parse a ``journal-year-title`` basename into document metadata.

    Raises MalformedFilename when fewer than three fields are present, the
    journal field is not ASCII alphanumeric, or the year field is not an
    integer in [1900, 2100].
    """
    base = Path(name).name
    parts = _SEP_RE.split(base, maxsplit=2)
    if len(parts) < 3:
        raise MalformedFilename(f"{name!r}: expected journal, year, and title fields")
    journal, year_text, title = parts
    if not journal:
        raise MalformedFilename(f"{name!r}: empty journal abbreviation field")
    try:
        year = int(year_text)
    except ValueError:
        raise MalformedFilename(f"{name!r}: year field {year_text!r} is not an integer") from None
    if not 1900 <= year <= 2100:
        raise MalformedFilename(f"{name!r}: year {year} outside [1900, 2100]")
    title = _EXT_RE.sub("", title).strip()
    return DocMeta(
        doc_id=_EXT_RE.sub("", base),
        journal_abbr=journal,
        year=year,
        title=title,
        source_path=str(name),
    )


@dataclass(frozen=True)
class Block:
    """One page text block; x-coordinate range is optional layout metadata."""

    text: str
    x0: float | None = None
    x1: float | None = None


Page = Sequence[Block]


@dataclass
class ExtractedText:
    body: str
    captions: list[str] = field(default_factory=list)


def _dehyphenate(text: str) -> str:
    """Join words broken by hyphen-newline and collapse whitespace runs."""
    text = re.sub(r"-\s*\n\s*", "", text)
    return re.sub(r"\s+", " ", text).strip()


def _column_order(page: Page) -> list[Block]:
    """Order page blocks for reading: left column top-to-bottom, then next.

    Columns are maximal groups of blocks whose x ranges overlap transitively;
    within a column the input order is kept. Pages without complete geometry
    fall back to input order.
    """
    if not all(b.x0 is not None and b.x1 is not None for b in page):
        return list(page)
    intervals = sorted(range(len(page)), key=lambda i: (page[i].x0, page[i].x1))
    columns: list[list[int]] = []
    col_end = None
    for i in intervals:
        if col_end is not None and page[i].x0 <= col_end:
            columns[-1].append(i)
            col_end = max(col_end, page[i].x1)
        else:
            columns.append([i])
            col_end = page[i].x1
    ordered: list[Block] = []
    for col in columns:
        for i in sorted(col):
            ordered.append(page[i])
    return ordered


def extract_body(pages: Sequence[Page]) -> ExtractedText:
    """Assemble body text in reading order, cutting references and captions.

    Everything from a standalone "References"/"Bibliography" line onward is
    dropped, across page boundaries. Blocks starting with a caption prefix go
    to the caption side channel instead of the body.
    """
    body_parts: list[str] = []
    captions: list[str] = []
    stopped = False
    for page in pages:
        if stopped:
            break
        for block in _column_order(page):
            if stopped:
                break
            kept_lines: list[str] = []
            for line in block.text.split("\n"):
                if _REFERENCES_RE.match(line.strip()):
                    stopped = True
                    break
                kept_lines.append(line)
            text = _dehyphenate("\n".join(kept_lines))
            if not text:
                continue
            if text.startswith(_CAPTION_PREFIXES):
                captions.append(text)
            else:
                body_parts.append(text)
    body = "\n".join(body_parts)
    if not body.strip():
        raise EmptyDocument("no body text remains after extraction")
    return ExtractedText(body=body, captions=captions)


def word_count(text: str) -> int:
    """Number of maximal non-whitespace runs."""
    return len(text.split())


def _is_boundary(body: str, i: int, abbreviations: frozenset[str]) -> bool:
    """Whether the terminator at index i ends a sentence."""
    c = body[i]
    nxt = body[i + 1] if i + 1 < len(body) else ""
    # real boundaries are followed by whitespace or end of text; this also
    # keeps internal periods of "e.g." and of multi-dot tokens intact
    if nxt and not nxt.isspace():
        return False
    if c != ".":
        return True
    prev = body[i - 1] if i > 0 else ""
    if prev.isdigit() and nxt.isdigit():
        return False  # decimal guard
    # single-letter initial guard ("J. Smith")
    if prev.isalpha() and prev.isupper() and (i < 2 or not body[i - 2].isalnum()):
        return False
    head = body[: i + 1]
    for abbr in abbreviations:
        if head.endswith(abbr):
            before = head[: -len(abbr)]
            if not before or not before[-1].isalnum():
                return False
    return True


def split_raw_sentences(body: str, abbreviations: Iterable[str] = DEFAULT_ABBREVIATIONS) -> list[str]:
    """Segment text at sentence terminators without applying the length filter.

    Terminators are ".", "?", and "!"; a period does not split when it ends a
    listed abbreviation, sits between two digits, or closes a single-letter
    initial. Sentence texts are whitespace-normalized.
    """
    abbrs = frozenset(abbreviations)
    sentences: list[str] = []
    start = 0
    for i, c in enumerate(body):
        if c in ".!?" and _is_boundary(body, i, abbrs):
            chunk = re.sub(r"\s+", " ", body[start:i + 1]).strip()
            if chunk:
                sentences.append(chunk)
            start = i + 1
    tail = re.sub(r"\s+", " ", body[start:]).strip()
    if tail:
        sentences.append(tail)
    return sentences


def split_sentences(
    body: str,
    abbreviations: Iterable[str] = DEFAULT_ABBREVIATIONS,
    min_words: int = MIN_WORDS,
    max_words: int = MAX_WORDS,
) -> list[str]:
    """Segment body text and keep sentences with min_words <= wc <= max_words."""
    return [s for s in split_raw_sentences(body, abbreviations)
            if min_words <= word_count(s) <= max_words]


# -- corpus building ---------------------------------------------------------

_SIDECAR_SUFFIX = ".captions.tsv"


@dataclass
class IngestOptions:
    abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS
    min_words: int = MIN_WORDS
    max_words: int = MAX_WORDS


@dataclass
class IngestReport:
    documents: int = 0
    sentences: int = 0
    captions: int = 0
    errors: list[tuple[str, str]] = field(default_factory=list)  # (filename, message)


def _pages_from_text(raw: str) -> list[Page]:
    """Plain-text adapter: form feeds split pages, blank lines split blocks."""
    pages: list[Page] = []
    for page_text in raw.split("\f"):
        blocks = [Block(text=chunk) for chunk in re.split(r"\n\s*\n", page_text) if chunk.strip()]
        if blocks:
            pages.append(blocks)
    return pages


def _read_sidecar(path: Path) -> list[tuple[str, str]]:
    """Caption sidecar rows: asset path TAB caption text."""
    rows: list[tuple[str, str]] = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line.strip():
                continue
            asset, _, caption = line.partition("\t")
            rows.append((asset.strip(), caption.strip()))
    return rows


def _parse_document(path: Path, options: IngestOptions) -> tuple[DocMeta, list[tuple[str, str, int, str | None]]]:
    """Parse one file into (meta, [(kind, text, word_count, asset)]) rows.

    Body sentences come first, then captions (extracted ones, then sidecar
    ones); the caller assigns sids and positions.
    """
    meta = parse_filename(path.name)
    raw = path.read_text(encoding="utf-8")
    extracted = extract_body(_pages_from_text(raw))
    out: list[tuple[str, str, int, str | None]] = []
    for text in split_sentences(extracted.body, options.abbreviations,
                                options.min_words, options.max_words):
        out.append((KIND_BODY, text, word_count(text), None))
    # captions skip the lower word bound but keep the upper one
    caption_rows: list[tuple[str, str | None]] = [(c, None) for c in extracted.captions]
    sidecar = path.with_name(path.stem + _SIDECAR_SUFFIX)
    if sidecar.exists():
        for asset, caption in _read_sidecar(sidecar):
            caption_rows.append((caption, asset or None))
    for caption, asset in caption_rows:
        text = re.sub(r"\s+", " ", caption).strip()
        if not text:
            continue
        wc = word_count(text)
        if wc <= options.max_words:
            out.append((KIND_CAPTION, text, wc, asset))
    return meta, out


def build_corpus(
    input_dir: str | Path,
    options: IngestOptions | None = None,
    out_dir: str | Path | None = None,
) -> tuple[Corpus, CorpusStats, IngestReport]:
    """Build the sentence corpus from every document under input_dir.

    Documents are processed in lexicographic filename order and sids are
    assigned sequentially, so the output is deterministic for a given input
    set. Per-file failures are collected into the report and skipped.
    """
    options = options or IngestOptions()
    report = IngestReport()
    records: list[SentenceRecord] = []
    docs: dict[str, DocMeta] = {}
    sid = 0
    # every regular file is a document candidate; unreadable or misnamed ones
    # land in the error report rather than being silently ignored
    files = sorted(p for p in Path(input_dir).iterdir()
                   if p.is_file() and not p.name.endswith(_SIDECAR_SUFFIX)
                   and not p.name.startswith("."))
    for path in files:
        try:
            meta, rows = _parse_document(path, options)
            if meta.doc_id in docs:
                raise MalformedFilename(f"{path.name!r}: duplicate doc_id {meta.doc_id!r}")
        except (MalformedFilename, EmptyDocument, UnicodeDecodeError) as exc:
            report.errors.append((path.name, str(exc)))
            continue
        docs[meta.doc_id] = meta
        report.documents += 1
        pos = {KIND_BODY: 0, KIND_CAPTION: 0}
        for kind, text, wc, asset in rows:
            records.append(SentenceRecord(
                sid=sid, doc_id=meta.doc_id, pos=pos[kind], text=text,
                word_count=wc, kind=kind, asset=asset,
            ))
            pos[kind] += 1
            sid += 1
            if kind == KIND_BODY:
                report.sentences += 1
            else:
                report.captions += 1
    corpus = Corpus(records, docs)
    stats = corpus.stats()
    if out_dir is not None:
        save_corpus(corpus, out_dir)
    return corpus, stats, report


def write_report_json(report: IngestReport, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump({
            "documents": report.documents,
            "sentences": report.sentences,
            "captions": report.captions,
            "errors": [{"file": name, "error": msg} for name, msg in report.errors],
        }, f, indent=2, ensure_ascii=False)
        f.write("\n")
