"""Single command-line entry point for the whole pipeline.

Subcommands mirror the staged workflow: ingest documents into a sentence
corpus, index it per model, then search, cluster, classify, or summarize,
composing stages through files. Every subcommand takes --json for
machine-readable stdout; diagnostics always go to stderr. Exit codes are
stable: 0 success, 1 usage error, 2 data error, 3 provider error.

Heavyweight dependencies are imported inside each subcommand so that
--threads can cap the numeric thread pools before they exist, and so
usage errors and --help stay fast.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from enum import IntEnum
from pathlib import Path
from typing import Sequence

from .errors import BadEdges, LitminiError, ProviderUnavailable


class ExitStatus(IntEnum):
    OK = 0
    USAGE_ERROR = 1
    DATA_ERROR = 2
    PROVIDER_ERROR = 3


# -- shared helpers ----------------------------------------------------------

def _info(args: argparse.Namespace, message: str) -> None:
    if not args.quiet:
        print(message, file=sys.stderr)


def _error(message: object) -> None:
    print(f"litmini: {message}", file=sys.stderr)


def _emit_json(payload: object) -> None:
    print(json.dumps(payload, ensure_ascii=False))


def _cap_threads(n: int) -> None:
    """Cap numeric thread pools via the conventional environment knobs.

    Effective only for pools created after this point, which is why the
    numeric modules are imported per subcommand rather than at module load.
    """
    if n < 1:
        raise ValueError(f"--threads must be >= 1, got {n}")
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                "VECLIB_MAXIMUM_THREADS", "NUMEXPR_NUM_THREADS"):
        os.environ[var] = str(n)


def _keyword_query(expr: str | None):
    if not expr:
        return None
    from .index import parse_keyword_expr

    return parse_keyword_expr(expr)


def _float_csv(expr: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in expr.split(","))
    except ValueError:
        raise ValueError(f"expected comma-separated numbers, got {expr!r}")


def _label_csv(expr: str) -> frozenset[str]:
    return frozenset(tok.strip() for tok in expr.split(",") if tok.strip())


def _unit_matrix(store):
    import numpy as np

    rows = store.matrix.astype(np.float64)
    if not store.normalized:
        norms = np.linalg.norm(rows, axis=1, keepdims=True)
        norms[norms == 0.0] = 1.0
        rows = rows / norms
    return rows


def _classifier(locator: str):
    from .sentiment import HttpClassifierProvider, LexiconClassifier

    if locator == "builtin:lexicon":
        return LexiconClassifier()
    if locator.startswith(("http://", "https://")):
        return HttpClassifierProvider(locator)
    raise ValueError(f"unknown classifier provider: {locator!r}")


def _summarizer(locator: str):
    from .summarize import EchoSummarizer, HttpSummarizer

    if locator == "echo":
        return EchoSummarizer()
    if locator.startswith(("http://", "https://")):
        return HttpSummarizer(locator)
    raise ValueError(f"unknown summary provider: {locator!r}")


# -- subcommands -------------------------------------------------------------

def cmd_ingest(args: argparse.Namespace) -> ExitStatus:
    from .ingest import IngestOptions, build_corpus

    if args.abbrev_file is not None:
        lines = Path(args.abbrev_file).read_text(encoding="utf-8").splitlines()
        abbreviations = frozenset(line.strip() for line in lines if line.strip())
        options = IngestOptions(abbreviations=abbreviations,
                                min_words=args.min_words,
                                max_words=args.max_words)
    else:
        options = IngestOptions(min_words=args.min_words,
                                max_words=args.max_words)
    _, _, report = build_corpus(args.in_dir, options, out_dir=args.out)
    for filename, message in report.errors:
        _info(args, f"skipped {filename}: {message}")
    if args.json:
        _emit_json({
            "documents": report.documents,
            "sentences": report.sentences,
            "captions": report.captions,
            "errors": [{"file": f, "message": m} for f, m in report.errors],
            "out": str(args.out),
        })
    else:
        print(f"{report.documents} documents, {report.sentences} sentences, "
              f"{report.captions} captions -> {args.out}")
    return ExitStatus.OK


def cmd_index(args: argparse.Namespace) -> ExitStatus:
    from .corpus import load_corpus
    from .embed import default_registry
    from .index import build_store, save_store
    from .search import candidate_sids

    corpus = load_corpus(args.corpus)
    sids = candidate_sids(corpus, _keyword_query(args.keywords))
    store = build_store(corpus, sids, default_registry(), args.model,
                        normalize=not args.no_normalize)
    save_store(store, args.out)
    if args.json:
        _emit_json({
            "model": store.model_abbr,
            "count": store.count,
            "dim": store.dim,
            "normalized": store.normalized,
            "out": str(args.out),
        })
    else:
        kind = "normalized" if store.normalized else "raw"
        print(f"{store.model_abbr}: {store.count} vectors, dim {store.dim}, "
              f"{kind} -> {args.out}")
    return ExitStatus.OK


def cmd_search(args: argparse.Namespace) -> ExitStatus:
    from .corpus import load_corpus
    from .embed import default_registry
    from .errors import DuplicateModel, NoCandidates
    from .index import load_store
    from .search import (ensemble_search, hit_json, influence_from_hits,
                         score_buckets, threshold_select)

    corpus = load_corpus(args.corpus)
    stores = {}
    for path in args.stores:
        store = load_store(path)
        if store.model_abbr in stores:
            raise DuplicateModel(
                f"two stores given for model {store.model_abbr}")
        stores[store.model_abbr] = store
    edges = _float_csv(args.buckets)
    try:
        hits = ensemble_search(corpus, default_registry(), stores, args.q,
                               k=args.k,
                               keyword_query=_keyword_query(args.keywords))
    except NoCandidates:
        hits = []
    selection = threshold_select(hits, args.min_score, args.max_n)
    buckets = score_buckets(selection, edges)
    _info(args, f"{len(hits)} hits, {len(selection)} above "
                f"{args.min_score:g} (cap {args.max_n})")
    for bucket in buckets:
        _info(args, f"bucket {bucket.label}: {bucket.count}")
    if selection and len(selection[0].per_model_scores) >= 2:
        shares = influence_from_hits(selection).shares
        joined = ", ".join(f"{abbr} {share:.1f}%"
                           for abbr, share in sorted(shares.items()))
        _info(args, f"influence: {joined}")
    if args.report:
        from .report import render_search_report

        for path in render_search_report(Path(args.report), corpus,
                                         selection, edges):
            _info(args, f"wrote {path}")
    if args.json:
        _emit_json([hit_json(corpus, hit) for hit in selection])
    else:
        for hit in selection:
            meta = corpus.meta_for(hit.sid)
            print(f"{hit.rank:>4}  {hit.ensemble_score:.2f}  sid={hit.sid}  "
                  f"[{meta.journal_abbr} {meta.year}]  "
                  f"{corpus.record(hit.sid).text}")
    return ExitStatus.OK


def _print_cluster_rows(rows: Sequence[dict]) -> None:
    for row in rows:
        print(f"cluster {row['cluster_id']}  size {row['size']}")
        for text in row["representative_texts"]:
            print(f"  - {text}")


def cmd_cluster(args: argparse.Namespace) -> ExitStatus:
    from .cluster import (ClusterParams, agglomerate, cluster_json,
                          top_clusters, yearly_trends)
    from .corpus import load_corpus
    from .index import load_store

    corpus = load_corpus(args.corpus)
    store = load_store(args.store)
    params = ClusterParams(min_similarity=args.min_sim,
                           min_cluster_count=args.min_count,
                           linkage=args.linkage)
    if args.per_year:
        series = yearly_trends(corpus, store, params, top_n=args.top)
        payload = {
            str(entry.year): [cluster_json(corpus, c, store)
                              for c in entry.clusters]
            for entry in series.entries
        }
        if args.report:
            from .report import render_trends_report

            for path in render_trends_report(Path(args.report), corpus,
                                             series, store):
                _info(args, f"wrote {path}")
        if args.json:
            _emit_json(payload)
        else:
            for entry in series.entries:
                print(f"== {entry.year}  ({entry.total_points} points) ==")
                _print_cluster_rows(payload[str(entry.year)])
        return ExitStatus.OK

    sids = [int(s) for s in store.sids.tolist()]
    clusters = top_clusters(agglomerate(_unit_matrix(store), sids, params),
                            args.top)
    payload = [cluster_json(corpus, c, store) for c in clusters]
    _info(args, f"{len(clusters)} clusters over {store.count} vectors")
    if args.report:
        from .report import render_cluster_report

        for path in render_cluster_report(Path(args.report), corpus,
                                          clusters, store):
            _info(args, f"wrote {path}")
    if args.json:
        _emit_json(payload)
    else:
        _print_cluster_rows(payload)
    return ExitStatus.OK


def cmd_sentiment(args: argparse.Namespace) -> ExitStatus:
    from .corpus import load_corpus
    from .search import candidate_sids

    corpus = load_corpus(args.corpus)
    keyword_query = _keyword_query(args.keywords)
    provider = _classifier(args.provider)
    sids = candidate_sids(corpus, keyword_query)
    texts = [corpus.record(sid).text for sid in sids]

    if args.task == "emotion":
        if args.cluster:
            raise ValueError("--cluster applies only to --task polarity")
        from .sentiment import classify_emotions, emotion_pipeline

        labels = classify_emotions(provider, texts)
        breakdown = emotion_pipeline(zip(sids, labels),
                                     min_support=args.min_support,
                                     drop=_label_csv(args.drop))
        counts = dict(breakdown.histogram.counts)
        if args.report:
            from .report import render_label_counts

            for path in render_label_counts(Path(args.report), counts):
                _info(args, f"wrote {path}")
        if args.json:
            _emit_json({
                "task": "emotion",
                "histogram": {"counts": counts,
                              "total": breakdown.histogram.total},
                "sids": {label: list(label_sids) for label, label_sids
                         in breakdown.sids_by_label.items()},
            })
        else:
            for label, count in counts.items():
                print(f"{label}\t{count}")
        return ExitStatus.OK

    if args.cluster:
        if not args.model:
            raise ValueError("--cluster requires --model")
        from .cluster import ClusterParams, cluster_json
        from .embed import default_registry
        from .index import build_store
        from .sentiment import polarity_partition_and_cluster

        store = build_store(corpus, sids, default_registry(), args.model)
        clusters = polarity_partition_and_cluster(
            corpus, provider, store, args.polarity,
            keyword_query=keyword_query,
            params=ClusterParams(min_similarity=args.min_sim,
                                 min_cluster_count=args.min_count))
        payload = [cluster_json(corpus, c, store) for c in clusters]
        _info(args, f"{len(clusters)} {args.polarity} clusters "
                    f"over {len(sids)} matched sentences")
        if args.report:
            from .report import render_cluster_report

            for path in render_cluster_report(
                    Path(args.report), corpus, clusters, store,
                    prefix=f"polarity_{args.polarity}"):
                _info(args, f"wrote {path}")
        if args.json:
            _emit_json({"task": "polarity", "polarity": args.polarity,
                        "clusters": payload})
        else:
            _print_cluster_rows(payload)
        return ExitStatus.OK

    from .sentiment import POLARITY_CLASSES, classify_polarity

    labels = classify_polarity(provider, texts)
    counts = {label: 0 for label in POLARITY_CLASSES}
    by_label: dict[str, list[int]] = {label: [] for label in POLARITY_CLASSES}
    for sid, labeled in zip(sids, labels):
        counts[labeled.label] += 1
        by_label[labeled.label].append(sid)
    if args.report:
        from .report import render_label_counts

        for path in render_label_counts(Path(args.report), counts,
                                        prefix="polarity"):
            _info(args, f"wrote {path}")
    if args.json:
        _emit_json({"task": "polarity", "counts": counts, "sids": by_label})
    else:
        for label in POLARITY_CLASSES:
            print(f"{label}\t{counts[label]}")
    return ExitStatus.OK


def cmd_summarize(args: argparse.Namespace) -> ExitStatus:
    from .summarize import get_template, render_prompt

    path = Path(args.from_search)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        _error(f"{path}: not valid JSON: {exc}")
        return ExitStatus.DATA_ERROR
    if (not isinstance(data, list)
            or any(not isinstance(h, dict) or "text" not in h or "sid" not in h
                   for h in data)):
        _error(f"{path}: expected a JSON array of hits with sid and text")
        return ExitStatus.DATA_ERROR
    texts = [str(hit["text"]) for hit in data]
    sids = [int(hit["sid"]) for hit in data]
    provider = _summarizer(args.provider)
    prompt = render_prompt(get_template(args.template), texts)
    summary = provider.summarize(prompt)
    _info(args, f"summarized {len(texts)} sentences with {args.template} "
                f"via {provider.provider_id}")
    if args.json:
        _emit_json({
            "summary": summary,
            "provenance": {
                "template": args.template,
                "sentence_count": len(texts),
                "sids": sids,
                "provider_id": provider.provider_id,
            },
        })
    else:
        print(summary)
    return ExitStatus.OK


def cmd_serve(args: argparse.Namespace) -> ExitStatus:
    from .service import serve

    serve(args.config, args.listen)
    return ExitStatus.OK


# -- parser ------------------------------------------------------------------

def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    # The same flags are accepted before and after the subcommand; the
    # subparser copies default to SUPPRESS so they never mask a value that
    # was already parsed at the top level.
    flag = {"default": argparse.SUPPRESS} if suppress else {}
    thread_default = {"default": argparse.SUPPRESS} if suppress else {"default": None}
    parser.add_argument("--json", action="store_true",
                        help="machine-readable stdout", **flag)
    parser.add_argument("--quiet", action="store_true",
                        help="suppress diagnostics on stderr", **flag)
    parser.add_argument("--threads", type=int, metavar="N",
                        help="cap numeric thread pools", **thread_default)


def _keyword_help() -> str:
    return 'keyword filter: "," for OR within a group, "+" between groups'


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="litmini",
        description="Sentence-level semantic search and literature mining.")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="<command>")

    p = sub.add_parser("ingest", help="split documents into a sentence corpus")
    _global_flags(p, suppress=True)
    p.add_argument("--in", dest="in_dir", required=True, metavar="DIR")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--abbrev-file", metavar="FILE",
                   help="newline-separated abbreviations replacing the "
                        "built-in set")
    p.add_argument("--min-words", type=int, default=10)
    p.add_argument("--max-words", type=int, default=256)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("index", help="embed corpus sentences into a store")
    _global_flags(p, suppress=True)
    p.add_argument("--corpus", required=True, metavar="DIR")
    p.add_argument("--model", required=True, metavar="ABBR")
    p.add_argument("--keywords", metavar="EXPR", help=_keyword_help())
    p.add_argument("--no-normalize", action="store_true")
    p.add_argument("--out", required=True, metavar="FILE")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("search", help="rank sentences against a query")
    _global_flags(p, suppress=True)
    p.add_argument("--corpus", required=True, metavar="DIR")
    p.add_argument("--stores", required=True, nargs="+", metavar="FILE")
    p.add_argument("--q", required=True, metavar="TEXT")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--keywords", metavar="EXPR", help=_keyword_help())
    p.add_argument("--min-score", type=float, default=0.7)
    p.add_argument("--max-n", type=int, default=5000)
    p.add_argument("--buckets", default="1.0,0.8,0.75,0.7",
                   metavar="EDGES", help="descending bucket edges")
    p.add_argument("--report", metavar="DIR",
                   help="write tables and figures into DIR")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("cluster", help="group store vectors by similarity")
    _global_flags(p, suppress=True)
    p.add_argument("--store", required=True, metavar="FILE")
    p.add_argument("--corpus", required=True, metavar="DIR")
    p.add_argument("--min-sim", type=float, default=0.7)
    p.add_argument("--min-count", type=int, default=10)
    p.add_argument("--linkage", choices=("average", "complete"),
                   default="average")
    p.add_argument("--top", type=int, default=11)
    p.add_argument("--per-year", action="store_true")
    p.add_argument("--report", metavar="DIR",
                   help="write tables and figures into DIR")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("sentiment", help="label matched sentences")
    _global_flags(p, suppress=True)
    p.add_argument("--corpus", required=True, metavar="DIR")
    p.add_argument("--keywords", required=True, metavar="EXPR",
                   help=_keyword_help())
    p.add_argument("--task", required=True, choices=("emotion", "polarity"))
    p.add_argument("--min-support", type=int, default=100)
    p.add_argument("--drop", default="neutral,gratitude", metavar="LABELS")
    p.add_argument("--cluster", action="store_true",
                   help="cluster one polarity class (needs --model)")
    p.add_argument("--model", metavar="ABBR")
    p.add_argument("--min-sim", type=float, default=0.85)
    p.add_argument("--min-count", type=int, default=10)
    p.add_argument("--polarity", default="negative",
                   choices=("negative", "positive", "neutral"))
    p.add_argument("--provider", default="builtin:lexicon", metavar="URL")
    p.add_argument("--report", metavar="DIR",
                   help="write tables and figures into DIR")
    p.set_defaults(func=cmd_sentiment)

    p = sub.add_parser("summarize", help="summarize saved search hits")
    _global_flags(p, suppress=True)
    p.add_argument("--from-search", required=True, metavar="FILE",
                   help="JSON hits file produced by search --json")
    p.add_argument("--template", required=True,
                   choices=("summary400", "challenge", "topic50"))
    p.add_argument("--provider", default="echo", metavar="URL")
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("serve", help="run the HTTP API")
    _global_flags(p, suppress=True)
    p.add_argument("--config", metavar="FILE")
    p.add_argument("--listen", metavar="HOST:PORT")
    p.set_defaults(func=cmd_serve)

    return parser


def dispatch(argv: Sequence[str] | None = None) -> ExitStatus:
    """Parse argv, route to a subcommand, and map failures to exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return ExitStatus.OK if exc.code in (0, None) else ExitStatus.USAGE_ERROR
    if args.threads is not None:
        try:
            _cap_threads(args.threads)
        except ValueError as exc:
            _error(exc)
            return ExitStatus.USAGE_ERROR
    try:
        return args.func(args)
    except ProviderUnavailable as exc:
        _error(exc)
        return ExitStatus.PROVIDER_ERROR
    except BadEdges as exc:
        # flag-borne, so a usage problem rather than a data problem
        _error(exc)
        return ExitStatus.USAGE_ERROR
    except LitminiError as exc:
        _error(exc)
        return ExitStatus.DATA_ERROR
    except ValueError as exc:
        _error(exc)
        return ExitStatus.USAGE_ERROR
    except OSError as exc:
        _error(exc)
        return ExitStatus.DATA_ERROR


def main(argv: Sequence[str] | None = None) -> int:
    return int(dispatch(argv))


if __name__ == "__main__":
    sys.exit(main())
