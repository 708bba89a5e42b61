"""Render search and clustering results to delimited files and figures.

Every renderer writes into a caller-supplied directory and returns the
paths it created, tab-separated tables first, PNG figures after. Tables
are the machine-readable record; figures are a human-readable view of
the same rows.
"""
from __future__ import annotations

from pathlib import Path
from typing import Iterable, Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .cluster import Cluster, TrendSeries, projection_points, representatives
from .corpus import Corpus
from .index import VectorStore
from .search import (DEFAULT_BUCKET_EDGES, SearchHit, influence_from_hits,
                     score_buckets)

FIGURE_DPI = 120


def _flat(text: str) -> str:
    # Tables are tab-delimited with one row per line; collapse whitespace.
    return " ".join(text.split())


def write_tsv(path: Path, header: Sequence[str],
              rows: Iterable[Sequence[object]]) -> Path:
    """Write one header line and one line per row, tab-separated."""
    lines = ["\t".join(header)]
    for row in rows:
        cells = [str(cell) for cell in row]
        if len(cells) != len(header):
            raise ValueError(
                f"row has {len(cells)} cells, header has {len(header)}")
        lines.append("\t".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _save(fig: plt.Figure, path: Path) -> Path:
    fig.savefig(path, dpi=FIGURE_DPI)
    plt.close(fig)
    return path


def _cluster_color(cluster_id: int) -> tuple:
    return plt.get_cmap("tab10")((cluster_id - 1) % 10)


def _store_rows(store: VectorStore) -> np.ndarray:
    rows = store.matrix.astype(np.float64)
    if not store.normalized:
        norms = np.linalg.norm(rows, axis=1, keepdims=True)
        norms[norms == 0.0] = 1.0
        rows = rows / norms
    return rows


def render_search_report(out_dir: Path, corpus: Corpus,
                         hits: Sequence[SearchHit],
                         bucket_edges: Sequence[float] = DEFAULT_BUCKET_EDGES,
                         ) -> list[Path]:
    """Ranked hits, score curves, bucket counts, and model influence.

    Influence files appear only when the hits carry at least two models;
    with zero hits only the (header-only) hit table and the bucket files
    are produced.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    abbrs = sorted(hits[0].per_model_scores) if hits else []
    header = ["rank", "sid", "ensemble", "variance"]
    header += [f"score_{abbr}" for abbr in abbrs]
    header += ["journal", "year", "text"]
    rows = []
    for hit in hits:
        meta = corpus.meta_for(hit.sid)
        row = [hit.rank, hit.sid, f"{hit.ensemble_score:.6f}",
               f"{hit.variance:.6f}"]
        row += [f"{hit.per_model_scores[abbr]:.6f}" for abbr in abbrs]
        row += [meta.journal_abbr, meta.year,
                _flat(corpus.record(hit.sid).text)]
        rows.append(row)
    written.append(write_tsv(out_dir / "search.tsv", header, rows))

    buckets = score_buckets(hits, bucket_edges)
    written.append(write_tsv(out_dir / "buckets.tsv", ["bucket", "count"],
                             [(b.label, b.count) for b in buckets]))

    shares: dict[str, float] = {}
    if hits and len(abbrs) >= 2:
        shares = influence_from_hits(hits).shares
        written.append(write_tsv(
            out_dir / "influence.tsv", ["model", "share_percent"],
            [(abbr, f"{shares[abbr]:.3f}") for abbr in sorted(shares)]))

    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    if hits:
        ranks = [hit.rank for hit in hits]
        for abbr in abbrs:
            ax.plot(ranks, [hit.per_model_scores[abbr] for hit in hits],
                    linewidth=0.9, alpha=0.7, label=abbr)
        ax.plot(ranks, [hit.ensemble_score for hit in hits],
                linewidth=1.8, color="black", label="ensemble")
        ax.legend(fontsize=8)
    ax.set_xlabel("rank")
    ax.set_ylabel("score")
    ax.set_title("scores by rank")
    written.append(_save(fig, out_dir / "scores.png"))

    fig, ax = plt.subplots(figsize=(5.6, 4.2))
    labels = [b.label for b in buckets]
    ax.bar(range(len(buckets)), [b.count for b in buckets],
           color="steelblue")
    ax.set_xticks(range(len(buckets)), labels, fontsize=8)
    ax.set_xlabel("score bucket")
    ax.set_ylabel("sentences")
    ax.set_title("score distribution")
    written.append(_save(fig, out_dir / "buckets.png"))

    if shares:
        fig, ax = plt.subplots(figsize=(5.6, 4.2))
        ordered = sorted(shares)
        ax.bar(range(len(ordered)), [shares[a] for a in ordered],
               color="darkorange")
        ax.set_xticks(range(len(ordered)), ordered, fontsize=8)
        ax.set_ylabel("influence (%)")
        ax.set_title("per-model influence")
        written.append(_save(fig, out_dir / "influence.png"))
    return written


def render_cluster_report(out_dir: Path, corpus: Corpus,
                          clusters: Sequence[Cluster], store: VectorStore,
                          prefix: str = "clusters") -> list[Path]:
    """Cluster summary table, member scatter table, and scatter figure.

    Every member sid must be present in the store; scatter coordinates
    come from a planar projection of the member vectors.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    rows = _store_rows(store)
    sids = [int(s) for s in store.sids.tolist()]
    summary = []
    for cluster in clusters:
        rep = representatives(cluster, corpus, rows, sids, 1)[0]
        summary.append((cluster.cluster_id, cluster.size,
                        min(cluster.member_sids), _flat(rep.text)))
    written.append(write_tsv(out_dir / f"{prefix}.tsv",
                             ["cluster_id", "size", "min_sid",
                              "representative"], summary))

    points = projection_points(clusters, store)
    written.append(write_tsv(
        out_dir / f"{prefix}_points.tsv", ["sid", "x", "y", "cluster_id"],
        [(sid, f"{x:.6f}", f"{y:.6f}", cid) for sid, x, y, cid in points]))

    fig, ax = plt.subplots(figsize=(6.0, 5.0))
    for cluster in clusters:
        member = [p for p in points if p[3] == cluster.cluster_id]
        ax.scatter([p[1] for p in member], [p[2] for p in member], s=12,
                   color=_cluster_color(cluster.cluster_id),
                   label=f"{cluster.cluster_id} (n={cluster.size})")
    if clusters:
        ax.legend(fontsize=7, loc="best")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title("cluster map")
    written.append(_save(fig, out_dir / f"{prefix}.png"))
    return written


def render_trends_report(out_dir: Path, corpus: Corpus, series: TrendSeries,
                         store: VectorStore,
                         prefix: str = "trends") -> list[Path]:
    """Per-year cluster tables and a panel-per-year scatter figure."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    rows = _store_rows(store)
    sids = [int(s) for s in store.sids.tolist()]
    summary = []
    point_rows = []
    for entry in series.entries:
        if not entry.clusters:
            summary.append((entry.year, entry.total_points, "", "", ""))
            continue
        for cluster in entry.clusters:
            rep = representatives(cluster, corpus, rows, sids, 1)[0]
            summary.append((entry.year, entry.total_points,
                            cluster.cluster_id, cluster.size,
                            _flat(rep.text)))
        for sid, x, y, cid in projection_points(entry.clusters, store):
            point_rows.append((entry.year, sid, f"{x:.6f}", f"{y:.6f}", cid))
    written.append(write_tsv(out_dir / f"{prefix}.tsv",
                             ["year", "total_points", "cluster_id", "size",
                              "representative"], summary))
    written.append(write_tsv(out_dir / f"{prefix}_points.tsv",
                             ["year", "sid", "x", "y", "cluster_id"],
                             point_rows))

    n = len(series.entries)
    cols = min(5, max(1, n))
    nrows = (n + cols - 1) // cols
    fig, axes = plt.subplots(nrows, cols,
                             figsize=(3.0 * cols, 2.6 * nrows),
                             squeeze=False)
    for idx, entry in enumerate(series.entries):
        ax = axes[idx // cols][idx % cols]
        by_year = [(y, s, xx, yy, cid) for y, s, xx, yy, cid in point_rows
                   if y == entry.year]
        for _, sid, xx, yy, cid in by_year:
            ax.scatter(float(xx), float(yy), s=8, color=_cluster_color(cid))
        ax.set_title(f"{entry.year} (n={entry.total_points})", fontsize=8)
        ax.tick_params(labelsize=6)
    for idx in range(n, nrows * cols):
        axes[idx // cols][idx % cols].axis("off")
    fig.tight_layout()
    written.append(_save(fig, out_dir / f"{prefix}.png"))
    return written


def render_label_counts(out_dir: Path, counts: Mapping[str, int],
                        prefix: str = "emotions") -> list[Path]:
    """Label histogram as a table and a bar chart, largest count first."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    written = [write_tsv(out_dir / f"{prefix}.tsv", ["label", "count"],
                         ordered)]
    fig, ax = plt.subplots(figsize=(max(4.0, 0.6 * len(ordered) + 2.0), 4.2))
    ax.bar(range(len(ordered)), [count for _, count in ordered],
           color="seagreen")
    ax.set_xticks(range(len(ordered)), [label for label, _ in ordered],
                  rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("sentences")
    ax.set_title("label counts")
    fig.tight_layout()
    written.append(_save(fig, out_dir / f"{prefix}.png"))
    return written
