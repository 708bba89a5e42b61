"""Read-only HTTP API over corpus, stores, search, clustering, and providers.

The server is a thin stateless adapter: every endpoint parses parameters,
calls the corresponding library operation, and serializes the result with
the helpers in this module. Nothing here mutates the corpus or the stores.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
from fastapi import Body, FastAPI
from fastapi.exceptions import RequestValidationError
from fastapi.responses import FileResponse, JSONResponse

from .cluster import (
    Cluster,
    ClusterParams,
    agglomerate,
    cluster_json,
    points_json,
    top_clusters,
    yearly_trends,
)
from .corpus import Corpus, DocMeta, load_corpus, record_to_json
from .embed import ModelRegistry, default_registry, load_registry
from .errors import (
    BadEdges,
    EmptyCorpus,
    EmptyQuery,
    EmptySelection,
    InputTooLarge,
    LitminiError,
    NoCandidates,
    ProviderUnavailable,
    UnknownLabel,
    UnknownModel,
    UnknownSid,
)
from .index import (
    KeywordQuery,
    VectorStore,
    get_context,
    load_store,
    parse_keyword_expr,
)
from .search import (
    DEFAULT_MAX_SELECTION,
    DEFAULT_MIN_SCORE,
    SearchHit,
    candidate_sids,
    ensemble_search,
    hit_json,
    threshold_select,
)
from .sentiment import (
    DEFAULT_DROP_LABELS,
    DEFAULT_MIN_SUPPORT,
    DEFAULT_POLARITY_CLUSTER_PARAMS,
    HttpClassifierProvider,
    LexiconClassifier,
    classify_emotions,
    emotion_pipeline,
    polarity_partition_and_cluster,
)
from .summarize import (
    DEFAULT_TEMPLATE,
    EchoSummarizer,
    HttpSummarizer,
    summarize_selection,
)

ENV_CONFIG = "LITMINI_CONFIG"
ENV_LISTEN = "LITMINI_LISTEN"

DEFAULT_LISTEN = "127.0.0.1:8080"
DEFAULT_K = 10
DEFAULT_CONTEXT_BEFORE = 1
DEFAULT_CONTEXT_AFTER = 1
DEFAULT_FLAT_TOP_N = 11
DEFAULT_YEARLY_TOP_N = 10
REPRESENTATIVES_PER_CLUSTER = 3

BUILTIN_LEXICON = "builtin:lexicon"
BUILTIN_ECHO = "builtin:echo"


@dataclass
class ServiceConfig:
    """Startup-time wiring: data paths, providers, and default parameters."""

    corpus_dir: Path
    stores: dict[str, Path]
    listen: str = DEFAULT_LISTEN
    model_rows: list[dict] | None = None
    classify_provider: str = BUILTIN_LEXICON
    summarize_provider: str = BUILTIN_ECHO
    default_k: int = DEFAULT_K
    min_score: float = DEFAULT_MIN_SCORE
    max_n: int = DEFAULT_MAX_SELECTION
    context_before: int = DEFAULT_CONTEXT_BEFORE
    context_after: int = DEFAULT_CONTEXT_AFTER
    servable: bool = False

    def validate(self) -> None:
        if not Path(self.corpus_dir).is_dir():
            raise FileNotFoundError(f"corpus directory missing: {self.corpus_dir}")
        for abbr, path in self.stores.items():
            if not Path(path).is_file():
                raise FileNotFoundError(f"store for {abbr} missing: {path}")
        if self.default_k < 1:
            raise ValueError("default k must be >= 1")
        if self.max_n < 1:
            raise ValueError("max_n must be >= 1")
        if not -1.0 <= self.min_score <= 1.0:
            raise ValueError("min_score must lie in [-1, 1]")
        if self.context_before < 0 or self.context_after < 0:
            raise ValueError("context sizes must be non-negative")


def load_config(path: str | Path) -> ServiceConfig:
    """Parse a JSON config file and check its references and ranges."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    search = raw.get("search", {})
    context = raw.get("context", {})
    providers = raw.get("providers", {})
    config = ServiceConfig(
        corpus_dir=Path(raw["corpus_dir"]),
        stores={abbr: Path(p) for abbr, p in raw.get("stores", {}).items()},
        listen=raw.get("listen", DEFAULT_LISTEN),
        model_rows=raw.get("models"),
        classify_provider=providers.get("classify", BUILTIN_LEXICON),
        summarize_provider=providers.get("summarize", BUILTIN_ECHO),
        default_k=int(search.get("k", DEFAULT_K)),
        min_score=float(search.get("min_score", DEFAULT_MIN_SCORE)),
        max_n=int(search.get("max_n", DEFAULT_MAX_SELECTION)),
        context_before=int(context.get("before", DEFAULT_CONTEXT_BEFORE)),
        context_after=int(context.get("after", DEFAULT_CONTEXT_AFTER)),
        servable=bool(raw.get("servable", False)),
    )
    config.validate()
    return config


def resolve_listen(listen: str) -> tuple[str, int]:
    """Split a host:port listen address."""
    host, sep, port = listen.rpartition(":")
    if not sep or not host:
        raise ValueError(f"listen address must be host:port, got {listen!r}")
    return host, int(port)


def _make_classifier(locator: str):
    if locator == BUILTIN_LEXICON:
        return LexiconClassifier()
    return HttpClassifierProvider(locator)


def _make_summarizer(locator: str):
    if locator == BUILTIN_ECHO:
        return EchoSummarizer()
    return HttpSummarizer(locator)


@dataclass
class ServiceState:
    """Everything loaded at startup; immutable while serving."""

    config: ServiceConfig
    corpus: Corpus
    registry: ModelRegistry
    stores: dict[str, VectorStore]
    classifier: Any
    summarizer: Any


def build_state(config: ServiceConfig) -> ServiceState:
    """Load corpus, stores, and providers per the config."""
    config.validate()
    corpus = load_corpus(config.corpus_dir)
    registry = (load_registry(rows=config.model_rows)
                if config.model_rows else default_registry())
    stores = {}
    for abbr, path in sorted(config.stores.items()):
        store = load_store(path)
        if store.model_abbr != abbr:
            raise ValueError(
                f"store {path} holds model {store.model_abbr}, configured as {abbr}")
        stores[abbr] = store
    return ServiceState(
        config=config,
        corpus=corpus,
        registry=registry,
        stores=stores,
        classifier=_make_classifier(config.classify_provider),
        summarizer=_make_summarizer(config.summarize_provider),
    )


# -- serialization helpers (shared with conformance tests) -------------------

def search_hit_payload(corpus: Corpus, hit: SearchHit,
                       before: int, after: int) -> dict:
    """One ranked hit with display context and its source descriptor."""
    window = get_context(corpus, hit.sid, before, after)
    meta = corpus.meta_for(hit.sid)
    payload = hit_json(corpus, hit)
    payload["context"] = {
        "before": [r.text for r in window.before],
        "after": [r.text for r in window.after],
    }
    payload["source"] = {"doc_id": window.center.doc_id,
                         "source_path": meta.source_path}
    return payload


def context_payload(corpus: Corpus, sid: int, before: int, after: int) -> dict:
    window = get_context(corpus, sid, before, after)
    meta = corpus.meta_for(sid)
    return {
        "before": [record_to_json(r, corpus.meta_for(r.sid)) for r in window.before],
        "center": record_to_json(window.center, meta),
        "after": [record_to_json(r, corpus.meta_for(r.sid)) for r in window.after],
    }


def open_payload(doc_id: str, meta: DocMeta, servable: bool) -> dict:
    return {
        "doc_id": doc_id,
        "title": meta.title,
        "journal": meta.journal_abbr,
        "year": meta.year,
        "source_path": meta.source_path,
        "servable": servable,
    }


def cluster_payload(corpus: Corpus, cluster: Cluster, store: VectorStore,
                    reps: int = REPRESENTATIVES_PER_CLUSTER) -> dict:
    return cluster_json(corpus, cluster, store, reps)


def points_payload(clusters: list[Cluster], store: VectorStore) -> list[dict]:
    return points_json(clusters, store)


# -- request handling --------------------------------------------------------

def _parse_years(year_from: int | None, year_to: int | None):
    if year_from is None and year_to is None:
        return None
    return (year_from if year_from is not None else 0,
            year_to if year_to is not None else 10_000)


def _parse_keywords(expr: str | None) -> KeywordQuery | None:
    if expr is None or not expr.strip():
        return None
    return parse_keyword_expr(expr)


def _pick_store(state: ServiceState, model: str | None) -> tuple[str, VectorStore]:
    if not state.stores:
        raise UnknownModel("no stores configured")
    if model is None:
        abbr = sorted(state.stores)[0]
        return abbr, state.stores[abbr]
    if model not in state.stores:
        raise UnknownModel(f"unknown model: {model}")
    return model, state.stores[model]


def _matched_rows(state: ServiceState, store: VectorStore,
                  keyword_query: KeywordQuery | None):
    matched = candidate_sids(state.corpus, keyword_query)
    in_store = set(int(s) for s in store.sids.tolist())
    sids = [s for s in matched if s in in_store]
    if not sids:
        return [], None
    positions = np.searchsorted(store.sids, np.asarray(sids, dtype=np.uint64))
    rows = store.matrix[positions]
    if not store.normalized:
        rows = rows.astype(np.float64)
        norms = np.linalg.norm(rows, axis=1, keepdims=True)
        norms[norms == 0.0] = 1.0
        rows = rows / norms
    return sids, rows


def run_search(state: ServiceState, q: str, k: int | None, models: str | None,
               keywords: str | None, year_from: int | None,
               year_to: int | None, journal: str | None) -> list[dict]:
    state.corpus.require_nonempty()
    if k is not None and k < 1:
        raise ValueError("k must be >= 1")
    chosen = None
    if models:
        chosen = [m.strip() for m in models.split(",") if m.strip()]
        for abbr in chosen:
            if abbr not in state.registry or abbr not in state.stores:
                raise UnknownModel(f"unknown model: {abbr}")
    try:
        hits = ensemble_search(
            state.corpus, state.registry, state.stores, q,
            models=chosen,
            k=state.config.default_k if k is None else k,
            keyword_query=_parse_keywords(keywords),
            journal=journal,
            years=_parse_years(year_from, year_to),
        )
    except NoCandidates:
        return []
    hits = threshold_select(hits, state.config.min_score, state.config.max_n)
    return [search_hit_payload(state.corpus, hit, state.config.context_before,
                               state.config.context_after) for hit in hits]


def run_cluster(state: ServiceState, payload: dict) -> dict:
    state.corpus.require_nonempty()
    _, store = _pick_store(state, payload.get("model"))
    keyword_query = _parse_keywords(payload.get("keywords"))
    params = ClusterParams(
        min_similarity=float(payload.get("min_sim", ClusterParams().min_similarity)),
        min_cluster_count=int(payload.get("min_count", ClusterParams().min_cluster_count)),
        linkage=str(payload.get("linkage", ClusterParams().linkage)),
    )
    if payload.get("per_year"):
        top_n = int(payload.get("top_n", DEFAULT_YEARLY_TOP_N))
        series = yearly_trends(state.corpus, store, params,
                               keyword_query=keyword_query, top_n=top_n)
        return {"per_year": {
            str(entry.year): {
                "total_points": entry.total_points,
                "clusters": [cluster_payload(state.corpus, c, store)
                             for c in entry.clusters],
                "points": points_payload(entry.clusters, store),
            }
            for entry in series.entries
        }}
    top_n = int(payload.get("top_n", DEFAULT_FLAT_TOP_N))
    sids, rows = _matched_rows(state, store, keyword_query)
    if not sids:
        return {"clusters": [], "points": []}
    clusters = top_clusters(agglomerate(rows, sids, params), top_n)
    return {
        "clusters": [cluster_payload(state.corpus, c, store) for c in clusters],
        "points": points_payload(clusters, store),
    }


def run_sentiment(state: ServiceState, payload: dict) -> dict:
    state.corpus.require_nonempty()
    task = payload.get("task", "emotion")
    keyword_query = _parse_keywords(payload.get("keywords"))
    if task == "emotion":
        sids = candidate_sids(state.corpus, keyword_query)
        labels = classify_emotions(
            state.classifier, [state.corpus.record(s).text for s in sids])
        drop = payload.get("drop")
        breakdown = emotion_pipeline(
            zip(sids, labels),
            min_support=int(payload.get("min_support", DEFAULT_MIN_SUPPORT)),
            drop=DEFAULT_DROP_LABELS if drop is None else frozenset(drop),
        )
        return {
            "task": "emotion",
            "histogram": {"counts": dict(breakdown.histogram.counts),
                          "total": breakdown.histogram.total},
            "sids": {label: list(sids)
                     for label, sids in breakdown.sids_by_label.items()},
        }
    if task == "polarity":
        _, store = _pick_store(state, payload.get("model"))
        polarity = payload.get("polarity", "negative")
        params = ClusterParams(
            min_similarity=float(payload.get(
                "min_sim", DEFAULT_POLARITY_CLUSTER_PARAMS.min_similarity)),
            min_cluster_count=int(payload.get(
                "min_count", DEFAULT_POLARITY_CLUSTER_PARAMS.min_cluster_count)),
        )
        clusters = polarity_partition_and_cluster(
            state.corpus, state.classifier, store, polarity,
            keyword_query=keyword_query, params=params)
        return {
            "task": "polarity",
            "polarity": polarity,
            "clusters": [cluster_payload(state.corpus, c, store)
                         for c in clusters],
            "points": points_payload(clusters, store),
        }
    raise ValueError(f"unknown sentiment task: {task!r}")


def run_summarize(state: ServiceState, payload: dict) -> dict:
    state.corpus.require_nonempty()
    template = payload.get("template", DEFAULT_TEMPLATE)
    if payload.get("sids"):
        selection = [int(s) for s in payload["sids"]]
    elif payload.get("q"):
        try:
            hits = ensemble_search(
                state.corpus, state.registry, state.stores, payload["q"],
                k=state.config.max_n,
                keyword_query=_parse_keywords(payload.get("keywords")),
            )
        except NoCandidates:
            hits = []
        selection = threshold_select(hits, state.config.min_score,
                                     state.config.max_n)
    else:
        selection = []
    result = summarize_selection(state.summarizer, state.corpus, selection,
                                 template=template)
    return {
        "summary": result.summary,
        "provenance": {
            "template": result.template,
            "sentence_count": result.sentence_count,
            "sids": list(result.sids),
            "provider_id": result.provider_id,
        },
    }


# -- application factory -----------------------------------------------------

_ERROR_STATUS: dict[type, int] = {
    EmptyQuery: 400,
    UnknownModel: 400,
    UnknownLabel: 400,
    BadEdges: 400,
    InputTooLarge: 400,
    EmptyCorpus: 404,
    UnknownSid: 404,
    EmptySelection: 422,
    ProviderUnavailable: 502,
    ValueError: 400,
    LitminiError: 500,
}


def create_app(config: ServiceConfig | str | Path) -> FastAPI:
    """Build the HTTP application with all data loaded up front."""
    if not isinstance(config, ServiceConfig):
        config = load_config(config)
    state = build_state(config)
    app = FastAPI(title="litmini", docs_url=None, redoc_url=None)

    def _error_handler(status: int):
        async def handler(_request, exc):
            return JSONResponse(status_code=status, content={"error": str(exc)})
        return handler

    for exc_type, status in _ERROR_STATUS.items():
        app.add_exception_handler(exc_type, _error_handler(status))

    async def _validation_handler(_request, exc):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    app.add_exception_handler(RequestValidationError, _validation_handler)

    @app.get("/search")
    def search_endpoint(q: str = "", k: int | None = None,
                        models: str | None = None, keywords: str | None = None,
                        year_from: int | None = None,
                        year_to: int | None = None,
                        journal: str | None = None):
        return run_search(state, q, k, models, keywords,
                          year_from, year_to, journal)

    @app.get("/context/{sid}")
    def context_endpoint(sid: int, before: int | None = None,
                         after: int | None = None):
        return context_payload(
            state.corpus, sid,
            state.config.context_before if before is None else before,
            state.config.context_after if after is None else after)

    @app.get("/open/{doc_id:path}")
    def open_endpoint(doc_id: str):
        if "/" in doc_id or "\\" in doc_id or ".." in doc_id:
            raise ValueError("invalid document id")
        if doc_id not in state.corpus.docs:
            raise UnknownSid(f"unknown document: {doc_id}")
        meta = state.corpus.docs[doc_id]
        if state.config.servable:
            path = Path(meta.source_path)
            if not path.is_file():
                raise UnknownSid(f"source file missing for {doc_id}")
            return FileResponse(path)
        return open_payload(doc_id, meta, servable=False)

    @app.post("/cluster")
    def cluster_endpoint(payload: dict = Body(default={})):
        return run_cluster(state, payload)

    @app.post("/sentiment")
    def sentiment_endpoint(payload: dict = Body(default={})):
        return run_sentiment(state, payload)

    @app.post("/summarize")
    def summarize_endpoint(payload: dict = Body(default={})):
        return run_summarize(state, payload)

    return app


def listen_address(config: ServiceConfig, explicit: str | None = None) -> str:
    """Effective listen address: flag, then environment, then config."""
    return explicit or os.environ.get(ENV_LISTEN) or config.listen


def config_path(explicit: str | None = None) -> str:
    """Effective config path: flag, then environment."""
    path = explicit or os.environ.get(ENV_CONFIG)
    if not path:
        raise ValueError(
            f"no config file given (flag --config or {ENV_CONFIG})")
    return path


def serve(config_file: str | None = None, listen: str | None = None) -> None:
    """Run the API server until interrupted."""
    import uvicorn

    config = load_config(config_path(config_file))
    host, port = resolve_listen(listen_address(config, listen))
    uvicorn.run(create_app(config), host=host, port=port, log_level="warning")
