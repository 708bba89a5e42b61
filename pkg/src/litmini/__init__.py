"""Sentence-level semantic search and literature mining.

The pipeline splits documents into a sentence corpus, embeds sentences
under several models, answers queries by exact inner-product search with
ensemble averaging, groups results by threshold-driven agglomerative
clustering, aggregates sentiment labels, and hands selections to a
summarization provider. Each stage lives in its own submodule:

- ``corpus``: sentence records, document metadata, persistence
- ``ingest``: document parsing and sentence splitting
- ``embed``: model registry and embedding providers
- ``index``: binary vector stores, keyword filters, exact top-k scan
- ``search``: multi-model ensemble ranking and threshold selection
- ``cluster``: agglomerative clustering, trends, planar projection
- ``sentiment``: emotion and polarity classification pipelines
- ``summarize``: prompt templates and summarization providers
- ``report``: delimited tables and figures for results
- ``service``: read-only HTTP API over a prepared corpus
- ``cli``: the ``litmini`` command

Submodules load on first attribute access, keeping import light for
entry points that need only a slice of the pipeline.
"""
from __future__ import annotations

import importlib

__version__ = "0.1.0"

_SUBMODULES = frozenset({
    "cli", "cluster", "corpus", "embed", "errors", "index", "ingest",
    "report", "search", "sentiment", "service", "summarize",
})

__all__ = sorted(_SUBMODULES) + ["__version__"]


def __getattr__(name: str):
    if name in _SUBMODULES:
        return importlib.import_module(f".{name}", __name__)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def __dir__():
    return __all__
