"""Prompt assembly and LLM-backed summarization of selected sentences.

Language models are reached through a one-endpoint wire protocol; an echo
double that returns its own prompt keeps every pipeline testable offline.
Summaries always carry provenance: which sentences went in, under which
template, to which provider.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Protocol

import httpx
import numpy as np

from .cluster import Cluster, representatives
from .corpus import Corpus
from .errors import EmptySelection, ProviderUnavailable
from .search import SearchHit

PLACEHOLDER = "{TEXT}"

DEFAULT_HTTP_TIMEOUT = 30.0
DEFAULT_RETRIES = 2
DEFAULT_REPS_PER_CLUSTER = 25


@dataclass(frozen=True)
class PromptTemplate:
    """Named prompt text containing exactly one {TEXT} placeholder."""

    name: str
    template: str

    def __post_init__(self):
        if self.template.count(PLACEHOLDER) != 1:
            raise ValueError(
                f"template {self.name!r} must contain exactly one "
                f"{PLACEHOLDER} placeholder")


TEMPLATES: dict[str, PromptTemplate] = {
    t.name: t for t in (
        PromptTemplate(
            name="summary400",
            template=("Please summarize provided text with at least 400 words"
                      "\n\n{TEXT}")),
        PromptTemplate(
            name="challenge",
            template="Please summarize the challenge\n\n{TEXT}"),
        PromptTemplate(
            name="topic50",
            template=("Please find the topic within 10 words and summarize "
                      "the text file within 50 words\n\n{TEXT}")),
    )
}

DEFAULT_TEMPLATE = "summary400"
CLUSTER_TEMPLATE = "topic50"


def get_template(name: str) -> PromptTemplate:
    """Look up a shipped template by name."""
    try:
        return TEMPLATES[name]
    except KeyError:
        raise ValueError(
            f"unknown template {name!r}; available: {sorted(TEMPLATES)}") from None


def render_prompt(template: PromptTemplate, sentences: Sequence[str],
                  separator: str = "\n") -> str:
    """Substitute the joined sentences into the template's placeholder."""
    if not sentences:
        raise EmptySelection("cannot render a prompt from zero sentences")
    return template.template.replace(PLACEHOLDER, separator.join(sentences))


class SummarizeProvider(Protocol):
    """Anything that turns a prompt into a summary text."""

    provider_id: str

    def summarize(self, prompt: str) -> str:
        ...


class EchoSummarizer:
    """Offline double that returns its prompt verbatim."""

    provider_id = "echo"

    def summarize(self, prompt: str) -> str:
        return prompt


class HttpSummarizer:
    """Provider speaking the summarization wire protocol.

    POST {url}/summarize with {"prompt": ...} and expect {"summary": ...}.
    Transport failures are retried; exhaustion, non-200 responses, and
    malformed bodies surface as ProviderUnavailable.
    """

    def __init__(self, url: str, timeout: float = DEFAULT_HTTP_TIMEOUT,
                 retries: int = DEFAULT_RETRIES,
                 client: httpx.Client | None = None):
        if retries < 0:
            raise ValueError("retries must be non-negative")
        self.url = url.rstrip("/")
        self.retries = retries
        self._client = client or httpx.Client(timeout=timeout)

    @property
    def provider_id(self) -> str:
        return self.url

    def summarize(self, prompt: str) -> str:
        attempts = self.retries + 1
        last_exc: httpx.HTTPError | None = None
        for _ in range(attempts):
            try:
                resp = self._client.post(f"{self.url}/summarize",
                                         json={"prompt": prompt})
            except httpx.HTTPError as exc:
                last_exc = exc
                continue
            if resp.status_code != 200:
                detail = _error_detail(resp)
                raise ProviderUnavailable(
                    f"summarizer {self.url} returned {resp.status_code}: {detail}")
            summary = resp.json().get("summary")
            if not isinstance(summary, str):
                raise ProviderUnavailable(
                    f"summarizer {self.url}: malformed response")
            return summary
        raise ProviderUnavailable(
            f"summarizer {self.url}: {last_exc} after {attempts} attempts")


def _error_detail(resp: httpx.Response) -> str:
    try:
        return str(resp.json().get("error", resp.text))
    except ValueError:
        return resp.text


@dataclass(frozen=True)
class SummaryResult:
    """Provider output plus the provenance of what was summarized."""

    summary: str
    template: str
    sentence_count: int
    sids: tuple[int, ...]
    provider_id: str


def summarize_selection(
    provider: SummarizeProvider,
    corpus: Corpus,
    selection: Sequence[SearchHit | int],
    template: str = DEFAULT_TEMPLATE,
    separator: str = "\n",
) -> SummaryResult:
    """Summarize the texts behind a ranked selection.

    The selection is a list of search hits or of bare sentence ids; order
    is preserved in the prompt and recorded in the provenance.
    """
    if not selection:
        raise EmptySelection("nothing selected to summarize")
    sids = tuple(item.sid if isinstance(item, SearchHit) else int(item)
                 for item in selection)
    texts = [corpus.record(sid).text for sid in sids]
    prompt = render_prompt(get_template(template), texts, separator)
    return SummaryResult(
        summary=provider.summarize(prompt),
        template=template,
        sentence_count=len(sids),
        sids=sids,
        provider_id=provider.provider_id,
    )


@dataclass(frozen=True)
class ClusterLabel:
    """Topic line and summary body produced for one cluster."""

    topic: str
    summary: str


def _split_topic(response: str) -> ClusterLabel:
    # First non-empty line is the topic; the remainder is the summary.
    lines = response.splitlines()
    for i, line in enumerate(lines):
        if line.strip():
            rest = "\n".join(lines[i + 1:]).strip()
            return ClusterLabel(topic=line.strip(), summary=rest)
    return ClusterLabel(topic="", summary="")


def label_clusters(
    provider: SummarizeProvider,
    clusters: Sequence[Cluster],
    corpus: Corpus,
    vectors: np.ndarray,
    sids: Sequence[int],
    reps_per_cluster: int = DEFAULT_REPS_PER_CLUSTER,
    template: str = CLUSTER_TEMPLATE,
) -> dict[int, ClusterLabel]:
    """Produce a topic and summary for each cluster from its representatives.

    Each cluster's representatives (nearest the centroid, capped at
    reps_per_cluster) are rendered through the template and sent to the
    provider; responses are split at the first line break into topic and
    summary. Results are keyed by cluster_id in cluster order.
    """
    if not clusters:
        raise EmptySelection("no clusters to label")
    chosen = get_template(template)
    out: dict[int, ClusterLabel] = {}
    for cluster in clusters:
        reps = representatives(cluster, corpus, vectors, sids,
                               m=reps_per_cluster)
        prompt = render_prompt(chosen, [r.text for r in reps])
        out[cluster.cluster_id] = _split_topic(provider.summarize(prompt))
    return out
