"""Model registry and embedding providers.

Each registered model pairs its descriptive parameters with a provider that
turns texts into float32 vectors. Real transformer inference stays behind an
HTTP provider; the builtin hash provider is a deterministic in-process
embedder with the same interface, so every downstream stage can be exercised
without model weights.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol, Sequence

import httpx
import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicateModel,
    ProviderUnavailable,
    UnknownModel,
    ZeroVector,
)

_TOKEN_RE = re.compile(r"[a-z0-9]+")
_BUILTIN_HASH_RE = re.compile(r"^builtin:hash:(\d+)$")

DEFAULT_HTTP_TIMEOUT = 30.0


@dataclass(frozen=True)
class ModelSpec:
    """Descriptive parameters of one sentence embedding model."""

    full_name: str
    abbr: str
    max_seq_len: int
    dim: int
    size_params: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"model {self.abbr}: dim must be >= 1, got {self.dim}")
        if self.max_seq_len < 1:
            raise ValueError(f"model {self.abbr}: max_seq_len must be >= 1")


# The stock six-model ensemble. Sizes are approximate parameter counts.
DEFAULT_MODEL_SPECS = (
    ModelSpec("all-MiniLM-L6-v2", "PSTM_1", 256, 384, 22_700_000),
    ModelSpec("all-MiniLM-L12-v2", "PSTM_2", 256, 384, 33_400_000),
    ModelSpec("all-mpnet-base-v2", "PSTM_3", 384, 768, 109_000_000),
    ModelSpec("mxbai-embed-large-v1", "PSTM_4", 512, 1024, 335_000_000),
    ModelSpec("multilingual-e5-large-instruct", "PSTM_5", 512, 1024, 560_000_000),
    ModelSpec("SFR-Embedding-Mistral", "PSTM_6", 4096, 4096, 7_110_000_000),
)


def normalize(v: np.ndarray) -> np.ndarray:
    """Scale v to unit L2 norm, preserving direction."""
    v = np.asarray(v, dtype=np.float64)
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise ZeroVector("cannot normalize an all-zero vector")
    return (v / norm).astype(np.float32)


def hash_embed(text: str, dim: int, seed: int) -> np.ndarray:
    """Deterministic bag-of-words embedding standing in for a real model.

    Tokens are lowercase [a-z0-9] runs. Each token is hashed (keyed by the
    seed) to a bucket and a sign, signed counts are accumulated, and the
    result is unit-normalized. Texts with no tokens, or whose signed counts
    cancel exactly, map to the first basis vector so the output is always a
    unit vector.
    """
    acc = np.zeros(dim, dtype=np.float64)
    key = (seed & 0xFFFFFFFFFFFFFFFF).to_bytes(8, "little")
    for token in _TOKEN_RE.findall(text.lower()):
        digest = hashlib.blake2b(token.encode("utf-8"), digest_size=9, key=key).digest()
        h = int.from_bytes(digest, "little")
        bucket = (h & 0xFFFFFFFFFFFFFFFF) % dim
        sign = 1.0 if (h >> 64) & 1 else -1.0
        acc[bucket] += sign
    norm = float(np.linalg.norm(acc))
    if norm == 0.0:
        out = np.zeros(dim, dtype=np.float32)
        out[0] = 1.0
        return out
    return (acc / norm).astype(np.float32)


class EmbedProvider(Protocol):
    def embed(self, model_name: str, texts: Sequence[str], dim: int) -> np.ndarray: ...


class HashEmbedProvider:
    """In-process provider wrapping hash_embed with a fixed seed."""

    def __init__(self, seed: int):
        self.seed = seed

    def embed(self, model_name: str, texts: Sequence[str], dim: int) -> np.ndarray:
        out = np.empty((len(texts), dim), dtype=np.float32)
        for i, text in enumerate(texts):
            out[i] = hash_embed(text, dim, self.seed)
        return out


class HttpEmbedProvider:
    """Provider speaking the embedding wire protocol.

    POST {url}/embed with {"model": full name, "texts": [...]} and expect
    {"vectors": [[...], ...]}. Connection failures and non-200 responses
    surface as ProviderUnavailable.
    """

    def __init__(self, url: str, timeout: float = DEFAULT_HTTP_TIMEOUT,
                 client: httpx.Client | None = None):
        self.url = url.rstrip("/")
        self._client = client or httpx.Client(timeout=timeout)

    def embed(self, model_name: str, texts: Sequence[str], dim: int) -> np.ndarray:
        try:
            resp = self._client.post(f"{self.url}/embed",
                                     json={"model": model_name, "texts": list(texts)})
        except httpx.HTTPError as exc:
            raise ProviderUnavailable(f"embedding provider {self.url}: {exc}") from exc
        if resp.status_code != 200:
            detail = _error_detail(resp)
            raise ProviderUnavailable(
                f"embedding provider {self.url} returned {resp.status_code}: {detail}")
        vectors = resp.json().get("vectors")
        if vectors is None or len(vectors) != len(texts):
            raise ProviderUnavailable(
                f"embedding provider {self.url}: malformed response")
        return np.asarray(vectors, dtype=np.float32)


def _error_detail(resp: httpx.Response) -> str:
    try:
        return str(resp.json().get("error", resp.text))
    except ValueError:
        return resp.text


def truncate_tokens(text: str, max_tokens: int) -> str:
    """Keep at most max_tokens whitespace-delimited tokens."""
    tokens = text.split()
    if len(tokens) <= max_tokens:
        return text
    return " ".join(tokens[:max_tokens])


class ModelRegistry:
    """Read-only mapping from model abbreviation to (spec, provider)."""

    def __init__(self):
        self._entries: dict[str, tuple[ModelSpec, EmbedProvider]] = {}

    def register(self, spec: ModelSpec, provider: EmbedProvider) -> None:
        if spec.abbr in self._entries:
            raise DuplicateModel(f"model {spec.abbr!r} already registered")
        self._entries[spec.abbr] = (spec, provider)

    def get(self, abbr: str) -> tuple[ModelSpec, EmbedProvider]:
        try:
            return self._entries[abbr]
        except KeyError:
            raise UnknownModel(
                f"model {abbr!r} not registered (have: {', '.join(self._entries) or 'none'})"
            ) from None

    def spec(self, abbr: str) -> ModelSpec:
        return self.get(abbr)[0]

    def abbrs(self) -> list[str]:
        return list(self._entries)

    def __contains__(self, abbr: str) -> bool:
        return abbr in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def embed_batch(self, abbr: str, texts: Sequence[str]) -> np.ndarray:
        """Embed texts with the named model, returning an (n, dim) float32 array.

        Texts beyond the model's sequence limit are truncated to its first
        max_seq_len whitespace tokens before embedding. Output row order
        matches input order.
        """
        spec, provider = self.get(abbr)
        prepared = [truncate_tokens(t, spec.max_seq_len) for t in texts]
        vectors = provider.embed(spec.full_name, prepared, spec.dim)
        vectors = np.asarray(vectors, dtype=np.float32)
        if vectors.ndim != 2 or vectors.shape != (len(texts), spec.dim):
            raise DimensionMismatch(
                f"model {abbr}: provider returned shape {vectors.shape}, "
                f"expected ({len(texts)}, {spec.dim})")
        if not np.all(np.isfinite(vectors)):
            raise DimensionMismatch(f"model {abbr}: provider returned non-finite values")
        return vectors


def provider_from_locator(locator: str) -> EmbedProvider:
    """Build a provider from a registry config locator.

    "builtin:hash:<seed>" selects the in-process hash embedder; anything
    else is treated as the base URL of an embedding service.
    """
    m = _BUILTIN_HASH_RE.match(locator)
    if m:
        return HashEmbedProvider(seed=int(m.group(1)))
    return HttpEmbedProvider(locator)


def default_registry() -> ModelRegistry:
    """The six stock models, each bound to a distinctly seeded hash embedder."""
    registry = ModelRegistry()
    for i, spec in enumerate(DEFAULT_MODEL_SPECS, start=1):
        registry.register(spec, HashEmbedProvider(seed=i))
    return registry


def load_registry(source: str | Path | Iterable[dict]) -> ModelRegistry:
    """Build a registry from config rows.

    Accepts a JSON file path or pre-parsed rows; each row carries full_name,
    abbr, max_seq_len, dim, size_params, and provider_url (an embedding
    service base URL or a "builtin:hash:<seed>" locator).
    """
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as f:
            rows = json.load(f)
    else:
        rows = list(source)
    registry = ModelRegistry()
    for row in rows:
        spec = ModelSpec(
            full_name=row["full_name"],
            abbr=row["abbr"],
            max_seq_len=int(row["max_seq_len"]),
            dim=int(row["dim"]),
            size_params=int(row["size_params"]),
        )
        registry.register(spec, provider_from_locator(row["provider_url"]))
    return registry
