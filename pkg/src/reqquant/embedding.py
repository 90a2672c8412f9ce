"""Text-embedding providers and cosine similarity.

Two providers share one interface: a deterministic offline builtin that
hashes lowercase character trigrams into a fixed number of buckets, and a
remote HTTP client that lets any external encoder plug in.  Vectors are
L2-normalized lists of floats.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass
from typing import MutableMapping, Sequence

import httpx

BUILTIN = "builtin-lexical"
REMOTE = "remote"

#: Cache type shared with the knowledge store: (provider identity, text) -> vector.
EmbeddingCache = MutableMapping[tuple[str, str], list[float]]


class EmbeddingError(RuntimeError):
    """Embedding could not be produced (bad input, transport, bad response)."""


@dataclass(frozen=True)
class ProviderConfig:
    kind: str = BUILTIN
    dimension: int = 256
    endpoint: str | None = None
    timeout: float = 10.0
    cache_enabled: bool = True

    def __post_init__(self) -> None:
        if self.kind not in (BUILTIN, REMOTE):
            raise EmbeddingError(f"unknown provider kind {self.kind!r}")
        if self.dimension < 1:
            raise EmbeddingError("dimension must be positive")
        if self.kind == REMOTE and not self.endpoint:
            raise EmbeddingError("remote provider requires an endpoint")

    @property
    def identity(self) -> str:
        if self.kind == REMOTE:
            return f"{self.kind}:{self.endpoint}:{self.dimension}"
        return f"{self.kind}:{self.dimension}"


def _lexical_vector(text: str, dimension: int) -> list[float]:
    lowered = text.lower()
    grams = [lowered[i:i + 3] for i in range(len(lowered) - 2)] or [lowered]
    buckets = [0.0] * dimension
    for gram in grams:
        buckets[zlib.crc32(gram.encode("utf-8")) % dimension] += 1.0
    norm = math.sqrt(sum(b * b for b in buckets))
    return [b / norm for b in buckets]


def _remote_vectors(texts: Sequence[str], config: ProviderConfig,
                    client: httpx.Client | None) -> list[list[float]]:
    owned = client is None
    client = client or httpx.Client(timeout=config.timeout)
    try:
        try:
            response = client.post(str(config.endpoint), json={"texts": list(texts)})
        except httpx.HTTPError as exc:
            raise EmbeddingError(f"embedding request failed: {exc}") from exc
        if response.status_code != 200:
            raise EmbeddingError(f"embedding service returned {response.status_code}")
        try:
            payload = response.json()
            vectors = payload["vectors"]
            dimension = int(payload["dimension"])
        except (ValueError, KeyError, TypeError) as exc:
            raise EmbeddingError(f"malformed embedding response: {exc}") from exc
        if dimension != config.dimension:
            raise EmbeddingError(
                f"embedding service dimension {dimension} != configured {config.dimension}")
        out = []
        for vec in vectors:
            values = [float(x) for x in vec]
            if len(values) != dimension:
                raise EmbeddingError("embedding vector length mismatch")
            if not all(math.isfinite(x) for x in values):
                raise EmbeddingError("embedding vector contains non-finite values")
            out.append(values)
        if len(out) != len(texts):
            raise EmbeddingError("embedding service returned wrong vector count")
        return out
    finally:
        if owned:
            client.close()


def embed(text: str, config: ProviderConfig = ProviderConfig(),
          cache: EmbeddingCache | None = None,
          client: httpx.Client | None = None) -> list[float]:
    """Embed one text; deterministic for the builtin provider."""
    if not text or not text.strip():
        raise EmbeddingError("cannot embed empty text")
    key = (config.identity, text)
    if cache is not None and config.cache_enabled and key in cache:
        return list(cache[key])
    if config.kind == BUILTIN:
        vector = _lexical_vector(text, config.dimension)
    else:
        vector = _remote_vectors([text], config, client)[0]
    if cache is not None and config.cache_enabled:
        cache[key] = list(vector)
    return vector


def embed_many(texts: Sequence[str], config: ProviderConfig = ProviderConfig(),
               cache: EmbeddingCache | None = None,
               client: httpx.Client | None = None) -> list[list[float]]:
    """Embed several texts, batching the uncached ones for remote providers."""
    for text in texts:
        if not text or not text.strip():
            raise EmbeddingError("cannot embed empty text")
    results: dict[int, list[float]] = {}
    missing: list[int] = []
    for i, text in enumerate(texts):
        key = (config.identity, text)
        if cache is not None and config.cache_enabled and key in cache:
            results[i] = list(cache[key])
        else:
            missing.append(i)
    if missing:
        if config.kind == BUILTIN:
            fresh = [_lexical_vector(texts[i], config.dimension) for i in missing]
        else:
            fresh = _remote_vectors([texts[i] for i in missing], config, client)
        for i, vector in zip(missing, fresh):
            results[i] = vector
            if cache is not None and config.cache_enabled:
                cache[(config.identity, texts[i])] = list(vector)
    return [results[i] for i in range(len(texts))]


def cosine_similarity(u: Sequence[float], v: Sequence[float]) -> float:
    """dot(u, v) / (|u| |v|), clamped into [-1, 1] against rounding."""
    if len(u) != len(v):
        raise EmbeddingError(f"dimension mismatch: {len(u)} vs {len(v)}")
    dot = sum(a * b for a, b in zip(u, v))
    nu = math.sqrt(sum(a * a for a in u))
    nv = math.sqrt(sum(b * b for b in v))
    if nu == 0.0 or nv == 0.0:
        raise EmbeddingError("cosine similarity undefined for zero-norm vectors")
    return max(-1.0, min(1.0, dot / (nu * nv)))
