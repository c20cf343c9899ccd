"""HTTP clients for the optional rewrite and embedding services.

Both services are plain JSON-over-POST.  The engine never depends on them
being up: rewriting falls back to a deterministic passthrough, and
embeddings can always come from an SEMB file instead.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
import requests

from eventsum.errors import ValidationError
from eventsum.simgraph import EmbeddingStore

DEFAULT_TIMEOUT = 30.0
REWRITE_PROMPT = "re-write"


class ServiceError(RuntimeError):
    """A remote service failed (network, non-2xx, bad payload, timeout)."""


def passthrough_rewrite(sentences: Sequence[str]) -> str:
    """Fallback realization of rewriting: join the sentences verbatim."""
    return " ".join(sentences)


def rewrite(endpoint: str, sentences: Sequence[str], timeout: float = DEFAULT_TIMEOUT) -> str:
    """Ask the rewrite service to turn extracted sentences into coherent text."""
    if not sentences:
        raise ValidationError("rewrite request needs at least one sentence")
    try:
        response = requests.post(
            endpoint,
            json={"prompt": REWRITE_PROMPT, "sentences": list(sentences)},
            timeout=timeout,
        )
    except requests.RequestException as exc:
        raise ServiceError(f"rewrite service unreachable: {exc}") from exc
    if response.status_code // 100 != 2:
        raise ServiceError(f"rewrite service returned HTTP {response.status_code}")
    try:
        payload = response.json()
    except ValueError as exc:
        raise ServiceError("rewrite service returned non-JSON body") from exc
    summary = payload.get("summary")
    if not isinstance(summary, str) or not summary:
        raise ServiceError("rewrite service response missing non-empty 'summary'")
    return summary


def fetch_embeddings(
    service_url: str,
    sentences: Sequence[str],
    keys: Sequence[str] | None = None,
    timeout: float = DEFAULT_TIMEOUT,
) -> EmbeddingStore:
    """Fetch vectors for `sentences`; entries are keyed by `keys` (default "0", "1", ...)."""
    if keys is None:
        keys = [str(i) for i in range(len(sentences))]
    if len(keys) != len(sentences):
        raise ValidationError("keys and sentences must align")
    try:
        response = requests.post(service_url, json={"sentences": list(sentences)}, timeout=timeout)
    except requests.RequestException as exc:
        raise ServiceError(f"embedding service unreachable: {exc}") from exc
    if response.status_code // 100 != 2:
        raise ServiceError(f"embedding service returned HTTP {response.status_code}")
    try:
        payload = response.json()
    except ValueError as exc:
        raise ServiceError("embedding service returned non-JSON body") from exc
    dim = payload.get("dim")
    vectors = payload.get("vectors")
    if not isinstance(dim, int) or not isinstance(vectors, list):
        raise ServiceError("embedding service response missing 'dim'/'vectors'")
    if len(vectors) != len(sentences):
        raise ServiceError(f"embedding count mismatch: sent {len(sentences)}, got {len(vectors)}")
    entries = {}
    for key, vec in zip(keys, vectors):
        arr = np.asarray(vec, dtype=np.float64)
        if arr.shape != (dim,):
            raise ServiceError(f"vector for {key!r} has length {arr.size}, expected {dim}")
        entries[key] = arr
    try:
        return EmbeddingStore(dim=dim, entries=entries)
    except ValidationError as exc:
        raise ServiceError(f"embedding service payload invalid: {exc}") from exc
