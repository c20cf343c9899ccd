"""Sentence encoders.

`hash:<dim>` is a built-in deterministic signed character-trigram
feature-hashing encoder: no model download, bit-stable across runs and
platforms, good enough for pipelines that only need a consistent
similarity geometry (and for tests). Any other name is treated as a
sentence-transformers model identifier and loaded locally.
"""

from __future__ import annotations

import hashlib

import numpy as np


def encode_sentences(model_name: str, sentences: list[str]) -> np.ndarray:
    """Encode to an (n, dim) float array with the named encoder."""
    if model_name.startswith("hash:"):
        try:
            dim = int(model_name.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad hash encoder spec {model_name!r}, expected hash:<dim>")
        if dim < 1:
            raise ValueError(f"hash encoder dim must be positive, got {dim}")
        return np.stack([_hash_encode(text, dim) for text in sentences])
    return _sentence_transformer_encode(model_name, sentences)


def _hash_encode(text: str, dim: int) -> np.ndarray:
    vector = np.zeros(dim, dtype=np.float64)
    padded = f" {text.lower().strip()} "
    for i in range(len(padded) - 2):
        digest = hashlib.sha1(padded[i : i + 3].encode("utf-8")).digest()
        bucket = int.from_bytes(digest[:8], "little")
        sign = 1.0 if digest[8] % 2 == 0 else -1.0
        vector[bucket % dim] += sign
    return vector


def _sentence_transformer_encode(model_name: str, sentences: list[str]) -> np.ndarray:
    try:
        from sentence_transformers import SentenceTransformer
    except ImportError as exc:
        raise RuntimeError(
            f"encoder {model_name!r} needs the sentence-transformers extra installed"
        ) from exc
    try:
        model = SentenceTransformer(model_name)
    except Exception as exc:
        raise RuntimeError(f"could not load encoder {model_name!r}: {exc}") from exc
    vectors = model.encode(sentences, convert_to_numpy=True, show_progress_bar=False)
    return np.asarray(vectors, dtype=np.float64)
