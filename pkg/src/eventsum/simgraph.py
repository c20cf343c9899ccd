"""Sentence embeddings, clamped cosine similarity, and the dense similarity matrix.

Similarity is cosine clamped to [0, 1]: the coverage function's
monotone-submodularity argument needs nonnegative pairwise similarities,
and raw cosine can dip below zero.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass

import numpy as np

from eventsum.corpus import DocumentCluster
from eventsum.errors import FormatError, ValidationError

MAGIC = b"SEMB"
VERSION = 1


@dataclass(frozen=True)
class EmbeddingStore:
    """Immutable map from sentence key to a fixed-dimension float vector."""

    dim: int
    entries: dict[str, np.ndarray]

    def __post_init__(self):
        for key, vec in self.entries.items():
            if vec.shape != (self.dim,):
                raise ValidationError(f"vector for {key!r} has dim {vec.shape}, expected ({self.dim},)")
            if not np.all(np.isfinite(vec)):
                raise ValidationError(f"vector for {key!r} contains NaN/Inf")

    def __len__(self):
        return len(self.entries)

    def vector(self, key: str) -> np.ndarray:
        if key not in self.entries:
            raise ValidationError(f"no embedding for key {key!r}")
        return self.entries[key]


@dataclass(frozen=True)
class SimilarityMatrix:
    """Symmetric n x n matrix of clamped cosine similarities in [0, 1]."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        v = self.values
        if v.shape != (self.n, self.n):
            raise ValidationError(f"similarity matrix shape {v.shape} != ({self.n}, {self.n})")
        if not np.array_equal(v, v.T):
            raise ValidationError("similarity matrix is not exactly symmetric")
        if v.size and (v.min() < 0.0 or v.max() > 1.0):
            raise ValidationError("similarity values outside [0, 1]")


def sim(a: np.ndarray, b: np.ndarray) -> float:
    """Clamped cosine similarity: max(0, cos(a, b)); 0 if either vector is zero."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValidationError(f"dim mismatch: {a.shape} vs {b.shape}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValidationError("NaN/Inf in similarity input")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return min(1.0, max(0.0, float(np.dot(a, b) / (na * nb))))


def similarity_matrix(cluster: DocumentCluster, store: EmbeddingStore) -> SimilarityMatrix:
    """Pairwise clamped cosine over the cluster universe.

    Keys are "cluster_id/doc_index/sent_index".  The upper triangle is
    computed and mirrored so the result is exactly symmetric.
    """
    n = len(cluster)
    vectors = [store.vector(cluster.sentence_key(i)) for i in range(n)]
    values = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        # exact 1 on the diagonal (cosine of a nonzero vector with itself)
        values[i, i] = 1.0 if np.linalg.norm(vectors[i]) > 0.0 else 0.0
        for j in range(i + 1, n):
            s = sim(vectors[i], vectors[j])
            values[i, j] = s
            values[j, i] = s
    return SimilarityMatrix(n=n, values=values)


def pairwise_variance(matrix: SimilarityMatrix) -> float:
    """Population variance of the n(n-1)/2 distinct off-diagonal similarities."""
    if matrix.n < 2:
        raise ValidationError("pairwise variance needs at least 2 sentences")
    iu = np.triu_indices(matrix.n, k=1)
    pairs = matrix.values[iu]
    return float(np.mean((pairs - pairs.mean()) ** 2))


def load_embeddings(path: str | os.PathLike) -> EmbeddingStore:
    """Read a binary SEMB embedding file.

    Layout: magic "SEMB", version byte, u32le dim, u32le count, then per
    entry a u16le key length, the UTF-8 key, and dim float32le components.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 13 or data[:4] != MAGIC:
        raise FormatError(f"{path}: bad magic, not an SEMB file")
    if data[4] != VERSION:
        raise FormatError(f"{path}: unsupported SEMB version {data[4]}")
    dim, count = struct.unpack_from("<II", data, 5)
    offset = 13
    entries: dict[str, np.ndarray] = {}
    for _ in range(count):
        if offset + 2 > len(data):
            raise FormatError(f"{path}: truncated at entry header")
        (key_len,) = struct.unpack_from("<H", data, offset)
        offset += 2
        end = offset + key_len + 4 * dim
        if end > len(data):
            raise FormatError(f"{path}: truncated entry payload")
        key = data[offset : offset + key_len].decode("utf-8")
        offset += key_len
        vec = np.frombuffer(data, dtype="<f4", count=dim, offset=offset).astype(np.float64)
        offset += 4 * dim
        if key in entries:
            raise FormatError(f"{path}: duplicate key {key!r}")
        entries[key] = vec
    if offset != len(data):
        raise FormatError(f"{path}: {len(data) - offset} trailing bytes")
    return EmbeddingStore(dim=dim, entries=entries)


def save_embeddings(store: EmbeddingStore, path: str | os.PathLike) -> None:
    """Write an SEMB file; load_embeddings(save_embeddings(x)) is bit-identical."""
    chunks = [MAGIC, bytes([VERSION]), struct.pack("<II", store.dim, len(store.entries))]
    for key, vec in store.entries.items():
        encoded = key.encode("utf-8")
        if len(encoded) > 0xFFFF:
            raise ValidationError(f"key too long: {key[:40]!r}...")
        chunks.append(struct.pack("<H", len(encoded)))
        chunks.append(encoded)
        chunks.append(np.asarray(vec, dtype="<f4").tobytes())
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(b"".join(chunks))
    os.replace(tmp, path)
