"""Writer for the engine's binary SEMB embedding format.

Layout (all little-endian): magic "SEMB", version byte 1, u32 dim,
u32 count, then per entry u16 key length, UTF-8 key, dim float32 values.
"""

from __future__ import annotations

import os
import struct

import numpy as np

MAGIC = b"SEMB"
VERSION = 1


def write_semb(path: str | os.PathLike, keys: list[str], vectors: np.ndarray) -> bytes:
    """Write the file and return its raw bytes (for checksumming)."""
    if vectors.ndim != 2 or len(keys) != vectors.shape[0]:
        raise ValueError(f"{len(keys)} keys vs vector block of shape {vectors.shape}")
    if not np.all(np.isfinite(vectors)):
        raise ValueError("non-finite embedding components")
    dim = vectors.shape[1]
    chunks = [MAGIC, bytes([VERSION]), struct.pack("<II", dim, len(keys))]
    for key, vector in zip(keys, vectors):
        encoded = key.encode("utf-8")
        if len(encoded) > 0xFFFF:
            raise ValueError(f"key too long: {key[:40]!r}...")
        chunks.append(struct.pack("<H", len(encoded)))
        chunks.append(encoded)
        chunks.append(np.asarray(vector, dtype="<f4").tobytes())
    blob = b"".join(chunks)
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(blob)
    os.replace(tmp, path)
    return blob
