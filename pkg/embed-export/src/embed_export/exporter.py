"""The export job: read sentences, encode, normalize, write SEMB + manifest."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass

import numpy as np

from embed_export.corpus import read_sentences
from embed_export.encoders import encode_sentences
from embed_export.semb import write_semb


@dataclass(frozen=True)
class ExportJob:
    input_path: str
    model_name: str
    output_path: str
    normalize: bool = True


@dataclass(frozen=True)
class ExportManifest:
    count: int
    dim: int
    model_name: str
    normalize: bool
    checksum: str
    output_path: str

    def to_json_dict(self) -> dict:
        return {
            "count": self.count,
            "dim": self.dim,
            "model_name": self.model_name,
            "normalize": self.normalize,
            "checksum": self.checksum,
        }


def manifest_path(output_path: str | os.PathLike) -> str:
    return f"{output_path}.manifest.json"


def export(job: ExportJob) -> ExportManifest:
    """Encode every input sentence and write the SEMB file plus its manifest.

    Keys follow the engine's universe convention for cluster inputs
    ("cluster_id/doc_index/sent_index").  With normalize=True (the
    default) every vector is scaled to unit norm so clamped cosine in the
    engine reduces to a clamped dot product.
    """
    pairs = read_sentences(job.input_path)
    keys = [key for key, _ in pairs]
    vectors = encode_sentences(job.model_name, [text for _, text in pairs])
    if job.normalize:
        norms = np.linalg.norm(vectors, axis=1, keepdims=True)
        if np.any(norms == 0.0):
            flat = [keys[i] for i in np.flatnonzero(norms.ravel() == 0.0)]
            raise ValueError(f"cannot normalize zero vectors for keys {flat[:5]}")
        vectors = vectors / norms
    blob = write_semb(job.output_path, keys, vectors)
    manifest = ExportManifest(
        count=len(keys),
        dim=vectors.shape[1],
        model_name=job.model_name,
        normalize=job.normalize,
        checksum="sha256:" + hashlib.sha256(blob).hexdigest(),
        output_path=str(job.output_path),
    )
    tmp = manifest_path(job.output_path) + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(manifest.to_json_dict(), fh, indent=2)
        fh.write("\n")
    os.replace(tmp, manifest_path(job.output_path))
    return manifest
