"""Document clusters, sentence segmentation, and the sentence universe.

A cluster is a small set of related news documents.  Every sentence across
all documents gets a stable "universe index" (contiguous, ordered by
document position then sentence position); the rest of the engine works
purely in terms of these indices.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from eventsum.errors import ValidationError

# Trailing tokens that never terminate a sentence.
ABBREVIATIONS = frozenset({"Mr.", "Mrs.", "Dr.", "U.S.", "St.", "vs."})

_TERMINATORS = frozenset(".!?")


@dataclass(frozen=True)
class SentenceRecord:
    """One sentence of the universe with its provenance."""

    universe_index: int
    doc_index: int
    sent_index: int
    text: str


@dataclass(frozen=True)
class Document:
    doc_id: str
    sentences: tuple[str, ...]


@dataclass(frozen=True)
class DocumentCluster:
    """A validated input cluster: documents plus the flattened sentence universe."""

    cluster_id: str
    documents: tuple[Document, ...]
    universe: tuple[SentenceRecord, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not self.documents:
            raise ValidationError(f"cluster {self.cluster_id!r} has no documents")
        if not self.universe:
            object.__setattr__(self, "universe", _build_universe(self.documents))
        seen = set()
        prev = (-1, -1)
        for pos, rec in enumerate(self.universe):
            if rec.universe_index != pos:
                raise ValidationError(
                    f"universe index {rec.universe_index} at position {pos} is not contiguous"
                )
            if not rec.text.strip():
                raise ValidationError(
                    f"blank sentence at doc {rec.doc_index}, sentence {rec.sent_index}"
                )
            key = (rec.doc_index, rec.sent_index)
            if key in seen or key <= prev:
                raise ValidationError(f"universe not ordered/unique at {key}")
            seen.add(key)
            prev = key

    def __len__(self):
        return len(self.universe)

    def sentence_key(self, index: int) -> str:
        """Embedding-store key for a universe sentence: 'cluster_id/doc/sent'."""
        rec = self.universe[index]
        return f"{self.cluster_id}/{rec.doc_index}/{rec.sent_index}"

    def texts(self) -> list[str]:
        return [rec.text for rec in self.universe]


def _build_universe(documents) -> tuple[SentenceRecord, ...]:
    records = []
    for doc_index, doc in enumerate(documents):
        if not doc.sentences:
            raise ValidationError(f"document {doc.doc_id!r} has no sentences")
        for sent_index, text in enumerate(doc.sentences):
            records.append(SentenceRecord(len(records), doc_index, sent_index, text))
    return tuple(records)


def segment_sentences(raw_text: str) -> list[str]:
    """Split raw text into sentences.

    A sentence ends at '.', '!' or '?' followed by whitespace or end of
    input, unless the terminator closes a known abbreviation ("Dr.",
    "U.S.", ...).  Terminators stay with their sentence; surrounding
    whitespace is trimmed; empty segments are dropped.
    """
    if not raw_text.strip():
        raise ValidationError("cannot segment all-whitespace text")
    segments = []
    start = 0
    for pos, ch in enumerate(raw_text):
        if ch not in _TERMINATORS:
            continue
        at_end = pos + 1 == len(raw_text)
        if not at_end and not raw_text[pos + 1].isspace():
            continue
        # Last whitespace-delimited token ending at this terminator.
        token_start = pos
        while token_start > start and not raw_text[token_start - 1].isspace():
            token_start -= 1
        if raw_text[token_start : pos + 1] in ABBREVIATIONS:
            continue
        segment = raw_text[start : pos + 1].strip()
        if segment:
            segments.append(segment)
        start = pos + 1
    tail = raw_text[start:].strip()
    if tail:
        segments.append(tail)
    return segments


def load_cluster(path: str | os.PathLike) -> DocumentCluster:
    """Load and validate a cluster JSON file.

    Each document carries exactly one of "text" (segmented here) or
    "sentences" (taken verbatim).
    """
    with open(path, encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: malformed JSON ({exc})") from exc
    if not isinstance(payload, dict) or "cluster_id" not in payload:
        raise ValidationError(f"{path}: expected an object with 'cluster_id'")
    raw_docs = payload.get("documents")
    if not raw_docs:
        raise ValidationError(f"{path}: cluster has no documents")
    documents = []
    for i, raw in enumerate(raw_docs):
        doc_id = raw.get("doc_id", f"doc{i}")
        has_text = "text" in raw
        has_sentences = "sentences" in raw
        if has_text == has_sentences:
            raise ValidationError(
                f"{path}: document {doc_id!r} must have exactly one of 'text'/'sentences'"
            )
        if has_text:
            sentences = segment_sentences(raw["text"])
        else:
            sentences = list(raw["sentences"])
            if not sentences or any(not isinstance(s, str) or not s.strip() for s in sentences):
                raise ValidationError(
                    f"{path}: document {doc_id!r} has empty or blank pre-split sentences"
                )
        if not sentences:
            raise ValidationError(f"{path}: document {doc_id!r} has zero non-empty sentences")
        documents.append(Document(doc_id=str(doc_id), sentences=tuple(sentences)))
    return DocumentCluster(cluster_id=str(payload["cluster_id"]), documents=tuple(documents))


def save_cluster(cluster: DocumentCluster, path: str | os.PathLike) -> None:
    """Write a cluster back out with pre-split sentences (round-trips exactly)."""
    payload = {
        "cluster_id": cluster.cluster_id,
        "documents": [
            {"doc_id": doc.doc_id, "sentences": list(doc.sentences)} for doc in cluster.documents
        ],
    }
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=2)
    os.replace(tmp, path)
