"""Input reading: engine cluster JSON or a sentence JSON Lines file.

Mirrors the engine's cluster format exactly, including its rule-based
sentence splitter, so exported keys line up one-to-one with the
engine's universe indices ("cluster_id/doc_index/sent_index").
"""

from __future__ import annotations

import json
import os

# Same splitter contract as the engine: terminators {. ! ?} followed by
# whitespace or end, abbreviations never terminate, terminator kept.
ABBREVIATIONS = frozenset({"Mr.", "Mrs.", "Dr.", "U.S.", "St.", "vs."})
_TERMINATORS = frozenset(".!?")


def segment_sentences(raw_text: str) -> list[str]:
    if not raw_text.strip():
        raise ValueError("cannot segment all-whitespace text")
    segments = []
    start = 0
    for pos, ch in enumerate(raw_text):
        if ch not in _TERMINATORS:
            continue
        at_end = pos + 1 == len(raw_text)
        if not at_end and not raw_text[pos + 1].isspace():
            continue
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


def read_sentences(input_path: str | os.PathLike) -> list[tuple[str, str]]:
    """Return (key, text) pairs for every sentence of the input file.

    Cluster JSON files yield engine universe keys; JSON Lines files of
    {"key": ..., "text": ...} pass their keys through.
    """
    with open(input_path, encoding="utf-8") as fh:
        head = fh.read(1)
        fh.seek(0)
        if head == "{" and _looks_like_cluster(fh):
            fh.seek(0)
            return _read_cluster(fh, input_path)
        fh.seek(0)
        return _read_jsonl(fh, input_path)


def _looks_like_cluster(fh) -> bool:
    try:
        payload = json.load(fh)
    except json.JSONDecodeError:
        return False
    return isinstance(payload, dict) and "cluster_id" in payload


def _read_cluster(fh, path) -> list[tuple[str, str]]:
    payload = json.load(fh)
    cluster_id = payload["cluster_id"]
    documents = payload.get("documents")
    if not documents:
        raise ValueError(f"{path}: cluster has no documents")
    pairs = []
    for doc_index, doc in enumerate(documents):
        if ("text" in doc) == ("sentences" in doc):
            raise ValueError(f"{path}: document {doc_index} needs exactly one of text/sentences")
        sentences = segment_sentences(doc["text"]) if "text" in doc else list(doc["sentences"])
        if not sentences or any(not s.strip() for s in sentences):
            raise ValueError(f"{path}: document {doc_index} has empty sentences")
        for sent_index, text in enumerate(sentences):
            pairs.append((f"{cluster_id}/{doc_index}/{sent_index}", text))
    return pairs


def _read_jsonl(fh, path) -> list[tuple[str, str]]:
    pairs = []
    seen = set()
    for line_no, line in enumerate(fh, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            entry = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}:{line_no}: malformed JSON ({exc})") from exc
        if "key" not in entry or "text" not in entry:
            raise ValueError(f"{path}:{line_no}: needs 'key' and 'text'")
        if entry["key"] in seen:
            raise ValueError(f"{path}:{line_no}: duplicate key {entry['key']!r}")
        seen.add(entry["key"])
        pairs.append((entry["key"], entry["text"]))
    if not pairs:
        raise ValueError(f"{path}: no sentences found")
    return pairs
