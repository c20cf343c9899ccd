"""Self-contained ROUGE-1/2/L scoring.

Tokenization is lowercase alphanumeric runs, no stemming, no stopword
removal.  ROUGE-N uses clipped n-gram counts; ROUGE-L uses a plain LCS
over the whole token sequence.  All scores are F-measures with beta = 1.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass

from eventsum.errors import ValidationError

_TOKEN_RE = re.compile(r"[a-z0-9]+")


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f_measure: float


def _prf(overlap: int, hyp_total: int, ref_total: int) -> RougeScore:
    precision = overlap / hyp_total if hyp_total else 0.0
    recall = overlap / ref_total if ref_total else 0.0
    f = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return RougeScore(precision=precision, recall=recall, f_measure=f)


def tokenize(text: str) -> list[str]:
    """Lowercase tokens split on non-alphanumeric runs."""
    return _TOKEN_RE.findall(text.lower())


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(hypothesis: str, reference: str, n: int) -> RougeScore:
    """Clipped n-gram overlap (n = 1 or 2)."""
    if n not in (1, 2):
        raise ValidationError(f"rouge_n supports n in {{1, 2}}, got {n}")
    hyp = _ngrams(tokenize(hypothesis), n)
    ref = _ngrams(tokenize(reference), n)
    overlap = sum((hyp & ref).values())
    return _prf(overlap, sum(hyp.values()), sum(ref.values()))


def _lcs_length(a: list[str], b: list[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0] * (len(b) + 1)
        for j, y in enumerate(b, start=1):
            cur[j] = prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1])
        prev = cur
    return prev[-1]


def rouge_l(hypothesis: str, reference: str) -> RougeScore:
    """Longest common subsequence over the full token sequences."""
    hyp = tokenize(hypothesis)
    ref = tokenize(reference)
    return _prf(_lcs_length(hyp, ref), len(hyp), len(ref))
