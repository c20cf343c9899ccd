"""Main-event selection, adaptive budget, and the greedy context extractor.

The extractor seeds the summary with the main-event sentence and grows it
one sentence at a time, always adding the largest marginal gain of the
submodular objective.  Gains are evaluated lazily (stale upper bounds in
a heap, re-validated before acceptance), which by submodularity yields
exactly the same selection as the naive re-scan.  A brute-force optimum
is included as a test oracle for the (1 - 1/e) approximation bound.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from eventsum.corpus import Document, DocumentCluster, SentenceRecord
from eventsum.errors import ValidationError
from eventsum.objective import (
    ObjectiveConfig,
    ObjectiveContext,
    SentenceSelection,
    coverage,
    diversity,
    main_bias,
)
from eventsum.simgraph import SimilarityMatrix, pairwise_variance

# Maps a document to the in-document index of its main-event sentence.
MainEventTagger = Callable[[Document], int]

BRUTE_FORCE_LIMIT = 20


def lead_sentence_tagger(doc: Document) -> int:
    """Default tagger: the lead sentence carries the main event in news copy."""
    return 0


@dataclass(frozen=True)
class BudgetConfig:
    k: float = 4.0
    c: float = 10.0

    def __post_init__(self):
        if not (math.isfinite(self.k) and self.k >= 1):
            raise ValidationError(f"k must be finite and >= 1, got {self.k}")
        if not (math.isfinite(self.c) and self.c >= 0):
            raise ValidationError(f"c must be finite and >= 0, got {self.c}")


@dataclass(frozen=True)
class ExtractResult:
    """Greedy extraction output: selection order, gains, and score breakdown."""

    main_index: int
    selection: SentenceSelection
    budget: int
    gains: tuple[float, ...]
    objective_breakdown: tuple[float, float, float, float]  # coverage, diversity, bias, total
    summary_sentences: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.selection.members or self.selection.members[0] != self.main_index:
            raise ValidationError("selection must start with the main-event sentence")
        if self.budget < 1:
            raise ValidationError(f"budget must be >= 1, got {self.budget}")
        if len(self.gains) != len(self.selection) - 1:
            raise ValidationError("one gain per step after the seed")
        if any(g < -1e-9 for g in self.gains):
            raise ValidationError("negative marginal gain beyond tolerance")

    def to_json_dict(self) -> dict:
        cov, div, bias, total = self.objective_breakdown
        return {
            "main_index": self.main_index,
            "selection": list(self.selection.members),
            "budget": self.budget,
            "gains": list(self.gains),
            "scores": {"coverage": cov, "diversity": div, "bias": bias, "total": total},
            "sentences": list(self.summary_sentences),
        }


def main_event_candidates(
    cluster: DocumentCluster, tagger: MainEventTagger = lead_sentence_tagger
) -> list[int]:
    """One candidate universe index per document, in document order."""
    by_pos = {(r.doc_index, r.sent_index): r.universe_index for r in cluster.universe}
    candidates = []
    for doc_index, doc in enumerate(cluster.documents):
        sent_index = tagger(doc)
        key = (doc_index, sent_index)
        if key not in by_pos:
            raise ValidationError(
                f"tagger returned sentence {sent_index} outside document {doc.doc_id!r}"
            )
        candidates.append(by_pos[key])
    return candidates


def select_main_event(candidates: Sequence[int], ctx: ObjectiveContext, alpha: float) -> int:
    """Candidate with the largest singleton coverage (ties: lowest universe index)."""
    if not candidates:
        raise ValidationError("no main-event candidates")
    best_index = None
    best_value = -math.inf
    for x in sorted(candidates):
        value = coverage(SentenceSelection((x,)), ctx, alpha)
        if value > best_value:
            best_value = value
            best_index = x
    return best_index


def budget(matrix: SimilarityMatrix, cfg: BudgetConfig) -> int:
    """Adaptive sentence budget floor(k + c * variance), clamped to [1, n]."""
    variance = pairwise_variance(matrix) if matrix.n >= 2 else 0.0
    raw = math.floor(cfg.k + cfg.c * variance)
    return max(1, min(matrix.n, raw))


class _GreedyState:
    """Scratch for O(n) marginal gains shared by the naive and lazy loops."""

    def __init__(self, ctx: ObjectiveContext, cfg: ObjectiveConfig):
        self.ctx = ctx
        self.cfg = cfg
        n = ctx.matrix.n
        self.caps = cfg.alpha * ctx.singleton_coverage
        self.covered = np.zeros(n)
        self.capped_sum = float(np.minimum(self.covered, self.caps).sum())
        self.inner = np.zeros(ctx.clustering.k)
        self.share = ctx.singleton_coverage / n  # c_j(U)/n diversity mass per sentence

    def gain(self, x: int) -> float:
        ctx, cfg = self.ctx, self.cfg
        new_capped = float(np.minimum(self.covered + ctx.matrix.values[:, x], self.caps).sum())
        kx = ctx.clustering.assignment[x]
        delta_div = math.sqrt(self.inner[kx] + self.share[x]) - math.sqrt(self.inner[kx])
        return (
            (new_capped - self.capped_sum)
            + cfg.lambda1 * delta_div
            + cfg.lambda2 * float(ctx.bias_scores[x])
        )

    def add(self, x: int):
        self.covered += self.ctx.matrix.values[:, x]
        self.capped_sum = float(np.minimum(self.covered, self.caps).sum())
        self.inner[self.ctx.clustering.assignment[x]] += self.share[x]


def greedy_extract(
    ctx: ObjectiveContext,
    cfg: ObjectiveConfig,
    main_index: int,
    budget: int,
    universe: Sequence[SentenceRecord] | None = None,
    lazy: bool = True,
) -> ExtractResult:
    """Grow the summary greedily from {main_index} up to `budget` sentences.

    Ties break to the lowest universe index.  `lazy=False` forces the
    naive full re-scan; both paths produce identical selections.  When the
    universe is supplied, summary sentences are emitted in document order
    (ascending universe index).
    """
    n = ctx.matrix.n
    if budget < 1:
        raise ValidationError(f"budget must be >= 1, got {budget}")
    if not 0 <= main_index < n:
        raise ValidationError(f"main index {main_index} out of range for n={n}")
    state = _GreedyState(ctx, cfg)
    selection = SentenceSelection((main_index,))
    state.add(main_index)
    gains: list[float] = []
    remaining = [x for x in range(n) if x != main_index]

    if lazy:
        heap = [(-state.gain(x), x) for x in remaining]
        heapq.heapify(heap)
        while len(selection) < budget and heap:
            neg_stale, x = heapq.heappop(heap)
            g = state.gain(x)
            if heap and (-g, x) > heap[0]:
                heapq.heappush(heap, (-g, x))
                continue
            selection = selection.add(x)
            gains.append(g)
            state.add(x)
    else:
        remaining_set = set(remaining)
        while len(selection) < budget and remaining_set:
            best_x, best_g = None, -math.inf
            for x in sorted(remaining_set):
                g = state.gain(x)
                if g > best_g:
                    best_x, best_g = x, g
            selection = selection.add(best_x)
            gains.append(best_g)
            state.add(best_x)
            remaining_set.remove(best_x)

    cov = coverage(selection, ctx, cfg.alpha)
    div = diversity(selection, ctx)
    bias = main_bias(selection, ctx)
    total = cov + cfg.lambda1 * div + cfg.lambda2 * bias
    sentences: tuple[str, ...] = ()
    if universe is not None:
        sentences = tuple(universe[i].text for i in sorted(selection.members))
    return ExtractResult(
        main_index=main_index,
        selection=selection,
        budget=budget,
        gains=tuple(gains),
        objective_breakdown=(cov, div, bias, total),
        summary_sentences=sentences,
    )


def brute_force_extract(
    ctx: ObjectiveContext, cfg: ObjectiveConfig, main_index: int, budget: int
) -> tuple[SentenceSelection, float]:
    """Exhaustive optimum over all selections of size `budget` containing the seed.

    Test oracle only; guarded to small universes.  Ties resolve to the
    lexicographically smallest index set.
    """
    n = ctx.matrix.n
    if n > BRUTE_FORCE_LIMIT:
        raise ValidationError(f"brute force limited to n <= {BRUTE_FORCE_LIMIT}, got {n}")
    if budget < 1:
        raise ValidationError(f"budget must be >= 1, got {budget}")
    if not 0 <= main_index < n:
        raise ValidationError(f"main index {main_index} out of range for n={n}")
    size = min(budget, n)
    others = [x for x in range(n) if x != main_index]
    best_sel, best_val = None, -math.inf
    for combo in itertools.combinations(others, size - 1):
        sel = SentenceSelection((main_index, *combo))
        val = (
            coverage(sel, ctx, cfg.alpha)
            + cfg.lambda1 * diversity(sel, ctx)
            + cfg.lambda2 * main_bias(sel, ctx)
        )
        if val > best_val:
            best_sel, best_val = sel, val
    return best_sel, best_val
