"""The monotone submodular selection objective.

F(S) = coverage(S) + lambda1 * diversity(S) + lambda2 * main_bias(S).

Coverage credits a summary for how well it represents every universe
sentence, saturating per sentence at alpha * c_i(U) so no single topic
dominates.  Diversity takes a square root of per-cluster mass, rewarding
summaries that touch more clusters.  The bias term is modular: each
selected sentence adds its (clamped) co-occurrence score against the
main-event sentence.  All three parts are monotone submodular, so greedy
selection inherits the usual (1 - 1/e) guarantee.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from eventsum.apcluster import Clustering
from eventsum.errors import ValidationError
from eventsum.simgraph import SimilarityMatrix

GAIN_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ObjectiveConfig:
    alpha: float = 0.3
    lambda1: float = 1.0
    lambda2: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ValidationError(f"alpha must be finite and > 0, got {self.alpha}")
        for name in ("lambda1", "lambda2"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValidationError(f"{name} must be finite and >= 0, got {v}")


@dataclass(frozen=True)
class ObjectiveContext:
    """Everything fixed during one extraction: similarities, clusters, bias."""

    matrix: SimilarityMatrix
    clustering: Clustering
    bias_scores: np.ndarray
    singleton_coverage: np.ndarray  # c_i(U) = row sums of the similarity matrix

    def __post_init__(self):
        n = self.matrix.n
        if self.bias_scores.shape != (n,) or self.singleton_coverage.shape != (n,):
            raise ValidationError("bias/coverage vectors must have length n")
        if np.any(self.bias_scores < 0):
            raise ValidationError("bias scores must be nonnegative")
        if len(self.clustering.assignment) != n:
            raise ValidationError("clustering does not cover the universe")
        expected = self.matrix.values.sum(axis=1)
        if not np.allclose(self.singleton_coverage, expected, atol=1e-9):
            raise ValidationError("singleton_coverage inconsistent with similarity row sums")


def make_context(
    matrix: SimilarityMatrix, clustering: Clustering, bias_scores: np.ndarray | None = None
) -> ObjectiveContext:
    """Build a context; bias defaults to all-zero and is clamped at 0."""
    if bias_scores is None:
        bias = np.zeros(matrix.n)
    else:
        bias = np.maximum(np.asarray(bias_scores, dtype=np.float64), 0.0)
    return ObjectiveContext(
        matrix=matrix,
        clustering=clustering,
        bias_scores=bias,
        singleton_coverage=matrix.values.sum(axis=1),
    )


@dataclass(frozen=True)
class SentenceSelection:
    """Selected universe indices, in selection order, no duplicates."""

    members: tuple[int, ...] = ()

    def __post_init__(self):
        if len(set(self.members)) != len(self.members):
            raise ValidationError(f"duplicate indices in selection {self.members}")
        if any(i < 0 for i in self.members):
            raise ValidationError("negative universe index")

    def __len__(self):
        return len(self.members)

    def __contains__(self, x):
        return x in self.members

    def __iter__(self):
        return iter(self.members)

    def add(self, x: int) -> "SentenceSelection":
        if x in self.members:
            raise ValidationError(f"index {x} already selected")
        return SentenceSelection(members=(*self.members, x))


def _check_selection(s: SentenceSelection, n: int):
    if any(i >= n for i in s.members):
        raise ValidationError(f"selection {s.members} out of range for universe size {n}")


def _covered(s: SentenceSelection, ctx: ObjectiveContext) -> np.ndarray:
    """c_i(S) = sum of similarities from every universe sentence i into S."""
    if not len(s):
        return np.zeros(ctx.matrix.n)
    return ctx.matrix.values[:, list(s.members)].sum(axis=1)


def coverage(s: SentenceSelection, ctx: ObjectiveContext, alpha: float) -> float:
    """Capped coverage: sum_i min(c_i(S), alpha * c_i(U))."""
    _check_selection(s, ctx.matrix.n)
    caps = alpha * ctx.singleton_coverage
    return float(np.minimum(_covered(s, ctx), caps).sum())


def diversity(s: SentenceSelection, ctx: ObjectiveContext) -> float:
    """Per-cluster square-root reward: sum_k sqrt(sum_{j in P_k & S} c_j(U) / n)."""
    _check_selection(s, ctx.matrix.n)
    n = ctx.matrix.n
    inner = np.zeros(ctx.clustering.k)
    for j in s.members:
        inner[ctx.clustering.assignment[j]] += ctx.singleton_coverage[j] / n
    return float(np.sqrt(inner).sum())


def main_bias(s: SentenceSelection, ctx: ObjectiveContext) -> float:
    """Modular main-event relevance: sum of selected bias scores."""
    _check_selection(s, ctx.matrix.n)
    return float(sum(ctx.bias_scores[j] for j in s.members))


def objective_value(s: SentenceSelection, ctx: ObjectiveContext, cfg: ObjectiveConfig) -> float:
    return (
        coverage(s, ctx, cfg.alpha)
        + cfg.lambda1 * diversity(s, ctx)
        + cfg.lambda2 * main_bias(s, ctx)
    )


def marginal_gain(s: SentenceSelection, x: int, ctx: ObjectiveContext, cfg: ObjectiveConfig) -> float:
    """F(S + {x}) - F(S), computed incrementally (matches recompute to 1e-9)."""
    if x in s:
        raise ValidationError(f"index {x} already selected")
    _check_selection(s.add(x), ctx.matrix.n)
    cov = _covered(s, ctx)
    caps = cfg.alpha * ctx.singleton_coverage
    delta_cov = float(
        np.minimum(cov + ctx.matrix.values[:, x], caps).sum() - np.minimum(cov, caps).sum()
    )
    n = ctx.matrix.n
    kx = ctx.clustering.assignment[x]
    inner = sum(
        ctx.singleton_coverage[j] / n for j in s.members if ctx.clustering.assignment[j] == kx
    )
    delta_div = math.sqrt(inner + ctx.singleton_coverage[x] / n) - math.sqrt(inner)
    return delta_cov + cfg.lambda1 * delta_div + cfg.lambda2 * float(ctx.bias_scores[x])
