"""Affinity propagation over the sentence similarity matrix.

Classic responsibility/availability message passing (Frey & Dueck) with
damping, a median-preference default, and deterministic tie-breaking
(lowest index wins everywhere).  No random jitter is added: identical
inputs must give identical clusterings.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from eventsum.errors import ValidationError
from eventsum.simgraph import SimilarityMatrix


@dataclass(frozen=True)
class Clustering:
    """Partition of the universe into k clusters, one exemplar each."""

    k: int
    exemplars: tuple[int, ...]
    assignment: dict[int, int]
    iterations_run: int
    converged: bool

    def __post_init__(self):
        if self.k < 1 or len(self.exemplars) != self.k:
            raise ValidationError(f"bad exemplar count: k={self.k}, {len(self.exemplars)} exemplars")
        ids = set(self.assignment.values())
        if ids != set(range(self.k)):
            raise ValidationError(f"cluster ids {sorted(ids)} are not 0..{self.k - 1}")
        for cid, ex in enumerate(self.exemplars):
            if self.assignment[ex] != cid:
                raise ValidationError(f"exemplar {ex} not assigned to its own cluster {cid}")

    def members(self, cluster_id: int) -> list[int]:
        return sorted(i for i, c in self.assignment.items() if c == cluster_id)


def affinity_propagation(
    matrix: SimilarityMatrix,
    preference: float | str = "median",
    damping: float = 0.9,
    max_iter: int = 1000,
    stable_iter: int = 50,
) -> Clustering:
    """Cluster by affinity propagation.

    Self-similarities are replaced by `preference` ("median" = median of
    the off-diagonal similarities).  Iteration stops once the exemplar set
    has been unchanged for `stable_iter` consecutive iterations (converged)
    or at `max_iter` (not converged).  If message passing elects no
    exemplar, the point with the highest self-evidence is used so the
    output is always a valid clustering.
    """
    if not 0.5 <= damping < 1.0:
        raise ValidationError(f"damping must be in [0.5, 1), got {damping}")
    if max_iter < 1 or stable_iter < 1:
        raise ValidationError("max_iter and stable_iter must be positive")
    n = matrix.n
    if n == 0:
        raise ValidationError("cannot cluster an empty universe")
    if n == 1:
        return Clustering(k=1, exemplars=(0,), assignment={0: 0}, iterations_run=0, converged=True)

    if preference == "median":
        pref = float(np.median(matrix.values[np.triu_indices(n, k=1)]))
    else:
        pref = float(preference)

    S = matrix.values.astype(np.float64).copy()
    np.fill_diagonal(S, pref)
    R = np.zeros((n, n))
    A = np.zeros((n, n))
    row_idx = np.arange(n)

    last_exemplars: tuple[int, ...] | None = None
    stable = 0
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        # Responsibilities: r(i,k) = s(i,k) - max_{k'!=k} (a(i,k') + s(i,k'))
        AS = A + S
        best = np.argmax(AS, axis=1)
        best_val = AS[row_idx, best]
        AS[row_idx, best] = -np.inf
        second_val = np.max(AS, axis=1)
        R_new = S - best_val[:, None]
        R_new[row_idx, best] = S[row_idx, best] - second_val
        R = damping * R + (1.0 - damping) * R_new

        # Availabilities: a(i,k) = min(0, r(k,k) + sum_{i' not in {i,k}} max(0, r(i',k)))
        Rp = np.maximum(R, 0.0)
        np.fill_diagonal(Rp, np.diag(R))
        col_sums = Rp.sum(axis=0)
        A_new = np.minimum(0.0, col_sums[None, :] - Rp)
        np.fill_diagonal(A_new, col_sums - np.diag(R))  # a(k,k) = sum of positive responsibilities
        A = damping * A + (1.0 - damping) * A_new

        exemplars = tuple(int(k) for k in np.flatnonzero(np.diag(A) + np.diag(R) > 0.0))
        if exemplars == last_exemplars:
            stable += 1
            if stable >= stable_iter:
                converged = True
                break
        else:
            stable = 1
            last_exemplars = exemplars

    evidence = np.diag(A) + np.diag(R)
    exemplars = tuple(int(k) for k in np.flatnonzero(evidence > 0.0))
    if not exemplars:
        exemplars = (int(np.argmax(evidence)),)
    return _assign(matrix, exemplars, iterations, converged)


def _assign(matrix: SimilarityMatrix, exemplars: tuple[int, ...], iterations: int, converged: bool) -> Clustering:
    """Nearest-exemplar assignment (ties to the lowest exemplar index)."""
    ex = np.asarray(exemplars)
    sims = matrix.values[:, ex]
    nearest = np.argmax(sims, axis=1)  # first max = lowest exemplar index
    assignment = {int(i): int(nearest[i]) for i in range(matrix.n)}
    for cid, e in enumerate(exemplars):
        assignment[e] = cid
    return Clustering(
        k=len(exemplars),
        exemplars=exemplars,
        assignment=assignment,
        iterations_run=iterations,
        converged=converged,
    )


def clustering_purity(clustering: Clustering, labels: dict[int, int]) -> float:
    """Fraction of points whose cluster's majority label matches their own."""
    missing = [i for i in clustering.assignment if i not in labels]
    if missing:
        raise ValidationError(f"labels missing for indices {missing[:5]}")
    n = len(clustering.assignment)
    total = 0
    for cid in range(clustering.k):
        counts: dict[int, int] = {}
        for i in clustering.members(cid):
            counts[labels[i]] = counts.get(labels[i], 0) + 1
        total += max(counts.values())
    return total / n
