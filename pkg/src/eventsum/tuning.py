"""Grid search over the five tuned constants (alpha, lambda1, lambda2, k, c).

The tuning objective is the dev-set mean of ROUGE-2 F + ROUGE-L F of the
extracted (passthrough) summary against the reference.  Similarity
matrices and clusterings are weight-independent, so they are computed
once per cluster and reused across every grid point.
"""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass
from typing import Callable

from eventsum.config import ClusteringParams, PipelineConfig
from eventsum.cooc import CoocModelPair
from eventsum.corpus import DocumentCluster
from eventsum.errors import ValidationError
from eventsum.extract import MainEventTagger, lead_sentence_tagger
from eventsum.pipeline import PreparedCluster, extract_from_prepared, prepare_cluster
from eventsum.rouge import rouge_l, rouge_n
from eventsum.services import passthrough_rewrite
from eventsum.simgraph import EmbeddingStore

_FIELDS = ("alpha", "lambda1", "lambda2", "k", "c")


@dataclass(frozen=True)
class GridSpec:
    """Candidate value lists for each tuned constant; all must be non-empty."""

    alpha: tuple[float, ...]
    lambda1: tuple[float, ...]
    lambda2: tuple[float, ...]
    k: tuple[float, ...]
    c: tuple[float, ...]

    def __post_init__(self):
        for name in _FIELDS:
            if not getattr(self, name):
                raise ValidationError(f"grid axis {name!r} is empty")

    def points(self):
        """Row-major iteration: alpha outermost, c innermost."""
        for combo in itertools.product(self.alpha, self.lambda1, self.lambda2, self.k, self.c):
            yield GridPoint(*combo)

    def size(self) -> int:
        out = 1
        for name in _FIELDS:
            out *= len(getattr(self, name))
        return out


@dataclass(frozen=True)
class GridPoint:
    alpha: float
    lambda1: float
    lambda2: float
    k: float
    c: float


@dataclass(frozen=True)
class DevItem:
    cluster: DocumentCluster
    store: EmbeddingStore
    reference: str


@dataclass(frozen=True)
class GridSearchResult:
    best: GridPoint
    best_score: float
    table: list[dict]


def load_grid(path: str | os.PathLike) -> GridSpec:
    """Read a GridSpec from a JSON file of value lists."""
    with open(path, encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: malformed JSON ({exc})") from exc
    missing = [name for name in _FIELDS if name not in payload]
    if missing:
        raise ValidationError(f"{path}: grid file missing axes {missing}")
    return GridSpec(**{name: tuple(payload[name]) for name in _FIELDS})


def _config_for(point: GridPoint, base: PipelineConfig) -> PipelineConfig:
    return PipelineConfig(
        alpha=point.alpha,
        lambda1=point.lambda1,
        lambda2=point.lambda2,
        k=point.k,
        c=point.c,
        margin=base.margin,
        preference=base.preference,
        damping=base.damping,
        max_iter=base.max_iter,
        stable_iter=base.stable_iter,
        seed=base.seed,
    )


def grid_search(
    grid: GridSpec,
    dev_set: list[DevItem],
    base_config: PipelineConfig = PipelineConfig(),
    cooc_pair: CoocModelPair | None = None,
    tagger: MainEventTagger = lead_sentence_tagger,
    summarize_fn: Callable[[DevItem, GridPoint], str] | None = None,
) -> GridSearchResult:
    """Exhaustive search; ties go to the earliest point in row-major order.

    `summarize_fn` overrides how a hypothesis summary is produced for a
    (dev item, grid point); the default runs the real extraction pipeline
    with passthrough rewriting.
    """
    if not dev_set:
        raise ValidationError("empty dev set")

    prepared: dict[int, PreparedCluster] = {}

    def default_summarize(item: DevItem, point: GridPoint) -> str:
        key = id(item)
        if key not in prepared:
            prepared[key] = prepare_cluster(item.cluster, item.store, _clustering(base_config))
        result = extract_from_prepared(
            prepared[key], _config_for(point, base_config), cooc_pair, tagger
        )
        return passthrough_rewrite(result.summary_sentences)

    produce = summarize_fn or default_summarize

    best_point, best_score = None, float("-inf")
    table = []
    for point in grid.points():
        r2_sum = rl_sum = 0.0
        for item in dev_set:
            try:
                hypothesis = produce(item, point)
            except Exception as exc:
                raise ValidationError(
                    f"pipeline failed at grid point {point} on cluster "
                    f"{item.cluster.cluster_id!r}: {exc}"
                ) from exc
            r2_sum += rouge_n(hypothesis, item.reference, 2).f_measure
            rl_sum += rouge_l(hypothesis, item.reference).f_measure
        mean_r2 = r2_sum / len(dev_set)
        mean_rl = rl_sum / len(dev_set)
        score = mean_r2 + mean_rl
        table.append(
            {
                "alpha": point.alpha,
                "lambda1": point.lambda1,
                "lambda2": point.lambda2,
                "k": point.k,
                "c": point.c,
                "rouge2_f": mean_r2,
                "rougeL_f": mean_rl,
                "score": score,
            }
        )
        if score > best_score:
            best_point, best_score = point, score
    return GridSearchResult(best=best_point, best_score=best_score, table=table)


def _clustering(config: PipelineConfig) -> ClusteringParams:
    return config.clustering()
