"""End-to-end orchestration: main event -> context extraction -> rewrite.

Every stage failure is re-raised with the stage name attached so callers
can report exactly where a run died.  Rewriting is the only stage allowed
to fail soft: a broken rewrite service degrades to the passthrough join
and sets a warning flag on the output.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from eventsum import services
from eventsum.apcluster import Clustering, affinity_propagation
from eventsum.config import ClusteringParams, PipelineConfig
from eventsum.cooc import CoocModelPair, coc_score, load_model
from eventsum.corpus import DocumentCluster, load_cluster
from eventsum.errors import ValidationError
from eventsum.extract import (
    ExtractResult,
    MainEventTagger,
    budget as compute_budget,
    greedy_extract,
    lead_sentence_tagger,
    main_event_candidates,
    select_main_event,
)
from eventsum.objective import ObjectiveContext, make_context
from eventsum.simgraph import EmbeddingStore, SimilarityMatrix, load_embeddings, similarity_matrix


class PipelineStageError(RuntimeError):
    """Wraps any stage failure with the stage's name."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


def _stage(name: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except PipelineStageError:
        raise
    except Exception as exc:
        raise PipelineStageError(name, exc) from exc


@dataclass(frozen=True)
class SummarizeOutput:
    cluster_id: str
    result: ExtractResult
    summary_text: str
    rewrite_fallback: bool

    def to_json_dict(self) -> dict:
        payload = {"cluster_id": self.cluster_id}
        payload.update(self.result.to_json_dict())
        payload["summary"] = self.summary_text
        payload["rewrite_fallback"] = self.rewrite_fallback
        return payload

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), ensure_ascii=False, indent=2)


def resolve_embeddings(source: str, cluster: DocumentCluster) -> EmbeddingStore:
    """File path -> SEMB loader; http(s) URL -> embedding service."""
    if source.startswith(("http://", "https://")):
        keys = [cluster.sentence_key(i) for i in range(len(cluster))]
        return services.fetch_embeddings(source, cluster.texts(), keys=keys)
    return load_embeddings(source)


def bias_vector(
    cluster: DocumentCluster,
    store: EmbeddingStore,
    pair: CoocModelPair | None,
    main_index: int,
) -> np.ndarray:
    """max(0, Coc(i, x_main)) for every universe sentence; zeros without a model."""
    n = len(cluster)
    if pair is None:
        return np.zeros(n)
    main_vec = store.vector(cluster.sentence_key(main_index))
    scores = [
        coc_score(pair, store.vector(cluster.sentence_key(i)), main_vec) for i in range(n)
    ]
    return np.maximum(np.asarray(scores), 0.0)


@dataclass(frozen=True)
class PreparedCluster:
    """Stages of the pipeline that do not depend on objective weights."""

    cluster: DocumentCluster
    store: EmbeddingStore
    matrix: SimilarityMatrix
    clustering: Clustering


def prepare_cluster(
    cluster: DocumentCluster,
    store: EmbeddingStore,
    params: ClusteringParams = ClusteringParams(),
) -> PreparedCluster:
    matrix = _stage("similarity", similarity_matrix, cluster, store)
    clustering = _stage(
        "clustering",
        affinity_propagation,
        matrix,
        preference=params.preference,
        damping=params.damping,
        max_iter=params.max_iter,
        stable_iter=params.stable_iter,
    )
    return PreparedCluster(cluster=cluster, store=store, matrix=matrix, clustering=clustering)


def extract_from_prepared(
    prep: PreparedCluster,
    config: PipelineConfig,
    cooc_pair: CoocModelPair | None,
    tagger: MainEventTagger = lead_sentence_tagger,
) -> ExtractResult:
    """Main-event selection, bias scoring, budget, and greedy extraction."""
    cluster, matrix = prep.cluster, prep.matrix
    base_ctx = make_context(matrix, prep.clustering)
    candidates = _stage("main-event", main_event_candidates, cluster, tagger)
    main_index = _stage("main-event", select_main_event, candidates, base_ctx, config.alpha)
    bias = _stage("bias", bias_vector, cluster, prep.store, cooc_pair, main_index)
    ctx = make_context(matrix, prep.clustering, bias)
    n_budget = _stage("budget", compute_budget, matrix, config.budget())
    return _stage(
        "greedy",
        greedy_extract,
        ctx,
        config.objective(),
        main_index,
        n_budget,
        universe=cluster.universe,
    )


def run_summarize(
    cluster_path: str | os.PathLike,
    config: PipelineConfig,
    tagger: MainEventTagger = lead_sentence_tagger,
) -> SummarizeOutput:
    """Full pipeline for one cluster file."""
    cluster = _stage("load", load_cluster, cluster_path)
    if not config.embedding_source:
        raise PipelineStageError(
            "embeddings", ValidationError("no embedding_source configured")
        )
    store = _stage("embeddings", resolve_embeddings, config.embedding_source, cluster)
    cooc_pair = None
    if config.cooc_weights:
        cooc_pair = _stage("bias", load_model, config.cooc_weights)
    prep = prepare_cluster(cluster, store, config.clustering())
    result = extract_from_prepared(prep, config, cooc_pair, tagger)

    fallback = False
    if config.rewrite_endpoint:
        try:
            summary = services.rewrite(config.rewrite_endpoint, list(result.summary_sentences))
        except services.ServiceError:
            summary = services.passthrough_rewrite(result.summary_sentences)
            fallback = True
    else:
        summary = services.passthrough_rewrite(result.summary_sentences)
    return SummarizeOutput(
        cluster_id=cluster.cluster_id,
        result=result,
        summary_text=summary,
        rewrite_fallback=fallback,
    )


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write via temp file + rename so partial output never lands."""
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)
