"""Pipeline configuration: one JSON file holds every tuned constant."""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, fields

from eventsum.cooc import DEFAULT_MARGIN
from eventsum.errors import ValidationError
from eventsum.extract import BudgetConfig
from eventsum.objective import ObjectiveConfig


@dataclass(frozen=True)
class ClusteringParams:
    preference: float | str = "median"
    damping: float = 0.9
    max_iter: int = 1000
    stable_iter: int = 50


@dataclass(frozen=True)
class PipelineConfig:
    alpha: float = 0.3
    lambda1: float = 1.0
    lambda2: float = 1.0
    k: float = 4.0
    c: float = 10.0
    margin: float = DEFAULT_MARGIN
    preference: float | str = "median"
    damping: float = 0.9
    max_iter: int = 1000
    stable_iter: int = 50
    cooc_weights: str | None = None
    rewrite_endpoint: str | None = None
    embedding_source: str | None = None
    seed: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.margin) and self.margin > 0):
            raise ValidationError(f"margin must be positive, got {self.margin}")
        # Delegate range checks to the component configs.
        self.objective()
        self.budget()

    def objective(self) -> ObjectiveConfig:
        return ObjectiveConfig(alpha=self.alpha, lambda1=self.lambda1, lambda2=self.lambda2)

    def budget(self) -> BudgetConfig:
        return BudgetConfig(k=self.k, c=self.c)

    def clustering(self) -> ClusteringParams:
        return ClusteringParams(
            preference=self.preference,
            damping=self.damping,
            max_iter=self.max_iter,
            stable_iter=self.stable_iter,
        )


def load_config(path: str | os.PathLike) -> PipelineConfig:
    """Read a config JSON file; unknown keys are rejected."""
    with open(path, encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: malformed JSON ({exc})") from exc
    if not isinstance(payload, dict):
        raise ValidationError(f"{path}: config must be a JSON object")
    known = {f.name for f in fields(PipelineConfig)}
    unknown = sorted(set(payload) - known)
    if unknown:
        raise ValidationError(f"{path}: unknown config keys {unknown}")
    return PipelineConfig(**payload)
