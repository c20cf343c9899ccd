"""Learned sentence co-occurrence scorer.

Scores how likely two sentences are to come from the same text.  A pair
(a, b) is mapped to the feature vector [a; b; a-b; a*b; |a-b|] and fed to
a small rectifier MLP with a scalar linear output.  Order-agnosticism
comes from averaging a forward and a backward parameter set over both
argument orders.  Training minimizes a triplet margin loss with plain
mini-batch gradient descent; gradients are derived by hand so they stay
auditable against finite differences.
"""

from __future__ import annotations

import copy
import json
import math
import os
from dataclasses import dataclass

import numpy as np

from eventsum.errors import FormatError, ValidationError

WEIGHT_FILE_VERSION = 1
BATCH_SIZE = 32
DEFAULT_HIDDEN = (64, 64)
DEFAULT_MARGIN = 5.4
FEATURE_BLOCKS = 5  # [a; b; a-b; a*b; |a-b|]


@dataclass
class CoocModel:
    """One direction of the scorer: an MLP from pair features to a scalar."""

    direction: str
    weights: list[np.ndarray]  # layer l maps (in,) -> (out,): shape (out, in)
    biases: list[np.ndarray]

    def __post_init__(self):
        if self.direction not in ("forward", "backward"):
            raise ValidationError(f"bad direction {self.direction!r}")
        if len(self.weights) != len(self.biases) or not self.weights:
            raise ValidationError("weights/biases must be non-empty and aligned")
        for l, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.shape != (w.shape[0],):
                raise ValidationError(f"layer {l}: weight {w.shape} / bias {b.shape} mismatch")
            if l > 0 and w.shape[1] != self.weights[l - 1].shape[0]:
                raise ValidationError(
                    f"layer {l}: input dim {w.shape[1]} != previous output {self.weights[l - 1].shape[0]}"
                )
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise ValidationError(f"layer {l}: non-finite parameters")
        if self.weights[-1].shape[0] != 1:
            raise ValidationError("output layer must be scalar")

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[1]

    @property
    def hidden_dims(self) -> tuple[int, ...]:
        return tuple(w.shape[0] for w in self.weights[:-1])


@dataclass
class CoocModelPair:
    """Forward + backward parameter sets sharing one architecture."""

    forward_model: CoocModel
    backward_model: CoocModel
    embedding_dim: int

    def __post_init__(self):
        f, b = self.forward_model, self.backward_model
        if f.input_dim != b.input_dim or f.hidden_dims != b.hidden_dims:
            raise ValidationError("forward/backward architectures differ")
        if f.input_dim != FEATURE_BLOCKS * self.embedding_dim:
            raise ValidationError(
                f"input dim {f.input_dim} != {FEATURE_BLOCKS} * embedding_dim {self.embedding_dim}"
            )
        if (f.direction, b.direction) != ("forward", "backward"):
            raise ValidationError("model directions must be forward/backward")


@dataclass(frozen=True)
class Triplet:
    """Anchor with a co-occurring (positive) and non-co-occurring (negative) sentence."""

    anchor: np.ndarray
    positive: np.ndarray
    negative: np.ndarray

    def __post_init__(self):
        shapes = {self.anchor.shape, self.positive.shape, self.negative.shape}
        if len(shapes) != 1 or self.anchor.ndim != 1:
            raise ValidationError(f"triplet vectors must share one 1-d shape, got {shapes}")
        for v in (self.anchor, self.positive, self.negative):
            if not np.all(np.isfinite(v)):
                raise ValidationError("non-finite triplet component")


def init_model_pair(
    embedding_dim: int, hidden_dims: tuple[int, ...] = DEFAULT_HIDDEN, seed: int = 0
) -> CoocModelPair:
    """Fresh pair with Glorot-uniform weights and small random biases (seeded, deterministic)."""
    rng = np.random.default_rng(seed)

    def make(direction):
        dims = [FEATURE_BLOCKS * embedding_dim, *hidden_dims, 1]
        weights, biases = [], []
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            limit = math.sqrt(6.0 / (fan_in + fan_out))
            weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
            # small random biases keep rectifier units off their kink at init
            biases.append(rng.uniform(-0.05, 0.05, size=fan_out))
        return CoocModel(direction=direction, weights=weights, biases=biases)

    return CoocModelPair(
        forward_model=make("forward"), backward_model=make("backward"), embedding_dim=embedding_dim
    )


def pair_features(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Feature vector [a; b; a-b; a*b; |a-b|] (length 5d)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValidationError(f"dim mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    return np.concatenate([a, b, diff, a * b, np.abs(diff)])


def _forward(model: CoocModel, x: np.ndarray) -> tuple[float, list]:
    """Run the MLP, keeping per-layer inputs and pre-activations for backprop."""
    cache = []
    h = x
    last = len(model.weights) - 1
    for l, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = w @ h + b
        cache.append((h, z))
        h = z if l == last else np.maximum(z, 0.0)
    return float(h[0]), cache


def _backward(model: CoocModel, cache: list, upstream: float) -> list[tuple[np.ndarray, np.ndarray]]:
    """Gradient of (upstream * scalar output) w.r.t. every weight and bias."""
    grads: list[tuple[np.ndarray, np.ndarray]] = [None] * len(model.weights)
    delta = np.array([upstream])
    for l in range(len(model.weights) - 1, -1, -1):
        h_in, z = cache[l]
        if l < len(model.weights) - 1:
            delta = delta * (z > 0.0)
        grads[l] = (np.outer(delta, h_in), delta.copy())
        if l > 0:
            delta = model.weights[l].T @ delta
    return grads


def _score_once(model: CoocModel, a: np.ndarray, b: np.ndarray) -> float:
    return _forward(model, pair_features(a, b))[0]


def coc_score(pair: CoocModelPair, a: np.ndarray, b: np.ndarray) -> float:
    """Order-agnostic co-occurrence score.

    Average of the forward and backward models over both argument orders;
    the pairwise grouping makes the result bit-exactly symmetric in (a, b).
    """
    f = pair.forward_model
    g = pair.backward_model
    sf = _score_once(f, a, b) + _score_once(f, b, a)
    sg = _score_once(g, a, b) + _score_once(g, b, a)
    return (sf + sg) / 4.0


def triplet_loss(pair: CoocModelPair, t: Triplet, m: float = DEFAULT_MARGIN) -> float:
    """Hinge loss max(0, m - Coc(anchor, positive) + Coc(anchor, negative)).

    Zero exactly when the positive pair outscores the negative by at least
    the margin.
    """
    if not m > 0:
        raise ValidationError(f"margin must be positive, got {m}")
    cp = coc_score(pair, t.anchor, t.positive)
    cn = coc_score(pair, t.anchor, t.negative)
    return max(0.0, m - cp + cn)


def _zero_grads(model: CoocModel) -> list[tuple[np.ndarray, np.ndarray]]:
    return [(np.zeros_like(w), np.zeros_like(b)) for w, b in zip(model.weights, model.biases)]


def _accumulate(target, source, scale=1.0):
    for (tw, tb), (sw, sb) in zip(target, source):
        tw += scale * sw
        tb += scale * sb


def _coc_gradient(pair: CoocModelPair, a, b, upstream: float):
    """Gradients of upstream * Coc(a, b) for both models (all four evaluations)."""
    grad_f = _zero_grads(pair.forward_model)
    grad_g = _zero_grads(pair.backward_model)
    quarter = upstream / 4.0
    for model, grads in ((pair.forward_model, grad_f), (pair.backward_model, grad_g)):
        for x, y in ((a, b), (b, a)):
            _, cache = _forward(model, pair_features(x, y))
            _accumulate(grads, _backward(model, cache, quarter))
    return grad_f, grad_g


def loss_gradient(pair: CoocModelPair, t: Triplet, m: float = DEFAULT_MARGIN):
    """Exact gradient of triplet_loss w.r.t. every parameter of both models.

    Returns (forward_grads, backward_grads), each a per-layer list of
    (dW, db).  All zeros when the hinge is inactive.
    """
    if not m > 0:
        raise ValidationError(f"margin must be positive, got {m}")
    cp = coc_score(pair, t.anchor, t.positive)
    cn = coc_score(pair, t.anchor, t.negative)
    grad_f = _zero_grads(pair.forward_model)
    grad_g = _zero_grads(pair.backward_model)
    if m - cp + cn <= 0.0:
        return grad_f, grad_g
    gf_p, gg_p = _coc_gradient(pair, t.anchor, t.positive, -1.0)
    gf_n, gg_n = _coc_gradient(pair, t.anchor, t.negative, +1.0)
    _accumulate(grad_f, gf_p)
    _accumulate(grad_f, gf_n)
    _accumulate(grad_g, gg_p)
    _accumulate(grad_g, gg_n)
    return grad_f, grad_g


def train(
    pair: CoocModelPair,
    triplets: list[Triplet],
    m: float = DEFAULT_MARGIN,
    step_size: float = 0.01,
    epochs: int = 10,
    seed: int = 0,
) -> tuple[CoocModelPair, list[float]]:
    """Mini-batch gradient descent on the triplet loss.

    Triplet order is reshuffled every epoch by a generator seeded with
    `seed`; batches of 32 use the mean batch gradient and a fixed step.
    Returns the trained pair (the input is left untouched) and the mean
    per-epoch loss history.
    """
    if not triplets:
        raise ValidationError("empty training set")
    if not m > 0:
        raise ValidationError(f"margin must be positive, got {m}")
    if epochs < 1:
        raise ValidationError("epochs must be positive")
    pair = copy.deepcopy(pair)
    rng = np.random.default_rng(seed)
    history = []
    for epoch in range(epochs):
        order = rng.permutation(len(triplets))
        epoch_loss = 0.0
        for batch_start in range(0, len(order), BATCH_SIZE):
            batch = [triplets[i] for i in order[batch_start : batch_start + BATCH_SIZE]]
            grad_f = _zero_grads(pair.forward_model)
            grad_g = _zero_grads(pair.backward_model)
            for t in batch:
                loss = triplet_loss(pair, t, m)
                if not math.isfinite(loss):
                    raise ValidationError(f"non-finite loss at epoch {epoch}")
                epoch_loss += loss
                gf, gg = loss_gradient(pair, t, m)
                _accumulate(grad_f, gf)
                _accumulate(grad_g, gg)
            if step_size != 0.0:
                scale = step_size / len(batch)
                for model, grads in ((pair.forward_model, grad_f), (pair.backward_model, grad_g)):
                    for l, (dw, db) in enumerate(grads):
                        model.weights[l] -= scale * dw
                        model.biases[l] -= scale * db
        history.append(epoch_loss / len(triplets))
    return pair, history


@dataclass(frozen=True)
class PairMetrics:
    precision: float
    recall: float
    f_measure: float


def evaluate_pairs(
    pair: CoocModelPair,
    labeled_pairs: list[tuple[np.ndarray, np.ndarray, int]],
    threshold: float = 0.0,
) -> PairMetrics:
    """Precision/recall/F1 of thresholded scores against 0/1 co-occurrence labels.

    A pair is predicted co-occurring iff its score >= threshold; a
    component with a zero denominator is reported as 0.
    """
    if not labeled_pairs:
        raise ValidationError("empty evaluation set")
    tp = fp = fn = 0
    for a, b, label in labeled_pairs:
        predicted = coc_score(pair, a, b) >= threshold
        if predicted and label:
            tp += 1
        elif predicted:
            fp += 1
        elif label:
            fn += 1
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return PairMetrics(precision=precision, recall=recall, f_measure=f)


def save_model(pair: CoocModelPair, path: str | os.PathLike) -> None:
    """Write the weight JSON file (version 1)."""

    def dump(model: CoocModel):
        return {
            "layers": [
                {
                    "rows": int(w.shape[0]),
                    "cols": int(w.shape[1]),
                    "w": [float(x) for x in w.ravel()],
                    "b": [float(x) for x in b],
                }
                for w, b in zip(model.weights, model.biases)
            ]
        }

    payload = {
        "version": WEIGHT_FILE_VERSION,
        "embedding_dim": pair.embedding_dim,
        "hidden": list(pair.forward_model.hidden_dims),
        "models": {"forward": dump(pair.forward_model), "backward": dump(pair.backward_model)},
    }
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)
    os.replace(tmp, path)


def load_model(path: str | os.PathLike) -> CoocModelPair:
    """Load a weight file, validating version and the layer shape chain."""
    with open(path, encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: malformed JSON ({exc})") from exc
    if payload.get("version") != WEIGHT_FILE_VERSION:
        raise FormatError(f"{path}: unsupported weight file version {payload.get('version')!r}")
    dim = payload["embedding_dim"]
    hidden = tuple(payload["hidden"])

    def parse(direction):
        layers = payload["models"][direction]["layers"]
        weights, biases = [], []
        for spec in layers:
            rows, cols = spec["rows"], spec["cols"]
            w = np.asarray(spec["w"], dtype=np.float64)
            if w.size != rows * cols:
                raise FormatError(f"{path}: layer claims {rows}x{cols} but has {w.size} weights")
            weights.append(w.reshape(rows, cols))
            biases.append(np.asarray(spec["b"], dtype=np.float64))
        try:
            model = CoocModel(direction=direction, weights=weights, biases=biases)
        except ValidationError as exc:
            raise FormatError(f"{path}: {exc}") from exc
        return model

    forward, backward = parse("forward"), parse("backward")
    if forward.hidden_dims != hidden:
        raise FormatError(f"{path}: hidden dims {forward.hidden_dims} != declared {hidden}")
    try:
        return CoocModelPair(forward_model=forward, backward_model=backward, embedding_dim=dim)
    except ValidationError as exc:
        raise FormatError(f"{path}: {exc}") from exc
