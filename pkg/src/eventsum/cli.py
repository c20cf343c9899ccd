"""Command-line surface.

Subcommands: summarize, evaluate, tune, cluster, cooc-train, cooc-score,
budget.  Exit codes: 0 success, 1 validation error, 2 I/O or network
error.  Outputs are JSON (written atomically with --out); --report
renders CSV + figure files for the reporting commands.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys


from eventsum import report
from eventsum.config import PipelineConfig, load_config
from eventsum.cooc import (
    Triplet,
    coc_score,
    init_model_pair,
    load_model,
    save_model,
    train,
)
from eventsum.corpus import load_cluster
from eventsum.errors import ValidationError
from eventsum.extract import budget as compute_budget
from eventsum.pipeline import (
    PipelineStageError,
    prepare_cluster,
    resolve_embeddings,
    run_summarize,
    write_atomic,
)
from eventsum.rouge import rouge_l, rouge_n
from eventsum.services import ServiceError
from eventsum.simgraph import load_embeddings, pairwise_variance, similarity_matrix
from eventsum.tuning import DevItem, grid_search, load_grid

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


def _load_json(path):
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: malformed JSON ({exc})") from exc


def _resolve_config(args) -> PipelineConfig:
    config = load_config(args.config) if args.config else PipelineConfig()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if getattr(args, "embeddings", None):
        overrides["embedding_source"] = args.embeddings
    if overrides:
        config = dataclasses.replace(config, **overrides)
    return config


def _emit(args, payload: dict | list) -> None:
    text = json.dumps(payload, ensure_ascii=False, indent=2)
    if args.out:
        write_atomic(args.out, text + "\n")
    else:
        print(text)


def _rouge_row(item_id: str, hypothesis: str, reference: str) -> dict:
    def as_dict(score):
        return {"p": score.precision, "r": score.recall, "f": score.f_measure}

    return {
        "id": item_id,
        "rouge1": as_dict(rouge_n(hypothesis, reference, 1)),
        "rouge2": as_dict(rouge_n(hypothesis, reference, 2)),
        "rougeL": as_dict(rouge_l(hypothesis, reference)),
    }


def _mean_row(rows: list[dict]) -> dict:
    mean = {"id": "mean"}
    for metric in ("rouge1", "rouge2", "rougeL"):
        mean[metric] = {
            part: sum(r[metric][part] for r in rows) / len(rows) for part in ("p", "r", "f")
        }
    return mean


def cmd_summarize(args) -> int:
    config = _resolve_config(args)
    output = run_summarize(args.cluster, config)
    payload = output.to_json_dict()
    _emit(args, payload)
    if args.report:
        report.save_extraction_report(payload, args.report)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    pairs = _load_json(args.pairs)
    if not isinstance(pairs, list) or not pairs:
        raise ValidationError(f"{args.pairs}: expected a non-empty JSON array")
    rows = []
    for i, item in enumerate(pairs):
        if "hypothesis" not in item or "reference" not in item:
            raise ValidationError(f"{args.pairs}[{i}]: needs 'hypothesis' and 'reference'")
        rows.append(_rouge_row(str(item.get("id", i)), item["hypothesis"], item["reference"]))
    rows.append(_mean_row(rows))
    _emit(args, rows)
    if args.report:
        report.save_rouge_report(rows[:-1], args.report)
    return EXIT_OK


def cmd_tune(args) -> int:
    config = _resolve_config(args)
    grid = load_grid(args.grid)
    dev_entries = _load_json(args.dev)
    if not isinstance(dev_entries, list) or not dev_entries:
        raise ValidationError(f"{args.dev}: expected a non-empty JSON array")
    dev_set = []
    for entry in dev_entries:
        cluster = load_cluster(entry["cluster"])
        store = resolve_embeddings(entry["embeddings"], cluster)
        dev_set.append(DevItem(cluster=cluster, store=store, reference=entry["reference"]))
    cooc_pair = load_model(config.cooc_weights) if config.cooc_weights else None
    result = grid_search(grid, dev_set, base_config=config, cooc_pair=cooc_pair)
    payload = {
        "best": dataclasses.asdict(result.best),
        "score": result.best_score,
        "table": result.table,
    }
    _emit(args, payload)
    if args.report:
        report.save_tuning_report(result.table, args.report)
    return EXIT_OK


def cmd_cluster(args) -> int:
    config = _resolve_config(args)
    cluster = load_cluster(args.cluster)
    if not config.embedding_source:
        raise ValidationError("no embedding source configured (--embeddings or config)")
    store = resolve_embeddings(config.embedding_source, cluster)
    prep = prepare_cluster(cluster, store, config.clustering())
    clustering = prep.clustering
    payload = {
        "cluster_id": cluster.cluster_id,
        "k": clustering.k,
        "exemplars": list(clustering.exemplars),
        "assignment": [clustering.assignment[i] for i in range(len(cluster))],
        "iterations_run": clustering.iterations_run,
        "converged": clustering.converged,
    }
    _emit(args, payload)
    return EXIT_OK


def cmd_cooc_train(args) -> int:
    config = _resolve_config(args)
    store = load_embeddings(args.embeddings)
    triplets = []
    with open(args.triplets, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                entry = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{args.triplets}:{line_no}: malformed JSON ({exc})") from exc
            triplets.append(
                Triplet(
                    anchor=store.vector(entry["anchor_key"]),
                    positive=store.vector(entry["positive_key"]),
                    negative=store.vector(entry["negative_key"]),
                )
            )
    if not triplets:
        raise ValidationError(f"{args.triplets}: no triplets found")
    hidden = tuple(args.hidden) if args.hidden else (64, 64)
    pair = init_model_pair(store.dim, hidden_dims=hidden, seed=config.seed)
    trained, history = train(
        pair,
        triplets,
        m=config.margin,
        step_size=args.step_size,
        epochs=args.epochs,
        seed=config.seed,
    )
    save_model(trained, args.weights_out)
    _emit(args, {"weights": args.weights_out, "epochs": args.epochs, "loss_history": history})
    return EXIT_OK


def cmd_cooc_score(args) -> int:
    pair = load_model(args.weights)
    store = load_embeddings(args.embeddings)
    score = coc_score(pair, store.vector(args.key_a), store.vector(args.key_b))
    _emit(args, {"key_a": args.key_a, "key_b": args.key_b, "score": score})
    return EXIT_OK


def cmd_budget(args) -> int:
    config = _resolve_config(args)
    cluster = load_cluster(args.cluster)
    if not config.embedding_source:
        raise ValidationError("no embedding source configured (--embeddings or config)")
    store = resolve_embeddings(config.embedding_source, cluster)
    matrix = similarity_matrix(cluster, store)
    variance = pairwise_variance(matrix) if matrix.n >= 2 else 0.0
    n_budget = compute_budget(matrix, config.budget())
    _emit(
        args,
        {"n": n_budget, "variance": variance, "k": config.k, "c": config.c, "universe": matrix.n},
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eventsum",
        description="Main-event-centered extractive multi-document summarization.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, embeddings=False, rep=False):
        p.add_argument("--config", help="pipeline config JSON")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out", help="write output JSON to this path (atomic)")
        if embeddings:
            p.add_argument("--embeddings", help="SEMB file or embedding service URL")
        if rep:
            p.add_argument("--report", help="directory for CSV + figure report files")

    p = sub.add_parser("summarize", help="summarize one cluster file")
    p.add_argument("cluster")
    common(p, embeddings=True, rep=True)
    p.set_defaults(fn=cmd_summarize)

    p = sub.add_parser("evaluate", help="score hypothesis/reference pairs with ROUGE")
    p.add_argument("pairs", help="JSON array of {id, hypothesis, reference}")
    common(p, rep=True)
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("tune", help="grid search alpha/lambda1/lambda2/k/c on a dev set")
    p.add_argument("--grid", required=True, help="GridSpec JSON of value lists")
    p.add_argument("--dev", required=True, help="JSON array of {cluster, embeddings, reference}")
    common(p, rep=True)
    p.set_defaults(fn=cmd_tune)

    p = sub.add_parser("cluster", help="affinity-propagation partition of a cluster")
    p.add_argument("cluster")
    common(p, embeddings=True)
    p.set_defaults(fn=cmd_cluster)

    p = sub.add_parser("cooc-train", help="train the co-occurrence scorer on triplets")
    p.add_argument("--triplets", required=True, help="JSON Lines of {anchor_key, positive_key, negative_key}")
    p.add_argument("--embeddings", required=True, help="SEMB file resolving the keys")
    p.add_argument("--weights-out", required=True, help="where to write the weight JSON")
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--step-size", type=float, default=0.01)
    p.add_argument("--hidden", type=int, nargs="*", help="hidden layer sizes (default 64 64)")
    common(p)
    p.set_defaults(fn=cmd_cooc_train)

    p = sub.add_parser("cooc-score", help="score one key pair with trained weights")
    p.add_argument("--weights", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--key-a", required=True)
    p.add_argument("--key-b", required=True)
    common(p)
    p.set_defaults(fn=cmd_cooc_score)

    p = sub.add_parser("budget", help="adaptive sentence budget for a cluster")
    p.add_argument("cluster")
    common(p, embeddings=True)
    p.set_defaults(fn=cmd_budget)

    return parser


def _exit_code_for(exc: Exception) -> int:
    if isinstance(exc, PipelineStageError):
        return _exit_code_for(exc.cause)
    if isinstance(exc, (ServiceError, OSError)):
        return EXIT_IO
    return EXIT_VALIDATION


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except PipelineStageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code_for(exc)
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ServiceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
