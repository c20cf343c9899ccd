"""Command line: encode a cluster (or sentence JSONL) into an SEMB file."""

from __future__ import annotations

import argparse
import json
import sys

from embed_export.exporter import ExportJob, export


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="embed-export",
        description="Encode sentences offline and write the engine's SEMB embedding file.",
    )
    parser.add_argument("--input", required=True, help="cluster JSON or {key,text} JSON Lines")
    parser.add_argument("--output", required=True, help="SEMB file to write")
    parser.add_argument(
        "--model",
        default="hash:256",
        help="encoder: 'hash:<dim>' (built-in, deterministic) or a sentence-transformers name",
    )
    parser.add_argument(
        "--no-normalize",
        action="store_true",
        help="keep raw encoder vectors instead of unit-normalizing",
    )
    args = parser.parse_args(argv)
    try:
        manifest = export(
            ExportJob(
                input_path=args.input,
                model_name=args.model,
                output_path=args.output,
                normalize=not args.no_normalize,
            )
        )
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(manifest.to_json_dict(), indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
