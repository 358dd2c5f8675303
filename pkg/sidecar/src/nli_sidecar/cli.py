"""Serve the classifier: `nli-sidecar --port 8080`.

A failed model load exits nonzero before the server binds.
"""

from __future__ import annotations

import argparse
import sys

import uvicorn

from .app import create_app
from .backends import ModelLoadFailure, load_backend

DEFAULT_MODEL = "joeddav/xlm-roberta-large-xnli"


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="nli-sidecar", description=__doc__)
    parser.add_argument("--model-id", default=DEFAULT_MODEL,
                        help="any 3-way NLI checkpoint with entailment/neutral/contradiction heads")
    parser.add_argument("--backend", choices=["transformers", "lexical"],
                        default="transformers",
                        help="'lexical' is a deterministic offline stand-in")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8080)
    parser.add_argument("--max-batch", type=int, default=64)
    args = parser.parse_args(argv)
    try:
        backend = load_backend(args.backend, args.model_id)
    except ModelLoadFailure as exc:
        print(f"nli-sidecar: model load failed: {exc}", file=sys.stderr)
        return 1
    app = create_app(backend, max_batch=args.max_batch)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
