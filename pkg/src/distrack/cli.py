"""Command-line orchestration of the pipeline.

Artifacts go to explicit output paths, logs go to stderr, and every
subcommand validates its inputs before touching the filesystem.  Exit
codes: 0 success, 1 input error, 2 remote/classifier failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

from . import align as align_mod
from . import analytics, cascade, ingest, layout as layout_mod, querygen, render
from .errors import DistrackError, InputError, RemoteError, SourceUnavailable
from .model import Claim, ClaimStatus, format_utc, parse_utc

log = logging.getLogger("distrack.cli")

API_TOKEN_VAR = "DISTRACK_API_TOKEN"

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_REMOTE = 2


class UsageError(InputError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # input errors must exit 1, not argparse's 2
        raise UsageError(message)


@dataclass(frozen=True, slots=True)
class PipelineConfig:
    claim: Claim
    max_keywords: int = querygen.DEFAULT_MAX_KEYWORDS
    drop_k: int = querygen.DEFAULT_DROP_K
    expand_numbers: bool = False
    keywords: tuple[str, ...] = ()
    similarity_threshold: float = 0.6
    classifier: str = "baseline"
    inherit_repost_labels: bool = True
    batch_size: int = 32
    style: layout_mod.StyleConfig = field(default_factory=layout_mod.StyleConfig)
    posts_archive: str | None = None
    users_archive: str | None = None
    out_dir: str = "out"

    def align_config(self) -> align_mod.AlignmentConfig:
        return align_mod.AlignmentConfig(
            similarity_threshold=self.similarity_threshold,
            batch_size=self.batch_size,
            inherit_repost_labels=self.inherit_repost_labels,
        )

    def make_classifier(self) -> align_mod.NliClassifier:
        if self.classifier == "baseline":
            return align_mod.BaselineClassifier()
        if self.classifier.startswith("remote:"):
            return align_mod.RemoteClassifier(self.classifier[len("remote:"):])
        raise UsageError(f"classifier must be 'baseline' or 'remote:<url>', got {self.classifier!r}")

    def to_json_dict(self) -> dict:
        return {
            "claim": {
                "id": self.claim.id,
                "text": self.claim.text,
                "language": self.claim.language,
                "status": self.claim.status.value,
                "debunk_url": self.claim.debunk_url,
                "topic_birth": format_utc(self.claim.topic_birth)
                if self.claim.topic_birth
                else None,
            },
            "querygen": {
                "max_keywords": self.max_keywords,
                "drop_k": self.drop_k,
                "expand_numbers": self.expand_numbers,
                "keywords": list(self.keywords),
            },
            "align": {
                "similarity_threshold": self.similarity_threshold,
                "classifier": self.classifier,
                "inherit_repost_labels": self.inherit_repost_labels,
                "batch_size": self.batch_size,
            },
            "io": {
                "posts_archive": self.posts_archive,
                "users_archive": self.users_archive,
                "out_dir": self.out_dir,
            },
        }


def _claim_from_dict(doc: dict) -> Claim:
    if "text" not in doc:
        raise UsageError("config claim needs a 'text' field")
    return Claim(
        id=str(doc.get("id", "claim-1")),
        text=doc["text"],
        language=doc.get("language", "en"),
        status=ClaimStatus(doc.get("status", "verified_false")),
        debunk_url=doc.get("debunk_url"),
        topic_birth=parse_utc(doc["topic_birth"]) if doc.get("topic_birth") else None,
    )


def load_config(path: str | Path, base_dir: Path | None = None) -> PipelineConfig:
    path = Path(path)
    if not path.exists():
        raise UsageError(f"config file not found: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except ValueError as exc:
        raise UsageError(f"config file is not valid JSON: {exc}")
    base = base_dir if base_dir is not None else path.parent

    def resolve(value: str | None) -> str | None:
        if value is None:
            return None
        candidate = Path(value)
        return str(candidate if candidate.is_absolute() else base / candidate)

    qg = doc.get("querygen", {})
    al = doc.get("align", {})
    io = doc.get("io", {})
    style_doc = doc.get("style", {})
    style = layout_mod.StyleConfig(**style_doc) if style_doc else layout_mod.StyleConfig()
    return PipelineConfig(
        claim=_claim_from_dict(doc.get("claim", {})),
        max_keywords=int(qg.get("max_keywords", querygen.DEFAULT_MAX_KEYWORDS)),
        drop_k=int(qg.get("drop_k", querygen.DEFAULT_DROP_K)),
        expand_numbers=bool(qg.get("expand_numbers", False)),
        keywords=tuple(qg.get("keywords", ())),
        similarity_threshold=float(al.get("similarity_threshold", 0.6)),
        classifier=str(al.get("classifier", "baseline")),
        inherit_repost_labels=bool(al.get("inherit_repost_labels", True)),
        batch_size=int(al.get("batch_size", 32)),
        style=style,
        posts_archive=resolve(io.get("posts_archive")),
        users_archive=resolve(io.get("users_archive")),
        out_dir=resolve(io.get("out_dir")) or "out",
    )


# -- shared helpers -------------------------------------------------------------


def _config_from_args(args: argparse.Namespace) -> PipelineConfig:
    if getattr(args, "config", None):
        cfg = load_config(args.config)
    else:
        if not getattr(args, "claim", None):
            raise UsageError("either --config or --claim is required")
        cfg = PipelineConfig(claim=Claim(id="claim-1", text=args.claim,
                                         language=getattr(args, "language", None) or "en"))
    if getattr(args, "claim", None) and getattr(args, "config", None):
        cfg = replace(cfg, claim=Claim(id=cfg.claim.id, text=args.claim,
                                       language=cfg.claim.language,
                                       status=cfg.claim.status,
                                       debunk_url=cfg.claim.debunk_url,
                                       topic_birth=cfg.claim.topic_birth))
    for attr, key in (
        ("max_keywords", "max_keywords"),
        ("drop", "drop_k"),
        ("threshold", "similarity_threshold"),
        ("classifier", "classifier"),
        ("batch_size", "batch_size"),
        ("out_dir", "out_dir"),
        ("posts", "posts_archive"),
        ("users", "users_archive"),
    ):
        value = getattr(args, attr, None)
        if value is not None:
            cfg = replace(cfg, **{key: value})
    if getattr(args, "expand_numbers", False):
        cfg = replace(cfg, expand_numbers=True)
    if getattr(args, "no_inherit", False):
        cfg = replace(cfg, inherit_repost_labels=False)
    if getattr(args, "keywords", None):
        cfg = replace(cfg, keywords=tuple(k.strip() for k in args.keywords.split(",") if k.strip()))
    return cfg


def _keywords_for(cfg: PipelineConfig) -> list[querygen.Keyword]:
    if cfg.keywords:
        return [querygen.Keyword(text.lower(), 1.0, i) for i, text in enumerate(cfg.keywords)]
    return querygen.extract_keywords(cfg.claim, cfg.max_keywords)


def _build_query_string(cfg: PipelineConfig) -> str:
    keywords = _keywords_for(cfg)
    expr = querygen.build_query(keywords, cfg.drop_k, cfg.expand_numbers,
                                language=cfg.claim.language)
    return querygen.serialize_query(expr)


def _read_store(cfg: PipelineConfig) -> ingest.RecordStore:
    if not cfg.posts_archive:
        raise UsageError("a posts archive is required (--posts or io.posts_archive)")
    store = ingest.RecordStore()
    records, warnings = ingest.read_archive(cfg.posts_archive, "posts")
    for warning in warnings:
        log.warning("posts archive line %d: %s", warning.line_number, warning.message)
    authors = []
    if cfg.users_archive:
        authors, user_warnings = ingest.read_archive(cfg.users_archive, "users")
        for warning in user_warnings:
            log.warning("users archive line %d: %s", warning.line_number, warning.message)
    report = ingest.hydrate(store, [r.post for r in records], authors,
                            source=str(cfg.posts_archive))
    log.info("hydrated %d posts, %d authors (%d duplicates, %d missing parents)",
             report.inserted_posts, report.inserted_authors,
             len(report.duplicates), len(report.missing))
    return store


def _run_alignment(cfg: PipelineConfig, store: ingest.RecordStore):
    posts = sorted(store.posts.values(), key=lambda p: (p.created_at, p.id))
    classifier = cfg.make_classifier()
    return align_mod.align_posts(posts, cfg.claim, align_mod.HashingEmbedder(),
                                 classifier, cfg.align_config())


def _alignments_to_jsonl(results) -> bytes:
    lines = []
    for post_id in sorted(results):
        result = results[post_id]
        lines.append(json.dumps({
            "post_id": post_id,
            "label": result.label.value,
            "scores": dict(sorted(result.scores.items())),
            "similarity": result.similarity,
            "source": result.source.value,
        }, sort_keys=True))
    return ("\n".join(lines) + "\n").encode("utf-8") if lines else b""


def _alignments_from_jsonl(path: str | Path):
    from .model import AlignmentLabel, AlignmentResult, ResultSource

    results = {}
    text = Path(path).read_text(encoding="utf-8")
    for line in text.splitlines():
        if not line.strip():
            continue
        doc = json.loads(line)
        results[doc["post_id"]] = AlignmentResult(
            post_id=doc["post_id"],
            label=AlignmentLabel(doc["label"]),
            scores=doc["scores"],
            similarity=doc["similarity"],
            source=ResultSource(doc["source"]),
        )
    return results


def _write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)
    log.info("wrote %s (%d bytes)", path, len(data))


# -- subcommands ------------------------------------------------------------------


def _cmd_keywords(args) -> int:
    cfg = _config_from_args(args)
    for keyword in _keywords_for(cfg):
        print(keyword.text)
    return EXIT_OK


def _cmd_query(args) -> int:
    cfg = _config_from_args(args)
    query = _build_query_string(cfg)
    if args.out:
        _write(Path(args.out), (query + "\n").encode("utf-8"))
    else:
        print(query)
    return EXIT_OK


def _cmd_fetch(args) -> int:
    cfg = _config_from_args(args)
    window = ingest.FetchWindow(
        since=parse_utc(args.since) if args.since else None,
        until=parse_utc(args.until) if args.until else None,
        max_results=args.max_results,
    )
    ingest.check_window(window, cfg.claim)
    spec = querygen.QuerySpec(
        expr=querygen.parse_query(_build_query_string(cfg)),
        start_time=window.since if window.since else cfg.claim.topic_birth,
        end_time=window.until,
        max_results=window.max_results,
    )
    if args.from_archive:
        source = ingest.ArchiveSource(args.from_archive)
    elif os.environ.get(API_TOKEN_VAR):
        raise SourceUnavailable(
            "no live network client is bundled; point --from-archive at a JSONL archive"
        )
    else:
        raise UsageError(f"fetch needs --from-archive or the {API_TOKEN_VAR} environment variable")
    records = ingest.fetch_window(source, spec)
    payload = b"".join(record.raw + b"\n" for record in records)
    _write(Path(args.out), payload)
    return EXIT_OK


def _cmd_align(args) -> int:
    cfg = _config_from_args(args)
    store = _read_store(cfg)
    results = _run_alignment(cfg, store)
    out_dir = Path(args.out).parent if args.out else Path(cfg.out_dir)
    target = Path(args.out) if args.out else out_dir / "alignments.jsonl"
    _write(target, _alignments_to_jsonl(results))
    _write(target.parent / "run_config.json",
           (json.dumps(cfg.to_json_dict(), indent=2, sort_keys=True) + "\n").encode("utf-8"))
    return EXIT_OK


def _cmd_build(args) -> int:
    cfg = _config_from_args(args)
    store = _read_store(cfg)
    if args.alignments:
        results = _alignments_from_jsonl(args.alignments)
    else:
        results = _run_alignment(cfg, store)
    graph = cascade.build_graph(store, results, cfg.claim)
    model = layout_mod.build_layout(graph, cfg.style)
    _write(Path(args.out), render.export_json(graph, model))
    return EXIT_OK


def _load_cascade(path: str):
    if not Path(path).exists():
        raise UsageError(f"cascade file not found: {path}")
    return render.import_json(Path(path).read_bytes())


def _cmd_render(args) -> int:
    graph, model = _load_cascade(args.cascade)
    opts = render.RenderOptions(
        format=args.format,
        width=args.width,
        height=args.height,
        include_edges=not args.no_edges,
        legend=not args.no_legend,
    )
    if args.format == "svg":
        data = render.render_svg(graph, model, opts)
    elif args.format == "dot":
        data = render.render_dot(graph, model, opts)
    else:
        data = render.export_json(graph, model)
    _write(Path(args.out), data)
    return EXIT_OK


def _cmd_report(args) -> int:
    graph, _model = _load_cascade(args.cascade)
    bundle = analytics.build_report(graph)
    out_dir = Path(args.out_dir)
    _write(out_dir / "report.json", bundle.to_json_bytes())
    _write(out_dir / "report.md", analytics.render_markdown(bundle).encode("utf-8"))
    return EXIT_OK


def _cmd_pipeline(args) -> int:
    cfg = _config_from_args(args)
    out_dir = Path(cfg.out_dir)
    query = _build_query_string(cfg)
    _write(out_dir / "query.txt", (query + "\n").encode("utf-8"))
    store = _read_store(cfg)
    results = _run_alignment(cfg, store)
    _write(out_dir / "alignments.jsonl", _alignments_to_jsonl(results))
    graph = cascade.build_graph(store, results, cfg.claim)
    model = layout_mod.build_layout(graph, cfg.style)
    _write(out_dir / "cascade.json", render.export_json(graph, model))
    _write(out_dir / "cascade.svg", render.render_svg(graph, model, render.RenderOptions()))
    _write(out_dir / "cascade.dot", render.render_dot(graph, model, render.RenderOptions("dot")))
    bundle = analytics.build_report(graph)
    _write(out_dir / "report.json", bundle.to_json_bytes())
    _write(out_dir / "report.md", analytics.render_markdown(bundle).encode("utf-8"))
    _write(out_dir / "run_config.json",
           (json.dumps(cfg.to_json_dict(), indent=2, sort_keys=True) + "\n").encode("utf-8"))
    return EXIT_OK


# -- argument wiring -------------------------------------------------------------


def _add_claim_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="pipeline config JSON")
    parser.add_argument("--claim", help="claim text (overrides config)")
    parser.add_argument("--language", default=None, help="claim language tag (default en)")


def _add_query_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--keywords", help="comma-separated keywords, bypassing extraction")
    parser.add_argument("--max-keywords", dest="max_keywords", type=int, default=None)
    parser.add_argument("--drop", type=int, default=None,
                        help="keywords dropped per disjunct (default 1)")
    parser.add_argument("--expand-numbers", dest="expand_numbers", action="store_true",
                        help="expand numerals into alternative surface forms")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="distrack",
                     description="Track the conversation around a debunked claim.")
    parser.add_argument("--log-level", default="INFO",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("keywords", help="extract keywords from the claim")
    _add_claim_options(p)
    p.add_argument("--max-keywords", dest="max_keywords", type=int, default=None)
    p.add_argument("--keywords", help=argparse.SUPPRESS)
    p.set_defaults(func=_cmd_keywords)

    p = sub.add_parser("query", help="build the boolean search query")
    _add_claim_options(p)
    _add_query_options(p)
    p.add_argument("--out", help="write the query to a file instead of stdout")
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("fetch", help="fetch posts matching the query into a JSONL archive")
    _add_claim_options(p)
    _add_query_options(p)
    p.add_argument("--since", help="ISO-8601 window start")
    p.add_argument("--until", help="ISO-8601 window end")
    p.add_argument("--max-results", dest="max_results", type=int, default=100)
    p.add_argument("--from-archive", dest="from_archive",
                   help="use an existing JSONL archive as the source")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_fetch)

    p = sub.add_parser("align", help="label archived posts against the claim")
    _add_claim_options(p)
    p.add_argument("--posts", help="posts JSONL archive")
    p.add_argument("--users", help="users JSONL archive")
    p.add_argument("--classifier", help="'baseline' or 'remote:<url>'")
    p.add_argument("--threshold", type=float, default=None,
                   help="semantic similarity threshold (default 0.6)")
    p.add_argument("--batch-size", dest="batch_size", type=int, default=None)
    p.add_argument("--no-inherit", dest="no_inherit", action="store_true",
                   help="classify reposts on their own text")
    p.add_argument("--out", help="alignments JSONL path")
    p.add_argument("--out-dir", dest="out_dir", default=None)
    p.set_defaults(func=_cmd_align)

    p = sub.add_parser("build", help="build the cascade graph and layout")
    _add_claim_options(p)
    p.add_argument("--posts", help="posts JSONL archive")
    p.add_argument("--users", help="users JSONL archive")
    p.add_argument("--alignments", help="alignments JSONL (recomputed when omitted)")
    p.add_argument("--classifier", help="'baseline' or 'remote:<url>'")
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--out", required=True, help="cascade JSON output path")
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("render", help="render a cascade JSON document")
    p.add_argument("--cascade", required=True)
    p.add_argument("--format", choices=list(render.FORMATS), default="svg")
    p.add_argument("--width", type=int, default=1600)
    p.add_argument("--height", type=int, default=900)
    p.add_argument("--no-edges", dest="no_edges", action="store_true")
    p.add_argument("--no-legend", dest="no_legend", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("report", help="aggregate analytics from a cascade JSON document")
    p.add_argument("--cascade", required=True)
    p.add_argument("--out-dir", dest="out_dir", default="out")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("pipeline", help="run every step from archives to artifacts")
    _add_claim_options(p)
    _add_query_options(p)
    p.add_argument("--posts", help="posts JSONL archive")
    p.add_argument("--users", help="users JSONL archive")
    p.add_argument("--classifier", help="'baseline' or 'remote:<url>'")
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--out-dir", dest="out_dir", default=None)
    p.set_defaults(func=_cmd_pipeline)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"distrack: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, args.log_level),
        format="%(levelname)s %(name)s %(message)s",
    )
    try:
        return args.func(args)
    except RemoteError as exc:
        log.error("%s: %s: %s", args.command, type(exc).__name__, exc)
        return EXIT_REMOTE
    except (InputError, FileNotFoundError) as exc:
        log.error("%s: %s: %s", args.command, type(exc).__name__, exc)
        return EXIT_INPUT
    except DistrackError as exc:
        log.error("%s: %s: %s", args.command, type(exc).__name__, exc)
        return EXIT_INPUT


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
