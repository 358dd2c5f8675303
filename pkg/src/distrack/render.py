"""Emit a laid-out cascade as SVG, DOT, or a JSON interchange document.

Rendering is a pure function of (graph, layout, options): identical
inputs give byte-identical output.  In the SVG, vertices are the only
``circle``/``polygon`` elements and edges the only ``line`` elements;
axes, ticks, and the legend use ``path``/``rect``/``text`` so that
structural element counts mirror the graph exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

from .cascade import (
    CascadeGraph,
    Edge,
    VertexRecord,
    anomaly_report,
    chronological_order,
)
from .errors import InputError, LayoutIncomplete
from .layout import LayoutModel, StyleConfig
from .model import (
    AlignmentLabel,
    AlignmentResult,
    Author,
    Claim,
    ClaimStatus,
    Post,
    Reference,
    RefType,
    ResultSource,
    format_utc,
    parse_utc,
)

FORMATS = ("svg", "dot", "json")


@dataclass(frozen=True, slots=True)
class RenderOptions:
    format: str = "svg"
    width: int = 1600
    height: int = 900
    include_edges: bool = True
    legend: bool = True

    def __post_init__(self):
        if self.format not in FORMATS:
            raise InputError(f"unknown format {self.format!r}")
        if self.format == "svg" and (self.width < 100 or self.height < 100):
            raise InputError("svg canvas must be at least 100x100")


def _check_layout(graph: CascadeGraph, layout: LayoutModel) -> None:
    for post_id in graph.vertices:
        if (
            post_id not in layout.positions
            or post_id not in layout.radii
            or post_id not in layout.colors
            or post_id not in layout.shapes
        ):
            raise LayoutIncomplete(post_id)


def _fmt(value: float) -> str:
    return f"{value:.2f}"


# -- SVG ------------------------------------------------------------------------

_MARGIN_LEFT = 70.0
_MARGIN_RIGHT = 40.0
_MARGIN_TOP = 40.0
_MARGIN_BOTTOM = 60.0


class _Viewport:
    """Single affine map from layout space into screen space (y inverted)."""

    def __init__(self, layout: LayoutModel, width: int, height: int):
        xs = [p[0] for p in layout.positions.values()]
        ys = [p[1] for p in layout.positions.values()]
        self.x0 = 0.0
        self.y0 = 0.0
        x_span = max(max(xs, default=0.0), 1e-9)
        y_span = max(max(ys, default=0.0), 1.0)
        self.sx = (width - _MARGIN_LEFT - _MARGIN_RIGHT) / x_span
        self.sy = (height - _MARGIN_TOP - _MARGIN_BOTTOM) / y_span
        self.height = height
        self.y_span = y_span

    def x(self, value: float) -> float:
        return _MARGIN_LEFT + self.sx * (value - self.x0)

    def y(self, value: float) -> float:
        return self.height - _MARGIN_BOTTOM - self.sy * (value - self.y0)


def _vertex_title(vertex: VertexRecord) -> str:
    post = vertex.post
    return (
        f"{post.id} | {format_utc(post.created_at)} | {vertex.alignment.label.value}"
        f" | likes={post.like_count} retweets={post.retweet_count}"
        f" replies={post.reply_count} quotes={post.quote_count}"
    )


def render_svg(graph: CascadeGraph, layout: LayoutModel, opts: RenderOptions = RenderOptions()) -> bytes:
    """Figure-grade SVG; also an inspection artifact via per-vertex tooltips."""
    _check_layout(graph, layout)
    view = _Viewport(layout, opts.width, opts.height)
    order = chronological_order(graph)
    parts: list[str] = []
    parts.append('<?xml version="1.0" encoding="UTF-8"?>')
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{opts.width}" height="{opts.height}"'
        f' viewBox="0 0 {opts.width} {opts.height}">'
    )
    parts.append(f'<rect width="{opts.width}" height="{opts.height}" fill="#ffffff"/>')

    axis_y = opts.height - _MARGIN_BOTTOM
    parts.append('<g stroke="#222222" stroke-width="1">')
    parts.append(
        f'<path d="M {_fmt(_MARGIN_LEFT)} {_fmt(axis_y)} H {_fmt(opts.width - _MARGIN_RIGHT)}"/>'
    )
    parts.append(
        f'<path d="M {_fmt(_MARGIN_LEFT)} {_fmt(axis_y)} V {_fmt(_MARGIN_TOP)}"/>'
    )
    parts.append("</g>")

    # y ticks at whole log10 units
    parts.append('<g font-family="sans-serif" font-size="11" fill="#222222">')
    for power in range(0, int(math.ceil(view.y_span)) + 1):
        ty = view.y(float(power))
        parts.append(
            f'<path d="M {_fmt(_MARGIN_LEFT - 5)} {_fmt(ty)} H {_fmt(_MARGIN_LEFT)}"'
            ' stroke="#222222" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(_MARGIN_LEFT - 8)}" y="{_fmt(ty + 4)}" text-anchor="end">'
            f"10^{power}</text>"
        )
    parts.append(
        f'<text x="{_fmt(14.0)}" y="{_fmt(_MARGIN_TOP - 10)}">followers (log10)</text>'
    )
    for ann_x, label in layout.x_annotations:
        tx = view.x(ann_x)
        parts.append(
            f'<path d="M {_fmt(tx)} {_fmt(axis_y)} V {_fmt(axis_y + 6)}"'
            ' stroke="#222222" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(tx)}" y="{_fmt(axis_y + 20)}" text-anchor="middle">'
            f"{escape(label)}</text>"
        )
    parts.append("</g>")

    if opts.include_edges:
        parts.append('<g stroke="#999999" stroke-width="0.6" stroke-opacity="0.6">')
        for edge in graph.edges:
            cx, cy = layout.positions[edge.child_id]
            px, py = layout.positions[edge.parent_id]
            parts.append(
                f'<line x1="{_fmt(view.x(cx))}" y1="{_fmt(view.y(cy))}"'
                f' x2="{_fmt(view.x(px))}" y2="{_fmt(view.y(py))}"/>'
            )
        parts.append("</g>")

    parts.append('<g stroke="#333333" stroke-width="0.4" fill-opacity="0.85">')
    for post_id in order:
        vertex = graph.vertices[post_id]
        x, y = layout.positions[post_id]
        sx, sy = view.x(x), view.y(y)
        r = layout.radii[post_id]
        color = layout.colors[post_id]
        title = f"<title>{escape(_vertex_title(vertex))}</title>"
        if layout.shapes[post_id] == "rhombus":
            points = (
                f"{_fmt(sx)},{_fmt(sy - r)} {_fmt(sx + r)},{_fmt(sy)} "
                f"{_fmt(sx)},{_fmt(sy + r)} {_fmt(sx - r)},{_fmt(sy)}"
            )
            parts.append(f'<polygon points="{points}" fill="{color}">{title}</polygon>')
        else:
            parts.append(
                f'<circle cx="{_fmt(sx)}" cy="{_fmt(sy)}" r="{_fmt(r)}"'
                f' fill="{color}">{title}</circle>'
            )
    parts.append("</g>")

    if opts.legend:
        lx = opts.width - _MARGIN_RIGHT - 190.0
        ly = _MARGIN_TOP
        parts.append('<g font-family="sans-serif" font-size="12" fill="#222222">')
        palette = [(lbl.value, layout.palette[lbl.value]) for lbl in AlignmentLabel]
        for i, (name, color) in enumerate(palette):
            sy_ = ly + 18.0 * i
            parts.append(
                f'<rect x="{_fmt(lx)}" y="{_fmt(sy_)}" width="12" height="12" fill="{color}"/>'
            )
            parts.append(f'<text x="{_fmt(lx + 18)}" y="{_fmt(sy_ + 10)}">{name}</text>')
        parts.append(
            f'<text x="{_fmt(lx)}" y="{_fmt(ly + 18.0 * 3 + 12)}">circle=post, rhombus=repost</text>'
        )
        parts.append("</g>")

    parts.append(f"<desc>{escape(graph.claim.text)}</desc>")
    parts.append("</svg>")
    return ("\n".join(parts) + "\n").encode("utf-8")


# -- DOT ---------------------------------------------------------------------------

def render_dot(graph: CascadeGraph, layout: LayoutModel, opts: RenderOptions = RenderOptions("dot")) -> bytes:
    _check_layout(graph, layout)
    order = chronological_order(graph)
    lines = ["digraph cascade {"]
    lines.append('  graph [rankdir=LR, outputorder=edgesfirst];')
    lines.append('  node [style=filled, fontsize=8];')
    for post_id in order:
        x, y = layout.positions[post_id]
        shape = "diamond" if layout.shapes[post_id] == "rhombus" else "ellipse"
        size = _fmt(2.0 * layout.radii[post_id] / 72.0)
        lines.append(
            f'  "{post_id}" [pos="{_fmt(x)},{_fmt(y)}!", fillcolor="{layout.colors[post_id]}",'
            f' shape={shape}, width={size}, height={size}, label="{post_id}"];'
        )
    for edge in graph.edges:
        lines.append(f'  "{edge.child_id}" -> "{edge.parent_id}" [label="{edge.ref_type.value}"];')
    lines.append("}")
    return ("\n".join(lines) + "\n").encode("utf-8")


# -- JSON export / import --------------------------------------------------------------

def _claim_to_json(claim: Claim) -> dict:
    return {
        "id": claim.id,
        "text": claim.text,
        "language": claim.language,
        "status": claim.status.value,
        "debunk_url": claim.debunk_url,
        "topic_birth": format_utc(claim.topic_birth) if claim.topic_birth else None,
    }


def _claim_from_json(doc: dict) -> Claim:
    return Claim(
        id=doc["id"],
        text=doc["text"],
        language=doc.get("language", "en"),
        status=ClaimStatus(doc.get("status", "verified_false")),
        debunk_url=doc.get("debunk_url"),
        topic_birth=parse_utc(doc["topic_birth"]) if doc.get("topic_birth") else None,
    )


def export_json(graph: CascadeGraph, layout: LayoutModel) -> bytes:
    """Canonical interchange document for a (graph, layout) pair.

    ``import_json`` inverts it exactly; export -> import -> export is
    byte-identical.
    """
    _check_layout(graph, layout)
    order = chronological_order(graph)
    vertices = []
    for post_id in order:
        vertex = graph.vertices[post_id]
        post = vertex.post
        x, y = layout.positions[post_id]
        author = None
        if vertex.author is not None:
            author = {
                "id": vertex.author.id,
                "handle": vertex.author.handle,
                "name": vertex.author.display_name,
                "followers": vertex.author.followers_count,
                "verified": vertex.author.verified,
            }
        vertices.append(
            {
                "id": post.id,
                "text": post.text,
                "lang": post.language,
                "created_at": format_utc(post.created_at),
                "author_id": post.author_id,
                "author": author,
                "metrics": {
                    "like_count": post.like_count,
                    "retweet_count": post.retweet_count,
                    "reply_count": post.reply_count,
                    "quote_count": post.quote_count,
                },
                "references": [
                    {"type": ref.ref_type.value, "id": ref.target_id}
                    for ref in post.references
                ],
                "alignment": {
                    "label": vertex.alignment.label.value,
                    "scores": dict(sorted(vertex.alignment.scores.items())),
                    "similarity": vertex.alignment.similarity,
                    "source": vertex.alignment.source.value,
                },
                "is_repost": vertex.is_repost,
                "position": {"x": x, "y": y},
                "style": {
                    "radius": layout.radii[post_id],
                    "color": layout.colors[post_id],
                    "shape": layout.shapes[post_id],
                },
            }
        )
    anomalies = anomaly_report(graph)
    doc = {
        "claim": _claim_to_json(graph.claim),
        "vertices": vertices,
        "edges": [
            {"child": e.child_id, "parent": e.parent_id, "type": e.ref_type.value}
            for e in graph.edges
        ],
        "orphans": sorted(graph.orphans),
        "anomalies": {
            "orphaned_viral": [
                {"post_id": row.post_id, "repost_count": row.repost_count}
                for row in anomalies.orphaned_viral
            ],
            "self_reposts": [
                {"author_id": row.author_id, "post_id": row.post_id, "count": row.count}
                for row in anomalies.self_reposts
            ],
            "time_inversions": [
                {"child": e.child_id, "parent": e.parent_id, "type": e.ref_type.value}
                for e in anomalies.time_inversions
            ],
        },
        "layout": {
            "x_annotations": [{"x": x, "label": label} for x, label in layout.x_annotations],
            "palette": dict(sorted(layout.palette.items())),
            "y_axis": layout.y_axis,
            "unknown_influence": sorted(layout.unknown_influence),
        },
    }
    return (json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8")


def import_json(data: bytes | str) -> tuple[CascadeGraph, LayoutModel]:
    """Rebuild the (graph, layout) pair from an exported document."""
    doc = json.loads(data)
    claim = _claim_from_json(doc["claim"])
    vertices: dict[str, VertexRecord] = {}
    positions: dict[str, tuple[float, float]] = {}
    radii: dict[str, float] = {}
    colors: dict[str, str] = {}
    shapes: dict[str, str] = {}
    for item in doc["vertices"]:
        refs = tuple(
            Reference(RefType(entry["type"]), entry["id"]) for entry in item["references"]
        )
        metrics = item["metrics"]
        post = Post(
            id=item["id"],
            text=item["text"],
            author_id=item["author_id"],
            created_at=parse_utc(item["created_at"]),
            like_count=metrics["like_count"],
            retweet_count=metrics["retweet_count"],
            reply_count=metrics["reply_count"],
            quote_count=metrics["quote_count"],
            references=refs,
            language=item["lang"],
        )
        author = None
        if item.get("author") is not None:
            raw = item["author"]
            author = Author(
                id=raw["id"],
                handle=raw["handle"],
                display_name=raw["name"],
                followers_count=raw["followers"],
                verified=raw["verified"],
            )
        alignment_doc = item["alignment"]
        alignment = AlignmentResult(
            post_id=post.id,
            label=AlignmentLabel(alignment_doc["label"]),
            scores=alignment_doc["scores"],
            similarity=alignment_doc["similarity"],
            source=ResultSource(alignment_doc["source"]),
        )
        vertices[post.id] = VertexRecord(post, author, alignment, item["is_repost"])
        positions[post.id] = (item["position"]["x"], item["position"]["y"])
        radii[post.id] = item["style"]["radius"]
        colors[post.id] = item["style"]["color"]
        shapes[post.id] = item["style"]["shape"]
    edges = tuple(
        Edge(entry["child"], entry["parent"], RefType(entry["type"]))
        for entry in doc["edges"]
    )
    graph = CascadeGraph(vertices, edges, frozenset(doc["orphans"]), claim)
    layout_doc = doc.get("layout", {})
    layout = LayoutModel(
        positions=positions,
        radii=radii,
        colors=colors,
        shapes=shapes,
        x_annotations=tuple(
            (entry["x"], entry["label"]) for entry in layout_doc.get("x_annotations", [])
        ),
        palette=dict(layout_doc["palette"]) if "palette" in layout_doc else StyleConfig().palette(),
        y_axis=layout_doc.get("y_axis", "log10_followers"),
        unknown_influence=frozenset(layout_doc.get("unknown_influence", [])),
    )
    return graph, layout
