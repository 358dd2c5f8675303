"""Directed propagation graph over hydrated posts.

Vertices are posts; edges point from a child post to the parent it
retweets, quotes, or replies to.  Parents referenced but absent from the
collected data are recorded as orphans, and anomalies narrated by real
cascades (deleted viral sources, serial self-retweeters, clock
inversions) are surfaced rather than silently repaired.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import MissingAlignment
from .ingest import RecordStore
from .model import AlignmentResult, Author, Claim, Post, RefType


@dataclass(frozen=True, slots=True)
class Edge:
    child_id: str
    parent_id: str
    ref_type: RefType


@dataclass(frozen=True, slots=True)
class VertexRecord:
    post: Post
    author: Author | None
    alignment: AlignmentResult
    is_repost: bool


@dataclass(frozen=True, slots=True)
class CascadeGraph:
    vertices: dict[str, VertexRecord]
    edges: tuple[Edge, ...]
    orphans: frozenset[str]
    claim: Claim

    def __len__(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True, slots=True)
class SelfRepost:
    author_id: str
    post_id: str
    count: int


@dataclass(frozen=True, slots=True)
class OrphanedViral:
    post_id: str
    repost_count: int


@dataclass(frozen=True, slots=True)
class AnomalyReport:
    orphaned_viral: tuple[OrphanedViral, ...] = ()
    self_reposts: tuple[SelfRepost, ...] = ()
    time_inversions: tuple[Edge, ...] = ()


def _sort_key(post: Post) -> tuple:
    return (post.created_at, post.id)


def is_repost(post: Post) -> bool:
    return len(post.references) == 1 and post.references[0].ref_type is RefType.RETWEETED


def build_graph(
    store: RecordStore,
    alignments: Mapping[str, AlignmentResult],
    claim: Claim,
) -> CascadeGraph:
    """One vertex per stored post, one edge per resolvable reference.

    Deterministic: vertices are laid down in chronological order and the
    edge sequence follows it.  Every post must carry an alignment.
    """
    ordered = sorted(store.posts.values(), key=_sort_key)
    vertices: dict[str, VertexRecord] = {}
    edges: list[Edge] = []
    orphans: set[str] = set()
    for post in ordered:
        alignment = alignments.get(post.id)
        if alignment is None:
            raise MissingAlignment(post.id)
        vertices[post.id] = VertexRecord(
            post=post,
            author=store.authors.get(post.author_id),
            alignment=alignment,
            is_repost=is_repost(post),
        )
    for post in ordered:
        for ref in post.references:
            if ref.target_id in store.posts:
                edges.append(Edge(post.id, ref.target_id, ref.ref_type))
            else:
                orphans.add(ref.target_id)
    return CascadeGraph(vertices, tuple(edges), frozenset(orphans), claim)


def chronological_order(graph: CascadeGraph) -> list[str]:
    """Total order by (created_at, post_id); stable across runs."""
    return [v.post.id for v in sorted(graph.vertices.values(), key=lambda v: _sort_key(v.post))]


def detect_self_reposts(graph: CascadeGraph, min_count: int = 2) -> tuple[SelfRepost, ...]:
    """Authors repeatedly resharing the same target post."""
    counts: dict[tuple[str, str], int] = {}
    for vertex in graph.vertices.values():
        if not vertex.is_repost:
            continue
        target = vertex.post.references[0].target_id
        key = (vertex.post.author_id, target)
        counts[key] = counts.get(key, 0) + 1
    rows = [
        SelfRepost(author_id, post_id, count)
        for (author_id, post_id), count in counts.items()
        if count >= min_count
    ]
    rows.sort(key=lambda row: (-row.count, row.author_id, row.post_id))
    return tuple(rows)


def detect_orphaned_viral(graph: CascadeGraph, min_reposts: int = 1) -> tuple[OrphanedViral, ...]:
    """Orphan parents ranked by how many collected reposts point at them."""
    counts = {orphan: 0 for orphan in graph.orphans}
    for vertex in graph.vertices.values():
        for ref in vertex.post.references:
            if ref.ref_type is RefType.RETWEETED and ref.target_id in counts:
                counts[ref.target_id] += 1
    rows = [
        OrphanedViral(post_id, count)
        for post_id, count in counts.items()
        if count >= min_reposts
    ]
    rows.sort(key=lambda row: (-row.repost_count, row.post_id))
    return tuple(rows)


def detect_time_inversions(graph: CascadeGraph) -> tuple[Edge, ...]:
    """Edges whose parent sorts after its child (API clock anomalies).

    The order is strict on (created_at, id), which is what makes an
    inversion-free graph acyclic.
    """
    inverted = []
    for edge in graph.edges:
        parent = graph.vertices[edge.parent_id].post
        child = graph.vertices[edge.child_id].post
        if _sort_key(parent) > _sort_key(child):
            inverted.append(edge)
    return tuple(inverted)


def anomaly_report(
    graph: CascadeGraph,
    min_self_reposts: int = 2,
    min_orphan_reposts: int = 1,
) -> AnomalyReport:
    return AnomalyReport(
        orphaned_viral=detect_orphaned_viral(graph, min_orphan_reposts),
        self_reposts=detect_self_reposts(graph, min_self_reposts),
        time_inversions=detect_time_inversions(graph),
    )
