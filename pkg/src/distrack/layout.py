"""Resolved visual geometry for a cascade graph.

The x-axis is chronological *rank*, not wall-clock time: bursts and
silences both get even spacing, with real dates re-anchored through
periodic annotations.  The y-axis is log10 of the author's follower
count, and vertex area grows linearly with likes up to a clamp.
"""

from __future__ import annotations

import bisect
import math
import re
from dataclasses import dataclass, field
from datetime import timedelta
from typing import Sequence

from .cascade import CascadeGraph, VertexRecord, chronological_order
from .errors import EmptyGraph, InputError
from .model import AlignmentLabel, Author, Post

_HEX_COLOR = re.compile(r"#[0-9a-fA-F]{6}\Z")


@dataclass(frozen=True, slots=True)
class StyleConfig:
    color_entailment: str = "#ff7f0e"
    color_contradiction: str = "#1f77b4"
    color_neutral: str = "#7f7f7f"
    r_base: float = 4.0
    r_max: float = 24.0
    likes_ref: float = 10.0
    x_unit: float = 10.0
    annotation_interval_days: int = 100

    def __post_init__(self):
        for name in ("color_entailment", "color_contradiction", "color_neutral"):
            if not _HEX_COLOR.fullmatch(getattr(self, name)):
                raise InputError(f"{name} must be a 6-digit hex color")
        if not 0 < self.r_base < self.r_max:
            raise InputError("0 < r_base < r_max required")
        if self.likes_ref <= 0 or self.x_unit <= 0 or self.annotation_interval_days <= 0:
            raise InputError("likes_ref, x_unit, annotation_interval_days must be positive")

    def palette(self) -> dict[str, str]:
        return {
            AlignmentLabel.ENTAILMENT.value: self.color_entailment,
            AlignmentLabel.CONTRADICTION.value: self.color_contradiction,
            AlignmentLabel.NEUTRAL.value: self.color_neutral,
        }


@dataclass(frozen=True, slots=True)
class LayoutModel:
    positions: dict[str, tuple[float, float]]
    radii: dict[str, float]
    colors: dict[str, str]
    shapes: dict[str, str]  # "circle" | "rhombus"
    x_annotations: tuple[tuple[float, str], ...]
    palette: dict[str, str] = field(default_factory=lambda: StyleConfig().palette())
    y_axis: str = "log10_followers"
    unknown_influence: frozenset[str] = field(default_factory=frozenset)


def x_positions(order: Sequence[str], cfg: StyleConfig = StyleConfig()) -> dict[str, float]:
    """Rank spacing: the i-th post in chronological order sits at i * x_unit."""
    return {post_id: i * cfg.x_unit for i, post_id in enumerate(order)}


def y_position(author: Author | None) -> float:
    """log10 of the follower count, clamped at zero; unknown authors sit at 0."""
    if author is None:
        return 0.0
    return math.log10(max(author.followers_count, 1))


def vertex_style(vertex: VertexRecord, cfg: StyleConfig = StyleConfig()) -> tuple[float, str, str]:
    """(radius, color, shape) for one vertex.

    Radius follows sqrt(1 + likes / likes_ref) so the *area* grows
    linearly with likes, clamped at r_max.
    """
    radius = min(cfg.r_max, cfg.r_base * math.sqrt(1.0 + vertex.post.like_count / cfg.likes_ref))
    color = cfg.palette()[vertex.alignment.label.value]
    shape = "rhombus" if vertex.is_repost else "circle"
    return radius, color, shape


def x_annotations(
    posts_in_order: Sequence[Post],
    cfg: StyleConfig = StyleConfig(),
) -> tuple[tuple[float, str], ...]:
    """Date ticks: the first post, then the first post at or past every
    n-th interval boundary after it.  When several boundaries land on the
    same post only one annotation is emitted.
    """
    if not posts_in_order:
        raise EmptyGraph("cannot annotate an empty timeline")
    times = [post.created_at for post in posts_in_order]
    t0, last = times[0], times[-1]
    interval = timedelta(days=cfg.annotation_interval_days)
    annotated: dict[int, None] = {0: None}
    n = 1
    while t0 + n * interval <= last:
        annotated[bisect.bisect_left(times, t0 + n * interval)] = None
        n += 1
    return tuple(
        (index * cfg.x_unit, posts_in_order[index].created_at.date().isoformat())
        for index in sorted(annotated)
    )


def build_layout(graph: CascadeGraph, cfg: StyleConfig = StyleConfig()) -> LayoutModel:
    """Resolve every visual property for every vertex of the graph."""
    order = chronological_order(graph)
    xs = x_positions(order, cfg)
    positions: dict[str, tuple[float, float]] = {}
    radii: dict[str, float] = {}
    colors: dict[str, str] = {}
    shapes: dict[str, str] = {}
    unknown: set[str] = set()
    for post_id in order:
        vertex = graph.vertices[post_id]
        positions[post_id] = (xs[post_id], y_position(vertex.author))
        radius, color, shape = vertex_style(vertex, cfg)
        radii[post_id] = radius
        colors[post_id] = color
        shapes[post_id] = shape
        if vertex.author is None:
            unknown.add(post_id)
    annotations = (
        x_annotations([graph.vertices[post_id].post for post_id in order], cfg)
        if order
        else ()
    )
    return LayoutModel(
        positions=positions,
        radii=radii,
        colors=colors,
        shapes=shapes,
        x_annotations=annotations,
        palette=cfg.palette(),
        unknown_influence=frozenset(unknown),
    )
