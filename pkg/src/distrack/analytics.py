"""Quantitative views over a cascade: label proportions, engagement and
follower histograms, and a ranking of the most active accounts.

"Interactions" for an account is defined here as the sum of retweets,
replies, and quotes received across that account's original posts in the
cascade; the platform does not publish an official aggregate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Literal

from .cascade import CascadeGraph, VertexRecord

ENGAGEMENT_BUCKETS = ("0", "1-10", "11-100", ">100")
FOLLOWER_BUCKETS = ("0-100", "101-1000", "1001-10000", ">10000", "unknown")

Population = Literal["originals", "all"]


@dataclass(frozen=True, slots=True)
class AccountRow:
    author_id: str
    followers: int
    interactions: int
    max_retweets: int
    max_likes: int
    num_posts: int


@dataclass(frozen=True, slots=True)
class ReportBundle:
    totals: dict[str, int]
    proportions: dict[str, float]
    retweet_hist: dict[str, int]
    like_hist: dict[str, int]
    follower_hist: dict[str, int]
    top_accounts: tuple[AccountRow, ...]
    empty: bool

    def to_json_dict(self) -> dict:
        return {
            "totals": dict(self.totals),
            "proportions": dict(self.proportions),
            "retweet_hist": dict(self.retweet_hist),
            "like_hist": dict(self.like_hist),
            "follower_hist": dict(self.follower_hist),
            "top_accounts": [
                {
                    "author_id": row.author_id,
                    "followers": row.followers,
                    "interactions": row.interactions,
                    "max_retweets": row.max_retweets,
                    "max_likes": row.max_likes,
                    "num_posts": row.num_posts,
                }
                for row in self.top_accounts
            ],
            "empty": self.empty,
        }

    def to_json_bytes(self) -> bytes:
        return (json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n").encode("utf-8")


def _population(graph: CascadeGraph, population: Population) -> list[VertexRecord]:
    vertices = graph.vertices.values()
    if population == "originals":
        return [v for v in vertices if not v.is_repost]
    return list(vertices)


def alignment_proportions(graph: CascadeGraph, population: Population = "all") -> dict[str, float]:
    """Fraction of each observed label over the chosen population."""
    members = _population(graph, population)
    if not members:
        return {}
    counts: dict[str, int] = {}
    for vertex in members:
        label = vertex.alignment.label.value
        counts[label] = counts.get(label, 0) + 1
    return {label: counts[label] / len(members) for label in sorted(counts)}


def _engagement_bucket(count: int) -> str:
    if count == 0:
        return "0"
    if count <= 10:
        return "1-10"
    if count <= 100:
        return "11-100"
    return ">100"


def engagement_histogram(
    graph: CascadeGraph,
    metric: Literal["retweets", "likes"],
    population: Population = "originals",
) -> dict[str, int]:
    """Posts bucketed by retweet or like count; every bucket always present."""
    hist = {bucket: 0 for bucket in ENGAGEMENT_BUCKETS}
    for vertex in _population(graph, population):
        count = vertex.post.retweet_count if metric == "retweets" else vertex.post.like_count
        hist[_engagement_bucket(count)] += 1
    return hist


def _follower_bucket(followers: int) -> str:
    if followers <= 100:
        return "0-100"
    if followers <= 1000:
        return "101-1000"
    if followers <= 10000:
        return "1001-10000"
    return ">10000"


def follower_histogram(graph: CascadeGraph) -> dict[str, int]:
    """Distinct authors of original posts bucketed by follower count.

    Authors without collected metadata land in an explicit ``unknown``
    bucket instead of being silently dropped.
    """
    hist = {bucket: 0 for bucket in FOLLOWER_BUCKETS}
    seen: set[str] = set()
    for vertex in _population(graph, "originals"):
        author_id = vertex.post.author_id
        if author_id in seen:
            continue
        seen.add(author_id)
        if vertex.author is None:
            hist["unknown"] += 1
        else:
            hist[_follower_bucket(vertex.author.followers_count)] += 1
    return hist


def top_accounts(
    graph: CascadeGraph,
    k: int = 10,
    sort_key: Literal["followers", "interactions"] = "followers",
) -> tuple[AccountRow, ...]:
    """Per-author aggregates over original posts, most-followed first.

    Authors lacking metadata rank with zero followers rather than
    disappearing from the table.
    """
    aggregates: dict[str, dict[str, int]] = {}
    followers: dict[str, int] = {}
    for vertex in _population(graph, "originals"):
        post = vertex.post
        agg = aggregates.setdefault(
            post.author_id,
            {"interactions": 0, "max_retweets": 0, "max_likes": 0, "num_posts": 0},
        )
        agg["interactions"] += post.retweet_count + post.reply_count + post.quote_count
        agg["max_retweets"] = max(agg["max_retweets"], post.retweet_count)
        agg["max_likes"] = max(agg["max_likes"], post.like_count)
        agg["num_posts"] += 1
        if vertex.author is not None:
            followers[post.author_id] = vertex.author.followers_count
    rows = [
        AccountRow(
            author_id=author_id,
            followers=followers.get(author_id, 0),
            interactions=agg["interactions"],
            max_retweets=agg["max_retweets"],
            max_likes=agg["max_likes"],
            num_posts=agg["num_posts"],
        )
        for author_id, agg in aggregates.items()
    ]
    if sort_key == "interactions":
        rows.sort(key=lambda row: (-row.interactions, row.author_id))
    else:
        rows.sort(key=lambda row: (-row.followers, row.author_id))
    return tuple(rows[:k])


def build_report(graph: CascadeGraph, k: int = 10) -> ReportBundle:
    """The standard bundle: proportions over all posts, engagement over
    originals, followers over distinct original authors."""
    vertices = list(graph.vertices.values())
    originals = [v for v in vertices if not v.is_repost]
    return ReportBundle(
        totals={
            "posts": len(vertices),
            "originals": len(originals),
            "reposts": len(vertices) - len(originals),
        },
        proportions=alignment_proportions(graph, "all"),
        retweet_hist=engagement_histogram(graph, "retweets", "originals"),
        like_hist=engagement_histogram(graph, "likes", "originals"),
        follower_hist=follower_histogram(graph),
        top_accounts=top_accounts(graph, k),
        empty=not vertices,
    )


def render_markdown(bundle: ReportBundle) -> str:
    """Human-readable companion to the JSON bundle."""
    lines = ["# Cascade report", ""]
    totals = bundle.totals
    lines.append(
        f"{totals['posts']} posts ({totals['originals']} originals, "
        f"{totals['reposts']} reposts)."
    )
    lines.append("")
    lines.append("## Alignment proportions (all posts)")
    lines.append("")
    lines.append("| label | fraction |")
    lines.append("| --- | --- |")
    for label, fraction in bundle.proportions.items():
        lines.append(f"| {label} | {fraction:.4f} |")
    for title, hist in (
        ("Retweets per original post", bundle.retweet_hist),
        ("Likes per original post", bundle.like_hist),
        ("Followers per original author", bundle.follower_hist),
    ):
        lines.append("")
        lines.append(f"## {title}")
        lines.append("")
        lines.append("| bucket | count |")
        lines.append("| --- | --- |")
        for bucket, count in hist.items():
            lines.append(f"| {bucket} | {count} |")
    lines.append("")
    lines.append("## Most active accounts")
    lines.append("")
    lines.append("| author | followers | interactions | max retweets | max likes | posts |")
    lines.append("| --- | --- | --- | --- | --- | --- |")
    for row in bundle.top_accounts:
        lines.append(
            f"| {row.author_id} | {row.followers} | {row.interactions} "
            f"| {row.max_retweets} | {row.max_likes} | {row.num_posts} |"
        )
    lines.append("")
    return "\n".join(lines)
