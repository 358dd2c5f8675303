"""Shared domain types: claims, posts, authors, and alignment results.

All types are immutable after construction and safe to share across
threads.  Timestamps are normalized to UTC at parse time so that every
comparison in the pipeline is a plain instant comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from typing import Mapping

from .errors import (
    DuplicateReferenceType,
    InvalidClaim,
    InvalidResult,
    InvalidTimestamp,
    NegativeCount,
)


class ClaimStatus(str, Enum):
    VERIFIED_FALSE = "verified_false"
    UNDETERMINED = "undetermined"


class RefType(str, Enum):
    RETWEETED = "retweeted"
    QUOTED = "quoted"
    REPLIED_TO = "replied_to"


class AlignmentLabel(str, Enum):
    ENTAILMENT = "entailment"
    CONTRADICTION = "contradiction"
    NEUTRAL = "neutral"


LABELS: tuple[AlignmentLabel, ...] = (
    AlignmentLabel.ENTAILMENT,
    AlignmentLabel.CONTRADICTION,
    AlignmentLabel.NEUTRAL,
)


class ResultSource(str, Enum):
    BASELINE = "baseline"
    REMOTE = "remote"
    INHERITED = "inherited"


def ensure_utc(value: datetime, name: str = "timestamp") -> datetime:
    """Return ``value`` converted to UTC; reject naive datetimes."""
    if value.tzinfo is None or value.utcoffset() is None:
        raise InvalidTimestamp(f"{name} must be timezone-aware")
    return value.astimezone(timezone.utc)


def parse_utc(text: str, name: str = "timestamp") -> datetime:
    """Parse an ISO-8601 instant (``2022-09-19T10:00:00Z``) into UTC."""
    try:
        value = datetime.fromisoformat(text.replace("Z", "+00:00"))
    except (ValueError, AttributeError, TypeError) as exc:
        raise InvalidTimestamp(f"{name}: cannot parse {text!r}") from exc
    return ensure_utc(value, name)


def format_utc(value: datetime) -> str:
    """Canonical ISO-8601 form with a ``Z`` suffix."""
    return ensure_utc(value).isoformat().replace("+00:00", "Z")


@dataclass(frozen=True, slots=True)
class Claim:
    """The debunked statement being tracked (the hypothesis of NLI pairs)."""

    id: str
    text: str
    language: str = "en"
    status: ClaimStatus = ClaimStatus.VERIFIED_FALSE
    debunk_url: str | None = None
    topic_birth: datetime | None = None

    def __post_init__(self):
        if not self.text.strip():
            raise InvalidClaim("claim text is empty")
        if self.topic_birth is not None:
            object.__setattr__(self, "topic_birth", ensure_utc(self.topic_birth, "topic_birth"))


@dataclass(frozen=True, slots=True)
class Reference:
    ref_type: RefType
    target_id: str


@dataclass(frozen=True, slots=True)
class Post:
    """One post with its engagement metrics and outgoing references.

    Construction performs no validation so that malformed records can be
    represented; use :func:`validate_post` before trusting an instance.
    """

    id: str
    text: str
    author_id: str
    created_at: datetime
    like_count: int = 0
    retweet_count: int = 0
    reply_count: int = 0
    quote_count: int = 0
    references: tuple[Reference, ...] = ()
    language: str = "und"


_COUNT_FIELDS = ("like_count", "retweet_count", "reply_count", "quote_count")


def validate_post(post: Post) -> Post:
    """Return ``post`` unchanged iff all of its invariants hold.

    Raises the error naming the offending field otherwise.
    """
    if post.created_at.tzinfo is None or post.created_at.utcoffset() is None:
        raise InvalidTimestamp(f"post {post.id!r}: created_at must be timezone-aware")
    for name in _COUNT_FIELDS:
        if getattr(post, name) < 0:
            raise NegativeCount(f"post {post.id!r}: {name} is negative")
    seen: set[RefType] = set()
    for ref in post.references:
        if ref.ref_type in seen:
            raise DuplicateReferenceType(
                f"post {post.id!r}: more than one {ref.ref_type.value!r} reference"
            )
        seen.add(ref.ref_type)
    return post


@dataclass(frozen=True, slots=True)
class Author:
    """Author metadata as observed at collection time."""

    id: str
    handle: str
    display_name: str = ""
    followers_count: int = 0
    verified: bool = False

    def __post_init__(self):
        if self.followers_count < 0:
            raise NegativeCount(f"author {self.id!r}: followers_count is negative")


@dataclass(frozen=True, slots=True)
class AlignmentResult:
    """Label, score distribution, and filter similarity for one post."""

    post_id: str
    label: AlignmentLabel
    scores: Mapping[str, float]
    similarity: float
    source: ResultSource

    def __post_init__(self):
        keys = set(self.scores)
        if keys != {lbl.value for lbl in LABELS}:
            raise InvalidResult(f"scores must cover exactly the labels, got {sorted(keys)}")
        total = 0.0
        for key, value in self.scores.items():
            if not 0.0 <= value <= 1.0 + 1e-9:
                raise InvalidResult(f"score {key}={value} outside [0, 1]")
            total += value
        if abs(total - 1.0) > 1e-6:
            raise InvalidResult(f"scores sum to {total}, not 1")
        best = max(self.scores.values())
        if self.scores[self.label.value] < best - 1e-12:
            raise InvalidResult(f"label {self.label.value} is not the argmax of scores")
        if not -1.0 <= self.similarity <= 1.0:
            raise InvalidResult(f"similarity {self.similarity} outside [-1, 1]")
        object.__setattr__(self, "scores", dict(self.scores))
