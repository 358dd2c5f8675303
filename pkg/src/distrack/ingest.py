"""Archive reading, record hydration, and the local record store.

Archive-first by design: JSONL files mirroring the platform API are the
normal input, and the live source is a small interface with pluggable
implementations (a file-backed one ships for offline work and tests).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Literal, Protocol, Sequence

from .errors import DistrackError, InputError, InvalidWindow, NotJsonl
from .model import (
    Author,
    Claim,
    Post,
    Reference,
    RefType,
    ensure_utc,
    format_utc,
    parse_utc,
    validate_post,
)
from .querygen import QuerySpec


@dataclass(frozen=True, slots=True)
class ArchiveRecord:
    """A parsed post plus the original line it came from, kept verbatim."""

    post: Post
    raw: bytes


@dataclass(frozen=True, slots=True)
class ArchiveWarning:
    line_number: int
    message: str


@dataclass(frozen=True, slots=True)
class FetchWindow:
    since: datetime | None = None
    until: datetime | None = None
    max_results: int = 100

    def __post_init__(self):
        if self.max_results < 1:
            raise InvalidWindow("max_results must be >= 1")
        if self.since is not None:
            object.__setattr__(self, "since", ensure_utc(self.since, "since"))
        if self.until is not None:
            object.__setattr__(self, "until", ensure_utc(self.until, "until"))
        if self.since is not None and self.until is not None and self.since >= self.until:
            raise InvalidWindow("since must precede until")


def check_window(window: FetchWindow, claim: Claim) -> FetchWindow:
    """The window may not reach before the birth of the claim's topic."""
    birth = claim.topic_birth
    if birth is not None:
        if window.until is not None and window.until <= birth:
            raise InvalidWindow("window ends before the topic exists")
        if window.since is not None and window.since < birth:
            raise InvalidWindow("window starts before the topic exists")
    return window


# -- JSON (de)serialization of archive records ---------------------------------

def post_from_json(obj: dict) -> Post:
    if not isinstance(obj, dict):
        raise InputError("record is not a JSON object")
    try:
        post_id = str(obj["id"])
        created = parse_utc(str(obj["created_at"]), "created_at")
    except KeyError as exc:
        raise InputError(f"record is missing field {exc.args[0]!r}")
    metrics = obj.get("public_metrics") or {}
    refs = []
    for item in obj.get("referenced_tweets") or []:
        try:
            refs.append(Reference(RefType(item["type"]), str(item["id"])))
        except (KeyError, ValueError, TypeError) as exc:
            raise InputError(f"bad referenced_tweets entry: {item!r}") from exc
    post = Post(
        id=post_id,
        text=str(obj.get("text", "")),
        author_id=str(obj.get("author_id", "")),
        created_at=created,
        like_count=int(metrics.get("like_count", 0)),
        retweet_count=int(metrics.get("retweet_count", 0)),
        reply_count=int(metrics.get("reply_count", 0)),
        quote_count=int(metrics.get("quote_count", 0)),
        references=tuple(refs),
        language=str(obj.get("lang", "und")),
    )
    return validate_post(post)


def post_to_json(post: Post) -> dict:
    doc = {
        "id": post.id,
        "text": post.text,
        "created_at": format_utc(post.created_at),
        "author_id": post.author_id,
        "lang": post.language,
        "public_metrics": {
            "retweet_count": post.retweet_count,
            "reply_count": post.reply_count,
            "like_count": post.like_count,
            "quote_count": post.quote_count,
        },
    }
    if post.references:
        doc["referenced_tweets"] = [
            {"type": ref.ref_type.value, "id": ref.target_id} for ref in post.references
        ]
    return doc


def author_from_json(obj: dict) -> Author:
    if not isinstance(obj, dict):
        raise InputError("record is not a JSON object")
    try:
        author_id = str(obj["id"])
    except KeyError:
        raise InputError("user record is missing field 'id'")
    metrics = obj.get("public_metrics") or {}
    return Author(
        id=author_id,
        handle=str(obj.get("username", "")),
        display_name=str(obj.get("name", "")),
        followers_count=int(metrics.get("followers_count", 0)),
        verified=bool(obj.get("verified", False)),
    )


def author_to_json(author: Author) -> dict:
    return {
        "id": author.id,
        "username": author.handle,
        "name": author.display_name,
        "verified": author.verified,
        "public_metrics": {"followers_count": author.followers_count},
    }


# -- archive reading ------------------------------------------------------------

def read_archive(
    path: str | Path,
    kind: Literal["posts", "users"] = "posts",
) -> tuple[list, list[ArchiveWarning]]:
    """Read a JSONL archive; malformed lines become warnings, not failures.

    Returns (records, warnings) where records are :class:`ArchiveRecord`
    for ``kind="posts"`` and :class:`Author` for ``kind="users"``.  A file
    whose very first line is not JSON is rejected outright.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(str(path))
    records: list = []
    warnings: list[ArchiveWarning] = []
    first_data_line = True
    with path.open("rb") as handle:
        for line_number, raw in enumerate(handle, start=1):
            stripped = raw.strip()
            if not stripped:
                continue
            try:
                obj = json.loads(stripped)
            except ValueError:
                if first_data_line:
                    raise NotJsonl(f"{path}: first line is not JSON")
                warnings.append(ArchiveWarning(line_number, "line is not valid JSON"))
                continue
            first_data_line = False
            try:
                if kind == "posts":
                    records.append(ArchiveRecord(post_from_json(obj), bytes(stripped)))
                else:
                    records.append(author_from_json(obj))
            except DistrackError as exc:
                warnings.append(ArchiveWarning(line_number, str(exc)))
    return records, warnings


# -- record store -----------------------------------------------------------------

@dataclass(slots=True)
class HydrationReport:
    inserted_posts: int = 0
    inserted_authors: int = 0
    duplicates: list[str] = field(default_factory=list)
    missing: set[str] = field(default_factory=set)


class RecordStore:
    """In-memory index of posts and authors with first-write-wins semantics.

    Re-ingesting the same record is a no-op, so rebuilding a store from
    the same archives is deterministic regardless of how often they are
    fed in.
    """

    def __init__(self):
        self.posts: dict[str, Post] = {}
        self.authors: dict[str, Author] = {}
        self.ingest_log: list[tuple[str, datetime, int]] = []

    def add_post(self, post: Post) -> bool:
        validate_post(post)
        if post.id in self.posts:
            return False
        self.posts[post.id] = post
        return True

    def add_author(self, author: Author) -> bool:
        if author.id in self.authors:
            return False
        self.authors[author.id] = author
        return True

    def save(self, directory: str | Path) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        with (directory / "posts.jsonl").open("w", encoding="utf-8") as handle:
            for post in self.posts.values():
                handle.write(json.dumps(post_to_json(post), sort_keys=True) + "\n")
        with (directory / "users.jsonl").open("w", encoding="utf-8") as handle:
            for author in self.authors.values():
                handle.write(json.dumps(author_to_json(author), sort_keys=True) + "\n")

    @classmethod
    def load(cls, directory: str | Path) -> "RecordStore":
        directory = Path(directory)
        store = cls()
        posts, _ = read_archive(directory / "posts.jsonl", "posts")
        users, _ = read_archive(directory / "users.jsonl", "users")
        hydrate(store, [r.post for r in posts], users, source=str(directory))
        return store


def hydrate(
    store: RecordStore,
    posts: Sequence[Post],
    authors: Sequence[Author] = (),
    source: str = "archive",
) -> HydrationReport:
    """Insert posts and authors; report duplicates and dangling references.

    Absence of a referenced post is data (an orphan candidate), never a
    failure.
    """
    report = HydrationReport()
    for author in authors:
        if store.add_author(author):
            report.inserted_authors += 1
    for post in posts:
        if store.add_post(post):
            report.inserted_posts += 1
        else:
            report.duplicates.append(post.id)
    for post in store.posts.values():
        for ref in post.references:
            if ref.target_id not in store.posts:
                report.missing.add(ref.target_id)
    store.ingest_log.append((source, datetime.now(timezone.utc), report.inserted_posts))
    return report


# -- live source -------------------------------------------------------------------

class LiveSource(Protocol):
    """A paginated post source (an API client or a file-backed stand-in)."""

    def fetch_page(
        self, query: QuerySpec, cursor: str | None
    ) -> tuple[list[ArchiveRecord], str | None]: ...


def fetch_window(source: LiveSource, query: QuerySpec) -> list[ArchiveRecord]:
    """Drain ``source`` page by page until exhaustion or the result cap.

    Records come back earliest-first regardless of page order; the source
    is trusted to honor the query expression and window.
    """
    collected: list[ArchiveRecord] = []
    cursor: str | None = None
    while True:
        page, cursor = source.fetch_page(query, cursor)
        collected.extend(page)
        if cursor is None or len(collected) >= query.max_results:
            break
    collected.sort(key=lambda record: (record.post.created_at, record.post.id))
    return collected[: query.max_results]


class ArchiveSource:
    """A LiveSource over a JSONL archive; filters by the query window."""

    def __init__(self, path: str | Path, page_size: int = 100):
        records, _ = read_archive(path, "posts")
        self._records = sorted(records, key=lambda r: (r.post.created_at, r.post.id))
        self.page_size = page_size

    def fetch_page(
        self, query: QuerySpec, cursor: str | None
    ) -> tuple[list[ArchiveRecord], str | None]:
        matching = [
            record
            for record in self._records
            if (query.start_time is None or record.post.created_at >= query.start_time)
            and (query.end_time is None or record.post.created_at < query.end_time)
        ]
        start = int(cursor) if cursor else 0
        page = matching[start : start + self.page_size]
        next_cursor = str(start + self.page_size) if start + self.page_size < len(matching) else None
        return page, next_cursor
