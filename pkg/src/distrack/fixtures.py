"""Deterministic synthetic cascades shaped like real tracked hoaxes.

Each profile fixes the number of original posts, the total including
reshares, and the label mix; texts are built from the claim plus
paraphrase and negation templates that the bundled baseline classifier
resolves to the intended label (the generator verifies this before
emitting anything).  The expected report is aggregated from the planted
plan with independent counters, so a pipeline run over the archives can
be checked against it exactly.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path

from .align import AlignmentConfig, BaselineClassifier, HashingEmbedder, align_posts
from .ingest import author_to_json, post_to_json
from .model import Author, Claim, ClaimStatus, Post, Reference, RefType

PROFILE_NAMES = ("discredit", "antivaccine", "geopolitics")


@dataclass(frozen=True, slots=True)
class CaseProfile:
    name: str
    claim_text: str
    originals: int
    total: int
    original_labels: tuple[int, int, int]  # entailment, contradiction, neutral
    repost_labels: tuple[int, int, int]
    orphan_cluster: int        # reposts whose parent is missing from the archive
    self_reposts: int          # extra reshares of the viral post by its own author
    reply_children: int        # contradiction originals written as replies to the viral post
    unknown_authors: int       # original authors omitted from the users archive
    multi_post_authors: tuple[int, ...]  # sizes of original groups sharing one author
    span_days: int
    viral_likes: int
    like_cap: int

    def __post_init__(self):
        if sum(self.original_labels) != self.originals:
            raise ValueError(f"{self.name}: original label counts do not sum up")
        if sum(self.repost_labels) != self.total - self.originals:
            raise ValueError(f"{self.name}: repost label counts do not sum up")
        if self.orphan_cluster + self.self_reposts > self.repost_labels[0]:
            raise ValueError(f"{self.name}: planted clusters exceed entailment reposts")


PROFILES: dict[str, CaseProfile] = {
    "discredit": CaseProfile(
        name="discredit",
        claim_text=(
            "The city council secretly pays social media influencers "
            "to discredit local farmers"
        ),
        originals=32,
        total=84,
        original_labels=(18, 9, 5),
        repost_labels=(34, 14, 4),
        orphan_cluster=0,
        self_reposts=0,
        reply_children=0,
        unknown_authors=0,
        multi_post_authors=(3, 2),
        span_days=320,
        viral_likes=60,
        like_cap=60,
    ),
    "antivaccine": CaseProfile(
        name="antivaccine",
        claim_text=(
            "New flu vaccines contain tracking microchips that record "
            "patient locations"
        ),
        originals=32,
        total=128,
        original_labels=(14, 14, 4),
        repost_labels=(44, 44, 8),
        orphan_cluster=0,
        self_reposts=0,
        reply_children=0,
        unknown_authors=2,
        multi_post_authors=(3,),
        span_days=400,
        viral_likes=85,
        like_cap=85,
    ),
    "geopolitics": CaseProfile(
        name="geopolitics",
        claim_text=(
            "The government secretly sold 17 million hectares of national "
            "farmland to foreign corporations"
        ),
        originals=26,
        total=916,
        original_labels=(18, 5, 3),
        repost_labels=(715, 115, 60),
        orphan_cluster=150,
        self_reposts=3,
        reply_children=2,
        unknown_authors=0,
        multi_post_authors=(),
        span_days=420,
        viral_likes=1000,
        like_cap=90,
    ),
}

_EPOCH = datetime(2022, 6, 1, 8, 0, 0, tzinfo=timezone.utc)

_ENTAIL_PREFIXES = (
    "",
    "BREAKING: ",
    "Confirmed: ",
    "People are saying it everywhere: ",
    "Share before they delete it: ",
)
_ENTAIL_SUFFIXES = (
    "",
    " Spread the word.",
    " This is huge.",
    " Everyone must see this.",
    " #truth",
)
_CONTRA_TEMPLATES = (
    "It is false that {claim}",
    "No, {claim}. That rumor was debunked weeks ago",
    "Fact-check: {claim} is a hoax",
    "Fake story going around: {claim}",
)
_NEUTRAL_TEXTS = (
    "Sunny afternoon by the lake, perfect day for a long picnic with friends",
    "Trying a new pasta recipe tonight, the kitchen already smells amazing",
    "Match day! Our town team plays at seven, fingers crossed for a win",
    "Weekend hike photos are up, the mountain trail was stunning this year",
    "Just finished a great detective novel, happy to lend it to anybody",
)

_FOLLOWER_POOL = (40000, 12400, 8795, 3881, 1141, 1001, 1000, 999, 101, 100, 50, 1)

_LABELS = ("entailment", "contradiction", "neutral")


@dataclass(frozen=True, slots=True)
class CaseFixture:
    profile: str
    seed: int
    claim: Claim
    posts: tuple[Post, ...]
    authors: tuple[Author, ...]        # only authors present in the users archive
    posts_jsonl: bytes
    users_jsonl: bytes
    expected_report: dict
    planted_labels: dict[str, str]
    orphan_parent_id: str | None
    self_repost_author: str | None


def _instant(day: float) -> datetime:
    return _EPOCH + timedelta(seconds=int(day * 86400))


def _log_uniform(rng: random.Random, low: int, high: int) -> int:
    return int(round(10 ** rng.uniform(math.log10(low), math.log10(high))))


def _entail_text(claim_text: str, rng: random.Random) -> str:
    return rng.choice(_ENTAIL_PREFIXES) + claim_text + rng.choice(_ENTAIL_SUFFIXES)


def _contra_text(claim_text: str, rng: random.Random) -> str:
    return rng.choice(_CONTRA_TEMPLATES).format(claim=claim_text)


def generate_case_fixture(profile: str, seed: int = 7) -> CaseFixture:
    """Build the archives and the expected report for one case profile.

    Identical (profile, seed) pairs produce byte-identical archives.
    """
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}; choose from {PROFILE_NAMES}")
    spec = PROFILES[profile]
    rng = random.Random(seed)
    claim = Claim(
        id=f"{profile}-claim",
        text=spec.claim_text,
        language="en",
        status=ClaimStatus.VERIFIED_FALSE,
        topic_birth=_EPOCH - timedelta(days=30),
    )

    # -- authors ---------------------------------------------------------
    author_of_original: list[int] = []
    group_sizes = list(spec.multi_post_authors)
    author_index = 0
    while len(author_of_original) < spec.originals:
        size = group_sizes.pop(0) if group_sizes else 1
        for _ in range(size):
            if len(author_of_original) < spec.originals:
                author_of_original.append(author_index)
        author_index += 1
    n_original_authors = author_index

    def followers_for(index: int) -> int:
        if index < len(_FOLLOWER_POOL):
            return _FOLLOWER_POOL[index]
        return _log_uniform(rng, 10, 50000)

    original_authors = [
        Author(
            id=f"u{index:03d}",
            handle=f"user{index:03d}",
            display_name=f"User {index:03d}",
            followers_count=followers_for(index),
            verified=rng.random() < 0.1,
        )
        for index in range(n_original_authors)
    ]
    n_reposts = spec.total - spec.originals
    n_amplifiers = max(1, min(200, n_reposts))
    amplifier_authors = [
        Author(
            id=f"a{index:04d}",
            handle=f"amp{index:04d}",
            display_name=f"Amplifier {index:04d}",
            followers_count=_log_uniform(rng, 1, 20000),
            verified=False,
        )
        for index in range(n_amplifiers)
    ]
    unknown_ids = {
        original_authors[index].id
        for index in range(n_original_authors - spec.unknown_authors, n_original_authors)
    }

    # -- original posts ----------------------------------------------------
    e_orig, c_orig, n_orig = spec.original_labels
    labels = ["entailment"] * e_orig + ["contradiction"] * c_orig + ["neutral"] * n_orig
    posts: list[Post] = []
    planted: dict[str, str] = {}
    originals_by_label: dict[str, list[Post]] = {lbl: [] for lbl in _LABELS}
    child_counts: dict[str, dict[str, int]] = {}
    viral_id = "p0000"

    reply_targets = 0
    for index, label in enumerate(labels):
        post_id = f"p{index:04d}"
        author = original_authors[author_of_original[index]]
        if index == 0:
            day = 2.0
        else:
            day = rng.uniform(3.0, spec.span_days * 0.6)
        references: tuple[Reference, ...] = ()
        if label == "contradiction" and reply_targets < spec.reply_children:
            # a debunker answering the viral post directly
            references = (Reference(RefType.REPLIED_TO, viral_id),)
            day = 2.0 + rng.uniform(1.0, 30.0)
            reply_targets += 1
        if label == "entailment":
            text = _entail_text(claim.text, rng)
        elif label == "contradiction":
            text = _contra_text(claim.text, rng)
        else:
            text = rng.choice(_NEUTRAL_TEXTS)
        likes = spec.viral_likes if index == 0 else (
            0 if rng.random() < 0.45 else rng.randint(1, spec.like_cap)
        )
        post = Post(
            id=post_id,
            text=text,
            author_id=author.id,
            created_at=_instant(day),
            like_count=likes,
            references=references,
            language="en",
        )
        posts.append(post)
        planted[post_id] = label
        originals_by_label[label].append(post)
        child_counts[post_id] = {"retweeted": 0, "replied_to": 0, "quoted": 0}

    for post in posts:
        for ref in post.references:
            child_counts[ref.target_id][ref.ref_type.value] += 1

    # -- reposts ------------------------------------------------------------
    orphan_parent_id = f"ghost{seed:04d}" if spec.orphan_cluster else None
    repost_rows: list[tuple[str, str, str]] = []  # (parent_id, label, kind)
    e_rep, c_rep, n_rep = spec.repost_labels
    repost_rows.extend(("", "entailment", "orphan") for _ in range(spec.orphan_cluster))
    repost_rows.extend((viral_id, "entailment", "self") for _ in range(spec.self_reposts))
    normal_entail = e_rep - spec.orphan_cluster - spec.self_reposts

    def allocate(count: int, parents: list[Post], viral_boost: bool) -> list[str]:
        if not parents:
            raise ValueError("no parents available for repost allocation")
        weights = [1.0 / (i + 2) for i in range(len(parents))]
        if viral_boost:
            weights[0] = 100.0
        return [p.id for p in rng.choices(parents, weights=weights, k=count)]

    repost_rows.extend(
        (parent, "entailment", "normal")
        for parent in allocate(normal_entail, originals_by_label["entailment"], True)
    )
    repost_rows.extend(
        (parent, "contradiction", "normal")
        for parent in allocate(c_rep, originals_by_label["contradiction"], False)
    )
    repost_rows.extend(
        (parent, "neutral", "normal")
        for parent in allocate(n_rep, originals_by_label["neutral"], False)
    )

    by_id = {p.id: p for p in posts}
    handle_of = {a.id: a.handle for a in original_authors + amplifier_authors}
    last_normal_index = max(
        (i for i, row in enumerate(repost_rows) if row[2] == "normal"), default=None
    )
    for index, (parent_id, label, kind) in enumerate(repost_rows):
        post_id = f"r{index:05d}"
        if kind == "self":
            author_id = by_id[viral_id].author_id
        else:
            author_id = rng.choice(amplifier_authors).id
        if kind == "orphan":
            day = rng.uniform(10.0, spec.span_days * 0.9)
            text = "RT @vanished_source: " + _entail_text(claim.text, rng)
            references = (Reference(RefType.RETWEETED, orphan_parent_id),)
        else:
            parent = by_id[parent_id]
            parent_day = (parent.created_at - _EPOCH).total_seconds() / 86400.0
            day = parent_day + rng.uniform(0.02, max(0.05, spec.span_days * 0.95 - parent_day))
            source_handle = handle_of.get(parent.author_id, "somebody")
            text = f"RT @{source_handle}: {parent.text[:100]}"
            references = (Reference(RefType.RETWEETED, parent_id),)
            child_counts[parent_id]["retweeted"] += 1
        if index == last_normal_index:
            day = float(spec.span_days)  # pin the timeline end so the span is exact
        post = Post(
            id=post_id,
            text=text,
            author_id=author_id,
            created_at=_instant(day),
            references=references,
            language="en",
        )
        posts.append(post)
        planted[post_id] = label

    # engagement counts mirror what was actually collected
    final_posts: list[Post] = []
    for post in posts:
        counts = child_counts.get(post.id)
        if counts is None:
            final_posts.append(post)
        else:
            final_posts.append(
                Post(
                    id=post.id,
                    text=post.text,
                    author_id=post.author_id,
                    created_at=post.created_at,
                    like_count=post.like_count,
                    retweet_count=counts["retweeted"],
                    reply_count=counts["replied_to"],
                    quote_count=counts["quoted"],
                    references=post.references,
                    language=post.language,
                )
            )
    final_posts.sort(key=lambda p: (p.created_at, p.id))

    known_authors = sorted(
        (a for a in original_authors + amplifier_authors if a.id not in unknown_ids),
        key=lambda a: a.id,
    )
    _self_check(final_posts, claim, planted)

    posts_jsonl = _to_jsonl(post_to_json(p) for p in final_posts)
    users_jsonl = _to_jsonl(author_to_json(a) for a in known_authors)
    expected = _expected_report(spec, final_posts, planted, known_authors)
    return CaseFixture(
        profile=profile,
        seed=seed,
        claim=claim,
        posts=tuple(final_posts),
        authors=tuple(known_authors),
        posts_jsonl=posts_jsonl,
        users_jsonl=users_jsonl,
        expected_report=expected,
        planted_labels=planted,
        orphan_parent_id=orphan_parent_id,
        self_repost_author=by_id[viral_id].author_id if spec.self_reposts else None,
    )


def _to_jsonl(docs) -> bytes:
    lines = [json.dumps(doc, sort_keys=True, ensure_ascii=False) for doc in docs]
    return ("\n".join(lines) + "\n").encode("utf-8")


def _self_check(posts: list[Post], claim: Claim, planted: dict[str, str]) -> None:
    """The planted labels must be exactly what the baseline pipeline yields."""
    results = align_posts(posts, claim, HashingEmbedder(), BaselineClassifier(),
                          AlignmentConfig())
    mismatches = [
        (post.id, planted[post.id], results[post.id].label.value)
        for post in posts
        if results[post.id].label.value != planted[post.id]
    ]
    if mismatches:
        raise RuntimeError(f"fixture templates drifted from the baseline: {mismatches[:5]}")


def _expected_report(
    spec: CaseProfile,
    posts: list[Post],
    planted: dict[str, str],
    known_authors: list[Author],
) -> dict:
    """Aggregate the planted plan with plain counters (no analytics code)."""
    followers = {a.id: a.followers_count for a in known_authors}
    is_repost = {
        p.id: len(p.references) == 1 and p.references[0].ref_type is RefType.RETWEETED
        for p in posts
    }
    originals = [p for p in posts if not is_repost[p.id]]
    total = len(posts)

    label_counts: dict[str, int] = {}
    for post in posts:
        label_counts[planted[post.id]] = label_counts.get(planted[post.id], 0) + 1
    proportions = {label: label_counts[label] / total for label in sorted(label_counts)}

    def engagement_bucket(count: int) -> str:
        if count == 0:
            return "0"
        if count <= 10:
            return "1-10"
        return "11-100" if count <= 100 else ">100"

    retweet_hist = {"0": 0, "1-10": 0, "11-100": 0, ">100": 0}
    like_hist = {"0": 0, "1-10": 0, "11-100": 0, ">100": 0}
    for post in originals:
        retweet_hist[engagement_bucket(post.retweet_count)] += 1
        like_hist[engagement_bucket(post.like_count)] += 1

    follower_hist = {"0-100": 0, "101-1000": 0, "1001-10000": 0, ">10000": 0, "unknown": 0}
    seen_authors: set[str] = set()
    for post in originals:
        if post.author_id in seen_authors:
            continue
        seen_authors.add(post.author_id)
        if post.author_id not in followers:
            follower_hist["unknown"] += 1
        else:
            f = followers[post.author_id]
            if f <= 100:
                follower_hist["0-100"] += 1
            elif f <= 1000:
                follower_hist["101-1000"] += 1
            elif f <= 10000:
                follower_hist["1001-10000"] += 1
            else:
                follower_hist[">10000"] += 1

    accounts: dict[str, dict[str, int]] = {}
    for post in originals:
        agg = accounts.setdefault(
            post.author_id,
            {"interactions": 0, "max_retweets": 0, "max_likes": 0, "num_posts": 0},
        )
        agg["interactions"] += post.retweet_count + post.reply_count + post.quote_count
        agg["max_retweets"] = max(agg["max_retweets"], post.retweet_count)
        agg["max_likes"] = max(agg["max_likes"], post.like_count)
        agg["num_posts"] += 1
    rows = sorted(
        (
            {
                "author_id": author_id,
                "followers": followers.get(author_id, 0),
                "interactions": agg["interactions"],
                "max_retweets": agg["max_retweets"],
                "max_likes": agg["max_likes"],
                "num_posts": agg["num_posts"],
            }
            for author_id, agg in accounts.items()
        ),
        key=lambda row: (-row["followers"], row["author_id"]),
    )[:10]

    return {
        "totals": {
            "posts": total,
            "originals": len(originals),
            "reposts": total - len(originals),
        },
        "proportions": proportions,
        "retweet_hist": retweet_hist,
        "like_hist": like_hist,
        "follower_hist": follower_hist,
        "top_accounts": rows,
        "empty": total == 0,
    }


def write_case_fixture(profile: str, seed: int, out_dir: str | Path) -> CaseFixture:
    """Materialize one case fixture on disk with a ready-to-run config."""
    fixture = generate_case_fixture(profile, seed)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "posts.jsonl").write_bytes(fixture.posts_jsonl)
    (out_dir / "users.jsonl").write_bytes(fixture.users_jsonl)
    (out_dir / "expected_report.json").write_bytes(
        (json.dumps(fixture.expected_report, indent=2, sort_keys=True) + "\n").encode("utf-8")
    )
    config = {
        "claim": {
            "id": fixture.claim.id,
            "text": fixture.claim.text,
            "language": fixture.claim.language,
            "status": fixture.claim.status.value,
            "topic_birth": fixture.claim.topic_birth.isoformat().replace("+00:00", "Z"),
        },
        "querygen": {"max_keywords": 5, "drop_k": 1, "expand_numbers": True},
        "align": {
            "similarity_threshold": 0.6,
            "classifier": "baseline",
            "inherit_repost_labels": True,
            "batch_size": 32,
        },
        "io": {
            "posts_archive": "posts.jsonl",
            "users_archive": "users.jsonl",
            "out_dir": "out",
        },
    }
    (out_dir / "config.json").write_text(
        json.dumps(config, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return fixture
