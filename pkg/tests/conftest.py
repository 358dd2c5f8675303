from __future__ import annotations

from datetime import datetime, timedelta, timezone

import pytest

from distrack.model import (
    AlignmentLabel,
    AlignmentResult,
    Author,
    Claim,
    Post,
    Reference,
    RefType,
    ResultSource,
)

T0 = datetime(2022, 6, 1, 12, 0, 0, tzinfo=timezone.utc)

_ACCEPTANCE_RESULTS: dict[str, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(name): end-to-end acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    name = marker.args[0] if marker.args else item.name
    if report.when == "call":
        _ACCEPTANCE_RESULTS[name] = report.outcome
    elif report.when == "setup" and report.outcome != "passed":
        _ACCEPTANCE_RESULTS[name] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE_RESULTS):
        outcome = _ACCEPTANCE_RESULTS[name]
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}.get(outcome, outcome)
        terminalreporter.write_line(f"{status}  {name}")


def make_post(
    post_id: str,
    *,
    minutes: int = 0,
    text: str = "a post",
    author_id: str = "author-1",
    likes: int = 0,
    retweets: int = 0,
    replies: int = 0,
    quotes: int = 0,
    refs: list[tuple[str, str]] | None = None,
    language: str = "en",
    created_at: datetime | None = None,
) -> Post:
    return Post(
        id=post_id,
        text=text,
        author_id=author_id,
        created_at=created_at or (T0 + timedelta(minutes=minutes)),
        like_count=likes,
        retweet_count=retweets,
        reply_count=replies,
        quote_count=quotes,
        references=tuple(Reference(RefType(kind), target) for kind, target in (refs or [])),
        language=language,
    )


def make_author(author_id: str, followers: int = 100, handle: str | None = None) -> Author:
    return Author(
        id=author_id,
        handle=handle or author_id,
        display_name=author_id.title(),
        followers_count=followers,
    )


def make_result(
    post_id: str,
    label: AlignmentLabel = AlignmentLabel.NEUTRAL,
    similarity: float = 0.0,
    source: ResultSource = ResultSource.BASELINE,
) -> AlignmentResult:
    scores = {lbl.value: (0.8 if lbl is label else 0.1) for lbl in AlignmentLabel}
    return AlignmentResult(post_id, label, scores, similarity, source)


@pytest.fixture
def claim() -> Claim:
    return Claim(id="c1", text="The moon base stores ten thousand sealed crates of cheese")
