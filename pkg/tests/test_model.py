from datetime import datetime, timezone

import pytest

from distrack.errors import (
    DuplicateReferenceType,
    InvalidClaim,
    InvalidResult,
    InvalidTimestamp,
    NegativeCount,
)
from distrack.model import (
    AlignmentLabel,
    AlignmentResult,
    Author,
    Claim,
    ResultSource,
    format_utc,
    parse_utc,
    validate_post,
)

from conftest import make_post


def test_validate_post_identity():
    post = make_post("p1", refs=[("retweeted", "p0")])
    assert validate_post(post) is post


def test_negative_count_names_field():
    with pytest.raises(NegativeCount, match="like_count"):
        validate_post(make_post("p1", likes=-1))


def test_duplicate_reference_type():
    post = make_post("p1", refs=[("retweeted", "a"), ("retweeted", "b")])
    with pytest.raises(DuplicateReferenceType, match="retweeted"):
        validate_post(post)


def test_distinct_reference_types_allowed():
    post = make_post("p1", refs=[("retweeted", "a"), ("quoted", "b"), ("replied_to", "c")])
    assert validate_post(post) is post


def test_naive_timestamp_rejected():
    post = make_post("p1", created_at=datetime(2022, 1, 1))
    with pytest.raises(InvalidTimestamp):
        validate_post(post)


def test_parse_format_utc_round_trip():
    stamp = "2022-09-19T10:00:00Z"
    parsed = parse_utc(stamp)
    assert parsed.tzinfo == timezone.utc
    assert format_utc(parsed) == stamp


def test_parse_utc_normalizes_offsets():
    parsed = parse_utc("2022-09-19T12:00:00+02:00")
    assert format_utc(parsed) == "2022-09-19T10:00:00Z"


def test_claim_requires_text():
    with pytest.raises(InvalidClaim):
        Claim(id="c", text="   ")


def test_author_rejects_negative_followers():
    with pytest.raises(NegativeCount):
        Author(id="a", handle="a", followers_count=-3)


def test_alignment_result_scores_must_sum_to_one():
    with pytest.raises(InvalidResult):
        AlignmentResult(
            "p1",
            AlignmentLabel.NEUTRAL,
            {"entailment": 0.5, "contradiction": 0.5, "neutral": 0.5},
            0.0,
            ResultSource.BASELINE,
        )


def test_alignment_result_label_must_be_argmax():
    with pytest.raises(InvalidResult):
        AlignmentResult(
            "p1",
            AlignmentLabel.NEUTRAL,
            {"entailment": 0.8, "contradiction": 0.1, "neutral": 0.1},
            0.0,
            ResultSource.BASELINE,
        )


def test_alignment_result_similarity_bounds():
    with pytest.raises(InvalidResult):
        AlignmentResult(
            "p1",
            AlignmentLabel.NEUTRAL,
            {"entailment": 0.1, "contradiction": 0.1, "neutral": 0.8},
            1.5,
            ResultSource.BASELINE,
        )
