import json

import pytest

from distrack.align import AlignmentConfig, BaselineClassifier, HashingEmbedder, align_posts
from distrack.analytics import build_report
from distrack.cascade import build_graph, detect_self_reposts
from distrack.fixtures import PROFILES, generate_case_fixture, write_case_fixture
from distrack.ingest import RecordStore, hydrate, read_archive


@pytest.fixture(scope="module")
def cases():
    return {name: generate_case_fixture(name, seed=7) for name in PROFILES}


def test_profile_shapes(cases):
    assert cases["discredit"].expected_report["totals"] == {
        "posts": 84, "originals": 32, "reposts": 52}
    assert cases["antivaccine"].expected_report["totals"] == {
        "posts": 128, "originals": 32, "reposts": 96}
    assert cases["geopolitics"].expected_report["totals"] == {
        "posts": 916, "originals": 26, "reposts": 890}


def test_geopolitics_entailment_share(cases):
    share = cases["geopolitics"].expected_report["proportions"]["entailment"]
    assert abs(share - 0.80) <= 0.005


def test_same_seed_is_byte_identical():
    a = generate_case_fixture("discredit", seed=3)
    b = generate_case_fixture("discredit", seed=3)
    assert a.posts_jsonl == b.posts_jsonl
    assert a.users_jsonl == b.users_jsonl
    assert a.expected_report == b.expected_report


def test_different_seeds_differ():
    a = generate_case_fixture("discredit", seed=3)
    b = generate_case_fixture("discredit", seed=4)
    assert a.posts_jsonl != b.posts_jsonl


def test_archives_ingest_without_warnings(cases, tmp_path):
    for name, fixture in cases.items():
        posts_path = tmp_path / f"{name}-posts.jsonl"
        users_path = tmp_path / f"{name}-users.jsonl"
        posts_path.write_bytes(fixture.posts_jsonl)
        users_path.write_bytes(fixture.users_jsonl)
        records, warnings = read_archive(posts_path, "posts")
        assert warnings == []
        assert len(records) == fixture.expected_report["totals"]["posts"]
        authors, user_warnings = read_archive(users_path, "users")
        assert user_warnings == []
        assert len(authors) == len(fixture.authors)


def test_timeline_span_exceeds_annotation_interval(cases):
    for fixture in cases.values():
        times = [p.created_at for p in fixture.posts]
        assert (max(times) - min(times)).days >= 300


def test_pipeline_reproduces_expected_report(cases):
    fixture = cases["discredit"]
    store = RecordStore()
    hydrate(store, list(fixture.posts), list(fixture.authors))
    results = align_posts(list(fixture.posts), fixture.claim, HashingEmbedder(),
                          BaselineClassifier(), AlignmentConfig())
    graph = build_graph(store, results, fixture.claim)
    assert build_report(graph).to_json_dict() == fixture.expected_report


def test_planted_anomalies_present(cases):
    fixture = cases["geopolitics"]
    store = RecordStore()
    hydrate(store, list(fixture.posts), list(fixture.authors))
    results = align_posts(list(fixture.posts), fixture.claim, HashingEmbedder(),
                          BaselineClassifier(), AlignmentConfig())
    graph = build_graph(store, results, fixture.claim)
    assert fixture.orphan_parent_id in graph.orphans
    rows = detect_self_reposts(graph)
    assert any(
        r.author_id == fixture.self_repost_author and r.count == 3 for r in rows
    )


def test_unknown_authors_missing_from_users_archive(cases):
    fixture = cases["antivaccine"]
    author_ids = {a.id for a in fixture.authors}
    original_authors = {
        p.author_id for p in fixture.posts
        if not (len(p.references) == 1 and p.references[0].ref_type.value == "retweeted")
    }
    assert len(original_authors - author_ids) == 2
    assert fixture.expected_report["follower_hist"]["unknown"] == 2


def test_write_case_fixture_materializes_files(tmp_path):
    fixture = write_case_fixture("discredit", 7, tmp_path)
    for name in ("posts.jsonl", "users.jsonl", "expected_report.json", "config.json"):
        assert (tmp_path / name).exists()
    expected = json.loads((tmp_path / "expected_report.json").read_text())
    assert expected == fixture.expected_report
    config = json.loads((tmp_path / "config.json").read_text())
    assert config["claim"]["text"] == fixture.claim.text


def test_unknown_profile_rejected():
    with pytest.raises(ValueError):
        generate_case_fixture("sasquatch", 1)


def test_bundled_fixtures_match_regeneration(cases):
    from pathlib import Path

    bundled_root = Path(__file__).resolve().parents[1] / "fixtures"
    for name, fixture in cases.items():
        case_dir = bundled_root / f"case_{name}"
        assert (case_dir / "posts.jsonl").read_bytes() == fixture.posts_jsonl
        assert (case_dir / "users.jsonl").read_bytes() == fixture.users_jsonl
        assert json.loads((case_dir / "expected_report.json").read_text()) == (
            fixture.expected_report
        )
