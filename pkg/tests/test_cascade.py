import random
from datetime import timedelta

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distrack.cascade import (
    anomaly_report,
    build_graph,
    chronological_order,
    detect_orphaned_viral,
    detect_self_reposts,
    detect_time_inversions,
)
from distrack.errors import MissingAlignment
from distrack.ingest import RecordStore, hydrate
from distrack.model import Claim

from conftest import T0, make_author, make_post, make_result


def graph_of(posts, claim=None, authors=()):
    store = RecordStore()
    hydrate(store, posts, authors)
    alignments = {p.id: make_result(p.id) for p in posts}
    return build_graph(store, alignments, claim or Claim(id="c", text="claim text"))


def test_singleton_graph():
    g = graph_of([make_post("p1")])
    assert len(g.vertices) == 1 and g.edges == () and g.orphans == frozenset()


def test_four_post_fixture_edges():
    posts = [
        make_post("A", minutes=0),
        make_post("B", minutes=1, refs=[("retweeted", "A")]),
        make_post("C", minutes=2, refs=[("retweeted", "A")]),
        make_post("D", minutes=3, refs=[("quoted", "B")]),
    ]
    g = graph_of(posts)
    assert len(g.vertices) == 4
    assert {(e.child_id, e.parent_id, e.ref_type.value) for e in g.edges} == {
        ("B", "A", "retweeted"),
        ("C", "A", "retweeted"),
        ("D", "B", "quoted"),
    }
    assert g.vertices["B"].is_repost and not g.vertices["D"].is_repost


def test_missing_alignment_raises():
    store = RecordStore()
    hydrate(store, [make_post("p1")])
    with pytest.raises(MissingAlignment):
        build_graph(store, {}, Claim(id="c", text="x"))


def test_orphan_children_are_detached_roots():
    posts = [make_post(f"r{i}", minutes=i, refs=[("retweeted", "ghost")]) for i in range(4)]
    g = graph_of(posts)
    assert g.orphans == frozenset({"ghost"})
    assert g.edges == ()  # the orphan parent gets no placeholder vertex
    assert len(g.vertices) == 4


def test_orphaned_viral_counts():
    posts = [make_post(f"r{i}", minutes=i, refs=[("retweeted", "ghost")]) for i in range(5)]
    posts.append(make_post("solo", minutes=9, refs=[("retweeted", "other-ghost")]))
    g = graph_of(posts)
    rows = detect_orphaned_viral(g, min_reposts=2)
    assert [(r.post_id, r.repost_count) for r in rows] == [("ghost", 5)]
    all_rows = detect_orphaned_viral(g, min_reposts=1)
    assert [(r.post_id, r.repost_count) for r in all_rows] == [("ghost", 5), ("other-ghost", 1)]


def test_self_reposts_detected():
    posts = [make_post("P", minutes=0, author_id="writer")]
    posts += [
        make_post(f"rt{i}", minutes=i + 1, author_id="writer", refs=[("retweeted", "P")])
        for i in range(3)
    ]
    posts.append(make_post("rt-other", minutes=9, author_id="fan", refs=[("retweeted", "P")]))
    g = graph_of(posts)
    rows = detect_self_reposts(g, min_count=2)
    assert [(r.author_id, r.post_id, r.count) for r in rows] == [("writer", "P", 3)]


def test_self_reposts_threshold_one_lists_every_repost():
    posts = [
        make_post("P", minutes=0),
        make_post("rt", minutes=1, author_id="fan", refs=[("retweeted", "P")]),
    ]
    rows = detect_self_reposts(graph_of(posts), min_count=1)
    assert [(r.author_id, r.count) for r in rows] == [("fan", 1)]


def test_no_repeats_empty_report():
    posts = [make_post("P"), make_post("rt", minutes=1, refs=[("retweeted", "P")])]
    assert detect_self_reposts(graph_of(posts)) == ()


def test_time_inversions_flagged_but_kept():
    posts = [
        make_post("late-parent", minutes=60),
        make_post("early-child", minutes=0, refs=[("retweeted", "late-parent")]),
    ]
    g = graph_of(posts)
    assert len(g.edges) == 1
    inversions = detect_time_inversions(g)
    assert [(e.child_id, e.parent_id) for e in inversions] == [("early-child", "late-parent")]


def test_same_instant_edge_ordered_by_id_tiebreak():
    a = make_post("a", minutes=0)
    b = make_post("b", minutes=0, refs=[("retweeted", "a")])
    assert detect_time_inversions(graph_of([a, b])) == ()
    # flipped ids: the parent now sorts after the child at the same instant
    c = make_post("z", minutes=0)
    d = make_post("m", minutes=0, refs=[("retweeted", "z")])
    assert len(detect_time_inversions(graph_of([c, d]))) == 1


def test_chronological_order_tie_break_by_id():
    posts = [make_post("b", minutes=0), make_post("a", minutes=0), make_post("c", minutes=1)]
    assert chronological_order(graph_of(posts)) == ["a", "b", "c"]


def test_empty_graph_order():
    g = graph_of([])
    assert chronological_order(g) == []


def test_chronological_order_matches_sort_oracle():
    rng = random.Random(99)
    posts = [
        make_post(f"p{i:03d}", created_at=T0 + timedelta(minutes=rng.randint(0, 500)))
        for i in range(100)
    ]
    rng.shuffle(posts)
    g = graph_of(posts)
    expected = [p.id for p in sorted(posts, key=lambda p: (p.created_at, p.id))]
    assert chronological_order(g) == expected


def test_vertex_and_edge_counts_match_references():
    posts = [make_post("A"), make_post("B", minutes=1, refs=[("retweeted", "A")]),
             make_post("C", minutes=2, refs=[("quoted", "A"), ("replied_to", "B")])]
    g = graph_of(posts)
    assert len(g.vertices) == 3
    assert len(g.edges) == 3


def test_build_graph_is_deterministic():
    posts = [make_post(f"p{i}", minutes=i % 3) for i in range(6)]
    g1, g2 = graph_of(posts), graph_of(posts)
    assert g1 == g2
    assert [e for e in g1.edges] == [e for e in g2.edges]


def test_author_attached_to_vertex():
    g = graph_of([make_post("p1", author_id="u1")], authors=[make_author("u1", 5)])
    assert g.vertices["p1"].author.followers_count == 5
    g2 = graph_of([make_post("p1", author_id="u1")])
    assert g2.vertices["p1"].author is None


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(min_value=0, max_value=400), min_size=1, max_size=25, unique=True))
def test_inversion_free_graphs_are_acyclic(minutes):
    # chain each post to the previous one in time order: parents precede children
    ordered = sorted(minutes)
    posts = [make_post(f"p{m:04d}", minutes=m) for m in ordered]
    chained = [posts[0]]
    for prev, cur in zip(posts, posts[1:]):
        chained.append(
            make_post(cur.id, minutes=(cur.created_at - T0).seconds // 60,
                      refs=[("replied_to", prev.id)])
        )
    g = graph_of(chained)
    assert detect_time_inversions(g) == ()
    # topological check: walk edges child -> parent, must terminate without repeats
    parents = {e.child_id: e.parent_id for e in g.edges}
    for start in parents:
        seen = set()
        node = start
        while node in parents:
            assert node not in seen
            seen.add(node)
            node = parents[node]


def test_anomaly_report_bundles_everything():
    posts = [make_post("P", minutes=0, author_id="w")]
    posts += [make_post(f"s{i}", minutes=i + 1, author_id="w", refs=[("retweeted", "P")])
              for i in range(2)]
    posts += [make_post(f"o{i}", minutes=i + 5, author_id=f"fan{i}",
                        refs=[("retweeted", "ghost")])
              for i in range(3)]
    report = anomaly_report(graph_of(posts))
    assert report.self_reposts[0].count == 2
    assert report.orphaned_viral[0] == ("ghost", 3) or (
        report.orphaned_viral[0].post_id == "ghost" and report.orphaned_viral[0].repost_count == 3
    )
    assert report.time_inversions == ()
