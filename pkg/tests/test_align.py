import json
import math
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distrack.align import (
    AlignmentConfig,
    BaselineClassifier,
    HashingEmbedder,
    RemoteClassifier,
    align_posts,
    classify_baseline,
    classify_remote,
    cosine_similarity,
    semantic_filter,
    CLASSIFY_RESPONSE_SCHEMA,
)
from distrack.errors import DimensionMismatch, ProtocolError, RemoteUnavailable, ZeroVector
from distrack.model import AlignmentLabel, Claim, ResultSource

from conftest import make_post


# -- cosine -------------------------------------------------------------------


def test_cosine_identity():
    v = [1.0, 2.0, 3.0]
    assert cosine_similarity(v, v) == pytest.approx(1.0, abs=1e-9)


def test_cosine_orthogonal():
    assert cosine_similarity([1, 0, 0, 0], [0, 1, 0, 0]) == pytest.approx(0.0, abs=1e-12)


def test_cosine_against_arithmetic_oracle():
    rng = np.random.default_rng(42)
    for _ in range(50):
        a = rng.normal(size=8)
        b = rng.normal(size=8)
        expected = float(
            sum(x * y for x, y in zip(a, b))
            / (math.sqrt(sum(x * x for x in a)) * math.sqrt(sum(y * y for y in b)))
        )
        assert cosine_similarity(a, b) == pytest.approx(expected, abs=1e-9)


def test_cosine_errors():
    with pytest.raises(DimensionMismatch):
        cosine_similarity([1, 2], [1, 2, 3])
    with pytest.raises(ZeroVector):
        cosine_similarity([0, 0], [1, 1])


# -- hashing embedder -----------------------------------------------------------


def test_embedder_shape_and_normalization():
    embedder = HashingEmbedder()
    vectors = embedder.embed(["hello world", "short", ""])
    assert vectors.shape == (3, 256)
    assert np.linalg.norm(vectors[0]) == pytest.approx(1.0, abs=1e-9)
    assert np.linalg.norm(vectors[2]) == 0.0  # empty text has no features


def test_embedder_is_deterministic():
    a = HashingEmbedder().embed(["la tierra es plana", "graphene"])
    b = HashingEmbedder().embed(["la tierra es plana", "graphene"])
    assert np.array_equal(a, b)


def test_similar_texts_score_higher_than_unrelated():
    embedder = HashingEmbedder()
    claim = "the vaccine contains graphene oxide"
    close = "BREAKING the vaccine contains graphene oxide !!"
    far = "lovely weather for sailing this weekend"
    v = embedder.embed([claim, close, far])
    assert cosine_similarity(v[0], v[1]) > cosine_similarity(v[0], v[2])


# -- semantic filter -------------------------------------------------------------


def _posts_fixture():
    texts = [
        "the moon base stores ten thousand sealed crates of cheese",
        "moon base cheese crates are sealed, ten thousand of them",
        "crates on the moon",
        "quarterly sales figures look great",
        "my cat discovered a cardboard box",
        "",
    ]
    return [make_post(f"p{i}", minutes=i, text=t) for i, t in enumerate(texts)]


def test_threshold_zero_keeps_everything(claim):
    posts = _posts_fixture()
    kept, dropped = semantic_filter(posts, claim, HashingEmbedder(),
                                    AlignmentConfig(similarity_threshold=0.0))
    # the empty post has no features and similarity 0, which still passes >= 0
    assert [p.id for p in kept] == [p.id for p in posts]
    assert dropped == []


def test_identical_text_survives_threshold_one(claim):
    posts = [make_post("same", text=claim.text), make_post("other", text="unrelated words")]
    kept, dropped = semantic_filter(posts, claim, HashingEmbedder(),
                                    AlignmentConfig(similarity_threshold=1.0))
    assert [p.id for p in kept] == ["same"]
    assert [post_id for post_id, _ in dropped] == ["other"]


def test_filter_matches_direct_oracle(claim):
    posts = _posts_fixture()
    embedder = HashingEmbedder()
    cfg = AlignmentConfig(similarity_threshold=0.6)
    kept, dropped = semantic_filter(posts, claim, embedder, cfg)
    # independent pass: embed and compare without going through the filter
    vectors = embedder.embed([claim.text] + [p.text for p in posts])
    expected_kept = []
    for post, vector in zip(posts, vectors[1:]):
        sim = 0.0 if np.linalg.norm(vector) == 0 else cosine_similarity(vectors[0], vector)
        if sim >= cfg.similarity_threshold:
            expected_kept.append(post.id)
    assert [p.id for p in kept] == expected_kept
    assert len(kept) + len(dropped) == len(posts)


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=0.0, max_value=1.0), st.floats(min_value=0.0, max_value=1.0))
def test_filter_monotonicity(t1, t2):
    claim = Claim(id="c1", text="the moon base stores ten thousand sealed crates of cheese")
    posts = _posts_fixture()
    low, high = sorted((t1, t2))
    kept_low, _ = semantic_filter(posts, claim, HashingEmbedder(),
                                  AlignmentConfig(similarity_threshold=low))
    kept_high, _ = semantic_filter(posts, claim, HashingEmbedder(),
                                   AlignmentConfig(similarity_threshold=high))
    assert {p.id for p in kept_high} <= {p.id for p in kept_low}


# -- baseline classifier -----------------------------------------------------------


def test_identical_pair_is_entailment():
    text = "the moon base stores cheese"
    [(label, scores)] = classify_baseline([(text, text)])
    assert label is AlignmentLabel.ENTAILMENT
    assert scores == {"entailment": 0.8, "contradiction": 0.1, "neutral": 0.1}


def test_spanish_negation_cue_flips_to_contradiction():
    hypothesis = "la base lunar almacena queso"
    [(label, _)] = classify_baseline([("Es FALSO que " + hypothesis, hypothesis)])
    assert label is AlignmentLabel.CONTRADICTION


def test_english_negation_cue():
    hypothesis = "the moon base stores cheese"
    [(label, _)] = classify_baseline([("It is false that " + hypothesis, hypothesis)])
    assert label is AlignmentLabel.CONTRADICTION


def test_even_cue_count_is_neutral():
    hypothesis = "the moon base stores cheese"
    premise = "No, it is not true: " + hypothesis  # two cues
    [(label, _)] = classify_baseline([(premise, hypothesis)])
    assert label is AlignmentLabel.NEUTRAL


def test_disjoint_vocabulary_is_neutral():
    [(label, _)] = classify_baseline([("completely unrelated message", "the moon base")])
    assert label is AlignmentLabel.NEUTRAL


def test_baseline_is_pure():
    pairs = [("a b c", "a b"), ("x", "y")] * 3
    assert classify_baseline(pairs) == classify_baseline(pairs)


@settings(max_examples=50, deadline=None)
@given(st.text(max_size=80), st.text(max_size=80))
def test_baseline_scores_always_distribution(premise, hypothesis):
    [(label, scores)] = classify_baseline([(premise, hypothesis)])
    assert set(scores) == {"entailment", "contradiction", "neutral"}
    assert sum(scores.values()) == pytest.approx(1.0, abs=1e-9)
    assert scores[label.value] == max(scores.values())


# -- remote classifier ---------------------------------------------------------------


class _StubHandler(BaseHTTPRequestHandler):
    behavior = staticmethod(lambda body: (200, {"results": []}))
    requests_seen = []

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        body = json.loads(self.rfile.read(length)) if length else {}
        type(self).requests_seen.append((self.path, body))
        status, payload = type(self).behavior(body)
        data = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


@pytest.fixture
def stub_server():
    handler = type("Handler", (_StubHandler,), {"requests_seen": []})
    server = HTTPServer(("127.0.0.1", 0), handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield f"http://127.0.0.1:{server.server_port}", handler
    finally:
        server.shutdown()
        thread.join()


def _echo_baseline(body):
    pairs = [(item["premise"], item["hypothesis"]) for item in body["pairs"]]
    results = [
        {"label": label.value, "scores": scores}
        for label, scores in classify_baseline(pairs)
    ]
    return 200, {"results": results}


def test_remote_round_trip_preserves_order(stub_server):
    endpoint, handler = stub_server
    handler.behavior = staticmethod(_echo_baseline)
    pairs = [
        ("the claim itself", "the claim itself"),
        ("it is false that the claim holds", "the claim holds"),
        ("something else entirely", "the claim"),
    ]
    results = classify_remote(endpoint, pairs)
    assert [label.value for label, _ in results] == ["entailment", "contradiction", "neutral"]
    path, body = handler.requests_seen[0]
    assert path == "/v1/classify"
    assert body == {
        "pairs": [{"premise": p, "hypothesis": h} for p, h in pairs]
    }


def test_remote_responses_validate_against_shared_schema(stub_server):
    import jsonschema

    endpoint, handler = stub_server
    captured = {}

    def behavior(body):
        status, payload = _echo_baseline(body)
        captured["payload"] = payload
        return status, payload

    handler.behavior = staticmethod(behavior)
    classify_remote(endpoint, [("a b", "a b")])
    jsonschema.validate(captured["payload"], CLASSIFY_RESPONSE_SCHEMA)


def test_remote_missing_scores_is_protocol_error(stub_server):
    endpoint, handler = stub_server
    handler.behavior = staticmethod(lambda body: (200, {"results": [{"label": "entailment"}]}))
    with pytest.raises(ProtocolError):
        classify_remote(endpoint, [("a", "b")])


def test_remote_wrong_count_is_protocol_error(stub_server):
    endpoint, handler = stub_server
    handler.behavior = staticmethod(lambda body: (200, {"results": []}))
    with pytest.raises(ProtocolError):
        classify_remote(endpoint, [("a", "b")])


def test_remote_label_not_argmax_is_protocol_error(stub_server):
    endpoint, handler = stub_server
    handler.behavior = staticmethod(
        lambda body: (
            200,
            {
                "results": [
                    {
                        "label": "neutral",
                        "scores": {"entailment": 0.9, "contradiction": 0.05, "neutral": 0.05},
                    }
                ]
            },
        )
    )
    with pytest.raises(ProtocolError):
        classify_remote(endpoint, [("a", "b")])


def test_remote_client_error_is_protocol_error(stub_server):
    endpoint, handler = stub_server
    handler.behavior = staticmethod(lambda body: (400, {"error": "bad request"}))
    with pytest.raises(ProtocolError):
        classify_remote(endpoint, [("a", "b")])


def test_remote_retries_transient_failures(stub_server):
    endpoint, handler = stub_server
    state = {"calls": 0}

    def flaky(body):
        state["calls"] += 1
        if state["calls"] < 3:
            return 503, {"error": "warming up"}
        return _echo_baseline(body)

    handler.behavior = staticmethod(flaky)
    results = classify_remote(endpoint, [("a b", "a b")], backoff=0.01)
    assert state["calls"] == 3
    assert results[0][0] is AlignmentLabel.ENTAILMENT


def test_remote_gives_up_after_retries(stub_server):
    endpoint, handler = stub_server
    handler.behavior = staticmethod(lambda body: (503, {"error": "down"}))
    with pytest.raises(RemoteUnavailable):
        classify_remote(endpoint, [("a", "b")], backoff=0.01, max_attempts=2)


def test_unreachable_endpoint():
    with pytest.raises(RemoteUnavailable):
        classify_remote("http://127.0.0.1:9", [("a", "b")], backoff=0.01, max_attempts=2)


# -- end-to-end labeling ----------------------------------------------------------------


def test_empty_input_gives_empty_map(claim):
    assert align_posts([], claim, HashingEmbedder(), BaselineClassifier()) == {}


def test_every_post_gets_exactly_one_result(claim):
    posts = _posts_fixture()
    results = align_posts(posts, claim, HashingEmbedder(), BaselineClassifier())
    assert sorted(results) == sorted(p.id for p in posts)


def test_dropped_post_is_neutral(claim):
    posts = [make_post("far", text="totally unrelated chatter about soup")]
    results = align_posts(posts, claim, HashingEmbedder(), BaselineClassifier())
    assert results["far"].label is AlignmentLabel.NEUTRAL
    assert results["far"].similarity < 0.6
    assert results["far"].source is ResultSource.BASELINE


def test_repost_inherits_parent_label(claim):
    parent = make_post("orig", minutes=0, text=claim.text)
    repost = make_post("rt1", minutes=5, text="RT @user: " + claim.text[:40],
                       refs=[("retweeted", "orig")])
    results = align_posts([parent, repost], claim, HashingEmbedder(), BaselineClassifier())
    assert results["orig"].label is AlignmentLabel.ENTAILMENT
    assert results["rt1"].label is AlignmentLabel.ENTAILMENT
    assert results["rt1"].source is ResultSource.INHERITED


def test_repost_chain_resolves_to_nearest_classified_ancestor(claim):
    parent = make_post("orig", minutes=0, text="It is false that " + claim.text)
    rt1 = make_post("rt1", minutes=5, text="", refs=[("retweeted", "orig")])
    rt2 = make_post("rt2", minutes=9, text="RT @x: ", refs=[("retweeted", "rt1")])
    results = align_posts([parent, rt1, rt2], claim, HashingEmbedder(), BaselineClassifier())
    assert results["orig"].label is AlignmentLabel.CONTRADICTION
    assert results["rt1"].source is ResultSource.INHERITED
    assert results["rt2"].source is ResultSource.INHERITED
    assert results["rt2"].label is AlignmentLabel.CONTRADICTION


def test_repost_of_missing_parent_classified_on_own_text(claim):
    repost = make_post("rt1", minutes=5, text="RT @ghost: " + claim.text,
                       refs=[("retweeted", "gone")])
    results = align_posts([repost], claim, HashingEmbedder(), BaselineClassifier())
    assert results["rt1"].label is AlignmentLabel.ENTAILMENT
    assert results["rt1"].source is ResultSource.BASELINE


def test_inheritance_disabled_classifies_own_text(claim):
    parent = make_post("orig", minutes=0, text=claim.text)
    repost = make_post("rt1", minutes=5, text="", refs=[("retweeted", "orig")])
    cfg = AlignmentConfig(inherit_repost_labels=False)
    results = align_posts([parent, repost], claim, HashingEmbedder(),
                          BaselineClassifier(), cfg)
    assert results["rt1"].source is ResultSource.BASELINE
    assert results["rt1"].label is AlignmentLabel.NEUTRAL  # empty text, filtered


def test_reference_cycle_falls_back_to_own_text(claim):
    a = make_post("a", minutes=0, text="RT @x: ", refs=[("retweeted", "b")])
    b = make_post("b", minutes=1, text="RT @y: ", refs=[("retweeted", "a")])
    results = align_posts([a, b], claim, HashingEmbedder(), BaselineClassifier())
    assert results["a"].label is AlignmentLabel.NEUTRAL
    assert results["b"].label is AlignmentLabel.NEUTRAL


def test_quotes_and_replies_never_inherit(claim):
    parent = make_post("orig", minutes=0, text=claim.text)
    quote = make_post("q1", minutes=3, text="It is false that " + claim.text,
                      refs=[("quoted", "orig")])
    results = align_posts([parent, quote], claim, HashingEmbedder(), BaselineClassifier())
    assert results["q1"].label is AlignmentLabel.CONTRADICTION
    assert results["q1"].source is ResultSource.BASELINE


def test_remote_classifier_source_recorded(claim, stub_server):
    endpoint, handler = stub_server
    handler.behavior = staticmethod(_echo_baseline)
    posts = [make_post("p1", text=claim.text)]
    results = align_posts(posts, claim, HashingEmbedder(), RemoteClassifier(endpoint))
    assert results["p1"].source is ResultSource.REMOTE
