"""Alignment of posts toward the tracked claim.

Two stages: a semantic-similarity pre-filter over embeddings, then a
3-way inference step (entailment / contradiction / neutral) through a
pluggable classifier.  A deterministic lexical baseline keeps the whole
pipeline runnable offline; a remote client speaks the HTTP wire
protocol of an external model service.
"""

from __future__ import annotations

import re
import time
import zlib
from dataclasses import dataclass
from typing import Protocol, Sequence, runtime_checkable

import numpy as np
import requests

from .errors import (
    DimensionMismatch,
    ProtocolError,
    RemoteTimeout,
    RemoteUnavailable,
    ZeroVector,
)
from .model import (
    LABELS,
    AlignmentLabel,
    AlignmentResult,
    Claim,
    Post,
    RefType,
    ResultSource,
)
from .querygen import content_tokens

Pair = tuple[str, str]  # (premise, hypothesis)
Classification = tuple[AlignmentLabel, dict[str, float]]


# -- interfaces ---------------------------------------------------------------

@runtime_checkable
class Embedder(Protocol):
    """Maps texts to fixed-dimension vectors, deterministically."""

    def embed(self, texts: Sequence[str]) -> np.ndarray: ...


@runtime_checkable
class NliClassifier(Protocol):
    """Order-preserving 3-way classification of (premise, hypothesis) pairs."""

    source: ResultSource

    def classify(self, pairs: Sequence[Pair]) -> list[Classification]: ...


@dataclass(frozen=True, slots=True)
class AlignmentConfig:
    similarity_threshold: float = 0.6
    batch_size: int = 32
    inherit_repost_labels: bool = True

    def __post_init__(self):
        if not 0.0 <= self.similarity_threshold <= 1.0:
            raise ValueError("similarity_threshold must be in [0, 1]")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


# -- embeddings ---------------------------------------------------------------

def cosine_similarity(a: Sequence[float], b: Sequence[float]) -> float:
    va = np.asarray(a, dtype=float)
    vb = np.asarray(b, dtype=float)
    if va.shape != vb.shape:
        raise DimensionMismatch(f"dimensions differ: {va.shape} vs {vb.shape}")
    na = float(np.linalg.norm(va))
    nb = float(np.linalg.norm(vb))
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("cosine similarity undefined for zero vectors")
    value = float(np.dot(va, vb) / (na * nb))
    return max(-1.0, min(1.0, value))


class HashingEmbedder:
    """Feature-hashed bag of character trigrams, L2-normalized.

    Deterministic and language-agnostic: crc32 buckets the trigrams, a
    second hash bit supplies the sign.  Texts shorter than a trigram use
    the whole text as the single feature.
    """

    def __init__(self, dim: int = 256):
        if dim < 8:
            raise ValueError("dimension must be >= 8")
        self.dim = dim

    def _features(self, text: str):
        lowered = text.lower()
        if len(lowered) < 3:
            return [lowered] if lowered else []
        return [lowered[i:i + 3] for i in range(len(lowered) - 2)]

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        out = np.zeros((len(texts), self.dim), dtype=float)
        for row, text in enumerate(texts):
            for feature in self._features(text):
                h = zlib.crc32(feature.encode("utf-8"))
                sign = 1.0 if (h >> 8) & 1 else -1.0
                out[row, h % self.dim] += sign
            norm = np.linalg.norm(out[row])
            if norm > 0:
                out[row] /= norm
        return out


class RemoteEmbedder:
    """Client for the optional embedding endpoint (POST /v1/embed)."""

    def __init__(self, endpoint: str, timeout: float = 30.0):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        body = _post_json(f"{self.endpoint}/v1/embed", {"texts": list(texts)}, self.timeout)
        vectors = body.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise ProtocolError("embed response must carry one vector per text")
        try:
            arr = np.asarray(vectors, dtype=float)
        except ValueError as exc:
            raise ProtocolError("embed vectors are ragged or non-numeric") from exc
        if arr.ndim != 2 or not np.isfinite(arr).all():
            raise ProtocolError("embed vectors must be a finite 2-d array")
        return arr


# -- semantic filter ----------------------------------------------------------

def _similarities(posts: Sequence[Post], claim: Claim, embedder: Embedder) -> list[float]:
    vectors = np.asarray(embedder.embed([claim.text] + [p.text for p in posts]), dtype=float)
    claim_vec = vectors[0]
    sims: list[float] = []
    for row in vectors[1:]:
        if np.linalg.norm(row) == 0.0 or np.linalg.norm(claim_vec) == 0.0:
            sims.append(0.0)  # empty text carries no signal
        else:
            sims.append(cosine_similarity(claim_vec, row))
    return sims


def semantic_filter(
    posts: Sequence[Post],
    claim: Claim,
    embedder: Embedder,
    cfg: AlignmentConfig = AlignmentConfig(),
) -> tuple[list[Post], list[tuple[str, float]]]:
    """Partition posts into (kept, dropped) by similarity to the claim."""
    sims = _similarities(posts, claim, embedder)
    kept: list[Post] = []
    dropped: list[tuple[str, float]] = []
    for post, sim in zip(posts, sims):
        if sim >= cfg.similarity_threshold:
            kept.append(post)
        else:
            dropped.append((post.id, sim))
    return kept, dropped


# -- baseline classifier --------------------------------------------------------

NEGATION_CUES = (
    "not", "no", "false", "fake", "falso", "bulo", "desmentido", "fact-check",
)

_CUE_PATTERNS = tuple(
    re.compile(rf"\b{re.escape(cue)}\w*\b" if cue == "fact-check" else rf"\b{re.escape(cue)}\b")
    for cue in NEGATION_CUES
)


def _cue_count(text: str) -> int:
    lowered = text.lower()
    return sum(len(pattern.findall(lowered)) for pattern in _CUE_PATTERNS)


def _scores_for(winner: AlignmentLabel) -> dict[str, float]:
    return {lbl.value: (0.8 if lbl is winner else 0.1) for lbl in LABELS}


def classify_baseline(pairs: Sequence[Pair]) -> list[Classification]:
    """Deterministic lexical stand-in for a real inference model.

    Content-token Jaccard overlap J between premise and hypothesis decides
    relatedness; negation/debunk cues in the premise flip entailment to
    contradiction when their count is odd.
    """
    results: list[Classification] = []
    for premise, hypothesis in pairs:
        p_tokens = set(content_tokens(premise))
        h_tokens = set(content_tokens(hypothesis))
        union = p_tokens | h_tokens
        jaccard = len(p_tokens & h_tokens) / len(union) if union else 0.0
        if jaccard >= 0.5:
            cues = _cue_count(premise)
            if cues == 0:
                label = AlignmentLabel.ENTAILMENT
            elif cues % 2 == 1:
                label = AlignmentLabel.CONTRADICTION
            else:
                label = AlignmentLabel.NEUTRAL
        else:
            label = AlignmentLabel.NEUTRAL
        results.append((label, _scores_for(label)))
    return results


class BaselineClassifier:
    source = ResultSource.BASELINE

    def classify(self, pairs: Sequence[Pair]) -> list[Classification]:
        return classify_baseline(pairs)


# -- remote classifier ----------------------------------------------------------

CLASSIFY_RESPONSE_SCHEMA = {
    "type": "object",
    "required": ["results"],
    "properties": {
        "results": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["label", "scores"],
                "properties": {
                    "label": {"enum": [lbl.value for lbl in LABELS]},
                    "scores": {
                        "type": "object",
                        "required": [lbl.value for lbl in LABELS],
                        "additionalProperties": False,
                        "properties": {
                            lbl.value: {"type": "number", "minimum": 0, "maximum": 1}
                            for lbl in LABELS
                        },
                    },
                },
            },
        }
    },
}


def _post_json(url: str, payload: dict, timeout: float, max_attempts: int = 3,
               backoff: float = 0.5) -> dict:
    """POST with idempotent retries on transient failures."""
    last_timeout = False
    for attempt in range(max_attempts):
        try:
            response = requests.post(url, json=payload, timeout=timeout)
        except requests.Timeout:
            last_timeout = True
        except requests.RequestException:
            last_timeout = False
        else:
            if response.status_code == 200:
                try:
                    body = response.json()
                except ValueError as exc:
                    raise ProtocolError("response body is not JSON") from exc
                if not isinstance(body, dict):
                    raise ProtocolError("response body must be a JSON object")
                return body
            if 400 <= response.status_code < 500:
                raise ProtocolError(f"service rejected request: HTTP {response.status_code}")
            # 5xx: retry
        if attempt + 1 < max_attempts:
            time.sleep(backoff * (2 ** attempt))
    if last_timeout:
        raise RemoteTimeout(f"no answer from {url} after {max_attempts} attempts")
    raise RemoteUnavailable(f"{url} unreachable after {max_attempts} attempts")


def _validate_classification(item: object, index: int) -> Classification:
    if not isinstance(item, dict):
        raise ProtocolError(f"result {index} is not an object")
    label_raw = item.get("label")
    scores = item.get("scores")
    try:
        label = AlignmentLabel(label_raw)
    except ValueError:
        raise ProtocolError(f"result {index}: unknown label {label_raw!r}")
    if not isinstance(scores, dict):
        raise ProtocolError(f"result {index}: missing scores")
    expected = {lbl.value for lbl in LABELS}
    if set(scores) != expected:
        raise ProtocolError(f"result {index}: scores must have keys {sorted(expected)}")
    values = {}
    total = 0.0
    for key, value in scores.items():
        if not isinstance(value, (int, float)) or not 0.0 <= float(value) <= 1.0:
            raise ProtocolError(f"result {index}: score {key}={value!r} outside [0, 1]")
        values[key] = float(value)
        total += float(value)
    if abs(total - 1.0) > 1e-6:
        raise ProtocolError(f"result {index}: scores sum to {total}")
    if values[label.value] < max(values.values()) - 1e-12:
        raise ProtocolError(f"result {index}: label is not the argmax of scores")
    return label, values


def classify_remote(
    endpoint: str,
    pairs: Sequence[Pair],
    timeout: float = 30.0,
    max_attempts: int = 3,
    backoff: float = 0.5,
) -> list[Classification]:
    """Classify pairs through the HTTP wire protocol (POST /v1/classify)."""
    if not pairs:
        return []
    url = endpoint.rstrip("/") + "/v1/classify"
    payload = {"pairs": [{"premise": p, "hypothesis": h} for p, h in pairs]}
    body = _post_json(url, payload, timeout, max_attempts, backoff)
    results = body.get("results")
    if not isinstance(results, list):
        raise ProtocolError("response is missing the results array")
    if len(results) != len(pairs):
        raise ProtocolError(f"expected {len(pairs)} results, got {len(results)}")
    return [_validate_classification(item, i) for i, item in enumerate(results)]


class RemoteClassifier:
    source = ResultSource.REMOTE

    def __init__(self, endpoint: str, timeout: float = 30.0, max_attempts: int = 3,
                 backoff: float = 0.5):
        self.endpoint = endpoint
        self.timeout = timeout
        self.max_attempts = max_attempts
        self.backoff = backoff

    def classify(self, pairs: Sequence[Pair]) -> list[Classification]:
        return classify_remote(self.endpoint, pairs, self.timeout,
                               self.max_attempts, self.backoff)


# -- end-to-end labeling ---------------------------------------------------------

def is_pure_repost(post: Post) -> bool:
    """A bare share: single retweet reference, no own text beyond "RT @"."""
    if len(post.references) != 1 or post.references[0].ref_type is not RefType.RETWEETED:
        return False
    return not post.text.strip() or post.text.startswith("RT @")


def _chunks(seq: list, size: int):
    for i in range(0, len(seq), size):
        yield seq[i:i + size]


def _neutral_result(post_id: str, similarity: float, source: ResultSource) -> AlignmentResult:
    scores = {lbl.value: (1.0 if lbl is AlignmentLabel.NEUTRAL else 0.0) for lbl in LABELS}
    return AlignmentResult(post_id, AlignmentLabel.NEUTRAL, scores, similarity, source)


def align_posts(
    posts: Sequence[Post],
    claim: Claim,
    embedder: Embedder,
    classifier: NliClassifier,
    cfg: AlignmentConfig = AlignmentConfig(),
) -> dict[str, AlignmentResult]:
    """Label every post; all-or-nothing (errors abort without partial output).

    Posts dropped by the similarity filter are neutral.  Pure reposts
    inherit the label of their nearest classified ancestor when
    ``cfg.inherit_repost_labels`` is set, and are classified on their own
    text otherwise (or when no ancestor was classified in this run).
    """
    if not posts:
        return {}
    by_id = {p.id: p for p in posts}
    sims = dict(zip((p.id for p in posts), _similarities(posts, claim, embedder)))
    source = getattr(classifier, "source", ResultSource.BASELINE)

    inherit_candidates: list[Post] = []
    direct: list[Post] = []
    for post in posts:
        if cfg.inherit_repost_labels and is_pure_repost(post):
            inherit_candidates.append(post)
        else:
            direct.append(post)

    results: dict[str, AlignmentResult] = {}

    def classify_batch(batch: list[Post]) -> None:
        kept = [p for p in batch if sims[p.id] >= cfg.similarity_threshold]
        for post in batch:
            if sims[post.id] < cfg.similarity_threshold:
                results[post.id] = _neutral_result(post.id, sims[post.id], source)
        for chunk in _chunks(kept, cfg.batch_size):
            pairs = [(p.text, claim.text) for p in chunk]
            for post, (label, scores) in zip(chunk, classifier.classify(pairs)):
                results[post.id] = AlignmentResult(post.id, label, scores,
                                                   sims[post.id], source)

    classify_batch(direct)

    def donor_for(post: Post) -> AlignmentResult | None:
        """Nearest non-repost ancestor classified in this run."""
        seen = {post.id}
        current = post
        while True:
            target = current.references[0].target_id
            if target in seen:
                return None  # reference cycle in the data
            seen.add(target)
            ancestor = by_id.get(target)
            if ancestor is None:
                return None
            if not (cfg.inherit_repost_labels and is_pure_repost(ancestor)):
                return results.get(ancestor.id)
            current = ancestor

    own_text: list[Post] = []
    for post in inherit_candidates:
        donor = donor_for(post)
        if donor is None:
            own_text.append(post)
        else:
            results[post.id] = AlignmentResult(post.id, donor.label, dict(donor.scores),
                                               sims[post.id], ResultSource.INHERITED)
    classify_batch(own_text)

    return {p.id: results[p.id] for p in posts}
