"""Model backends: a real transformer checkpoint or a lexical stand-in.

The wire protocol, not the weights, is the contract: both backends map a
batch of (premise, hypothesis) pairs to lowercase entailment /
contradiction / neutral labels with a probability distribution.
"""

from __future__ import annotations

import re
from typing import Protocol, Sequence

LABELS = ("entailment", "contradiction", "neutral")

Pair = tuple[str, str]


class ModelLoadFailure(RuntimeError):
    pass


class NliBackend(Protocol):
    name: str

    def classify(self, pairs: Sequence[Pair]) -> list[dict]: ...


_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)
_NEGATION = re.compile(
    r"\b(not|no|never|false|fake|wrong|falso|bulo|desmentido|hoax|debunk\w*|fact-check\w*)\b"
)
# function words and negation markers carry no content; keeping them in the
# overlap would dilute short claims below the relatedness threshold
_NON_CONTENT = frozenset(
    "a an the it this that these those is are was were be been being do does did "
    "and or but if of to in on at by for with from as than then there here "
    "el la los las un una es son fue que de en a y o al del por para con "
    "not no never false fake wrong falso bulo desmentido hoax".split()
)


def _result(label: str, confidence: float) -> dict:
    rest = (1.0 - confidence) / 2.0
    scores = {name: (confidence if name == label else rest) for name in LABELS}
    return {"label": label, "scores": scores}


class LexicalBackend:
    """Deterministic heuristic backend for offline runs and protocol tests.

    Token overlap decides whether the premise talks about the hypothesis
    at all; an odd number of negation markers flips entailment to
    contradiction.
    """

    name = "lexical"

    @staticmethod
    def _content(text: str) -> set[str]:
        return {t.lower() for t in _TOKEN.findall(text)} - _NON_CONTENT

    def classify(self, pairs: Sequence[Pair]) -> list[dict]:
        out = []
        for premise, hypothesis in pairs:
            p_tokens = self._content(premise)
            h_tokens = self._content(hypothesis)
            union = p_tokens | h_tokens
            overlap = len(p_tokens & h_tokens) / len(union) if union else 0.0
            if overlap < 0.5:
                out.append(_result("neutral", 0.7))
                continue
            negations = len(_NEGATION.findall(premise.lower()))
            if negations % 2 == 1:
                out.append(_result("contradiction", 0.76))
            elif negations:
                out.append(_result("neutral", 0.6))
            else:
                out.append(_result("entailment", 0.76))
        return out


class TransformersBackend:
    """Wraps a pretrained 3-way NLI checkpoint from the local cache or hub."""

    name = "transformers"

    def __init__(self, model_id: str, device: str = "cpu"):
        try:
            import torch
            from transformers import AutoModelForSequenceClassification, AutoTokenizer
        except ImportError as exc:
            raise ModelLoadFailure(f"transformers/torch not installed: {exc}") from exc
        try:
            self._tokenizer = AutoTokenizer.from_pretrained(model_id)
            self._model = AutoModelForSequenceClassification.from_pretrained(model_id)
        except Exception as exc:
            raise ModelLoadFailure(f"cannot load model {model_id!r}: {exc}") from exc
        self._torch = torch
        self._model.eval()
        self._model.to(device)
        self._device = device
        self._label_map = self._build_label_map()

    def _build_label_map(self) -> dict[int, str]:
        id2label = getattr(self._model.config, "id2label", {}) or {}
        mapping: dict[int, str] = {}
        for index, raw in id2label.items():
            name = str(raw).lower()
            for label in LABELS:
                if label in name:
                    mapping[int(index)] = label
        if set(mapping.values()) != set(LABELS):
            raise ModelLoadFailure(
                f"model labels {id2label!r} do not cover entailment/contradiction/neutral"
            )
        return mapping

    def classify(self, pairs: Sequence[Pair]) -> list[dict]:
        torch = self._torch
        premises = [p for p, _ in pairs]
        hypotheses = [h for _, h in pairs]
        encoded = self._tokenizer(premises, hypotheses, padding=True, truncation=True,
                                  max_length=512, return_tensors="pt").to(self._device)
        with torch.no_grad():
            logits = self._model(**encoded).logits
        probs = torch.softmax(logits, dim=-1).cpu()
        out = []
        for row in probs:
            scores = {self._label_map[i]: float(row[i]) for i in range(len(row))}
            total = sum(scores.values())
            scores = {k: v / total for k, v in scores.items()}
            label = max(scores, key=scores.get)
            out.append({"label": label, "scores": scores})
        return out


def load_backend(kind: str, model_id: str) -> NliBackend:
    if kind == "lexical":
        return LexicalBackend()
    if kind == "transformers":
        return TransformersBackend(model_id)
    raise ModelLoadFailure(f"unknown backend {kind!r}")
