"""Claim-to-query pipeline: keyword extraction and the boolean query AST.

The query algebra is deliberately deterministic: given the same keyword
list and the same drop count, the emitted query string is always the
same, disjunct for disjunct.  Keyword *ranking* is the only model-
dependent part and is pluggable through the embedder interface.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from datetime import datetime
from typing import TYPE_CHECKING, Sequence

from .errors import (
    AllTokensStopWords,
    DropTooLarge,
    EmptyClaim,
    EmptyGroup,
    InvalidQuerySpec,
    NoKeywords,
    QueryError,
    QuerySyntaxError,
    QueryTooDeep,
    TooManyKeywords,
    UnbalancedParens,
)
from .model import Claim, ensure_utc
from .numbers import expand_numbers, is_numeral
from .stopwords import STOP_WORDS

if TYPE_CHECKING:
    from .align import Embedder

MAX_DEPTH = 8
MAX_KEYWORDS = 12
DEFAULT_MAX_KEYWORDS = 5
DEFAULT_DROP_K = 1

_TOKEN = re.compile(r"[^\W_]+(?:['’\-][^\W_]+)*", re.UNICODE)


# -- AST ---------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Term:
    text: str

    def __post_init__(self):
        if not self.text:
            raise QueryError("empty term")


@dataclass(frozen=True, slots=True)
class Phrase:
    text: str

    def __post_init__(self):
        if not self.text:
            raise QueryError("empty phrase")


@dataclass(frozen=True, slots=True)
class And:
    children: tuple["QueryExpr", ...]

    def __post_init__(self):
        if len(self.children) < 2:
            raise QueryError("AND needs at least two children")


@dataclass(frozen=True, slots=True)
class Or:
    children: tuple["QueryExpr", ...]

    def __post_init__(self):
        if len(self.children) < 2:
            raise QueryError("OR needs at least two children")


QueryExpr = Term | Phrase | And | Or


def depth(expr: QueryExpr) -> int:
    if isinstance(expr, (Term, Phrase)):
        return 1
    return 1 + max(depth(child) for child in expr.children)


def check_depth(expr: QueryExpr) -> QueryExpr:
    if depth(expr) > MAX_DEPTH:
        raise QueryTooDeep(f"query tree deeper than {MAX_DEPTH}")
    return expr


def normalize(expr: QueryExpr) -> QueryExpr:
    """Flatten nested same-operator nodes (associativity normal form)."""
    if isinstance(expr, (Term, Phrase)):
        return expr
    kind = type(expr)
    flat: list[QueryExpr] = []
    for child in expr.children:
        child = normalize(child)
        if isinstance(child, kind):
            flat.extend(child.children)
        else:
            flat.append(child)
    return kind(tuple(flat))


@dataclass(frozen=True, slots=True)
class Keyword:
    """One extracted search keyword (token or multiword phrase)."""

    text: str
    score: float
    origin_index: int

    def __post_init__(self):
        if not self.text or self.text != self.text.strip():
            raise QueryError(f"bad keyword text {self.text!r}")
        if self.text != self.text.lower():
            raise QueryError(f"keyword must be lowercase: {self.text!r}")


@dataclass(frozen=True, slots=True)
class QuerySpec:
    """A query plus its retrieval window and result cap."""

    expr: QueryExpr
    start_time: datetime | None = None
    end_time: datetime | None = None
    max_results: int = 100

    def __post_init__(self):
        if self.max_results < 1:
            raise InvalidQuerySpec("max_results must be >= 1")
        if self.start_time is not None:
            object.__setattr__(self, "start_time", ensure_utc(self.start_time, "start_time"))
        if self.end_time is not None:
            object.__setattr__(self, "end_time", ensure_utc(self.end_time, "end_time"))
        if self.start_time is not None and self.end_time is not None:
            if self.start_time >= self.end_time:
                raise InvalidQuerySpec("start_time must precede end_time")


# -- keyword extraction -------------------------------------------------------

def tokenize(text: str) -> list[str]:
    """Lowercased word tokens, punctuation stripped, hyphens kept inside."""
    return [m.group(0).lower() for m in _TOKEN.finditer(text)]


def content_tokens(text: str) -> list[str]:
    """Tokens that survive the bundled bilingual stop-word list."""
    return [t for t in tokenize(text) if t not in STOP_WORDS]


def _raw_tokens(text: str) -> list[tuple[str, int]]:
    """(original-case token, position) pairs in claim order."""
    return [(m.group(0), i) for i, m in enumerate(_TOKEN.finditer(text))]


def _capitalized_runs(tokens: list[tuple[str, int]]) -> list[tuple[str, int]]:
    """Multiword phrases detected as runs of >= 2 capitalized tokens."""
    runs: list[tuple[str, int]] = []
    current: list[tuple[str, int]] = []
    for token, pos in tokens + [("", -1)]:
        capitalized = bool(token) and token[0].isupper() and any(c.islower() for c in token[1:])
        contiguous = bool(current) and pos == current[-1][1] + 1
        if capitalized and (not current or contiguous):
            current.append((token, pos))
            continue
        if len(current) >= 2:
            runs.append((" ".join(t.lower() for t, _ in current), current[0][1]))
        current = [(token, pos)] if capitalized else []
    return runs


def extract_keywords(
    claim: Claim,
    max_keywords: int = DEFAULT_MAX_KEYWORDS,
    ranker: "Embedder | None" = None,
) -> list[Keyword]:
    """Most relevant keywords of a claim, stop words removed.

    Without a ranker every keyword scores 1.0 and the order is first
    occurrence in the claim.  With a ranker, each candidate is scored by
    cosine similarity against the whole claim, mapped to [0, 1] via
    (c + 1) / 2, and sorted score-descending (ties: claim order).
    """
    if not claim.text.strip():
        raise EmptyClaim("claim text is empty")
    tokens = _raw_tokens(claim.text)
    phrases = _capitalized_runs(tokens)
    # positions covered by a phrase are folded into that phrase
    covered: set[int] = set()
    for text, start in phrases:
        covered.update(range(start, start + len(text.split())))

    candidates: dict[str, int] = {}
    for text, start in phrases:
        candidates.setdefault(text, start)
    for token, pos in tokens:
        if pos in covered:
            continue
        lowered = token.lower()
        if lowered in STOP_WORDS:
            continue
        candidates.setdefault(lowered, pos)

    if not candidates:
        raise AllTokensStopWords("claim contains no content tokens")

    ordered = sorted(candidates.items(), key=lambda item: item[1])
    if ranker is None:
        keywords = [Keyword(text, 1.0, pos) for text, pos in ordered]
    else:
        texts = [text for text, _ in ordered]
        vectors = ranker.embed([claim.text] + texts)
        from .align import cosine_similarity  # local import; align depends on querygen

        claim_vec = vectors[0]
        scored = []
        for (text, pos), vec in zip(ordered, vectors[1:]):
            cos = cosine_similarity(claim_vec, vec)
            scored.append(Keyword(text, (cos + 1.0) / 2.0, pos))
        keywords = sorted(scored, key=lambda kw: (-kw.score, kw.origin_index))
    return keywords[:max_keywords]


# -- query building -----------------------------------------------------------

def _leaf(keyword: Keyword, expand: bool, language: str) -> QueryExpr:
    if expand and is_numeral(keyword.text):
        forms = expand_numbers(keyword.text, language)
        if len(forms) > 1:
            return Or(tuple(_form_leaf(f) for f in forms))
    return _form_leaf(keyword.text)


def _form_leaf(text: str) -> QueryExpr:
    return Phrase(text) if " " in text else Term(text)


def build_query(
    keywords: Sequence[Keyword],
    drop_k: int = DEFAULT_DROP_K,
    expand_numbers: bool = False,
    language: str = "en",
) -> QueryExpr:
    """Disjunction of all conjunctions that keep ``n - drop_k`` keywords.

    The kept subsets are enumerated in lexicographic order of their index
    sets, which drops the rightmost keyword first and reproduces the
    canonical disjunct order.  ``drop_k`` = 0 yields a single conjunction
    (or a lone leaf for a single keyword).
    """
    n = len(keywords)
    if n == 0:
        raise NoKeywords("no keywords to build a query from")
    if n > MAX_KEYWORDS:
        raise TooManyKeywords(f"{n} keywords exceed the limit of {MAX_KEYWORDS}")
    if drop_k < 0 or drop_k >= n:
        raise DropTooLarge(f"drop_k={drop_k} must satisfy 0 <= drop_k < {n}")

    leaves = [_leaf(kw, expand_numbers, language) for kw in keywords]
    conjunctions: list[QueryExpr] = []
    for kept in itertools.combinations(range(n), n - drop_k):
        members = [leaves[i] for i in kept]
        conjunctions.append(members[0] if len(members) == 1 else And(tuple(members)))
    expr = conjunctions[0] if len(conjunctions) == 1 else Or(tuple(conjunctions))
    return check_depth(expr)


# -- serialization ------------------------------------------------------------

def serialize_query(expr: QueryExpr) -> str:
    """Platform search syntax: uppercase operators, parenthesized groups,
    double-quoted phrases."""
    check_depth(expr)
    if isinstance(expr, Term):
        return expr.text
    if isinstance(expr, Phrase):
        return f'"{expr.text}"'
    joiner = " AND " if isinstance(expr, And) else " OR "
    return "(" + joiner.join(serialize_query(child) for child in expr.children) + ")"


# -- parsing ------------------------------------------------------------------

_LPAREN = "("
_RPAREN = ")"


def _lex(source: str) -> list[tuple[str, str, int]]:
    """(kind, value, offset) tokens; kinds: lparen rparen op term phrase."""
    tokens: list[tuple[str, str, int]] = []
    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        if ch.isspace():
            i += 1
            continue
        if ch == _LPAREN:
            tokens.append(("lparen", ch, i))
            i += 1
            continue
        if ch == _RPAREN:
            tokens.append(("rparen", ch, i))
            i += 1
            continue
        if ch == '"':
            end = source.find('"', i + 1)
            if end < 0:
                raise QuerySyntaxError("unterminated phrase", i)
            body = source[i + 1:end]
            if not body.strip():
                raise QuerySyntaxError("empty phrase", i)
            tokens.append(("phrase", body, i))
            i = end + 1
            continue
        j = i
        while j < n and not source[j].isspace() and source[j] not in '()"':
            j += 1
        word = source[i:j]
        if word in ("AND", "OR"):
            tokens.append(("op", word, i))
        else:
            tokens.append(("term", word, i))
        i = j
    return tokens


class _Parser:
    def __init__(self, tokens: list[tuple[str, str, int]], length: int):
        self.tokens = tokens
        self.pos = 0
        self.length = length

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self):
        token = self.peek()
        if token is not None:
            self.pos += 1
        return token

    def parse_expr(self) -> QueryExpr:
        children = [self.parse_conjunction()]
        while True:
            token = self.peek()
            if token is None or token[0] != "op" or token[1] != "OR":
                break
            self.take()
            children.append(self.parse_conjunction())
        return children[0] if len(children) == 1 else Or(tuple(children))

    def parse_conjunction(self) -> QueryExpr:
        children = [self.parse_atom()]
        while True:
            token = self.peek()
            if token is None or token[0] != "op" or token[1] != "AND":
                break
            self.take()
            children.append(self.parse_atom())
        return children[0] if len(children) == 1 else And(tuple(children))

    def parse_atom(self) -> QueryExpr:
        token = self.take()
        if token is None:
            raise QuerySyntaxError("unexpected end of query", self.length)
        kind, value, offset = token
        if kind == "term":
            return Term(value)
        if kind == "phrase":
            return Phrase(value)
        if kind == "lparen":
            inner_token = self.peek()
            if inner_token is not None and inner_token[0] == "rparen":
                raise EmptyGroup("empty group", offset)
            expr = self.parse_expr()
            closing = self.take()
            if closing is None or closing[0] != "rparen":
                raise UnbalancedParens("missing closing parenthesis", offset)
            return expr
        if kind == "rparen":
            raise UnbalancedParens("unmatched closing parenthesis", offset)
        raise QuerySyntaxError(f"unexpected {value!r}", offset)


def parse_query(source: str) -> QueryExpr:
    """Parse the platform search syntax back into an AST.

    ``parse_query(serialize_query(e))`` equals ``normalize(e)`` for every
    valid expression.
    """
    if not source.strip():
        raise QuerySyntaxError("empty query", 0)
    parser = _Parser(_lex(source), len(source))
    expr = parser.parse_expr()
    trailing = parser.peek()
    if trailing is not None:
        kind, value, offset = trailing
        if kind == "rparen":
            raise UnbalancedParens("unmatched closing parenthesis", offset)
        raise QuerySyntaxError(f"unexpected {value!r} after end of expression", offset)
    return check_depth(normalize(expr))
