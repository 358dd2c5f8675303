"""Exception hierarchy for the whole pipeline.

Two broad families matter to callers: ``InputError`` (bad data, bad flags,
bad files; CLI exit code 1) and ``RemoteError`` (an external service
misbehaved; CLI exit code 2).
"""

from __future__ import annotations


class DistrackError(Exception):
    """Base class for all errors raised by this package."""


class InputError(DistrackError):
    """Invalid input data, configuration, or arguments."""


class RemoteError(DistrackError):
    """A remote service (classifier, embedder, post source) failed."""


# -- core model ------------------------------------------------------------

class InvalidClaim(InputError):
    pass


class InvalidTimestamp(InputError):
    pass


class NegativeCount(InputError):
    pass


class DuplicateReferenceType(InputError):
    pass


class InvalidResult(InputError):
    """An alignment result violates its probability/label invariants."""


# -- query generation ------------------------------------------------------

class QueryError(InputError):
    pass


class EmptyClaim(QueryError):
    pass


class AllTokensStopWords(QueryError):
    pass


class NoKeywords(QueryError):
    pass


class DropTooLarge(QueryError):
    pass


class TooManyKeywords(QueryError):
    pass


class QueryTooDeep(QueryError):
    pass


class QuerySyntaxError(QueryError):
    """Malformed query string; ``offset`` is the byte offset of the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnbalancedParens(QuerySyntaxError):
    pass


class EmptyGroup(QuerySyntaxError):
    pass


class InvalidQuerySpec(QueryError):
    pass


# -- ingest ----------------------------------------------------------------

class NotJsonl(InputError):
    pass


class InvalidWindow(InputError):
    pass


class AuthFailed(RemoteError):
    pass


class RateLimited(RemoteError):
    def __init__(self, retry_after: float, message: str = "rate limited"):
        super().__init__(f"{message} (retry after {retry_after}s)")
        self.retry_after = retry_after


class SourceUnavailable(RemoteError):
    pass


# -- alignment -------------------------------------------------------------

class DimensionMismatch(InputError):
    pass


class ZeroVector(InputError):
    pass


class ProtocolError(RemoteError):
    """The remote classifier/embedder answered outside its wire contract."""


class RemoteUnavailable(RemoteError):
    pass


class RemoteTimeout(RemoteError):
    pass


# -- cascade / layout / render ----------------------------------------------

class MissingAlignment(InputError):
    def __init__(self, post_id: str):
        super().__init__(f"no alignment result for post {post_id!r}")
        self.post_id = post_id


class EmptyGraph(InputError):
    pass


class LayoutIncomplete(InputError):
    def __init__(self, post_id: str):
        super().__init__(f"layout has no entry for post {post_id!r}")
        self.post_id = post_id
