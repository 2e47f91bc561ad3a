"""Exception types shared across the package."""

from __future__ import annotations


class NarrativeNetError(Exception):
    """Base class for every error raised by this package."""


# taxonomy / record parsing


class RecordError(NarrativeNetError):
    """A raw relationship record does not satisfy the schema."""


class MissingField(RecordError):
    def __init__(self, name: str):
        super().__init__(f"missing required field {name!r}")
        self.name = name


class InvalidEnum(RecordError):
    def __init__(self, field: str, value: object):
        super().__init__(f"invalid value {value!r} for field {field!r}")
        self.field = field
        self.value = value


class EmptyName(RecordError):
    def __init__(self, detail: str = "character name is empty"):
        super().__init__(detail)


# extraction


class ExtractionError(NarrativeNetError):
    reason = "error"


class EmptyText(ExtractionError):
    def __init__(self):
        super().__init__("narrative text is empty")


class TooLong(ExtractionError):
    reason = "too_long"

    def __init__(self, tokens: int, limit: int):
        super().__init__(f"{tokens} tokens exceed the context limit of {limit}")
        self.tokens = tokens
        self.limit = limit


class ContentFiltered(ExtractionError):
    reason = "content_filtered"

    def __init__(self, detail: str = "response blocked by content filter"):
        super().__init__(detail)


class TransportFailure(ExtractionError):
    reason = "transport"

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class MalformedOutput(ExtractionError):
    reason = "malformed"

    def __init__(self, detail: str = "no complete relationship record recoverable"):
        super().__init__(detail)


# graph / metrics / community


class SelfLoop(NarrativeNetError):
    def __init__(self, volume_id: str, pair: tuple[str, str]):
        super().__init__(f"self-pair {pair!r} in volume {volume_id!r}")
        self.volume_id = volume_id
        self.pair = pair


class EmptyGraph(NarrativeNetError):
    def __init__(self):
        super().__init__("graph has no nodes")


class NoEdges(NarrativeNetError):
    def __init__(self):
        super().__init__("graph has no edges")


class NoRecords(NarrativeNetError):
    def __init__(self):
        super().__init__("network has no records")


class UnassignedNode(NarrativeNetError):
    def __init__(self, node: str):
        super().__init__(f"node {node!r} has no community assignment")
        self.node = node


class NoConvergence(NarrativeNetError):
    def __init__(self, max_iter: int, last=None):
        super().__init__(f"power iteration did not converge in {max_iter} iterations")
        self.max_iter = max_iter
        self.last = last


# stats


class StatsError(NarrativeNetError):
    pass


class SampleTooSmall(StatsError):
    pass


class ZeroVariance(StatsError):
    pass


class LengthMismatch(StatsError):
    pass


class DomainError(StatsError):
    pass


class MissingMetadata(StatsError):
    pass


class TooFewDecades(StatsError):
    pass


# validation


class NoMatches(NarrativeNetError):
    def __init__(self):
        super().__init__("no matched record pairs to score")
