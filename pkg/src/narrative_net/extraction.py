"""Prompt construction, token budgeting and structured-output extraction."""

from __future__ import annotations

import json
import logging
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from importlib import resources
from typing import Callable, Iterable, Mapping, Protocol, Sequence

from .errors import (
    ContentFiltered,
    EmptyText,
    ExtractionError,
    MalformedOutput,
    RecordError,
    TooLong,
    TransportFailure,
)
from .taxonomy import (
    RECORD_FIELDS,
    Affinity,
    CharacterNetwork,
    CoarseCategory,
    FineCategory,
    RelationshipRecord,
    dedupe_network,
    parse_record,
    repair_network,
)

log = logging.getLogger(__name__)

TEXT_BEGIN = "[begin text]"
TEXT_END = "[end text]"
TOKENS_PER_WORD = 3.2

Estimator = Callable[[str], int]


@lru_cache(maxsize=None)
def _template(name: str) -> str:
    return resources.files(__package__).joinpath("templates", name).read_text(encoding="utf-8")


def _render(text: str) -> str:
    body = _template("task_prompt.txt").replace("{js}", _template("format_block.txt"), 1)
    head, tail = body.split("{text}", 1)
    return (head + text + tail).rstrip()


def build_prompt(text: str) -> str:
    """Render the annotation prompt around a narrative text."""
    if not text:
        raise EmptyText()
    return _render(text)


def prompt_text(prompt: str) -> str:
    """Recover the narrative text embedded by :func:`build_prompt`."""
    start = prompt.index(TEXT_BEGIN + "\n") + len(TEXT_BEGIN) + 1
    end = prompt.rindex("\n" + TEXT_END)
    return prompt[start:end]


def output_schema() -> dict:
    """JSON Schema for one relationship record.

    The coarse enum lists familial in place of the duplicated "social" entry
    of the original annotation schema.
    """
    return {
        "$schema": "http://json-schema.org/draft-07/schema#",
        "$comment": (
            'coarse_category enum corrected from ["professional", "social", "social"] '
            "to include \"familial\", as required by the fine labels"
        ),
        "type": "object",
        "title": "Character Relationship Schema",
        "description": "Schema for describing relationships between literary characters",
        "required": list(RECORD_FIELDS),
        "properties": {
            "character_1": {"type": "string", "description": "First character in the relationship"},
            "character_2": {"type": "string", "description": "Second character in the relationship"},
            "affinity": {
                "type": "string",
                "enum": [a.value for a in Affinity],
                "description": "The nature of the relationship between characters",
            },
            "coarse_category": {
                "type": "string",
                "enum": [
                    CoarseCategory.PROFESSIONAL.value,
                    CoarseCategory.SOCIAL.value,
                    CoarseCategory.FAMILIAL.value,
                ],
                "description": "Broad category of the relationship",
            },
            "fine_category": {
                "type": "string",
                "description": "Specific type of relationship",
                "enum": [f.value for f in FineCategory],
            },
        },
        "additionalProperties": False,
    }


def response_schema() -> dict:
    """Schema for the full model response: an array of records."""
    return {"type": "array", "items": output_schema()}


# token budget


def estimate_tokens(text: str) -> int:
    """ceil(words * 3.2), computed in integers."""
    words = len(text.split())
    return -(-words * 16 // 5)


@dataclass(frozen=True)
class TokenBudget:
    max_context_tokens: int = 1_000_000
    max_output_tokens: int = 8_000

    def __post_init__(self):
        if self.max_context_tokens <= 0 or self.max_output_tokens <= 0:
            raise ValueError("token budgets must be positive")
        if self.max_output_tokens > self.max_context_tokens:
            raise ValueError("output budget exceeds context budget")


def prompt_overhead(estimator: Estimator = estimate_tokens) -> int:
    """Tokens spent on the fixed template when the text is empty."""
    return estimator(_render(""))


def check_budget(tokens: int, budget: TokenBudget, overhead: int = 0) -> None:
    """Raise TooLong when the prompt would not fit in the context window."""
    if tokens + overhead > budget.max_context_tokens:
        raise TooLong(tokens + overhead, budget.max_context_tokens)


# client interface


class FinishReason(str, Enum):
    COMPLETED = "completed"
    OUTPUT_LIMIT = "output-limit"
    CONTENT_FILTER = "content-filter"
    ERROR = "error"


@dataclass(frozen=True)
class ExtractionRequest:
    volume_id: str
    text: str
    prompt: str
    schema: dict


@dataclass(frozen=True)
class ModelResponse:
    text: str
    finish_reason: FinishReason = FinishReason.COMPLETED


class StructuredOutputClient(Protocol):
    def complete(self, request: ExtractionRequest, max_output_tokens: int) -> ModelResponse:
        """Return the raw response; may raise TransportFailure."""


class MockClient:
    """Replays scripted responses keyed by volume id.

    Each script entry is ``{"text": str, "finish_reason": str}``; ``"response"``
    may be given instead of ``"text"`` and is serialized to JSON. An entry may
    also be a list of such dicts, consumed one per call (last one repeats).
    """

    def __init__(self, scripts: Mapping[str, object]):
        self._scripts = dict(scripts)
        self.calls: dict[str, int] = {}

    @classmethod
    def from_file(cls, path) -> "MockClient":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh))

    def complete(self, request: ExtractionRequest, max_output_tokens: int) -> ModelResponse:
        # dict ops are atomic under the GIL; per-volume counters never collide
        n = self.calls.get(request.volume_id, 0)
        self.calls[request.volume_id] = n + 1
        script = self._scripts.get(request.volume_id)
        if script is None:
            raise TransportFailure(f"no scripted response for {request.volume_id!r}")
        if isinstance(script, list):
            script = script[min(n, len(script) - 1)]
        if "response" in script:
            text = json.dumps(script["response"])
        else:
            text = script.get("text", "")
        return ModelResponse(text, FinishReason(script.get("finish_reason", "completed")))


class HttpClient:
    """Generic JSON-over-HTTP structured-output backend.

    POSTs ``{"model", "prompt", "schema", "max_output_tokens"}`` and expects
    ``{"text", "finish_reason"}`` back.
    """

    def __init__(self, url: str, api_key: str | None = None, model: str | None = None,
                 timeout: float = 600.0, transport=None):
        import httpx

        headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self.url = url
        self.model = model
        self._client = httpx.Client(headers=headers, timeout=timeout, transport=transport)
        self._httpx = httpx

    @classmethod
    def from_env(cls, model: str | None = None, **kwargs) -> "HttpClient":
        url = os.environ.get("NARRATIVE_NET_API_URL")
        if not url:
            raise ValueError("NARRATIVE_NET_API_URL is not set")
        return cls(url, os.environ.get("NARRATIVE_NET_API_KEY"),
                   model or os.environ.get("NARRATIVE_NET_MODEL"), **kwargs)

    def complete(self, request: ExtractionRequest, max_output_tokens: int) -> ModelResponse:
        payload = {
            "model": self.model,
            "prompt": request.prompt,
            "schema": request.schema,
            "max_output_tokens": max_output_tokens,
        }
        try:
            resp = self._client.post(self.url, json=payload)
            resp.raise_for_status()
            body = resp.json()
        except (self._httpx.HTTPError, ValueError) as exc:
            raise TransportFailure(str(exc)) from exc
        try:
            reason = FinishReason(body.get("finish_reason", "completed"))
        except ValueError:
            raise TransportFailure(f"unknown finish reason {body.get('finish_reason')!r}") from None
        return ModelResponse(body.get("text", ""), reason)


# response parsing

_FENCE = re.compile(r"^\s*```(?:json)?\s*|\s*```\s*$")


def _salvage_objects(raw: str) -> list:
    """Complete top-level objects from a possibly truncated JSON array."""
    decoder = json.JSONDecoder()
    start = raw.find("[")
    if start < 0:
        return []
    pos = start + 1
    items = []
    while True:
        while pos < len(raw) and raw[pos] in " \t\r\n,":
            pos += 1
        if pos >= len(raw) or raw[pos] == "]":
            break
        try:
            obj, pos = decoder.raw_decode(raw, pos)
        except json.JSONDecodeError:
            break
        items.append(obj)
    return items


def parse_model_output(raw: str) -> tuple[list[RelationshipRecord], int]:
    """Tolerant parse of a model response.

    Invalid records are dropped and counted. A truncated array keeps its
    complete leading objects.
    """
    text = _FENCE.sub("", raw)
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = _salvage_objects(text)
        if not data:
            raise MalformedOutput() from None
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list):
        raise MalformedOutput(f"expected a JSON array, got {type(data).__name__}")
    records = []
    dropped = 0
    for item in data:
        try:
            if not isinstance(item, Mapping):
                raise RecordError("not an object")
            records.append(parse_record(item))
        except RecordError:
            dropped += 1
    if dropped and not records:
        raise MalformedOutput(f"all {dropped} records invalid")
    return records, dropped


@dataclass
class ExtractionOutcome:
    volume_id: str
    network: CharacterNetwork | None = None
    malformed_records_dropped: int = 0
    truncated: bool = False
    repaired_records: int = 0
    duplicate_pairs_dropped: int = 0
    failure: ExtractionError | None = None
    attempts: int = 0

    @property
    def ok(self) -> bool:
        return self.failure is None


def extract_network(volume_id: str, text: str, client: StructuredOutputClient,
                    budget: TokenBudget = TokenBudget(),
                    estimator: Estimator = estimate_tokens) -> ExtractionOutcome:
    """Run one volume through the client. Per-volume failures are returned, not raised."""
    outcome = ExtractionOutcome(volume_id)
    try:
        check_budget(estimator(text), budget, prompt_overhead(estimator))
        request = ExtractionRequest(volume_id, text, build_prompt(text), response_schema())
        response = None
        for attempt in (1, 2):
            outcome.attempts = attempt
            try:
                response = client.complete(request, budget.max_output_tokens)
                if response.finish_reason is FinishReason.ERROR:
                    raise TransportFailure(response.text or "backend reported an error")
                break
            except TransportFailure:
                if attempt == 2:
                    raise
                log.info("retrying %s after transport failure", volume_id)
        if response.finish_reason is FinishReason.CONTENT_FILTER:
            raise ContentFiltered(response.text or "response blocked by content filter")
        outcome.truncated = response.finish_reason is FinishReason.OUTPUT_LIMIT
        records, outcome.malformed_records_dropped = parse_model_output(response.text)
        net, outcome.repaired_records = repair_network(CharacterNetwork(volume_id, records))
        outcome.network, outcome.duplicate_pairs_dropped = dedupe_network(net)
    except ExtractionError as exc:
        outcome.failure = exc
    return outcome


def extract_corpus(volumes: Iterable[tuple[str, str]], client: StructuredOutputClient,
                   budget: TokenBudget = TokenBudget(), estimator: Estimator = estimate_tokens,
                   workers: int = 4) -> list[ExtractionOutcome]:
    """Bounded-parallel map over (volume_id, text); results in input order."""
    vols: Sequence[tuple[str, str]] = list(volumes)

    def run(item):
        return extract_network(item[0], item[1], client, budget, estimator)

    if workers <= 1:
        return [run(v) for v in vols]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, vols))
