"""LLM-backed generation of reasoning-and-acting dialogues from seed turns.

A generation client is anything with ``send(prompt, params) -> str``. The
replay client answers from a recorded file for hermetic runs; the HTTP
client talks to a chat-completions endpoint. Replies that fail to parse are
retried with a corrective line appended to the prompt; transport failures
are never retried here.
"""

from __future__ import annotations

import json
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Mapping, Protocol, Sequence, Tuple

from .calls import render_call
from .errors import ParseError, ToolkitError
from .model import (
    DomainTag,
    FunctionRegistry,
    InstructionSample,
    ReactDialogue,
    compact_signature,
)
from .prompts import (
    ACTION_TASK_INSTRUCTION,
    CORRECTIVE_RETRY_LINE,
    GENERATION_EXAMPLE,
    GENERATION_OUTPUT_FORMAT,
    GENERATION_ROLE,
    GENERATION_TASK_INFORMATION,
    RESPONSE_TASK_INSTRUCTION,
    TRACE_FORMAT_INSTRUCTION,
)
from .react import parse_trace, render_history, render_turn_prefix, wrap_history


class TransportError(ToolkitError):
    """The client could not obtain a reply (network, HTTP, replay miss)."""


class GenerationFailed(ToolkitError):
    """Every attempt produced an unparseable reply."""

    def __init__(self, seed_id: str, attempts: int, last_error: Exception) -> None:
        self.seed_id = seed_id
        self.attempts = attempts
        self.last_error = last_error
        super().__init__(
            f"generation for seed {seed_id!r} failed after {attempts} attempt(s): {last_error}"
        )


@dataclass
class GenParams:
    """Decoding and retry settings for one generation call."""

    model_id: str = "mock"
    temperature: float = 0.7
    max_output_tokens: int = 2048
    timeout_s: float = 60.0
    retries: int = 2

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_output_tokens <= 0:
            raise ValueError("max_output_tokens must be positive")
        if self.retries < 0:
            raise ValueError("retries must be >= 0")


@dataclass(frozen=True)
class SeedDialogue:
    """Source dialogue skeleton: alternating user/system utterances."""

    id: str
    turns: Tuple[Tuple[str, str], ...]
    services: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.turns:
            raise ValueError("seed dialogue must contain at least one turn")


def seed_from_doc(doc: Mapping[str, Any]) -> SeedDialogue:
    turns = tuple((t["user"], t["system"]) for t in doc["turns"])
    return SeedDialogue(
        id=str(doc["id"]), turns=turns, services=tuple(doc.get("services", ()))
    )


class GenerationClient(Protocol):
    def send(self, prompt: str, params: GenParams) -> str:
        ...


class ReplayClient:
    """Replays recorded replies for hermetic tests and pipeline fixtures.

    The replay file is line-delimited JSON. Entries with a ``prompt`` field
    answer only that exact prompt (reusable); entries with ``prompt: null``
    form a queue consumed in file order when no exact match exists. A miss
    raises TransportError.
    """

    def __init__(self, entries: Sequence[Mapping[str, Any]]) -> None:
        self._by_prompt: Dict[str, str] = {}
        self._queue: List[str] = []
        for entry in entries:
            if entry.get("prompt") is None:
                self._queue.append(entry["reply"])
            else:
                self._by_prompt[entry["prompt"]] = entry["reply"]
        self._lock = threading.Lock()
        self.calls = 0

    @classmethod
    def from_file(cls, path: str | Path) -> "ReplayClient":
        entries = []
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    entries.append(json.loads(line))
        return cls(entries)

    def send(self, prompt: str, params: GenParams) -> str:
        with self._lock:
            self.calls += 1
            if prompt in self._by_prompt:
                return self._by_prompt[prompt]
            if self._queue:
                return self._queue.pop(0)
        raise TransportError("no replay entry for prompt")


class HttpGenerationClient:
    """Minimal chat-completions client over HTTP."""

    def __init__(
        self,
        endpoint: str,
        api_key: str | None = None,
        requests_per_minute: float | None = None,
    ) -> None:
        import httpx

        self._endpoint = endpoint
        self._headers = {"Content-Type": "application/json"}
        if api_key:
            self._headers["Authorization"] = f"Bearer {api_key}"
        self._client = httpx.Client()
        self._min_interval = 60.0 / requests_per_minute if requests_per_minute else 0.0
        self._last_send = 0.0
        self._lock = threading.Lock()

    def _throttle(self) -> None:
        if self._min_interval <= 0:
            return
        with self._lock:
            now = time.monotonic()
            wait = self._last_send + self._min_interval - now
            if wait > 0:
                time.sleep(wait)
            self._last_send = time.monotonic()

    def send(self, prompt: str, params: GenParams) -> str:
        import httpx

        self._throttle()
        payload = {
            "model": params.model_id,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": params.temperature,
            "max_tokens": params.max_output_tokens,
        }
        try:
            response = self._client.post(
                self._endpoint,
                json=payload,
                headers=self._headers,
                timeout=params.timeout_s,
            )
            response.raise_for_status()
            doc = response.json()
            return doc["choices"][0]["message"]["content"]
        except httpx.HTTPError as exc:
            raise TransportError(f"generation request failed: {exc}") from exc
        except (KeyError, IndexError, ValueError) as exc:
            raise TransportError(f"malformed generation response: {exc}") from exc


@dataclass
class GenerationReport:
    """Filled in by generate_cra when passed as a sink."""

    seed_id: str = ""
    attempts: int = 0
    parse_failures: int = 0


def build_generation_prompt(seed: SeedDialogue, registry: FunctionRegistry) -> str:
    """Assemble the generation prompt: role, task rules, numbered functions,
    output format, worked example, then the seed's turns under # User Input."""
    function_lines = "\n".join(
        f"{i}. {compact_signature(schema)}" for i, schema in enumerate(registry, start=1)
    )
    seed_lines = "\n".join(
        f"User: {user}\nSystem: {system}" for user, system in seed.turns
    )
    return (
        f"{GENERATION_ROLE}\n\n"
        f"{GENERATION_TASK_INFORMATION}\n\n"
        f"# Available Functions:\n{function_lines}\n\n"
        f"{GENERATION_OUTPUT_FORMAT}\n\n"
        f"Below is an example of the format:\n\n"
        f"{GENERATION_EXAMPLE}\n\n"
        f"# User Input:\n{seed_lines}\n"
    )


def generate_cra(
    seed: SeedDialogue,
    registry: FunctionRegistry,
    client: GenerationClient,
    params: GenParams,
    report: GenerationReport | None = None,
) -> ReactDialogue:
    """Generate and parse one dialogue for a seed.

    Parse failures are retried up to ``params.retries`` times with a
    corrective line appended to the prompt; exhaustion raises
    GenerationFailed. TransportError propagates untouched. The result is
    tagged with the seed id and the registry name.
    """
    prompt = build_generation_prompt(seed, registry)
    last_error: Exception | None = None
    attempts = 0
    for _ in range(params.retries + 1):
        attempts += 1
        reply = client.send(prompt, params)
        try:
            dialogue = parse_trace(reply, registry, dialogue_id=seed.id)
        except ParseError as exc:
            last_error = exc
            if report is not None:
                report.seed_id = seed.id
                report.attempts = attempts
                report.parse_failures += 1
            prompt = f"{prompt}\n\n{CORRECTIVE_RETRY_LINE}"
            continue
        if report is not None:
            report.seed_id = seed.id
            report.attempts = attempts
        return dialogue
    assert last_error is not None
    raise GenerationFailed(seed.id, attempts, last_error)


def generate_corpus(
    seeds: Sequence[SeedDialogue],
    registry: FunctionRegistry,
    client: GenerationClient,
    params: GenParams,
    concurrency: int = 1,
    reports: List[GenerationReport] | None = None,
) -> List[ReactDialogue]:
    """Generate dialogues for every seed, preserving seed order.

    Fan-out is bounded by ``concurrency``; the first failure propagates
    (annotated with the seed index by the pipeline layer).
    """
    sinks = [GenerationReport() for _ in seeds]
    if concurrency <= 1 or len(seeds) <= 1:
        dialogues = [
            generate_cra(seed, registry, client, params, sinks[i])
            for i, seed in enumerate(seeds)
        ]
    else:
        with ThreadPoolExecutor(max_workers=concurrency) as pool:
            futures = [
                pool.submit(generate_cra, seed, registry, client, params, sinks[i])
                for i, seed in enumerate(seeds)
            ]
            dialogues = [f.result() for f in futures]
    if reports is not None:
        reports.extend(sinks)
    return dialogues


# ---------------------------------------------------------------------------
# Turn splitting
# ---------------------------------------------------------------------------

def _compact_tools_block(registry: FunctionRegistry) -> str:
    lines = "\n".join(
        f"{i}. {compact_signature(schema)}" for i, schema in enumerate(registry, start=1)
    )
    return f"[BEGIN OF AVAILABLE TOOLS]\n{lines}\n[END OF AVAILABLE TOOLS]"


def split_turn_samples(
    dialogue: ReactDialogue,
    registry: FunctionRegistry,
    action_instruction: str = ACTION_TASK_INSTRUCTION,
    response_instruction: str = RESPONSE_TASK_INSTRUCTION,
) -> List[InstructionSample]:
    """Explode a dialogue into per-turn training samples.

    Every API turn yields an action sample (predict the call from user +
    first thought) and a response sample (predict the system line from the
    full pre-response prefix); every direct turn yields one response sample.
    The instruction for turn k embeds the first k-1 turns as a delimited
    history block; turn 1 carries no history block at all.
    """
    samples: List[InstructionSample] = []
    tools_block = _compact_tools_block(registry)
    for index, turn in enumerate(dialogue.turns):
        history = render_history(dialogue, index)
        history_blocks = [wrap_history(history)] if history else []
        if turn.action is not None:
            action_sample = InstructionSample(
                instruction="\n\n".join(
                    [action_instruction, tools_block, TRACE_FORMAT_INSTRUCTION]
                    + history_blocks
                ),
                input=render_turn_prefix(turn, include_api=False),
                output="Action: " + render_call(turn.action),
                domain_tag=DomainTag.CRA_ACTION,
            )
            samples.append(action_sample)
        response_sample = InstructionSample(
            instruction="\n\n".join(
                [response_instruction, TRACE_FORMAT_INSTRUCTION] + history_blocks
            ),
            input=render_turn_prefix(turn, include_api=True),
            output="System: " + turn.system,
            domain_tag=DomainTag.CRA_RESPONSE,
        )
        samples.append(response_sample)
    return samples
