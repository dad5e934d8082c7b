"""Chat-model clients: generic HTTP endpoint, transcript replay, and the
deterministic oracle used for offline pipeline tests."""
from __future__ import annotations

import hashlib
import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import httpx


@dataclass(frozen=True)
class ChatRequest:
    messages: tuple[tuple[str, str], ...]  # (role, content)
    temperature: float = 0.0
    max_tokens: int = 2048

    def __post_init__(self):
        if not self.messages:
            raise ValueError("request needs at least one message")
        for role, _ in self.messages:
            if role not in ("system", "user", "assistant"):
                raise ValueError(f"unknown role {role!r}")

    @staticmethod
    def user(text: str, temperature: float = 0.0,
             max_tokens: int = 2048) -> "ChatRequest":
        return ChatRequest((("user", text),), temperature, max_tokens)

    def digest(self) -> str:
        payload = json.dumps(
            {"messages": [[r, c] for r, c in self.messages],
             "temperature": self.temperature, "max_tokens": self.max_tokens},
            sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def to_dict(self) -> dict:
        return {"messages": [[r, c] for r, c in self.messages],
                "temperature": self.temperature, "max_tokens": self.max_tokens}


@dataclass(frozen=True)
class ChatResponse:
    text: str
    usage: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"text": self.text, "usage": dict(self.usage)}


class ChatError(RuntimeError):
    pass


class ChatTransportError(ChatError):
    pass


class ChatTimeoutError(ChatError):
    pass


class ChatHttpError(ChatError):
    def __init__(self, status: int, body: str = ""):
        self.status = status
        super().__init__(f"HTTP {status}: {body[:200]}")


class TranscriptMissError(ChatError):
    def __init__(self, digest: str):
        self.digest = digest
        super().__init__(f"no recorded transcript for request digest {digest}")


class ChatModel:
    """Model-client contract: complete(request) -> ChatResponse."""

    name = "model"

    def complete(self, request: ChatRequest) -> ChatResponse:
        raise NotImplementedError


class HttpChatModel(ChatModel):
    """OpenAI-style chat-completions client with bounded retry and timeout.

    Retries transient failures (HTTP 429 and 5xx, transport errors) with
    exponential backoff; the retry count lands in the response usage.
    """

    name = "endpoint"
    RETRY_STATUSES = (429, 500, 502, 503, 504)

    def __init__(self, base_url: str, model: str, api_key: str = "",
                 timeout: float = 30.0, max_retries: int = 3,
                 backoff_base: float = 0.5):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key = api_key
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff_base = backoff_base

    def complete(self, request: ChatRequest) -> ChatResponse:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        payload = {
            "model": self.model,
            "messages": [{"role": r, "content": c} for r, c in request.messages],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        url = f"{self.base_url}/chat/completions"
        last_error: ChatError | None = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                time.sleep(self.backoff_base * (2 ** (attempt - 1)))
            try:
                resp = httpx.post(url, json=payload, headers=headers,
                                  timeout=self.timeout)
            except httpx.TimeoutException as err:
                last_error = ChatTimeoutError(f"request timed out after "
                                              f"{self.timeout}s: {err}")
                continue
            except httpx.HTTPError as err:
                last_error = ChatTransportError(str(err))
                continue
            if resp.status_code in self.RETRY_STATUSES:
                last_error = ChatHttpError(resp.status_code, resp.text)
                continue
            if resp.status_code != 200:
                raise ChatHttpError(resp.status_code, resp.text)
            data = resp.json()
            try:
                text = data["choices"][0]["message"]["content"]
            except (KeyError, IndexError, TypeError) as err:
                raise ChatTransportError(f"malformed completion payload: {err}")
            usage = dict(data.get("usage", {}))
            usage["retries"] = attempt
            return ChatResponse(text, usage)
        raise last_error


class RecordedModel(ChatModel):
    """Replays transcript fixtures keyed by request digest.

    Transcripts are JSON files mapping digest -> {"request", "response"};
    a directory is loaded by merging every *.json file in name order.
    """

    name = "recorded"

    def __init__(self, path: str | Path):
        self.entries: dict[str, dict] = {}
        path = Path(path)
        files = sorted(path.glob("*.json")) if path.is_dir() else [path]
        for f in files:
            self.entries.update(json.loads(f.read_text(encoding="utf-8")))

    def complete(self, request: ChatRequest) -> ChatResponse:
        digest = request.digest()
        entry = self.entries.get(digest)
        if entry is None:
            raise TranscriptMissError(digest)
        response = entry["response"]
        return ChatResponse(response["text"], dict(response.get("usage", {})))


class RecordingModel(ChatModel):
    """Wraps another model and captures every exchange for later replay."""

    name = "recording"

    def __init__(self, inner: ChatModel):
        self.inner = inner
        self.entries: dict[str, dict] = {}
        self._lock = threading.Lock()

    def complete(self, request: ChatRequest) -> ChatResponse:
        response = self.inner.complete(request)
        with self._lock:
            self.entries[request.digest()] = {
                "request": request.to_dict(),
                "response": response.to_dict(),
            }
        return response

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.entries, indent=2, sort_keys=True) + "\n",
            encoding="utf-8")


@dataclass(frozen=True)
class GoldAnswers:
    """Ground-truth response material for one task instance."""

    detection_text: str
    objects_block: str
    init_block: str
    goal_block: str
    plan_json: str


class OracleModel(ChatModel):
    """Deterministic stand-in producing ground-truth-correct responses.

    Routes on prompt markers (detection, initial state, goal, revision, plan)
    and answers from the gold bundle; generation prompts get a short
    summary-style preamble so extraction is exercised the way sampled models
    would exercise it.
    """

    name = "oracle"
    PREAMBLE = ("1) This Cooking domain describes two robot arms that pick, "
                "place, fixture, slice and serve food items on a tabletop.\n"
                "2) ")

    def __init__(self, gold: GoldAnswers):
        self.gold = gold

    def complete(self, request: ChatRequest) -> ChatResponse:
        prompt = request.messages[-1][1]
        if "detect the following objects" in prompt:
            text = self.gold.detection_text
        elif "revised specification" in prompt:
            text = (self.PREAMBLE + "The revised specification is:\n"
                    + self.gold.objects_block + "\n" + self.gold.init_block
                    + "\n" + self.gold.goal_block)
        elif "initial state of the environment" in prompt and \
                "goal conditions" not in prompt:
            text = (self.PREAMBLE + "The initial state is:\n"
                    + self.gold.init_block)
        elif "goal conditions" in prompt:
            text = (self.PREAMBLE + "The goal conditions are:\n"
                    + self.gold.goal_block)
        elif "plan of actions" in prompt:
            text = (self.PREAMBLE + "The plan is:\n" + self.gold.plan_json)
        else:
            raise ChatError("oracle cannot route this prompt")
        return ChatResponse(text, {"retries": 0})
