"""Model boundary: prompt construction, output parsing, and providers.

Everything upstream of this module is deterministic; everything the model
touches goes through here. The fixture provider replays recorded responses
keyed by a content hash of (model id + system + user), which makes the whole
system testable offline, byte for byte.

The interpreter contract is two variants: a fenced ``ra`` block holding one
expression in the canonical grammar, or a single line

    OUT_OF_SCOPE: <reason>

Anything else is a malformed response (a pipeline failure, scored FN).
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import threading
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    FixtureMissError,
    MalformedResponseError,
    ProviderRejection,
    ProviderTimeout,
    TransportError,
)
from .kb import render_schema_prompt
from .parser import parse
from .schema import Catalog

DEFAULT_MODEL = "default"
DEFAULT_MAX_TOKENS = 1024
DEFAULT_TIMEOUT = 30.0

ENV_API_KEY = "GATELENS_API_KEY"
ENV_BASE_URL = "GATELENS_BASE_URL"
ENV_MODEL = "GATELENS_MODEL"

MAX_RETRIES = 2  # transport failures only; one attempt plus at most two retries


@dataclass(frozen=True)
class ChatRequest:
    model: str
    system: str
    user: str
    temperature: float = 0.0
    max_tokens: int = DEFAULT_MAX_TOKENS
    timeout: float = DEFAULT_TIMEOUT

    def __post_init__(self):
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must be within [0, 2]")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")

    def digest(self) -> str:
        h = hashlib.sha256()
        for part in (self.model, self.system, self.user):
            h.update(part.encode("utf-8"))
            h.update(b"\x00")
        return h.hexdigest()


@dataclass(frozen=True)
class RaText:
    text: str


@dataclass(frozen=True)
class OutOfScope:
    reason: str


InterpreterOutput = RaText | OutOfScope


@dataclass(frozen=True)
class FewShotExample:
    query: str
    ra: str
    note: str = ""

    def __post_init__(self):
        parse(self.ra)  # gold RA must be well-formed


GRAMMAR_GUIDE = """\
Operators (prefix-call form; whitespace between tokens is insignificant):
  select[<predicate>](E)            keep rows matching the predicate (alias σ)
  project[c1, c2](E)                keep the listed columns (alias π)
  rename[old -> new, ...](E)        rename columns (alias ρ)
  union(A, B) | minus(A, B) | intersect(A, B)   set operators, no duplicates
  times(A, B)                       cartesian product
  join[<predicate>](A, B)           product filtered by the predicate
  divide(A, B)                      rows of A paired with every row of B
  groupby[k1, k2; agg, ...](E)      aggregation (alias γ); keys may be empty:
                                    groupby[; count(*) as n](E)
  distinct(E) | sort[c asc|desc, ...](E) | limit[n](E)
Aggregates: count(*) | count(c) | sum(c) | avg(c) | min(c) | max(c), each
followed by `as <name>`.
Predicates: comparisons (==, !=, <, <=, >, >=), `c in [lit, ...]`,
contains(c, "text"), lower(c), combined with and/or/not and parentheses.
Literals: "double-quoted text", numbers, true, false, null; dates are
written as "YYYY-MM-DD" strings. Column name collisions after times/join
are errors: rename one side first.
"""

OUTPUT_CONTRACT = """\
Respond in exactly one of two ways.

1. If the question can be answered from the tables above, reply with one RA
   expression in a fenced block:

   ```ra
   <one expression in the grammar above>
   ```

2. If it cannot be answered from the tables (it needs judgment or data that
   is not there), reply with a single line:

   OUT_OF_SCOPE: <short reason>

Use canonical table and column names from the schema. Apply filters as early
as possible, before joins, products or aggregation, so expensive operators
see reduced inputs. Do not add prose outside the fenced block.
"""


def build_interpreter_prompt(catalog: Catalog, query: str,
                             examples: list[FewShotExample] | tuple = (),
                             model: str = DEFAULT_MODEL) -> ChatRequest:
    """Assemble the interpreter request. Byte-for-byte deterministic for
    identical inputs; contains schema and context only, never row data."""
    sections = [
        "You translate analyst questions about release test data into "
        "relational-algebra expressions.",
        "",
        "## Data schema",
        "",
        render_schema_prompt(catalog).rstrip("\n"),
        "",
        "## Expression grammar",
        "",
        GRAMMAR_GUIDE.rstrip("\n"),
        "",
        "## Output contract",
        "",
        OUTPUT_CONTRACT.rstrip("\n"),
    ]
    if examples:
        sections += ["", "## Worked examples", ""]
        for i, ex in enumerate(examples, start=1):
            sections.append(f"Example {i}:")
            sections.append(f"Question: {ex.query}")
            if ex.note:
                sections.append(f"Note: {ex.note}")
            sections.append("```ra")
            sections.append(ex.ra)
            sections.append("```")
            sections.append("")
        sections.pop()
    system = "\n".join(sections) + "\n"
    return ChatRequest(model=model, system=system, user=query)


_RA_BLOCK = re.compile(r"```ra[ \t]*\n(.*?)\n?```", re.DOTALL)
_OOS_LINE = re.compile(r"^[ \t]*OUT_OF_SCOPE:[ \t]*(.*)$", re.MULTILINE)


def parse_interpreter_output(raw: str) -> InterpreterOutput:
    """Extract the first fenced ra block or the OUT_OF_SCOPE line, whichever
    appears first. Never evaluates anything from the raw text."""
    block = _RA_BLOCK.search(raw)
    oos = _OOS_LINE.search(raw)
    if block and (oos is None or block.start() < oos.start()):
        return RaText(block.group(1).strip())
    if oos:
        return OutOfScope(oos.group(1).strip())
    raise MalformedResponseError(
        "response carried neither a fenced ra block nor an OUT_OF_SCOPE line"
    )


# --- providers ---

class Provider:
    """A chat-completion backend. `calls` counts completions served and is
    safe to read under concurrent completions."""

    def __init__(self):
        self.calls = 0
        self._calls_lock = threading.Lock()

    def _count_call(self):
        with self._calls_lock:
            self.calls += 1

    def complete(self, request: ChatRequest) -> str:
        raise NotImplementedError


class FixtureProvider(Provider):
    """Deterministic record/replay store: one `<hex digest>.txt` per unique
    request under `root`. Replay never touches the network; record mode
    delegates to `inner` and persists the raw response bytes."""

    def __init__(self, root, mode: str = "replay", inner: Provider | None = None):
        super().__init__()
        if mode not in ("replay", "record"):
            raise ValueError(f"unknown fixture mode {mode!r}")
        if mode == "record" and inner is None:
            raise ValueError("record mode needs an inner provider")
        self.root = Path(root)
        self.mode = mode
        self.inner = inner
        self._write_lock = threading.Lock()

    def _path(self, request: ChatRequest) -> Path:
        return self.root / f"{request.digest()}.txt"

    def complete(self, request: ChatRequest) -> str:
        self._count_call()
        path = self._path(request)
        if path.exists():
            return path.read_text(encoding="utf-8")
        if self.mode == "replay":
            raise FixtureMissError(request.digest())
        response = self.inner.complete(request)
        with self._write_lock:
            if not path.exists():
                self.root.mkdir(parents=True, exist_ok=True)
                path.write_text(response, encoding="utf-8")
        return response

    def put(self, request: ChatRequest, response: str) -> Path:
        """Store a canned response for a request (test/benchmark plumbing)."""
        with self._write_lock:
            self.root.mkdir(parents=True, exist_ok=True)
            path = self._path(request)
            path.write_text(response, encoding="utf-8")
        return path


class HttpProvider(Provider):
    """Chat-completions wire format:

    POST {base_url}/chat/completions
    {"model": ..., "messages": [{"role": "system", ...}, {"role": "user", ...}],
     "temperature": ..., "max_tokens": ...}

    with `Authorization: Bearer $GATELENS_API_KEY`; the reply text is
    `choices[0].message.content`.
    """

    def __init__(self, base_url: str | None = None, api_key: str | None = None,
                 session=None):
        super().__init__()
        self.base_url = (base_url or os.environ.get(ENV_BASE_URL, "")).rstrip("/")
        self.api_key = api_key or os.environ.get(ENV_API_KEY, "")
        if not self.base_url:
            raise ProviderRejection(f"no base URL configured (set {ENV_BASE_URL})")
        self._session = session

    def complete(self, request: ChatRequest) -> str:
        import requests

        self._count_call()
        session = self._session or requests
        try:
            response = session.post(
                f"{self.base_url}/chat/completions",
                headers={"Authorization": f"Bearer {self.api_key}"},
                json={
                    "model": request.model,
                    "messages": [
                        {"role": "system", "content": request.system},
                        {"role": "user", "content": request.user},
                    ],
                    "temperature": request.temperature,
                    "max_tokens": request.max_tokens,
                },
                timeout=request.timeout,
            )
        except requests.Timeout as exc:
            raise ProviderTimeout(str(exc)) from exc
        except requests.RequestException as exc:
            raise TransportError(str(exc)) from exc
        if response.status_code >= 500:
            raise TransportError(f"server error {response.status_code}")
        if response.status_code >= 400:
            raise ProviderRejection(
                f"provider rejected the request ({response.status_code})"
            )
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError, json.JSONDecodeError) as exc:
            raise TransportError(f"unexpected response shape: {exc}") from exc


def default_model() -> str:
    return os.environ.get(ENV_MODEL, DEFAULT_MODEL)


def complete(request: ChatRequest, provider: Provider) -> str:
    """One attempt plus at most two retries, on transport failures only."""
    attempts = 0
    while True:
        try:
            return provider.complete(request)
        except (TransportError, ProviderTimeout):
            attempts += 1
            if attempts > MAX_RETRIES:
                raise
