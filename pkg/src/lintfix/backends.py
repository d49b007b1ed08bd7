"""Pluggable patch generators.

The fix loop only needs ``generate(request) -> str``; everything else
(retry, validation, bookkeeping) lives in the orchestrator. Three
implementations ship here: a mock oracle keyed by issue id, a scripted
sequence player for deterministic tests, and an HTTP client for a
chat-completion style endpoint.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Protocol

from .errors import BackendTransportError


@dataclass(frozen=True)
class GenerationRequest:
    prompt: str
    issue_id: str = ""
    rule_id: str = ""
    file: str = ""


class Backend(Protocol):
    def generate(self, request: GenerationRequest) -> str: ...


class MockOracleBackend:
    """Returns a canned patch for each issue id. Unknown ids raise, so a
    test using this backend fails loudly instead of producing noise."""

    def __init__(self, patches: dict[str, str]):
        self._patches = dict(patches)

    def generate(self, request: GenerationRequest) -> str:
        try:
            return self._patches[request.issue_id]
        except KeyError:
            raise BackendTransportError(f"no oracle patch for issue {request.issue_id!r}")

    @classmethod
    def from_file(cls, path: str | Path) -> "MockOracleBackend":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls({str(k): str(v) for k, v in data.items()})


#: sentinel output entry that makes ScriptedBackend raise a transport error
TRANSPORT_ERROR = "<<transport-error>>"


@dataclass
class ScriptedBackend:
    """Plays back a fixed output sequence per issue id.

    Each issue gets its own cursor, so interleaved calls for different
    issues stay deterministic. The last entry repeats once the script is
    exhausted. The ``TRANSPORT_ERROR`` sentinel raises instead of
    returning, which exercises the transport-retry path.
    """

    outputs: list[str]
    calls: dict[str, int] = field(default_factory=dict)

    def generate(self, request: GenerationRequest) -> str:
        if not self.outputs:
            raise BackendTransportError("scripted backend has no outputs")
        n = self.calls.get(request.issue_id, 0)
        self.calls[request.issue_id] = n + 1
        out = self.outputs[min(n, len(self.outputs) - 1)]
        if out == TRANSPORT_ERROR:
            raise BackendTransportError("scripted transport failure")
        return out

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedBackend":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if isinstance(data, dict):
            data = data["outputs"]
        return cls(outputs=[str(x) for x in data])


class HttpBackend:
    """Chat-completion shaped HTTP generator.

    Sends ``{model, messages:[{role:"user", content: prompt}]}`` and reads
    ``choices[0].message.content`` back. Network and shape problems both
    surface as BackendTransportError so the retry policy above sees one
    failure kind.
    """

    def __init__(self, endpoint: str, model: str = "default",
                 token_env: str = "LINTFIX_API_TOKEN", timeout: float = 60.0):
        self.endpoint = endpoint
        self.model = model
        self.token_env = token_env
        self.timeout = timeout

    def generate(self, request: GenerationRequest) -> str:
        import requests

        headers = {"Content-Type": "application/json"}
        token = os.environ.get(self.token_env, "")
        if token:
            headers["Authorization"] = f"Bearer {token}"
        payload: dict[str, Any] = {
            "model": self.model,
            "messages": [{"role": "user", "content": request.prompt}],
        }
        try:
            resp = requests.post(self.endpoint, json=payload, headers=headers,
                                 timeout=self.timeout)
            resp.raise_for_status()
            body = resp.json()
            return str(body["choices"][0]["message"]["content"])
        except BackendTransportError:
            raise
        except Exception as exc:  # noqa: BLE001 - any transport/shape failure
            raise BackendTransportError(f"generation request failed: {exc}") from exc


def backend_from_spec(spec: str) -> Backend:
    """CLI backend factory.

    ``http://...`` or ``https://...``   HTTP endpoint
    ``oracle:<file.json>``              issue-id -> patch mapping
    ``scripted:<file.json>``            output sequence
    """
    if spec.startswith(("http://", "https://")):
        return HttpBackend(spec)
    if spec.startswith("oracle:"):
        return MockOracleBackend.from_file(spec[len("oracle:"):])
    if spec.startswith("scripted:"):
        return ScriptedBackend.from_file(spec[len("scripted:"):])
    raise ValueError(f"unrecognized backend spec: {spec!r}")
