"""JSON wire protocol for external language-model backends.

Line-delimited JSON over a child process's standard streams, or HTTP
POST to an endpoint.  Requests carry an ``id`` echoed by the response::

    {"id": "1", "op": "forward", "context": ["the"], "top_k": 5}
    {"id": "1", "tokens": ["cat", "dog"], "logits": [-0.3, -1.4]}

Ops: ``forward`` (context, top_k), ``infill`` (prefix, suffix, slots,
slot_index, filled, optional top_k) and ``score`` (context, text).
Unknown request fields are rejected with an error response.
"""

from __future__ import annotations

import argparse
import itertools
import json
import shlex
import subprocess
import sys
import threading
from typing import Dict, List, Mapping, Optional, Sequence, TextIO

from .base import Capabilities, LanguageModel, TokenDistribution, TransportError
from .ngram import train_ngram

_ALLOWED_FIELDS = {
    "forward": {"id", "op", "context", "top_k"},
    "infill": {"id", "op", "prefix", "suffix", "slots", "slot_index", "filled", "top_k"},
    "score": {"id", "op", "context", "text"},
}


def _string_list(value, name: str) -> List[str]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise ValueError(f"{name} must be a list of strings")
    return value


def handle_request(model: LanguageModel, request: Dict) -> Dict:
    """Serve one protocol request against ``model``; never raises."""
    request_id = request.get("id") if isinstance(request, dict) else None
    if not isinstance(request_id, str):
        return {"id": "", "error": "missing or non-string id"}
    try:
        op = request.get("op")
        if op not in _ALLOWED_FIELDS:
            raise ValueError(f"unknown op: {op!r}")
        unknown = set(request) - _ALLOWED_FIELDS[op]
        if unknown:
            raise ValueError(f"unknown fields for {op}: {sorted(unknown)}")
        if op == "forward":
            context = _string_list(request.get("context", []), "context")
            top_k = request.get("top_k")
            if not isinstance(top_k, int):
                raise ValueError("forward requires integer top_k")
            dist = model.next_token_distribution(context, top_k)
            return {
                "id": request_id,
                "tokens": list(dist.tokens),
                "logits": list(dist.logits),
            }
        if op == "infill":
            prefix = _string_list(request.get("prefix", []), "prefix")
            suffix = _string_list(request.get("suffix", []), "suffix")
            slots = request.get("slots")
            slot_index = request.get("slot_index")
            if not isinstance(slots, int) or not isinstance(slot_index, int):
                raise ValueError("infill requires integer slots and slot_index")
            raw_filled = request.get("filled", {})
            if not isinstance(raw_filled, dict):
                raise ValueError("filled must be a mapping")
            filled = {int(k): str(v) for k, v in raw_filled.items()}
            top_k = request.get("top_k")
            if top_k is not None and not isinstance(top_k, int):
                raise ValueError("top_k must be an integer")
            dist = model.infill_distribution(
                prefix, slots, slot_index, filled, suffix, top_k=top_k
            )
            return {
                "id": request_id,
                "tokens": list(dist.tokens),
                "logits": list(dist.logits),
            }
        # score
        context = _string_list(request.get("context", []), "context")
        text = _string_list(request.get("text", []), "text")
        score = model.sequence_log_likelihood(context, text)
        return {"id": request_id, "score": float(score)}
    except Exception as exc:  # errors travel as protocol responses
        return {"id": request_id, "error": str(exc)}


def serve_stdio(model: LanguageModel, stdin: TextIO, stdout: TextIO) -> None:
    """Serve requests line by line until stdin closes."""
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
        except json.JSONDecodeError as exc:
            response = {"id": "", "error": f"malformed json: {exc}"}
        else:
            response = handle_request(model, request)
        stdout.write(json.dumps(response) + "\n")
        stdout.flush()


class _StdioTransport:
    """Child process speaking the protocol on its standard streams."""

    def __init__(self, command):
        if isinstance(command, str):
            command = shlex.split(command)
        try:
            self._proc = subprocess.Popen(
                command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise TransportError(f"cannot start backend process: {exc}") from exc

    def round_trip(self, line: str) -> str:
        try:
            assert self._proc.stdin is not None and self._proc.stdout is not None
            self._proc.stdin.write(line + "\n")
            self._proc.stdin.flush()
            response = self._proc.stdout.readline()
        except (OSError, ValueError) as exc:
            raise TransportError(f"backend process pipe failed: {exc}") from exc
        if not response:
            raise TransportError("backend process closed its output")
        return response

    def close(self) -> None:
        if self._proc.poll() is None:
            self._proc.terminate()
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()


class _HttpTransport:
    def __init__(self, url: str):
        import httpx

        self._url = url
        self._client = httpx.Client(timeout=30.0)

    def round_trip(self, line: str) -> str:
        import httpx

        try:
            response = self._client.post(
                self._url,
                content=line,
                headers={"content-type": "application/json"},
            )
        except httpx.HTTPError as exc:
            raise TransportError(f"http request failed: {exc}") from exc
        if response.status_code != 200:
            raise TransportError(f"http status {response.status_code}")
        return response.text

    def close(self) -> None:
        self._client.close()


class ExternalLanguageModel(LanguageModel):
    """Client for a backend reachable over the wire protocol.

    Requests are serialized per connection.  Declared capabilities come
    from configuration; a forward-only backend leaves the engine in
    degraded mode for rhyme lines.
    """

    def __init__(self, transport, forward: bool = True, infill: bool = True):
        self._transport = transport
        self._capabilities = Capabilities(forward=forward, infill=infill)
        self._lock = threading.Lock()
        self._ids = itertools.count(1)

    @classmethod
    def from_endpoint(
        cls, endpoint: str, forward: bool = True, infill: bool = True
    ) -> "ExternalLanguageModel":
        """Connect to ``http(s)://...`` or spawn a command line."""
        if endpoint.startswith(("http://", "https://")):
            transport = _HttpTransport(endpoint)
        else:
            transport = _StdioTransport(endpoint)
        return cls(transport, forward=forward, infill=infill)

    def close(self) -> None:
        self._transport.close()

    @property
    def capabilities(self) -> Capabilities:
        return self._capabilities

    def _request(self, payload: Dict) -> Dict:
        with self._lock:
            payload = dict(payload, id=str(next(self._ids)))
            raw = self._transport.round_trip(json.dumps(payload))
        try:
            response = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise TransportError(f"malformed backend response: {exc}") from exc
        if not isinstance(response, dict):
            raise TransportError("backend response is not an object")
        if response.get("error"):
            raise TransportError(f"backend error: {response['error']}")
        if response.get("id") != payload["id"]:
            raise TransportError(
                f"response id {response.get('id')!r} does not match request {payload['id']!r}"
            )
        return response

    def _distribution(self, response: Dict) -> TokenDistribution:
        tokens = response.get("tokens")
        logits = response.get("logits")
        if not isinstance(tokens, list) or not isinstance(logits, list):
            raise TransportError("backend response missing tokens/logits")
        if len(tokens) != len(logits):
            raise TransportError("tokens and logits lengths differ")
        try:
            entries = tuple(
                (str(tok), float(logit)) for tok, logit in zip(tokens, logits)
            )
            return TokenDistribution(entries)
        except (TypeError, ValueError) as exc:
            raise TransportError(f"invalid distribution from backend: {exc}") from exc

    def next_token_distribution(
        self, context: Sequence[str], top_k: int
    ) -> TokenDistribution:
        if top_k < 1:
            raise ValueError("top_k must be >= 1")
        response = self._request(
            {"op": "forward", "context": list(context), "top_k": top_k}
        )
        return self._distribution(response)

    def infill_distribution(
        self,
        prefix: Sequence[str],
        slots: int,
        slot_index: int,
        filled: Mapping[int, str],
        suffix: Sequence[str],
        top_k: Optional[int] = None,
    ) -> TokenDistribution:
        payload = {
            "op": "infill",
            "prefix": list(prefix),
            "suffix": list(suffix),
            "slots": slots,
            "slot_index": slot_index,
            "filled": {str(k): v for k, v in filled.items()},
        }
        if top_k is not None:
            payload["top_k"] = top_k
        return self._distribution(self._request(payload))

    def sequence_log_likelihood(
        self, context: Sequence[str], text: Sequence[str]
    ) -> float:
        response = self._request(
            {"op": "score", "context": list(context), "text": list(text)}
        )
        score = response.get("score")
        if not isinstance(score, (int, float)):
            raise TransportError("backend response missing numeric score")
        return float(score)


def main(argv: Optional[List[str]] = None) -> None:
    """Serve an n-gram model over stdio for out-of-process use."""
    parser = argparse.ArgumentParser(
        description="Serve an n-gram language model over the JSON stdio protocol"
    )
    parser.add_argument("--corpus", required=True, help="training corpus text file")
    parser.add_argument("--order", type=int, default=2)
    parser.add_argument("--smoothing", type=float, default=0.01)
    args = parser.parse_args(argv)
    with open(args.corpus, "r", encoding="utf-8") as fh:
        corpus = fh.read()
    model = train_ngram(corpus, order=args.order, smoothing_k=args.smoothing)
    serve_stdio(model, sys.stdin, sys.stdout)


if __name__ == "__main__":
    main()
