from __future__ import annotations

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from treesolve.backends import GenerationRecord, whitespace_tokens


class FunctionBackend:
    """Adapts a pure (context, action_name) -> text function to the generator
    interface. Deterministic and call-order independent, so it is safe under
    any traversal order."""

    def __init__(self, fn):
        self.fn = fn
        self.calls = 0

    def generate(self, context_prompt, action_prompt="", params=None, *, action=None, depth=None):
        self.calls += 1
        name = action.value if action is not None else None
        output = self.fn(context_prompt, name, depth)
        return GenerationRecord(
            prompt=context_prompt,
            action_prompt=action_prompt,
            output=output,
            prompt_tokens=whitespace_tokens(context_prompt) + whitespace_tokens(action_prompt),
            completion_tokens=whitespace_tokens(output),
            latency_ms=0,
        )


class _ChatHandler(BaseHTTPRequestHandler):
    def do_POST(self):  # noqa: N802 - http.server API
        length = int(self.headers.get("Content-Length", 0))
        raw = self.rfile.read(length) if length else b"{}"
        try:
            body = json.loads(raw)
        except json.JSONDecodeError:
            body = {"_raw": raw.decode("utf-8", "replace")}
        server = self.server
        with server.lock:
            server.requests.append(
                {"path": self.path, "body": body, "headers": dict(self.headers)}
            )
            spec = server.plan.pop(0) if server.plan else dict(server.default_response)
            server.in_flight += 1
            server.max_in_flight = max(server.max_in_flight, server.in_flight)
        try:
            delay = spec.get("delay", 0)
            if delay:
                time.sleep(delay)
            status = spec.get("status", 200)
            payload = spec.get("payload")
            if payload is None:
                content = spec.get("content", "ok")
                payload = {
                    "id": "test-1",
                    "object": "chat.completion",
                    "choices": [
                        {
                            "index": 0,
                            "message": {"role": "assistant", "content": content},
                            "finish_reason": "stop",
                        }
                    ],
                }
                if spec.get("usage") is not None:
                    payload["usage"] = spec["usage"]
            data = json.dumps(payload).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)
        except (BrokenPipeError, ConnectionResetError):
            pass  # client timed out and went away; expected in retry tests
        finally:
            with server.lock:
                server.in_flight -= 1

    def log_message(self, *args):  # silence request logging
        pass


class ChatEndpoint:
    """In-process OpenAI-compatible chat-completions endpoint.

    ``plan`` is a queue of per-request response specs ({"content", "status",
    "delay", "usage", "payload"}); once drained, ``default_response`` applies.
    Every parsed request body lands in ``requests``.
    """

    def __init__(self):
        self._server = ThreadingHTTPServer(("127.0.0.1", 0), _ChatHandler)
        self._server.daemon_threads = True
        self._server.lock = threading.Lock()
        self._server.requests = []
        self._server.plan = []
        self._server.default_response = {"content": "ok"}
        self._server.in_flight = 0
        self._server.max_in_flight = 0
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()

    @property
    def url(self) -> str:
        host, port = self._server.server_address
        return f"http://{host}:{port}/v1"

    @property
    def requests(self):
        return self._server.requests

    @property
    def plan(self):
        return self._server.plan

    @property
    def max_in_flight(self) -> int:
        return self._server.max_in_flight

    def set_default(self, **spec):
        self._server.default_response = spec

    def close(self):
        self._server.shutdown()
        self._server.server_close()


@pytest.fixture
def chat_endpoint():
    endpoint = ChatEndpoint()
    yield endpoint
    endpoint.close()
