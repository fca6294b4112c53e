import threading
import time

import pytest

from causal_elicit.llm_gateway import Gateway, ProviderConfig


class FakeTransport:
    """Scripted HTTP stand-in: each call pops the next ``(status, body)`` or raises it."""

    def __init__(self, responses=None, default=None, delay=0.0):
        self.responses = list(responses or [])
        self.default = default
        self.delay = delay
        self.calls = []
        self.in_flight = 0
        self.max_in_flight = 0
        self._lock = threading.Lock()

    def __call__(self, url, payload, headers, timeout):
        with self._lock:
            self.calls.append((url, payload, headers))
            self.in_flight += 1
            self.max_in_flight = max(self.max_in_flight, self.in_flight)
            item = self.responses.pop(0) if self.responses else self.default
        try:
            if self.delay:
                time.sleep(self.delay)
            if callable(item):
                item = item(url, payload)
            if isinstance(item, Exception):
                raise item
            return item
        finally:
            with self._lock:
                self.in_flight -= 1


def chat_body(text):
    return 200, {"choices": [{"message": {"role": "assistant", "content": text}}]}


def embed_body(vectors):
    return 200, {"data": [{"index": k, "embedding": list(v)} for k, v in enumerate(vectors)]}


@pytest.fixture
def mock_cfg():
    return ProviderConfig(kind="mock", seed=7, max_parallel=2)


@pytest.fixture
def mock_gateway(mock_cfg):
    return Gateway(mock_cfg)


@pytest.fixture
def remote_cfg(monkeypatch):
    monkeypatch.setenv("TEST_LLM_KEY", "sk-test")
    return ProviderConfig(
        kind="remote",
        base_url="https://llm.example/v1",
        api_key_env="TEST_LLM_KEY",
        chat_model="chat-x",
        embed_model="embed-x",
        max_retries=3,
    )


def remote_gateway(cfg, transport):
    return Gateway(cfg, transport=transport, sleep=lambda s: None)
