"""Chat-completion and embedding client with an offline mock provider.

Remote providers speak the OpenAI-compatible HTTP JSON shape
(``/chat/completions`` and ``/embeddings``). The mock provider is a pure
function of its inputs and needs no network, so the whole pipeline can run
and be tested offline.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import random
import re
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from . import mock_world
from .errors import AuthError, DimMismatch, EmptyResponse, RetryableError, TransportError

logger = logging.getLogger(__name__)

DEFAULT_CHUNK_SIZE = 128


@dataclass(frozen=True)
class ProviderConfig:
    kind: str = "mock"
    base_url: str = ""
    api_key_env: str = "OPENAI_API_KEY"
    chat_model: str = "mock-chat"
    embed_model: str = "mock-embed"
    embed_dim: int = 256
    max_parallel: int = 4
    max_retries: int = 3
    seed: int = 0
    timeout: float = 60.0
    chunk_size: int = DEFAULT_CHUNK_SIZE
    backoff_base: float = 0.5

    def validate(self):
        if self.kind not in ("remote", "mock"):
            raise ValueError(f"unknown provider kind {self.kind!r}")
        if self.kind == "remote" and not self.base_url:
            raise ValueError("remote provider needs base_url")
        if self.max_parallel < 1:
            raise ValueError("max_parallel must be >= 1")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.embed_dim < 1 or self.chunk_size < 1:
            raise ValueError("embed_dim and chunk_size must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        return self


@dataclass(frozen=True)
class ChatRequest:
    """One chat call.

    ``task`` and ``nonce`` never reach a remote provider. The mock uses
    ``task`` to decide what kind of answer to fake and mixes ``nonce`` into
    its seed so that N identical generation prompts give N different samples.
    """

    system: str
    user: str
    temperature: float = 1.0
    max_tokens: int = 2048
    task: Optional[str] = None
    nonce: Optional[int] = None

    def __post_init__(self):
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must be in [0, 2]")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be positive")


# -- transports -------------------------------------------------------------

Transport = Callable[[str, dict, dict, float], "tuple[int, Optional[dict]]"]


class HttpxTransport:
    """POST JSON and return ``(status, parsed body or None)``."""

    def __init__(self):
        import httpx

        self._httpx = httpx
        self._client = httpx.Client()

    def __call__(self, url, payload, headers, timeout):
        try:
            resp = self._client.post(url, json=payload, headers=headers, timeout=timeout)
        except self._httpx.TimeoutException as exc:
            raise RetryableError(f"timeout calling {url}") from exc
        except self._httpx.TransportError as exc:
            raise RetryableError(f"connection error calling {url}: {exc}") from exc
        try:
            body = resp.json()
        except ValueError:
            body = None
        return resp.status_code, body


# -- providers --------------------------------------------------------------


@lru_cache(maxsize=1 << 16)
def _gram_bucket(gram, dim):
    digest = hashlib.blake2b(gram.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little") % dim


def hashed_trigram_embedding(text, dim):
    """L2-normalized bag of hashed character 3-grams."""
    padded = f"  {' '.join(text.lower().split())}  "
    v = np.zeros(dim)
    for k in range(len(padded) - 2):
        v[_gram_bucket(padded[k : k + 3], dim)] += 1.0
    return v / np.linalg.norm(v)


class MockProvider:
    def __init__(self, cfg: ProviderConfig):
        self.cfg = cfg

    def chat(self, req: ChatRequest) -> str:
        rng = np.random.default_rng(
            mock_world.stable_seed(self.cfg.seed, req.system, req.user, req.nonce)
        )
        if req.task == "generate":
            m = re.search(r'analyzing: "(.*)"', req.user, re.S)
            topic = m.group(1) if m else req.user
            return mock_world.write_document(topic, rng)
        if req.task == "extract":
            text = req.user.split("\n", 1)[1] if "\n" in req.user else ""
            return mock_world.extract_from_text(text, rng)
        if req.task == "name":
            lines = [ln[2:] for ln in req.user.splitlines() if ln.startswith("- ")]
            return lines[0] if lines else ""
        if req.task == "match":
            m = re.search(r"^\[(\d+)\] (.*)$", req.user, re.M)
            if not m:
                return json.dumps({"match": False, "canon_id": None, "name": ""})
            return json.dumps({"match": True, "canon_id": int(m.group(1)), "name": m.group(2)})
        return f"mock reply {rng.integers(1 << 62):016x}"

    def embed(self, texts):
        return np.vstack([hashed_trigram_embedding(t, self.cfg.embed_dim) for t in texts])


class RemoteProvider:
    def __init__(self, cfg: ProviderConfig, transport: Optional[Transport] = None):
        self.cfg = cfg
        self.transport = transport

    def _headers(self):
        key = os.environ.get(self.cfg.api_key_env, "").strip()
        if not key:
            raise AuthError(f"environment variable {self.cfg.api_key_env} is not set")
        return {"Authorization": f"Bearer {key}", "Content-Type": "application/json"}

    def _post(self, path, payload):
        headers = self._headers()
        if self.transport is None:
            self.transport = HttpxTransport()
        url = self.cfg.base_url.rstrip("/") + path
        status, body = self.transport(url, payload, headers, self.cfg.timeout)
        if status in (401, 403):
            raise AuthError(f"{url} rejected the API key (HTTP {status})")
        if status == 429 or status >= 500:
            raise RetryableError(f"{url} returned HTTP {status}")
        if status != 200:
            raise TransportError(f"{url} returned HTTP {status}")
        if not isinstance(body, dict):
            raise TransportError(f"{url} returned a non-JSON body")
        return body

    def chat(self, req: ChatRequest) -> str:
        body = self._post(
            "/chat/completions",
            {
                "model": self.cfg.chat_model,
                "messages": [
                    {"role": "system", "content": req.system},
                    {"role": "user", "content": req.user},
                ],
                "temperature": req.temperature,
                "max_tokens": req.max_tokens,
            },
        )
        try:
            content = body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError):
            content = None
        if not content or not content.strip():
            raise EmptyResponse("provider returned no message text")
        return content

    def embed(self, texts):
        body = self._post("/embeddings", {"model": self.cfg.embed_model, "input": list(texts)})
        try:
            data = sorted(body["data"], key=lambda d: d["index"])
            vectors = [d["embedding"] for d in data]
        except (KeyError, TypeError) as exc:
            raise TransportError("malformed embeddings response") from exc
        if len(vectors) != len(texts):
            raise TransportError(f"expected {len(texts)} embeddings, got {len(vectors)}")
        if len({len(v) for v in vectors}) > 1:
            raise DimMismatch("provider returned vectors of different lengths")
        return np.asarray(vectors, dtype=float)


# -- gateway ----------------------------------------------------------------


class Gateway:
    """Retrying, concurrency-bounded front end over one provider.

    Safe to share between threads. At most ``cfg.max_parallel`` upstream
    requests are in flight at any time, whoever issues them.
    """

    def __init__(self, cfg: ProviderConfig, provider=None, transport=None, sleep=time.sleep):
        self.cfg = cfg.validate()
        if provider is None:
            provider = MockProvider(cfg) if cfg.kind == "mock" else RemoteProvider(cfg, transport)
        self.provider = provider
        self._sleep = sleep
        self._slots = threading.BoundedSemaphore(cfg.max_parallel)
        self._lock = threading.Lock()
        self._jitter = random.Random(cfg.seed)
        self.calls = 0
        self._dim = None

    def _attempt(self, fn, *args):
        for attempt in range(self.cfg.max_retries + 1):
            with self._lock:
                self.calls += 1
            try:
                with self._slots:
                    return fn(*args)
            except RetryableError as exc:
                if attempt == self.cfg.max_retries:
                    raise TransportError(
                        f"giving up after {attempt + 1} attempts: {exc}"
                    ) from exc
                with self._lock:
                    delay = self._jitter.uniform(0, self.cfg.backoff_base * 2**attempt)
                logger.info("transient failure (%s); retrying in %.2fs", exc, delay)
                self._sleep(delay)

    def chat(self, req: ChatRequest) -> str:
        return self._attempt(self.provider.chat, req)

    def embed_batch(self, texts, chunk_size=None):
        """Embed ``texts``; returns an array with one row per input, in order."""
        texts = list(texts)
        if not texts:
            raise ValueError("embed_batch needs at least one text")
        if any(not t.strip() for t in texts):
            raise ValueError("embed_batch got an empty text")
        size = chunk_size or self.cfg.chunk_size
        chunks = [texts[k : k + size] for k in range(0, len(texts), size)]
        parts = self.map(lambda ch: self._attempt(self.provider.embed, ch), chunks)
        out = np.vstack([np.asarray(p, dtype=float) for p in parts])
        with self._lock:
            if self._dim is None:
                self._dim = out.shape[1]
            elif out.shape[1] != self._dim:
                raise DimMismatch(f"embedding dim changed from {self._dim} to {out.shape[1]}")
        return out

    def map(self, fn, items):
        """Apply ``fn`` over ``items`` concurrently; results keep input order."""
        items = list(items)
        if self.cfg.max_parallel == 1 or len(items) <= 1:
            return [fn(x) for x in items]
        with ThreadPoolExecutor(max_workers=self.cfg.max_parallel) as pool:
            return list(pool.map(fn, items))


def chat(req: ChatRequest, cfg: ProviderConfig) -> str:
    return Gateway(cfg).chat(req)


def embed_batch(texts, cfg: ProviderConfig):
    return Gateway(cfg).embed_batch(texts)
