"""Topic-conditioned document sampling and the ``documents.jsonl`` store."""

from __future__ import annotations

import json
import logging
import re
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from . import prompts
from .errors import CorruptCorpus
from .llm_gateway import ChatRequest, Gateway

logger = logging.getLogger(__name__)

CORPUS_FILE = "documents.jsonl"
SLUG_MAX = 80


def slugify(text):
    slug = re.sub(r"[^a-z0-9]+", "-", text.lower()).strip("-")
    slug = slug[:SLUG_MAX].rstrip("-")
    if not slug:
        slug = "topic-" + prompts.fingerprint("", text)[:8]
    return slug


@dataclass(frozen=True)
class Topic:
    text: str
    slug: str

    @classmethod
    def from_text(cls, text):
        return cls(text=text, slug=slugify(text))


@dataclass(frozen=True)
class Document:
    doc_id: int
    topic_slug: str
    text: str
    model: str = ""
    created_at: Optional[datetime] = None
    prompt_fingerprint: str = ""

    def to_json(self):
        return json.dumps(
            {
                "doc_id": self.doc_id,
                "topic_slug": self.topic_slug,
                "text": self.text,
                "model": self.model,
                "created_at": self.created_at.isoformat() if self.created_at else None,
                "prompt_fingerprint": self.prompt_fingerprint,
            },
            ensure_ascii=False,
        )


def corpus_path(out_dir, topic_slug):
    return Path(out_dir) / topic_slug / CORPUS_FILE


def _parse_record(line, lineno, default_slug):
    try:
        rec = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorruptCorpus(lineno, f"invalid JSON ({exc.msg})") from exc
    if not isinstance(rec, dict):
        raise CorruptCorpus(lineno, "record is not a JSON object")
    doc_id, text = rec.get("doc_id"), rec.get("text")
    if not isinstance(doc_id, int) or isinstance(doc_id, bool) or doc_id < 0:
        raise CorruptCorpus(lineno, "doc_id must be a non-negative integer")
    if not isinstance(text, str) or not text.strip():
        raise CorruptCorpus(lineno, "text must be a non-empty string")
    created = rec.get("created_at")
    if created is not None:
        try:
            created = datetime.fromisoformat(created)
        except (TypeError, ValueError) as exc:
            raise CorruptCorpus(lineno, "created_at is not an ISO timestamp") from exc
    return Document(
        doc_id=doc_id,
        topic_slug=rec.get("topic_slug") or default_slug,
        text=text,
        model=rec.get("model") or "",
        created_at=created,
        prompt_fingerprint=rec.get("prompt_fingerprint") or "",
    )


def read_documents(path, default_slug=""):
    docs = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            doc = _parse_record(line, lineno, default_slug)
            if doc.doc_id in docs:
                raise CorruptCorpus(lineno, f"duplicate doc_id {doc.doc_id}")
            docs[doc.doc_id] = doc
    return [docs[k] for k in sorted(docs)]


def load_corpus(topic_slug, dir):
    """Load ``{dir}/{topic_slug}/documents.jsonl`` in doc_id order.

    Hand-made corpora only need ``doc_id`` and ``text`` per line; the other
    fields default to empty.
    """
    path = corpus_path(dir, topic_slug)
    if not path.exists():
        raise FileNotFoundError(path)
    return read_documents(path, topic_slug)


def write_documents(path, docs):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for doc in docs:
            fh.write(doc.to_json() + "\n")


def generate_documents(
    topic: Topic,
    n: int,
    gateway: Gateway,
    out_dir,
    temperature: float = 1.0,
    time_anchor: str = prompts.DEFAULT_TIME_ANCHOR,
    max_tokens: int = 4096,
):
    """Sample ``n`` documents for ``topic``, appending each to the store as it lands.

    Doc ids already present in the store are not regenerated, so a run that
    died halfway picks up where it stopped.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    path = corpus_path(out_dir, topic.slug)
    path.parent.mkdir(parents=True, exist_ok=True)
    have = {d.doc_id for d in read_documents(path, topic.slug)} if path.exists() else set()
    todo = [i for i in range(n) if i not in have]
    if have:
        logger.info("%d documents already stored, generating %d", len(have), len(todo))

    system, user = prompts.generation_prompts(topic.text, time_anchor)
    fp = prompts.fingerprint(system, user)
    write_lock = threading.Lock()

    def one(doc_id):
        req = ChatRequest(
            system=system,
            user=user,
            temperature=temperature,
            max_tokens=max_tokens,
            task="generate",
            nonce=doc_id,
        )
        text = gateway.chat(req)
        doc = Document(
            doc_id=doc_id,
            topic_slug=topic.slug,
            text=text,
            model=gateway.cfg.chat_model,
            created_at=datetime.now(timezone.utc),
            prompt_fingerprint=fp,
        )
        with write_lock, open(path, "a", encoding="utf-8", newline="\n") as fh:
            fh.write(doc.to_json() + "\n")
        return doc

    gateway.map(one, todo)
    return [d for d in read_documents(path, topic.slug) if d.doc_id < n]
