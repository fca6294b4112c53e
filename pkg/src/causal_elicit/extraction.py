"""Event extraction and normalization of free-form LLM list output."""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path

from . import prompts
from .errors import CorruptCorpus
from .llm_gateway import ChatRequest, Gateway

logger = logging.getLogger(__name__)

RAW_EVENTS_FILE = "events_raw.jsonl"

_FENCE = re.compile(r"^```[\w-]*\s*\n(.*?)\n?```$", re.S)
_BULLET = re.compile(r"^\s*(?:[-*•]|\d{1,2}\.)(?:\s+|$)")
_QUOTES = {'"': '"', "'": "'", "“": "”", "‘": "’", "`": "`"}


@dataclass(frozen=True)
class EventMention:
    doc_id: int
    position: int
    raw: str
    cleaned: str


def _strings(items):
    if isinstance(items, list) and items and all(isinstance(x, str) for x in items):
        return items
    return None


def _from_json(text):
    try:
        value = json.loads(text)
    except (json.JSONDecodeError, RecursionError):
        return None
    if isinstance(value, dict):
        found = [v for v in value.values() if _strings(v) is not None]
        return found[0] if len(found) == 1 else None
    return _strings(value)


def _from_quoted_list(text):
    """Parse ``['a', "b", ...]``. Returns None if ``text`` is not exactly that."""
    n, i = len(text), 0

    def skip_ws(i):
        while i < n and text[i].isspace():
            i += 1
        return i

    i = skip_ws(i)
    if i >= n or text[i] != "[":
        return None
    i = skip_ws(i + 1)
    items = []
    if i < n and text[i] == "]":
        return None if skip_ws(i + 1) != n else items
    while True:
        if i >= n or text[i] not in "'\"":
            return None
        quote, i, buf = text[i], i + 1, []
        while i < n and text[i] != quote:
            if text[i] == "\\" and i + 1 < n:
                nxt = text[i + 1]
                buf.append({"n": "\n", "t": "\t"}.get(nxt, nxt))
                i += 2
            else:
                buf.append(text[i])
                i += 1
        if i >= n:
            return None
        items.append("".join(buf))
        i = skip_ws(i + 1)
        if i < n and text[i] == ",":
            i = skip_ws(i + 1)
            if i < n and text[i] == "]":
                break
            continue
        if i < n and text[i] == "]":
            break
        return None
    return items if skip_ws(i + 1) == n else None


def _fallback_split(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    frags = [_BULLET.sub("", ln, count=1) for ln in lines]
    if len(lines) == 1:
        line = frags[0].strip()
        if line.startswith("[") and line.endswith("]"):
            line = line[1:-1]
        frags = line.split(",")
    return frags


def normalize_llm_list(text):
    """Turn an LLM's list-ish answer into a list of strings.

    Tries a JSON array (or an object holding exactly one array of strings),
    then a quoted list literal, then splitting on lines and bullet markers,
    with a comma split for one-line answers. Never raises.
    """
    text = (text or "").strip()
    fenced = _FENCE.match(text)
    if fenced:
        text = fenced.group(1).strip()
    for strategy in (_from_json, _from_quoted_list, _fallback_split):
        items = strategy(text)
        if items:
            items = [s.strip() for s in items if s.strip()]
            if items:
                return items
    return []


def clean_mention(s):
    """Trim, collapse whitespace, strip surrounding quotes and trailing ``,``/``;``."""
    prev = None
    while s != prev:
        prev = s
        s = " ".join(s.split()).rstrip(",;").strip()
        if len(s) >= 2 and _QUOTES.get(s[0]) == s[-1]:
            s = s[1:-1].strip()
    return s


def extract_events(doc, gateway: Gateway, temperature=0.0):
    system, user = prompts.extraction_prompts(doc.text)
    raw = gateway.chat(
        ChatRequest(system=system, user=user, temperature=temperature, task="extract")
    )
    items = normalize_llm_list(raw)
    if not items and raw.strip(" \n\t[]{}\"'"):
        logger.warning("doc %s: could not parse extraction output; treating as no events", doc.doc_id)
    out, seen = [], set()
    for item in items:
        cleaned = clean_mention(item)
        if not cleaned or cleaned in seen:
            continue
        seen.add(cleaned)
        out.append(EventMention(doc.doc_id, len(out), item, cleaned))
    return out


def extract_all(docs, gateway: Gateway):
    """Extract every document; returns ``{doc_id: [cleaned mention, ...]}``."""
    results = gateway.map(lambda d: extract_events(d, gateway), docs)
    return {d.doc_id: [m.cleaned for m in ms] for d, ms in zip(docs, results)}


def write_event_lists(path, lists):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for doc_id in sorted(lists):
            rec = {"doc_id": doc_id, "mentions": list(lists[doc_id])}
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def read_event_lists(path):
    lists = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                doc_id, mentions = rec["doc_id"], rec["mentions"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise CorruptCorpus(lineno, "bad event-list record") from exc
            if not isinstance(mentions, list) or not all(isinstance(m, str) for m in mentions):
                raise CorruptCorpus(lineno, "mentions must be a list of strings")
            lists[int(doc_id)] = mentions
    return lists
