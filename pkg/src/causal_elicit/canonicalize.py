"""Mapping raw event mentions onto a canonical event vocabulary.

Two strategies are provided. ``canonicalize_embedding_first`` embeds the
unique mentions, clusters them and asks the LLM to name each cluster.
``canonicalize_incremental`` walks the mentions in document order and keeps a
registry that the LLM adjudicates into, renaming events as it goes.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import prompts
from .clustering import l2_normalize_rows, minibatch_kmeans, representatives
from .errors import EmptyResponse, NoEvents, TransportError
from .extraction import clean_mention
from .llm_gateway import ChatRequest, Gateway

logger = logging.getLogger(__name__)

CANON_MAP_FILE = "canonical_map.json"
CANON_EVENTS_FILE = "events_canon.jsonl"

MAX_NAME_WORDS = 10
BANNED_NAMES = {
    "other", "others", "other events", "misc", "miscellaneous", "various",
    "various events", "general", "unknown", "none", "n/a", "na", "cluster",
}
_BULLET = re.compile(r"^\s*(?:[-*•]|\d{1,2}[.)])\s+")


def _as_dict(event_lists):
    if isinstance(event_lists, dict):
        return {int(k): list(v) for k, v in event_lists.items()}
    return {i: list(v) for i, v in enumerate(event_lists)}


class UniqueVocabulary:
    def __init__(self, items=()):
        self.items = list(items)
        self.index = {u: m for m, u in enumerate(self.items)}
        if len(self.index) != len(self.items):
            raise ValueError("vocabulary items must be distinct")

    @property
    def M(self):
        return len(self.items)

    def __len__(self):
        return len(self.items)

    def __getitem__(self, m):
        return self.items[m]

    def __iter__(self):
        return iter(self.items)

    def __eq__(self, other):
        if isinstance(other, UniqueVocabulary):
            return self.items == other.items
        return self.items == list(other)

    def __repr__(self):
        return f"UniqueVocabulary({self.items!r})"


def unique_preserve_order(event_lists):
    """Distinct non-empty mentions in order of first appearance (doc_id, then position)."""
    lists = _as_dict(event_lists)
    seen = {}
    for doc_id in sorted(lists):
        for s in lists[doc_id]:
            if s and s not in seen:
                seen[s] = None
    return UniqueVocabulary(seen)


@dataclass
class CanonicalEvent:
    canon_id: int
    name: str
    members: list = field(default_factory=list)
    occurrences: list = field(default_factory=list)


@dataclass
class CanonicalRegistry:
    events: list = field(default_factory=list)
    map: dict = field(default_factory=dict)

    def new_event(self, name, member):
        ev = CanonicalEvent(canon_id=len(self.events), name=name)
        self.events.append(ev)
        self.add_member(ev.canon_id, member)
        return ev

    def add_member(self, canon_id, raw):
        if raw not in self.map:
            self.map[raw] = canon_id
            self.events[canon_id].members.append(raw)

    def by_name(self, name):
        for ev in self.events:
            if ev.name == name:
                return ev
        return None

    @property
    def names(self):
        return [ev.name for ev in self.events]

    def rewrite(self, event_lists):
        """Apply f elementwise; empty strings and unknown strings pass through."""
        lists = _as_dict(event_lists)
        return {
            d: [self.events[self.map[s]].name if s in self.map else s for s in lst]
            for d, lst in lists.items()
        }

    def record_occurrences(self, event_lists):
        for ev in self.events:
            ev.occurrences = []
        lists = _as_dict(event_lists)
        for d in sorted(lists):
            for k, s in enumerate(lists[d]):
                if s:
                    self.events[self.map[s]].occurrences.append((d, k))

    def to_dict(self, params=None):
        return {
            "events": [
                {
                    "canon_id": ev.canon_id,
                    "name": ev.name,
                    "members": list(ev.members),
                    "occurrences": [list(o) for o in ev.occurrences],
                }
                for ev in self.events
            ],
            "params": dict(params or {}),
        }

    @classmethod
    def from_dict(cls, data):
        reg = cls()
        for pos, rec in enumerate(data["events"]):
            if rec.get("canon_id", pos) != pos:
                raise ValueError("canon_id values must be 0..C-1 in file order")
            ev = CanonicalEvent(canon_id=pos, name=rec["name"])
            reg.events.append(ev)
            for raw in rec["members"]:
                if raw in reg.map:
                    raise ValueError(f"mention {raw!r} belongs to two canonical events")
                reg.add_member(pos, raw)
            ev.occurrences = [tuple(o) for o in rec.get("occurrences", [])]
        return reg


def write_registry(path, reg, params=None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(reg.to_dict(params), indent=2, ensure_ascii=False)
    path.write_text(text + "\n", encoding="utf-8")


def read_registry(path):
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return CanonicalRegistry.from_dict(data), data.get("params", {})


# -- naming -----------------------------------------------------------------


def _clean_name(text):
    lines = [ln for ln in (text or "").splitlines() if ln.strip()]
    if not lines:
        return ""
    return clean_mention(_BULLET.sub("", lines[0]))


def _acceptable_name(name):
    if not name or len(name.split()) > MAX_NAME_WORDS:
        return False
    return name.lower().strip(" .!") not in BANNED_NAMES


def name_cluster(examples, gateway: Gateway, retries=1):
    """Ask for one short canonical label; falls back to ``examples[0]``."""
    if not examples:
        raise ValueError("name_cluster needs at least one example")
    system, user = prompts.naming_prompts(examples)
    req = ChatRequest(system=system, user=user, temperature=0.0, max_tokens=64, task="name")
    for _ in range(retries + 1):
        try:
            name = _clean_name(gateway.chat(req))
        except (TransportError, EmptyResponse) as exc:
            logger.warning("naming failed (%s); using first representative", exc)
            break
        if _acceptable_name(name):
            return name
    return examples[0]


# -- Algorithm: embedding-first ----------------------------------------------


def canonicalize_embedding_first(event_lists, k_max, gateway: Gateway, m=5, seed=0):
    """Cluster unique mentions and name each cluster.

    Returns ``(registry, rewritten_lists)``. Clusters that receive the same
    name become one canonical event. Canonical ids follow the first
    appearance of any member in the vocabulary.
    """
    lists = _as_dict(event_lists)
    vocab = unique_preserve_order(lists)
    if vocab.M == 0:
        raise NoEvents("no event mentions in any document")
    H = l2_normalize_rows(gateway.embed_batch(vocab.items))
    model = minibatch_kmeans(H, min(k_max, vocab.M), seed=seed)
    names = gateway.map(
        lambda c: clean_mention(name_cluster(representatives(model, H, vocab, c, m), gateway)),
        range(model.K),
    )

    reg = CanonicalRegistry()
    for u, label in zip(vocab.items, model.labels):
        ev = reg.by_name(names[label])
        if ev is None:
            reg.new_event(names[label], u)
        else:
            reg.add_member(ev.canon_id, u)
    rewritten = reg.rewrite(lists)
    reg.record_occurrences(lists)
    return reg, rewritten


# -- Algorithm: incremental LLM-assisted -------------------------------------


class EmbeddingCache:
    def __init__(self, gateway: Gateway):
        self.gateway = gateway
        self.vectors = {}

    def prefetch(self, texts):
        missing = list(dict.fromkeys(t for t in texts if t and t not in self.vectors))
        if missing:
            H = l2_normalize_rows(self.gateway.embed_batch(missing))
            self.vectors.update(zip(missing, H))

    def __getitem__(self, text):
        if text not in self.vectors:
            self.prefetch([text])
        return self.vectors[text]


def candidates(reg, t, gateway: Gateway, tau=0.80, top_k=5, cache=None):
    """Registered events whose mean member embedding has cosine >= ``tau`` with ``t``.

    Returns ``[(event, cosine), ...]`` best first, at most ``top_k``.
    """
    if not reg.events:
        return []
    cache = cache or EmbeddingCache(gateway)
    cache.prefetch([t] + [mem for ev in reg.events for mem in ev.members])
    v = cache[t]
    scored = []
    for ev in reg.events:
        centre = np.mean([cache[mem] for mem in ev.members], axis=0)
        norm = np.linalg.norm(centre)
        cos = float(v @ centre / norm) if norm > 0 else 0.0
        if cos >= tau:
            scored.append((ev, cos))
    scored.sort(key=lambda p: (-p[1], p[0].canon_id))
    return scored[:top_k]


def parse_match(text, candidate_ids):
    """Parse a matcher reply into ``(match, canon_id, name)``; anything odd is a non-match."""
    m = re.search(r"\{.*\}", text or "", re.S)
    if not m:
        return False, None, ""
    try:
        rec = json.loads(m.group(0))
    except json.JSONDecodeError:
        return False, None, ""
    if not isinstance(rec, dict) or rec.get("match") is not True:
        return False, None, ""
    cid = rec.get("canon_id")
    if isinstance(cid, bool) or not isinstance(cid, int) or cid not in candidate_ids:
        return False, None, ""
    name = rec.get("name")
    return True, cid, clean_mention(name) if isinstance(name, str) else ""


def llm_match(t, scored, gateway: Gateway):
    system, user = prompts.matching_prompts(t, [(ev.canon_id, ev.name) for ev, _ in scored])
    req = ChatRequest(system=system, user=user, temperature=0.0, max_tokens=128, task="match")
    try:
        reply = gateway.chat(req)
    except (TransportError, EmptyResponse) as exc:
        logger.warning("matcher call failed (%s); treating as no match", exc)
        return False, None, ""
    return parse_match(reply, {ev.canon_id for ev, _ in scored})


def canonicalize_incremental(event_lists, gateway: Gateway, tau=0.80, top_k=5, matcher=None):
    """Sequential registry build with LLM adjudication and global renames.

    ``matcher(t, scored) -> (match, canon_id, name)`` overrides the LLM
    matcher. A mention already registered verbatim goes straight to its event.
    """
    lists = _as_dict(event_lists)
    matcher = matcher or (lambda t, scored: llm_match(t, scored, gateway))
    cache = EmbeddingCache(gateway)
    cache.prefetch([clean_mention(s) for lst in lists.values() for s in lst])

    reg = CanonicalRegistry()
    out = {}
    for i in sorted(lists):
        out[i] = list(lists[i])
        for k, raw in enumerate(lists[i]):
            t = clean_mention(raw)
            if not t:
                out[i][k] = t
                continue
            if t in reg.map:
                ev = reg.events[reg.map[t]]
                ev.occurrences.append((i, k))
                out[i][k] = ev.name
                continue
            scored = candidates(reg, t, gateway, tau, top_k, cache)
            match, cid, u = matcher(t, scored) if scored else (False, None, "")
            if not match:
                ev = reg.new_event(t, t)
                ev.occurrences.append((i, k))
                out[i][k] = t
                continue
            ev = reg.events[cid]
            ev.occurrences.append((i, k))
            reg.add_member(cid, t)
            other = reg.by_name(u) if u else None
            if u and u != ev.name and other is None:
                ev.name = u
                for j, pos in ev.occurrences:
                    out[j][pos] = u
            else:
                out[i][k] = ev.name
    return reg, out


def compose(first, second):
    """Registry for raw mentions given a registry over ``first``'s canonical names."""
    reg = CanonicalRegistry()
    for ev2 in second.events:
        ev = CanonicalEvent(canon_id=ev2.canon_id, name=ev2.name)
        ev.occurrences = list(ev2.occurrences)
        reg.events.append(ev)
    for raw, cid1 in first.map.items():
        reg.add_member(second.map[first.events[cid1].name], raw)
    return reg


def canonicalize(event_lists, gateway: Gateway, method="embedding", k_max=30, m=5,
                 seed=0, tau=0.80, top_k=5):
    """Dispatch on ``method``: ``embedding``, ``incremental`` or ``both``."""
    if method == "embedding":
        return canonicalize_embedding_first(event_lists, k_max, gateway, m=m, seed=seed)
    if method == "incremental":
        return canonicalize_incremental(event_lists, gateway, tau=tau, top_k=top_k)
    if method == "both":
        reg1, lists1 = canonicalize_embedding_first(event_lists, k_max, gateway, m=m, seed=seed)
        reg2, lists2 = canonicalize_incremental(lists1, gateway, tau=tau, top_k=top_k)
        return compose(reg1, reg2), lists2
    raise ValueError(f"unknown canonicalization method {method!r}")
