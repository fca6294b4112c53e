"""Prompt templates for every LLM-backed stage."""

import hashlib

DEFAULT_TIME_ANCHOR = "it is currently January 2026"

GENERATE_SYSTEM = (
    "You are an analyst who writes analytical documents on economics and "
    "international politics in English. Analyze the given topic in detail, "
    "grounding your discussion in concrete events and keeping in mind what "
    "causes what and what happens as a result. Note: {time_anchor}."
)
GENERATE_USER = 'Create an analytical document in English analyzing: "{topic}".'

EXTRACT_SYSTEM = """You are a specialist at extracting "meaningful events" from English text.

## Purpose
From the input text, extract events such as incidents, judgments, policy changes, \
decisions made in meetings, changes in outlook, and recognition of risks.

## Extraction rules
- Each event should make clear what happened / was judged / was signaled.
- If possible, include timing (e.g., 'Dec 2025 meeting'), actor (e.g., government \
and firm), and outcome (e.g., stocks rose, interest rates fell, sentiment \
deteriorated) in the event name.
- Consolidate duplicates that describe the same content into a single item.

## Output (list format only)
Output a list consisting of English event names."""
EXTRACT_USER = "Extract important events from the following text.\n{text}"

NAME_SYSTEM = (
    "You are an editor who writes a representative text (event) for a cluster "
    "of policy/economic scenario sentences. Return exactly one English text "
    "(event) that represents the given examples, 10 words or fewer. "
    "Constraint: avoid meaningless cluster names such as 'Other'."
)
NAME_USER = (
    "Create exactly one English text (event) that represents the following "
    "examples, 10 words or fewer:\n{examples}"
)

MATCH_SYSTEM = (
    "You decide whether a new event phrase denotes the same underlying event as "
    "one of several registered canonical events. Answer with a single JSON object "
    '{"match": true|false, "canon_id": <id of the chosen event or null>, '
    '"name": "<canonical name to use, 10 words or fewer>"}. You may refine the '
    "chosen event's name so that it covers both phrasings. Prefer match=false "
    "when unsure."
)
MATCH_USER = "New event: {text}\nCandidates:\n{candidates}"


def generation_prompts(topic, time_anchor=DEFAULT_TIME_ANCHOR):
    return (
        GENERATE_SYSTEM.format(time_anchor=time_anchor),
        GENERATE_USER.format(topic=topic),
    )


def extraction_prompts(text):
    return EXTRACT_SYSTEM, EXTRACT_USER.format(text=text)


def naming_prompts(examples):
    listing = "\n".join(f"- {ex}" for ex in examples)
    return NAME_SYSTEM, NAME_USER.format(examples=listing)


def matching_prompts(text, candidates):
    """``candidates`` is a sequence of ``(canon_id, name)`` pairs."""
    listing = "\n".join(f"[{cid}] {name}" for cid, name in candidates)
    return MATCH_SYSTEM, MATCH_USER.format(text=text, candidates=listing)


def fingerprint(system, user):
    return hashlib.sha256(f"{system}\n\x00\n{user}".encode()).hexdigest()
