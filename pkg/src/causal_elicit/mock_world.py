"""Synthetic scenario world behind the offline mock provider.

The mock chat endpoint has to return something the downstream stages can chew
on: documents that mention events, event lists in the messy formats real models
produce, and cluster names. Documents are sampled from a small binary
noisy-OR network over latent events. Each active event is written with one of
several paraphrases so that canonicalization has real surface variation to
collapse.
"""

import hashlib
import json
import re

import numpy as np

# (paraphrases, parents); parents index earlier entries
LATENT_EVENTS = [
    (
        [
            "US imposes broad tariffs on imports",
            "US imposes broad tariffs on all imports",
            "broad US tariffs imposed on imports",
            "Washington imposes broad tariffs on imports",
        ],
        [],
    ),
    (
        [
            "US tightens export controls on advanced chips",
            "US tightens chip export controls",
            "tighter US export controls on advanced chips",
            "Washington tightens export controls on chips",
        ],
        [],
    ),
    (
        [
            "oil prices spike on Middle East sanctions",
            "oil prices spike after new sanctions",
            "sanctions push oil prices sharply higher",
        ],
        [],
    ),
    (
        [
            "yen weakens sharply against the dollar",
            "yen weakens against the US dollar",
            "sharp yen depreciation against the dollar",
        ],
        [0],
    ),
    (
        [
            "Japanese automakers shift production to the US",
            "Japanese automakers move production to the US",
            "automakers from Japan shift output to US plants",
        ],
        [0],
    ),
    (
        [
            "semiconductor supply chains are disrupted",
            "semiconductor supply chain disruption deepens",
            "disruption in semiconductor supply chains",
        ],
        [1],
    ),
    (
        [
            "shipping costs rise on longer trade routes",
            "shipping costs rise sharply",
            "rising shipping costs on rerouted trade",
        ],
        [2],
    ),
    (
        [
            "Japan intervenes in the currency market",
            "Japan intervenes in FX markets to support the yen",
            "Japanese currency market intervention",
        ],
        [3],
    ),
    (
        [
            "Japanese FDI in the US rises",
            "Japanese FDI into the US increases",
            "rising Japanese direct investment in the US",
        ],
        [4, 5],
    ),
    (
        [
            "import inflation rises in Japan",
            "imported inflation rises in Japan",
            "Japan faces rising import inflation",
        ],
        [3, 2],
    ),
    (
        [
            "Bank of Japan raises interest rates",
            "Bank of Japan hikes interest rates",
            "BoJ raises its policy interest rate",
        ],
        [9],
    ),
    (
        [
            "Japanese exporters' margins are squeezed",
            "Japanese exporters see margins squeezed",
            "margin squeeze for Japanese exporters",
        ],
        [0, 6],
    ),
]

ROOT_PROB = 0.45
LEAK = 0.08
EDGE_STRENGTH = 0.75

TIME_MODIFIERS = ["", " in 2026", " by mid-2026", " after 2026", " through 2027"]

HEADER = "Scenario analysis: {topic}"


def stable_seed(*parts):
    """64-bit seed from arbitrary parts, stable across processes."""
    h = hashlib.sha256("\x1f".join(str(p) for p in parts).encode())
    return int.from_bytes(h.digest()[:8], "little")


def sample_active(rng):
    active = np.zeros(len(LATENT_EVENTS), dtype=bool)
    for k, (_, parents) in enumerate(LATENT_EVENTS):
        if not parents:
            p = ROOT_PROB
        else:
            n_on = int(sum(active[j] for j in parents))
            p = 1.0 - (1.0 - LEAK) * (1.0 - EDGE_STRENGTH) ** n_on
        active[k] = rng.random() < p
    return active


def write_document(topic, rng):
    active = sample_active(rng)
    lines = [HEADER.format(topic=topic), ""]
    for k in np.flatnonzero(active):
        variants = LATENT_EVENTS[k][0]
        phrase = variants[rng.integers(len(variants))]
        phrase += TIME_MODIFIERS[rng.integers(len(TIME_MODIFIERS))]
        lines.append(phrase[0].upper() + phrase[1:] + ".")
    if not active.any():
        lines.append("No major developments are expected.")
    return "\n".join(lines)


def extract_from_text(text, rng):
    """Return the event sentences of a mock document in a randomly chosen list format."""
    body = text.split("\n", 2)[-1] if text.startswith("Scenario analysis:") else text
    events = [
        s.strip().rstrip(".")
        for s in re.split(r"[\n]+", body)
        if s.strip() and not s.startswith("No major developments")
    ]
    fmt = rng.integers(3)
    if fmt == 0:
        return json.dumps(events)
    if fmt == 1:
        return "[" + ", ".join(repr(e) for e in events) + "]"
    return "\n".join(f"- {e}" for e in events)
