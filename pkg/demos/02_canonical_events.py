"""Collapse paraphrased mentions into a small canonical vocabulary.

Shows the cluster-then-name strategy and the incremental registry with a
scripted matcher that renames an event partway through.

Run:  python demos/02_canonical_events.py
"""

from causal_elicit.canonicalize import canonicalize_embedding_first, canonicalize_incremental
from causal_elicit.llm_gateway import Gateway, ProviderConfig

lists = {
    0: ["yen weakens sharply", "US imposes tariffs"],
    1: ["the yen weakens sharply", "oil prices spike"],
    2: ["US imposes broad tariffs", "yen weakens sharply in 2026"],
    3: ["oil prices spike again"],
}
gateway = Gateway(ProviderConfig(kind="mock", seed=0))

reg, rewritten = canonicalize_embedding_first(lists, k_max=3, gateway=gateway)
print("clustered vocabulary:")
for ev in reg.events:
    print(f"  [{ev.canon_id}] {ev.name}: {ev.members}")
print("rewritten:", rewritten, "\n")


def matcher(t, scored):
    ev, cos = scored[0]
    name = "Yen depreciation" if "yen" in t else ev.name
    print(f"  match {t!r} -> [{ev.canon_id}] {ev.name!r} (cos {cos:.2f}), name {name!r}")
    return True, ev.canon_id, name


reg, rewritten = canonicalize_incremental(lists, gateway, tau=0.6, matcher=matcher)
print("\nincremental registry:", reg.names)
print("rewritten:", rewritten)
