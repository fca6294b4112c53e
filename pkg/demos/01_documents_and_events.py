"""Sample scenario documents from the offline mock model and extract event lists.

Run:  python demos/01_documents_and_events.py
"""

import tempfile

from causal_elicit.corpus import Topic, generate_documents
from causal_elicit.extraction import extract_all, normalize_llm_list
from causal_elicit.llm_gateway import Gateway, ProviderConfig

topic = Topic.from_text("Trade policy and the yen")
gateway = Gateway(ProviderConfig(kind="mock", seed=42))

with tempfile.TemporaryDirectory() as out:
    docs = generate_documents(topic, 5, gateway, out)

print(f"{len(docs)} documents for slug {topic.slug!r}\n")
print(docs[0].text, "\n")

# model answers come back as JSON, list literals or bullets; all end up as lists
for raw in ['["tariffs rise", "yen weakens"]', "['tariffs rise', 'yen weakens']",
            "- tariffs rise\n- yen weakens", "tariffs rise, yen weakens"]:
    print(f"{raw!r:45} -> {normalize_llm_list(raw)}")

lists = extract_all(docs, gateway)
print()
for doc_id, mentions in lists.items():
    print(doc_id, mentions)
print(f"\nprovider calls so far: {gateway.calls}")
