"""Build the document-by-event matrix and OR-merge it onto canonical events.

Run:  python demos/03_incidence_matrix.py
"""

from causal_elicit.canonicalize import canonicalize_embedding_first, unique_preserve_order
from causal_elicit.incidence import aggregate, build_raw_matrix, drop_noninformative
from causal_elicit.llm_gateway import Gateway, ProviderConfig

lists = {
    0: ["tariffs rise", "yen weakens"],
    1: ["tariffs go up", "exports fall"],
    2: ["yen weakens sharply"],
    3: ["tariffs rise", "exports fall", "yen weakens"],
    4: [],
}
vocab = unique_preserve_order(lists)
X = build_raw_matrix(lists, vocab)
print("raw columns:", X.col_labels)
print(X.data, "\n")

reg, _ = canonicalize_embedding_first(lists, k_max=3, gateway=Gateway(ProviderConfig(seed=1)))
Z = aggregate(X, reg)
print("canonical columns:", Z.col_labels)
print(Z.data, "\n")

# a column present in every document carries no information for discovery
Z = drop_noninformative(Z)
print("kept:", Z.col_labels, "dropped:", Z.dropped)
