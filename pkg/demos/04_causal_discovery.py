"""PC, GES and LiNGAM on small synthetic data with a known answer.

Run:  python demos/04_causal_discovery.py
"""

import numpy as np

from causal_elicit.discovery import DSeparationOracle, direct_lingam, ges, gsq_ci_test, ica_lingam, pc
from causal_elicit.report import to_dot

labels = ["X", "Y", "Z"]

# perfect independence information: the collider X -> Z <- Y is fully oriented
D = np.zeros((3, 3), dtype=int)
D[0, 2] = D[1, 2] = 1
print("PC with a d-separation oracle:", pc(DSeparationOracle(D), labels=labels).edge_list())

# binary data where Z = X OR Y with 5% flips
rng = np.random.default_rng(0)
x, y = rng.integers(0, 2, 2000), rng.integers(0, 2, 2000)
z = (x | y) ^ (rng.random(2000) < 0.05)
data = np.column_stack([x, y, z])
print("G2 test X vs Y:", gsq_ci_test(data, 0, 1))
print("G2 test X vs Y | Z:", gsq_ci_test(data, 0, 1, (2,)))
g_pc = pc(data, alpha=0.1, labels=labels)
trace = []
g_ges = ges(data, labels=labels, trace=trace)
print("PC :", g_pc.edge_list())
print("GES:", g_ges.edge_list())
print("GES score trace:", [(phase, round(float(s), 1)) for phase, s in trace])
print()
print(to_dot(g_pc, "pc"))

# continuous data with uniform noise, x1 -> x2 with weight 0.8
x1 = rng.uniform(-1, 1, 5000)
x2 = 0.8 * x1 + rng.uniform(-0.1, 0.1, 5000)
X = np.column_stack([x1, x2])
for fit in (direct_lingam, ica_lingam):
    g = fit(X, labels=["x1", "x2"])
    print(f"{fit.__name__}: order {g.order}, edges {g.edge_list()}")
