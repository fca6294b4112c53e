"""PC algorithm: adjacency search, collider orientation, Meek completion."""

from __future__ import annotations

from itertools import combinations

import numpy as np

from ..errors import DegenerateMatrix
from .citests import GSquareTest
from .graphs import Cpdag, apply_meek, orient


def skeleton(ci, max_cond=3):
    """Edge-removal phase.

    Conditioning sets come from the adjacencies frozen at the start of each
    level, so the result does not depend on the order edges are visited in.
    Returns ``(adjacency bool matrix, {(i, j): separating set})``.
    """
    n = ci.n_vars
    adj = ~np.eye(n, dtype=bool)
    sepsets = {}
    for level in range(max_cond + 1):
        frozen = adj.copy()
        testable = False
        for i in range(n):
            for j in range(i + 1, n):
                if not adj[i, j]:
                    continue
                pools = [
                    [k for k in np.flatnonzero(frozen[i]) if k != j],
                    [k for k in np.flatnonzero(frozen[j]) if k != i],
                ]
                done = False
                for pool in pools:
                    if len(pool) < level:
                        continue
                    testable = True
                    for S in combinations(pool, level):
                        if ci.independent(i, j, S):
                            adj[i, j] = adj[j, i] = False
                            sepsets[(i, j)] = set(int(s) for s in S)
                            done = True
                            break
                    if done or level == 0:
                        break
        if not testable:
            break
    return adj, sepsets


def orient_colliders(adj, sepsets):
    """Orient unshielded colliders; edges claimed in both directions stay undirected."""
    n = len(adj)
    G = adj.astype(np.int8)
    claims = set()
    for j in range(n):
        nb = np.flatnonzero(adj[j])
        for x in range(len(nb)):
            for y in range(x + 1, len(nb)):
                i, k = int(nb[x]), int(nb[y])
                if adj[i, k] or j in sepsets.get((i, k), set()):
                    continue
                claims.add((i, j))
                claims.add((k, j))
    for a, b in sorted(claims):
        if (b, a) in claims:
            continue
        orient(G, a, b)
    return G


def pc(data, alpha=0.1, max_cond=3, labels=None, method="gsq"):
    """Estimate a CPDAG.

    ``data`` is either a samples x variables array (tested with G-squared at
    level ``alpha``) or any object exposing ``n_vars`` and
    ``independent(i, j, S)``, such as :class:`DSeparationOracle`.
    """
    if hasattr(data, "independent"):
        ci = data
    else:
        ci = GSquareTest(np.asarray(data), alpha=alpha, method=method)
    if ci.n_vars < 2:
        raise DegenerateMatrix("PC needs at least two variables")
    adj, sepsets = skeleton(ci, max_cond)
    G = orient_colliders(adj, sepsets)
    apply_meek(G)
    return Cpdag.from_matrix(G, labels)
