"""Graph containers and orientation propagation.

Algorithms work on an ``n x n`` 0/1 mark matrix ``G``: ``G[a, b] = 1`` and
``G[b, a] = 0`` is a directed edge ``a -> b``; ``G[a, b] = G[b, a] = 1`` is an
undirected edge ``a - b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass
class Cpdag:
    n_vars: int
    directed: set = field(default_factory=set)
    undirected: set = field(default_factory=set)
    labels: Optional[list] = None

    def __post_init__(self):
        if self.labels is None:
            self.labels = [f"x{k}" for k in range(self.n_vars)]
        self.directed = {tuple(e) for e in self.directed}
        self.undirected = {frozenset(e) for e in self.undirected}
        for a, b in self.directed:
            if frozenset((a, b)) in self.undirected or (b, a) in self.directed:
                raise ValueError(f"pair {a},{b} carries two edge types")

    @classmethod
    def from_matrix(cls, G, labels=None):
        G = np.asarray(G)
        n = len(G)
        directed, undirected = set(), set()
        for a in range(n):
            for b in range(n):
                if G[a, b] and not G[b, a]:
                    directed.add((a, b))
                elif G[a, b] and G[b, a] and a < b:
                    undirected.add(frozenset((a, b)))
        return cls(n, directed, undirected, labels)

    def to_matrix(self):
        G = np.zeros((self.n_vars, self.n_vars), dtype=np.int8)
        for a, b in self.directed:
            G[a, b] = 1
        for e in self.undirected:
            a, b = tuple(e)
            G[a, b] = G[b, a] = 1
        return G

    @property
    def n_edges(self):
        return len(self.directed) + len(self.undirected)

    def edge_list(self):
        """``(source, target, directed)`` label triples sorted by (source, target)."""
        out = [(self.labels[a], self.labels[b], True) for a, b in self.directed]
        for e in self.undirected:
            a, b = sorted(e, key=lambda k: self.labels[k])
            out.append((self.labels[a], self.labels[b], False))
        return sorted(out)

    def relabel(self, perm):
        """Graph over variables reindexed so that new index ``k`` is old ``perm[k]``."""
        inv = {old: new for new, old in enumerate(perm)}
        return Cpdag(
            self.n_vars,
            {(inv[a], inv[b]) for a, b in self.directed},
            {frozenset(inv[x] for x in e) for e in self.undirected},
            [self.labels[old] for old in perm],
        )


@dataclass
class WeightedDag:
    """Linear SEM ``x = B x + e``; ``B[i, j] != 0`` means ``j -> i``."""

    order: list
    B: np.ndarray
    labels: Optional[list] = None
    converged: bool = True

    def __post_init__(self):
        self.B = np.asarray(self.B, dtype=float)
        if self.labels is None:
            self.labels = [f"x{k}" for k in range(len(self.B))]

    @property
    def n_vars(self):
        return len(self.B)

    def is_strictly_lower(self):
        P = self.B[np.ix_(self.order, self.order)]
        return not np.triu(P).any()

    def edge_list(self):
        out = []
        for i, j in zip(*np.nonzero(self.B)):
            out.append((self.labels[j], self.labels[i], float(self.B[i, j])))
        return sorted(out)


# -- mark-matrix helpers -----------------------------------------------------


def adjacent(G, a, b):
    return bool(G[a, b] or G[b, a])


def is_directed(G, a, b):
    return bool(G[a, b] and not G[b, a])


def is_undirected(G, a, b):
    return bool(G[a, b] and G[b, a])


def has_directed_path(G, src, dst):
    """Directed-only reachability ``src ~> dst``."""
    n = len(G)
    seen, stack = {src}, [src]
    while stack:
        a = stack.pop()
        for b in range(n):
            if G[a, b] and not G[b, a] and b not in seen:
                if b == dst:
                    return True
                seen.add(b)
                stack.append(b)
    return False


def orient(G, a, b):
    """Make ``a - b`` into ``a -> b`` unless that closes a directed cycle."""
    if has_directed_path(G, b, a):
        return False
    G[b, a] = 0
    return True


def _meek_rule(G, a, b):
    n = len(G)
    others = [c for c in range(n) if c != a and c != b]
    # R1: c -> a - b, c and b nonadjacent
    for c in others:
        if is_directed(G, c, a) and not adjacent(G, c, b):
            return True
    # R2: a -> c -> b
    for c in others:
        if is_directed(G, a, c) and is_directed(G, c, b):
            return True
    # R3: a - c -> b and a - d -> b with c, d nonadjacent
    kites = [c for c in others if is_undirected(G, a, c) and is_directed(G, c, b)]
    for x in range(len(kites)):
        for y in range(x + 1, len(kites)):
            if not adjacent(G, kites[x], kites[y]):
                return True
    # R4: a - d -> c -> b with d, b nonadjacent and a, c adjacent
    for c in others:
        if not (is_directed(G, c, b) and adjacent(G, a, c)):
            continue
        for d in others:
            if (d != c and is_undirected(G, a, d) and is_directed(G, d, c)
                    and not adjacent(G, d, b)):
                return True
    return False


def apply_meek(G):
    """Apply Meek rules R1-R4 in place until nothing changes."""
    n = len(G)
    changed = True
    while changed:
        changed = False
        for a in range(n):
            for b in range(n):
                if a != b and is_undirected(G, a, b) and _meek_rule(G, a, b):
                    if orient(G, a, b):
                        changed = True
    return G


def meek_orient(g: Cpdag) -> Cpdag:
    G = g.to_matrix()
    apply_meek(G)
    return Cpdag.from_matrix(G, list(g.labels))


def dag_to_cpdag(D):
    """CPDAG mark matrix of the equivalence class of DAG adjacency ``D``."""
    D = np.asarray(D)
    n = len(D)
    G = ((D + D.T) > 0).astype(np.int8)
    for j in range(n):
        parents = np.flatnonzero(D[:, j])
        for x in range(len(parents)):
            for y in range(x + 1, len(parents)):
                i, k = parents[x], parents[y]
                if not adjacent(D, i, k):
                    G[j, i] = 0
                    G[j, k] = 0
    return apply_meek(G)


def consistent_extension(G):
    """Orient every undirected edge of a PDAG without new v-structures or cycles.

    Dor and Tarsi's elimination: repeatedly remove a sink whose undirected
    neighbours are adjacent to all its other neighbours. Returns a DAG
    adjacency matrix, or None if the PDAG admits no extension.
    """
    G = np.array(G, dtype=np.int8)
    n = len(G)
    D = np.zeros((n, n), dtype=np.int8)
    for a in range(n):
        for b in range(n):
            if is_directed(G, a, b):
                D[a, b] = 1
    alive = list(range(n))
    while alive:
        for x in alive:
            if any(is_directed(G, x, y) for y in alive if y != x):
                continue
            und = [y for y in alive if y != x and is_undirected(G, x, y)]
            nbrs = [y for y in alive if y != x and adjacent(G, x, y)]
            if all(adjacent(G, y, z) for y in und for z in nbrs if z != y):
                for y in und:
                    D[y, x] = 1
                for y in alive:
                    G[x, y] = G[y, x] = 0
                alive.remove(x)
                break
        else:
            return None
    return D
