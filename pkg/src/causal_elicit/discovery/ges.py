"""Greedy equivalence search over CPDAGs with Insert/Delete operators."""

from __future__ import annotations

from itertools import combinations

import numpy as np

from ..errors import DegenerateMatrix
from .graphs import (
    Cpdag,
    adjacent,
    consistent_extension,
    dag_to_cpdag,
    is_directed,
    is_undirected,
)
from .scores import DecomposableScore

EPS = 1e-9


def _subsets(items):
    for k in range(len(items) + 1):
        yield from combinations(items, k)


def _is_clique(G, nodes):
    return all(adjacent(G, a, b) for a, b in combinations(nodes, 2))


def _parents(G, y):
    return {a for a in range(len(G)) if is_directed(G, a, y)}


def _neighbors(G, y):
    return {a for a in range(len(G)) if is_undirected(G, a, y)}


def _semidirected_path_blocked(G, src, dst, blocked):
    """True if every semi-directed path ``src ~> dst`` passes through ``blocked``."""
    n = len(G)
    seen, stack = {src}, [src]
    while stack:
        a = stack.pop()
        for b in range(n):
            if not G[a, b] or b in seen or b in blocked:
                continue
            if b == dst:
                return False
            seen.add(b)
            stack.append(b)
    return True


def _best_insert(G, score):
    n = len(G)
    best = (EPS, None)
    for x in range(n):
        for y in range(n):
            if x == y or adjacent(G, x, y):
                continue
            nbr_y = _neighbors(G, y)
            na = {t for t in nbr_y if adjacent(G, t, x)}
            pool = sorted(t for t in nbr_y if not adjacent(G, t, x))
            pa = _parents(G, y)
            for T in _subsets(pool):
                nat = na | set(T)
                if not _is_clique(G, sorted(nat)):
                    continue
                if not _semidirected_path_blocked(G, y, x, nat):
                    continue
                base = pa | nat
                delta = score.local(y, base | {x}) - score.local(y, base)
                if delta > best[0]:
                    best = (delta, (x, y, T))
    return best


def _best_delete(G, score):
    n = len(G)
    best = (EPS, None)
    for x in range(n):
        for y in range(n):
            if x == y or not G[x, y]:
                continue
            na = sorted(t for t in _neighbors(G, y) if adjacent(G, t, x))
            pa = _parents(G, y) - {x}
            for H in _subsets(na):
                rest = set(na) - set(H)
                if not _is_clique(G, sorted(rest)):
                    continue
                base = pa | rest
                delta = score.local(y, base) - score.local(y, base | {x})
                if delta > best[0]:
                    best = (delta, (x, y, H))
    return best


def _recomplete(G):
    D = consistent_extension(G)
    if D is None:
        raise RuntimeError("operator produced a PDAG with no consistent extension")
    return dag_to_cpdag(D).astype(np.int8)


def _apply_insert(G, x, y, T):
    G = G.copy()
    G[x, y], G[y, x] = 1, 0
    for t in T:
        G[t, y], G[y, t] = 1, 0
    return _recomplete(G)


def _apply_delete(G, x, y, H):
    G = G.copy()
    G[x, y] = G[y, x] = 0
    for h in H:
        G[y, h], G[h, y] = 1, 0
        if is_undirected(G, x, h):
            G[x, h], G[h, x] = 1, 0
    return _recomplete(G)


def cpdag_score(G, score):
    return score.total(consistent_extension(G))


def ges(data, score="bic", ess=1.0, labels=None, trace=None):
    """Forward insertions then backward deletions, each picking the best move.

    Ties go to the lowest ``(source, target)`` pair. If ``trace`` is a list,
    ``(phase, total score)`` is appended after the start and after every move.
    """
    if not isinstance(score, DecomposableScore):
        score = DecomposableScore(np.asarray(data), kind=score, ess=ess)
    n = score.n_vars
    if n < 2:
        raise DegenerateMatrix("GES needs at least two variables")
    G = np.zeros((n, n), dtype=np.int8)
    if trace is not None:
        trace.append(("start", cpdag_score(G, score)))
    for phase, search, apply in (
        ("forward", _best_insert, _apply_insert),
        ("backward", _best_delete, _apply_delete),
    ):
        while True:
            delta, move = search(G, score)
            if move is None:
                break
            G = apply(G, *move)
            if trace is not None:
                trace.append((phase, cpdag_score(G, score)))
    return Cpdag.from_matrix(G, labels)
