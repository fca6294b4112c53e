"""Conditional independence tests for discrete data, plus an exact d-separation oracle."""

from __future__ import annotations

from collections import namedtuple

import numpy as np
from scipy.stats import chi2

from ..errors import BadVars

CiResult = namedtuple("CiResult", "independent g2 dof p")

MIN_STRATUM = 5


def _codes(data):
    """Integer-code every column (values -> 0..card-1)."""
    data = np.asarray(data)
    out = np.empty(data.shape, dtype=np.int64)
    for c in range(data.shape[1]):
        _, out[:, c] = np.unique(data[:, c], return_inverse=True)
    return out


def _statistic(codes, i, j, S, method, min_stratum):
    n = len(codes)
    if S:
        _, strata = np.unique(codes[:, list(S)], axis=0, return_inverse=True)
        strata = strata.ravel()
    else:
        strata = np.zeros(n, dtype=np.int64)
    stat, dof = 0.0, 0
    ri, rj = codes[:, i].max() + 1, codes[:, j].max() + 1
    for s in range(strata.max() + 1):
        rows = strata == s
        ns = int(rows.sum())
        if ns < min_stratum:
            continue
        O = np.zeros((ri, rj))
        np.add.at(O, (codes[rows, i], codes[rows, j]), 1.0)
        O = O[O.sum(1) > 0][:, O.sum(0) > 0]
        d = (O.shape[0] - 1) * (O.shape[1] - 1)
        if d == 0:
            continue
        E = np.outer(O.sum(1), O.sum(0)) / ns
        if method == "gsq":
            pos = O > 0
            stat += 2.0 * float((O[pos] * np.log(O[pos] / E[pos])).sum())
        else:
            stat += float(((O - E) ** 2 / E).sum())
        dof += d
    return stat, dof


def gsq_ci_test(Z, i, j, S=(), alpha=0.1, method="gsq", min_stratum=MIN_STRATUM):
    """G-squared likelihood-ratio test of ``Z[:, i] _||_ Z[:, j] | Z[:, S]``.

    Strata with fewer than ``min_stratum`` rows or no variation are skipped;
    with no degrees of freedom left the pair is declared independent.
    ``method="chi2"`` swaps in Pearson's statistic.
    """
    Z = np.asarray(Z)
    return _test(_codes(Z), i, j, S, alpha, method, min_stratum)


def _test(codes, i, j, S, alpha, method, min_stratum):
    p_vars = codes.shape[1]
    S = tuple(S)
    if i == j or i in S or j in S or not all(0 <= v < p_vars for v in (i, j, *S)):
        raise BadVars(f"bad variables i={i} j={j} S={S}")
    stat, dof = _statistic(codes, i, j, S, method, min_stratum)
    if dof == 0:
        return CiResult(True, stat, 0, 1.0)
    p = float(chi2.sf(stat, dof))
    return CiResult(p > alpha, stat, dof, p)


class GSquareTest:
    """Cached CI tester over one data matrix (``independent(i, j, S) -> bool``)."""

    def __init__(self, data, alpha=0.1, method="gsq", min_stratum=MIN_STRATUM):
        if not 0.0 < alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        self.codes = _codes(data)
        self.n_vars = self.codes.shape[1]
        self.alpha = alpha
        self.method = method
        self.min_stratum = min_stratum
        self._cache = {}

    def result(self, i, j, S=()):
        key = (min(i, j), max(i, j), tuple(sorted(S)))
        if key not in self._cache:
            self._cache[key] = _test(
                self.codes, key[0], key[1], key[2], self.alpha, self.method, self.min_stratum
            )
        return self._cache[key]

    def independent(self, i, j, S=()):
        return self.result(i, j, S).independent


class DSeparationOracle:
    """Answers CI queries exactly from a known DAG (``D[a, b] = 1`` for ``a -> b``)."""

    def __init__(self, D):
        self.D = np.asarray(D, dtype=bool)
        self.n_vars = len(self.D)

    def _ancestors(self, nodes):
        out, stack = set(nodes), list(nodes)
        while stack:
            b = stack.pop()
            for a in np.flatnonzero(self.D[:, b]):
                if a not in out:
                    out.add(int(a))
                    stack.append(int(a))
        return out

    def independent(self, i, j, S=()):
        S = set(S)
        if i == j or i in S or j in S:
            raise BadVars(f"bad variables i={i} j={j} S={S}")
        keep = self._ancestors({i, j} | S)
        # moralized ancestral graph
        nbrs = {v: set() for v in keep}
        for b in keep:
            parents = [int(a) for a in np.flatnonzero(self.D[:, b])]
            for a in parents:
                nbrs[a].add(b)
                nbrs[b].add(a)
            for x in parents:
                for y in parents:
                    if x != y:
                        nbrs[x].add(y)
        seen, stack = {i}, [i]
        while stack:
            v = stack.pop()
            for w in nbrs[v]:
                if w in S or w in seen:
                    continue
                if w == j:
                    return False
                seen.add(w)
                stack.append(w)
        return True
