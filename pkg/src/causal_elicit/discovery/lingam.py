"""LiNGAM estimators: DirectLiNGAM and ICA-LiNGAM."""

from __future__ import annotations

import warnings
from itertools import permutations

import numpy as np

from ..errors import ConstantColumn, DegenerateMatrix, IcaNonconvergence
from .graphs import WeightedDag

PRUNE = 0.05
EXHAUSTIVE_MAX = 8

# maximum-entropy approximation constants (log cosh and Gaussian-weighted odd terms)
_K1, _K2, _GAMMA = 79.047, 7.4129, 0.37457


def _prepare(X):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] < 2:
        raise DegenerateMatrix("LiNGAM needs a 2-D array with at least two columns")
    X = X - X.mean(axis=0)
    sd = X.std(axis=0)
    if (sd <= 1e-12).any():
        raise ConstantColumn(f"zero-variance column(s) {np.flatnonzero(sd <= 1e-12).tolist()}")
    return X


def entropy(u):
    """Differential entropy approximation for a standardized sample."""
    return (
        (1 + np.log(2 * np.pi)) / 2
        - _K1 * (np.mean(np.log(np.cosh(u))) - _GAMMA) ** 2
        - _K2 * np.mean(u * np.exp(-(u**2) / 2)) ** 2
    )


def _residual(xi, xj):
    return xi - np.cov(xi, xj, bias=True)[0, 1] / np.var(xj) * xj


def _std(x):
    return (x - x.mean()) / x.std()


def _mi_diff(xi_std, xj_std):
    """Positive when ``xi -> xj`` fits better than ``xj -> xi``."""
    ri_j = _residual(xi_std, xj_std)
    rj_i = _residual(xj_std, xi_std)
    return (entropy(xj_std) + entropy(ri_j / np.std(ri_j))) - (
        entropy(xi_std) + entropy(rj_i / np.std(rj_i))
    )


def _most_exogenous(X, remaining):
    Xs = {i: _std(X[:, i]) for i in remaining}
    best, best_cost = None, np.inf
    for i in remaining:
        cost = 0.0
        for j in remaining:
            if j != i:
                cost += min(0.0, _mi_diff(Xs[i], Xs[j])) ** 2
        if cost < best_cost:
            best, best_cost = i, cost
    return best


def ols_weights(X, order, prune=PRUNE):
    """Regress each variable on everything earlier in ``order``; prune small weights."""
    p = X.shape[1]
    B = np.zeros((p, p))
    for k in range(1, p):
        target, preds = order[k], list(order[:k])
        coef, *_ = np.linalg.lstsq(X[:, preds], X[:, target], rcond=None)
        B[target, preds] = coef
    B[np.abs(B) < prune] = 0.0
    return B


def direct_lingam(X, prune=PRUNE, labels=None):
    """Causal order by repeatedly removing the most exogenous variable.

    A candidate's cost sums, over the other remaining variables, the squared
    negative part of the pairwise likelihood-ratio contrast; the cheapest
    candidate goes next and the rest are replaced by their residuals on it.
    Edge weights come from least squares on the predecessors in the order.
    """
    X = _prepare(X)
    p = X.shape[1]
    R = X.copy()
    remaining = list(range(p))
    order = []
    while len(remaining) > 1:
        m = _most_exogenous(R, remaining)
        order.append(m)
        remaining.remove(m)
        for i in remaining:
            R[:, i] = _residual(R[:, i], R[:, m])
    order += remaining
    return WeightedDag(order, ols_weights(X, order, prune), labels)


def fast_ica(X, seed=0, max_iter=1000, tol=1e-6):
    """Deflationary FastICA with the log-cosh contrast.

    Returns ``(W, converged)`` with ``W`` the unmixing matrix acting on the
    centred data (sources = ``X @ W.T``).
    """
    n, p = X.shape
    cov = X.T @ X / n
    vals, vecs = np.linalg.eigh(cov)
    K = (vecs / np.sqrt(vals)).T
    Zw = X @ K.T
    rng = np.random.default_rng(seed)
    Wz = np.zeros((p, p))
    converged = True
    for c in range(p):
        w = rng.standard_normal(p)
        w -= Wz[:c].T @ (Wz[:c] @ w)
        w /= np.linalg.norm(w)
        for _ in range(max_iter):
            y = Zw @ w
            g = np.tanh(y)
            w_new = (Zw * g[:, None]).mean(0) - (1 - g**2).mean() * w
            w_new -= Wz[:c].T @ (Wz[:c] @ w_new)
            w_new /= np.linalg.norm(w_new)
            lim = abs(abs(w_new @ w) - 1)
            w = w_new
            if lim < tol:
                break
        else:
            converged = False
        Wz[c] = w
    return Wz @ K, converged


def _greedy_diagonal(W):
    """Row permutation putting large entries on the diagonal (greedy assignment)."""
    p = len(W)
    A = np.abs(W).copy()
    row_for_col = np.empty(p, dtype=int)
    for _ in range(p):
        r, c = np.unravel_index(np.argmax(A), A.shape)
        row_for_col[c] = r
        A[r, :] = -1
        A[:, c] = -1
    return W[row_for_col]


def search_causal_order(B):
    """Permutation making ``B`` as close to strictly lower-triangular as possible.

    Minimizes the sum of squared entries on and above the diagonal of
    ``B[order][:, order]``; exhaustive up to 8 variables, greedy beyond.
    """
    B = np.asarray(B, dtype=float)
    p = len(B)
    B2 = B**2
    if p <= EXHAUSTIVE_MAX:
        best, best_cost = None, np.inf
        for perm in permutations(range(p)):
            P = B2[np.ix_(perm, perm)]
            cost = np.triu(P).sum()
            if cost < best_cost - 1e-15:
                best, best_cost = list(perm), cost
        return best
    remaining, order = list(range(p)), []
    while remaining:
        costs = [B2[i, remaining].sum() for i in remaining]
        nxt = remaining[int(np.argmin(costs))]
        order.append(nxt)
        remaining.remove(nxt)
    return order


def ica_lingam(X, prune=PRUNE, labels=None, seed=0, max_iter=1000, tol=1e-6):
    X = _prepare(X)
    W, converged = fast_ica(X, seed=seed, max_iter=max_iter, tol=tol)
    if not converged:
        warnings.warn(f"FastICA did not converge in {max_iter} iterations", IcaNonconvergence,
                      stacklevel=2)
    Wp = _greedy_diagonal(W)
    Wp = Wp / np.diag(Wp)[:, None]
    B = np.eye(len(Wp)) - Wp
    order = search_causal_order(B)
    pos = np.empty(len(order), dtype=int)
    pos[order] = np.arange(len(order))
    B[pos[:, None] <= pos[None, :]] = 0.0
    B[np.abs(B) < prune] = 0.0
    return WeightedDag(order, B, labels, converged=converged)
