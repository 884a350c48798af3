"""Reference kernels in plain numpy.

Every function here has a twin with the same signature in ``numba_impl``.
Results agree to floating-point rounding; argmin ties resolve to the lowest
index in both.
"""

import numpy as np


def som_train(X, W, orders, alphas, radii):
    """Sequential winner-take-all updates of ``W`` in place.

    ``orders[e]`` is the sample visiting order of epoch ``e``; ``alphas`` and
    ``radii`` hold the per-epoch learning rate and chain neighbourhood width.
    """
    k = W.shape[0]
    chain = np.arange(k, dtype=np.float64)
    for e in range(orders.shape[0]):
        alpha = alphas[e]
        radius = radii[e]
        for idx in orders[e]:
            x = X[idx]
            diff = x - W
            win = np.argmin((diff * diff).sum(axis=1))
            if radius > 0.0:
                dist = chain - win
                h = np.exp(-(dist * dist) / (2.0 * radius * radius))
            else:
                h = np.zeros(k)
                h[win] = 1.0
            W += (alpha * h)[:, None] * diff


def nearest(X, W):
    diff = X[:, None, :] - W[None, :, :]
    return np.argmin((diff * diff).sum(axis=2), axis=1).astype(np.int64)


def potentials(X, alpha):
    diff = X[:, None, :] - X[None, :, :]
    d2 = (diff * diff).sum(axis=2)
    return np.exp(-alpha * d2).sum(axis=1)


def discern_masks(C, dec):
    """Pairs ``(i, j)``, ``j < i``, with differing decisions and the bitmask
    of condition columns on which they differ."""
    n, m = C.shape
    weights = np.left_shift(np.int64(1), np.arange(m, dtype=np.int64))
    ii, jj = np.tril_indices(n, k=-1)
    keep = dec[ii] != dec[jj]
    ii = ii[keep].astype(np.int64)
    jj = jj[keep].astype(np.int64)
    differ = C[ii] != C[jj]
    masks = (differ * weights).sum(axis=1).astype(np.int64)
    return ii, jj, masks


def hitting_table(clauses, m):
    """Boolean table over all ``2**m`` attribute subsets: does the subset
    intersect every clause?"""
    subsets = np.arange(1 << m, dtype=np.int64)
    hit = np.ones(1 << m, dtype=np.bool_)
    for c in clauses:
        hit &= (subsets & c) != 0
    return hit
