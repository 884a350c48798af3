"""JIT-compiled twins of ``numpy_impl``."""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def som_train(X, W, orders, alphas, radii):
    k, d = W.shape
    for e in range(orders.shape[0]):
        alpha = alphas[e]
        radius = radii[e]
        for t in range(orders.shape[1]):
            idx = orders[e, t]
            win = 0
            best = np.inf
            for j in range(k):
                s = 0.0
                for q in range(d):
                    r = X[idx, q] - W[j, q]
                    s += r * r
                if s < best:
                    best = s
                    win = j
            for j in range(k):
                if radius > 0.0:
                    dist = float(j - win)
                    h = math.exp(-(dist * dist) / (2.0 * radius * radius))
                elif j == win:
                    h = 1.0
                else:
                    continue
                step = alpha * h
                for q in range(d):
                    W[j, q] += step * (X[idx, q] - W[j, q])


@njit(cache=True)
def nearest(X, W):
    n, d = X.shape
    k = W.shape[0]
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        win = 0
        best = np.inf
        for j in range(k):
            s = 0.0
            for q in range(d):
                r = X[i, q] - W[j, q]
                s += r * r
            if s < best:
                best = s
                win = j
        out[i] = win
    return out


@njit(cache=True)
def potentials(X, alpha):
    n, d = X.shape
    P = np.zeros(n)
    for i in range(n):
        acc = 0.0
        for j in range(n):
            s = 0.0
            for q in range(d):
                r = X[i, q] - X[j, q]
                s += r * r
            acc += math.exp(-alpha * s)
        P[i] = acc
    return P


@njit(cache=True)
def discern_masks(C, dec):
    n, m = C.shape
    cap = n * (n - 1) // 2
    ii = np.empty(cap, dtype=np.int64)
    jj = np.empty(cap, dtype=np.int64)
    masks = np.empty(cap, dtype=np.int64)
    c = 0
    for i in range(n):
        for j in range(i):
            if dec[i] == dec[j]:
                continue
            mask = 0
            for a in range(m):
                if C[i, a] != C[j, a]:
                    mask |= 1 << a
            ii[c] = i
            jj[c] = j
            masks[c] = mask
            c += 1
    return ii[:c], jj[:c], masks[:c]


@njit(cache=True)
def hitting_table(clauses, m):
    total = 1 << m
    hit = np.empty(total, dtype=np.bool_)
    for s in range(total):
        ok = True
        for c in clauses:
            if s & c == 0:
                ok = False
                break
        hit[s] = ok
    return hit
