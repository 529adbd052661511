"""Compiled split-search kernels.

Exhaustive search works on presorted columns: rows of ``S`` (shape
``(n_features, m)``) list the node's sample ids in ascending order of the
corresponding feature, so a split scan is a single left-to-right sweep and
child nodes inherit sorted lists by a stable filter.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def filter_sorted(order, inbag):
    d, n = order.shape
    m = 0
    for t in range(n):
        if inbag[t]:
            m += 1
    out = np.empty((d, m), dtype=np.int32)
    for j in range(d):
        k = 0
        for t in range(n):
            r = order[j, t]
            if inbag[r]:
                out[j, k] = r
                k += 1
    return out


@njit(cache=True)
def best_split_sorted(S, Xt, Yw, w, feats, min_leaf):
    """Best ``(feature, threshold, score)`` over the candidate ``feats``.

    ``score`` is ``sum(L**2)/W_L + sum(R**2)/W_R`` over the weighted target
    sums of the children; larger is better. Returns feature ``-1`` when no
    split satisfies ``min_leaf`` and separates distinct values. Candidates
    are scanned in the given order and thresholds ascending, and only a
    strictly better score replaces the incumbent.
    """
    m = S.shape[1]
    K = Yw.shape[1]
    T = np.zeros(K)
    W = 0.0
    for t in range(m):
        r = S[0, t]
        W += w[r]
        for k in range(K):
            T[k] += Yw[r, k]
    L = np.empty(K)
    best_score = -np.inf
    best_f = -1
    best_thr = 0.0
    for fi in range(feats.shape[0]):
        j = feats[fi]
        L[:] = 0.0
        WL = 0.0
        for t in range(m - 1):
            r = S[j, t]
            WL += w[r]
            for k in range(K):
                L[k] += Yw[r, k]
            if t + 1 < min_leaf:
                continue
            if m - t - 1 < min_leaf:
                break
            a = Xt[j, r]
            b = Xt[j, S[j, t + 1]]
            if not b > a:
                continue
            sl = 0.0
            sr = 0.0
            for k in range(K):
                sl += L[k] * L[k]
                rk = T[k] - L[k]
                sr += rk * rk
            score = sl / WL + sr / (W - WL)
            if score > best_score:
                best_score = score
                best_f = j
                thr = 0.5 * (a + b)
                if not a < thr:
                    thr = b
                best_thr = thr
    return best_f, best_thr, best_score


@njit(cache=True)
def best_split_sorted_labels(S, Xt, labels, w, n_classes, feats, min_leaf):
    """Classification specialisation of :func:`best_split_sorted`.

    Keeps ``sum(L**2)`` and ``sum(R**2)`` up to date incrementally, so each
    row costs O(1) instead of O(n_classes). Exact for integer weights.
    """
    m = S.shape[1]
    T = np.zeros(n_classes)
    W = 0.0
    for t in range(m):
        r = S[0, t]
        W += w[r]
        T[labels[r]] += w[r]
    sq_total = 0.0
    for k in range(n_classes):
        sq_total += T[k] * T[k]
    L = np.empty(n_classes)
    best_score = -np.inf
    best_f = -1
    best_thr = 0.0
    for fi in range(feats.shape[0]):
        j = feats[fi]
        L[:] = 0.0
        WL = 0.0
        sl = 0.0
        sr = sq_total
        for t in range(m - 1):
            r = S[j, t]
            c = labels[r]
            wr = w[r]
            lc = L[c]
            rc = T[c] - lc
            sl += wr * (2.0 * lc + wr)
            sr += wr * (wr - 2.0 * rc)
            L[c] = lc + wr
            WL += wr
            if t + 1 < min_leaf:
                continue
            if m - t - 1 < min_leaf:
                break
            a = Xt[j, r]
            b = Xt[j, S[j, t + 1]]
            if not b > a:
                continue
            score = sl / WL + sr / (W - WL)
            if score > best_score:
                best_score = score
                best_f = j
                thr = 0.5 * (a + b)
                if not a < thr:
                    thr = b
                best_thr = thr
    return best_f, best_thr, best_score


@njit(cache=True)
def partition_sorted(S, go_left):
    d, m = S.shape
    mL = 0
    for t in range(m):
        if go_left[S[0, t]]:
            mL += 1
    SL = np.empty((d, mL), dtype=np.int32)
    SR = np.empty((d, m - mL), dtype=np.int32)
    for j in range(d):
        a = 0
        b = 0
        for t in range(m):
            r = S[j, t]
            if go_left[r]:
                SL[j, a] = r
                a += 1
            else:
                SR[j, b] = r
                b += 1
    return SL, SR


def presort(X):
    """Per-feature ascending order of the rows of ``X`` as ``(d, n)`` int32."""
    return np.ascontiguousarray(np.argsort(X, axis=0, kind="stable").T.astype(np.int32))


@njit(cache=True)
def sample_features(n_features, u):
    """``len(u)`` distinct feature ids, ascending, by a partial Fisher-Yates shuffle."""
    q = u.shape[0]
    perm = np.arange(n_features)
    for i in range(q):
        j = i + int(u[i] * (n_features - i))
        if j >= n_features:
            j = n_features - 1
        tmp = perm[i]
        perm[i] = perm[j]
        perm[j] = tmp
    return np.sort(perm[:q])


@njit(cache=True)
def random_split(rows, Xt, Yw, w, feats, u, min_leaf):
    """Extra Trees split: threshold ``lo + (hi - lo) * u[i]`` for candidate ``i``.

    Constant candidates are skipped. Scores as in :func:`best_split_sorted`;
    the first candidate with the highest score wins.
    """
    m = rows.shape[0]
    K = Yw.shape[1]
    T = np.zeros(K)
    W = 0.0
    for t in range(m):
        r = rows[t]
        W += w[r]
        for k in range(K):
            T[k] += Yw[r, k]
    L = np.empty(K)
    best_score = -np.inf
    best_f = -1
    best_thr = 0.0
    for fi in range(feats.shape[0]):
        j = feats[fi]
        lo = np.inf
        hi = -np.inf
        for t in range(m):
            v = Xt[j, rows[t]]
            if v < lo:
                lo = v
            if v > hi:
                hi = v
        if not hi > lo:
            continue
        thr = lo + (hi - lo) * u[fi]
        L[:] = 0.0
        WL = 0.0
        n_left = 0
        for t in range(m):
            r = rows[t]
            if Xt[j, r] < thr:
                n_left += 1
                WL += w[r]
                for k in range(K):
                    L[k] += Yw[r, k]
        if n_left < min_leaf or m - n_left < min_leaf:
            continue
        sl = 0.0
        sr = 0.0
        for k in range(K):
            sl += L[k] * L[k]
            rk = T[k] - L[k]
            sr += rk * rk
        score = sl / WL + sr / (W - WL)
        if score > best_score:
            best_score = score
            best_f = j
            best_thr = thr
    return best_f, best_thr, best_score
