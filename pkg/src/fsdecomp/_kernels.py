"""Numba kernels for best-first CART growth, prediction and split search.

Layout: every fit presorts each column of the full dataset once; each tree
then filters the presorted (value, row) streams down to its bag in O(n) per
feature and keeps per-feature segments sorted by partitioning them in place
at every split. Evaluation therefore never sorts and never gathers: it
streams contiguous value/label arrays. All kernels are deterministic given
their inputs; randomness (bagging, feature subsets) happens outside.
"""

from __future__ import annotations

import numpy as np
from numba import njit

LEAF = -1


@njit(cache=True, nogil=True, error_model="numpy")
def presort_columns(X):
    """Sort every column once: values ascending plus the matching row ids."""
    n, d = X.shape
    fsvals = np.empty((d, n), dtype=np.float64)
    forder = np.empty((d, n), dtype=np.int32)
    for j in range(d):
        order = np.argsort(X[:, j])
        for i in range(n):
            r = order[i]
            fsvals[j, i] = X[r, j]
            forder[j, i] = np.int32(r)
    return fsvals, forder


@njit(cache=True, nogil=True, error_model="numpy")
def _eval_node(svals, sy, s, e, tot, totq, is_cls, msl):
    """Best split of segment [s, e): (gain, feature position, left count, threshold).

    Candidate thresholds sit at midpoints between consecutive distinct sorted
    values. Strict improvement plus ascending (feature, threshold) scan order
    break ties toward the lowest feature index, then the lowest threshold.

    Classification minimizes w = sum_child count * gini / 2 written with a
    single division; regression maximizes s = sum_child count * mean^2.
    Both orderings are equivalent to maximizing the impurity decrease, which
    is reconstructed once for the winner.
    """
    m = e - s
    k = svals.shape[0]
    fm = float(m)
    if is_cls:
        p = tot / fm
        imp_p = 1.0 - p * p - (1.0 - p) * (1.0 - p)
    else:
        mu = tot / fm
        imp_p = totq / fm - mu * mu
    best_j = -1
    best_nl = -1
    best_thr = 0.0
    if imp_p <= 0.0:
        return 0.0, best_j, best_nl, best_thr
    if is_cls:
        # minimize w = num/den; compare by cross-multiplication (den > 0),
        # starting from the zero-gain level so only positive gains register
        best_num = 0.5 * imp_p * fm
        best_den = 1.0
        for j in range(k):
            sv = svals[j]
            syr = sy[j]
            acc = 0.0
            prev = sv[s]
            for i in range(s + 1, e):
                acc += syr[i - 1]
                v = sv[i]
                if v > prev:
                    nl = i - s
                    nr = m - nl
                    if nl >= msl and nr >= msl:
                        fl = float(nl)
                        fr = float(nr)
                        accr = tot - acc
                        num = acc * (fl - acc) * fr + accr * (fr - accr) * fl
                        den = fl * fr
                        if num * best_den < best_num * den:
                            thr = 0.5 * (prev + v)
                            if thr >= v:  # midpoint rounded up to the right value
                                thr = prev
                            best_num = num
                            best_den = den
                            best_j = j
                            best_nl = nl
                            best_thr = thr
                prev = v
        if best_j < 0:
            return 0.0, best_j, best_nl, best_thr
        gain = imp_p - 2.0 * (best_num / best_den) / fm
    else:
        # maximize s = num/den, the count-weighted squared child means
        best_num = tot * tot / fm
        best_den = 1.0
        for j in range(k):
            sv = svals[j]
            syr = sy[j]
            acc = 0.0
            prev = sv[s]
            for i in range(s + 1, e):
                acc += syr[i - 1]
                v = sv[i]
                if v > prev:
                    nl = i - s
                    nr = m - nl
                    if nl >= msl and nr >= msl:
                        fl = float(nl)
                        fr = float(nr)
                        accr = tot - acc
                        num = acc * acc * fr + accr * accr * fl
                        den = fl * fr
                        if num * best_den > best_num * den:
                            thr = 0.5 * (prev + v)
                            if thr >= v:
                                thr = prev
                            best_num = num
                            best_den = den
                            best_j = j
                            best_nl = nl
                            best_thr = thr
                prev = v
        if best_j < 0:
            return 0.0, best_j, best_nl, best_thr
        gain = imp_p - (totq - best_num / best_den) / fm
    if gain < 0.0:  # float round-off on a strictly improving split
        gain = 0.0
    return gain, best_j, best_nl, best_thr


@njit(cache=True, nogil=True, error_model="numpy")
def _segment_stats(sy, s, e):
    tot = 0.0
    totq = 0.0
    for i in range(s, e):
        v = sy[0, i]
        tot += v
        totq += v * v
    return tot, totq


@njit(cache=True, nogil=True, error_model="numpy")
def grow_tree(
    fsvals,
    forder,
    y,
    bag,
    feat_ids,
    is_cls,
    max_depth,
    num_leaves,
    msl,
    node_feature,
    node_threshold,
    node_gain,
    node_left,
    node_right,
    node_value,
    node_count,
):
    """Grow one tree on the bag rows, writing flat node arrays.

    Best-first: the frontier leaf whose candidate split has the largest gain
    is expanded next, until num_leaves, max_depth or no positive gain remains.
    node_feature holds original feature ids (via feat_ids); LEAF marks leaves.
    Returns the number of nodes written.
    """
    n = y.shape[0]
    m = bag.shape[0]
    k = feat_ids.shape[0]

    in_bag = np.zeros(n, dtype=np.uint8)
    for i in range(m):
        in_bag[bag[i]] = 1

    # bag-restricted sorted streams per candidate feature
    svals = np.empty((k, m), dtype=np.float64)
    srows = np.empty((k, m), dtype=np.int32)
    sy = np.empty((k, m), dtype=np.float64)
    for t in range(k):
        j = feat_ids[t]
        pos = 0
        for i in range(n):
            r = forder[j, i]
            if in_bag[r] == 1:
                svals[t, pos] = fsvals[j, i]
                srows[t, pos] = r
                sy[t, pos] = y[r]
                pos += 1

    tmp_v = np.empty(m, dtype=np.float64)
    tmp_r = np.empty(m, dtype=np.int32)
    tmp_y = np.empty(m, dtype=np.float64)
    mark = np.zeros(n, dtype=np.int32)

    max_nodes = 2 * num_leaves
    seg_s = np.empty(max_nodes, dtype=np.int64)
    seg_e = np.empty(max_nodes, dtype=np.int64)
    depth = np.empty(max_nodes, dtype=np.int64)

    # frontier of splittable leaves with their candidate split
    cap = num_leaves + 1
    fr_node = np.empty(cap, dtype=np.int64)
    fr_gain = np.empty(cap, dtype=np.float64)
    fr_j = np.empty(cap, dtype=np.int64)
    fr_nl = np.empty(cap, dtype=np.int64)
    fr_thr = np.empty(cap, dtype=np.float64)
    fr_n = 0

    node_feature[0] = LEAF
    node_left[0] = LEAF
    node_right[0] = LEAF
    node_gain[0] = 0.0
    node_threshold[0] = 0.0
    seg_s[0] = 0
    seg_e[0] = m
    depth[0] = 0
    tot0, totq0 = _segment_stats(sy, 0, m)
    node_value[0] = tot0 / m
    node_count[0] = m
    n_nodes = 1
    n_leaves = 1

    if max_depth > 0 and m >= 2 * msl and m >= 2:
        g, j, nl, thr = _eval_node(svals, sy, 0, m, tot0, totq0, is_cls, msl)
        if g > 0.0:
            fr_node[0] = 0
            fr_gain[0] = g  # root weight m/m = 1
            fr_j[0] = j
            fr_nl[0] = nl
            fr_thr[0] = thr
            fr_n = 1

    split_id = 0
    while fr_n > 0 and n_leaves < num_leaves:
        best = 0
        for t in range(1, fr_n):
            if fr_gain[t] > fr_gain[best]:
                best = t
        nid = fr_node[best]
        jpos = fr_j[best]
        nl = fr_nl[best]
        thr = fr_thr[best]
        gain = fr_gain[best]
        fr_n -= 1
        fr_node[best] = fr_node[fr_n]
        fr_gain[best] = fr_gain[fr_n]
        fr_j[best] = fr_j[fr_n]
        fr_nl[best] = fr_nl[fr_n]
        fr_thr[best] = fr_thr[fr_n]

        s = seg_s[nid]
        e = seg_e[nid]
        # rows going left are the first nl entries of the split feature's segment
        split_id += 1
        for i in range(s, s + nl):
            mark[srows[jpos, i]] = split_id
        for j in range(k):
            wl = s
            wr = 0
            for i in range(s, e):
                r = srows[j, i]
                if mark[r] == split_id:
                    srows[j, wl] = r
                    svals[j, wl] = svals[j, i]
                    sy[j, wl] = sy[j, i]
                    wl += 1
                else:
                    tmp_r[wr] = r
                    tmp_v[wr] = svals[j, i]
                    tmp_y[wr] = sy[j, i]
                    wr += 1
            for t in range(wr):
                srows[j, wl + t] = tmp_r[t]
                svals[j, wl + t] = tmp_v[t]
                sy[j, wl + t] = tmp_y[t]

        left = n_nodes
        right = n_nodes + 1
        n_nodes += 2
        n_leaves += 1
        node_feature[nid] = feat_ids[jpos]
        node_threshold[nid] = thr
        node_gain[nid] = gain
        node_left[nid] = left
        node_right[nid] = right

        child_depth = depth[nid] + 1
        for side in range(2):
            cid = left if side == 0 else right
            cs = s if side == 0 else s + nl
            ce = s + nl if side == 0 else e
            seg_s[cid] = cs
            seg_e[cid] = ce
            depth[cid] = child_depth
            node_feature[cid] = LEAF
            node_left[cid] = LEAF
            node_right[cid] = LEAF
            node_gain[cid] = 0.0
            node_threshold[cid] = 0.0
            cm = ce - cs
            tot, totq = _segment_stats(sy, cs, ce)
            node_value[cid] = tot / cm
            node_count[cid] = cm
            if child_depth < max_depth and cm >= 2 * msl and cm >= 2:
                g, j, cnl, cthr = _eval_node(svals, sy, cs, ce, tot, totq, is_cls, msl)
                if g > 0.0:
                    fr_node[fr_n] = cid
                    # gain weighted by the node's sample share, so deep
                    # small-node splits contribute proportionally less
                    fr_gain[fr_n] = g * (float(cm) / float(m))
                    fr_j[fr_n] = j
                    fr_nl[fr_n] = cnl
                    fr_thr[fr_n] = cthr
                    fr_n += 1
    return n_nodes


@njit(cache=True, nogil=True, error_model="numpy")
def tree_leaf_values(X, feature, threshold, left, right, value, out):
    """Write each row's leaf value (class-1 fraction or mean target) into out."""
    for i in range(X.shape[0]):
        nid = 0
        while feature[nid] != LEAF:
            if X[i, feature[nid]] <= threshold[nid]:
                nid = left[nid]
            else:
                nid = right[nid]
        out[i] = value[nid]
