"""Compiled kernels for dominance dynamic programs.

All kernels assume coordinates are pairwise distinct within each axis
(guaranteed almost surely for Poisson samples and asserted at sampling
time), so strict and tie-free comparisons coincide.

The last-passage recursion over a space-time cloud,

    W[p] = 1 + max(ell[p], max{W[q] : q strictly below p in every
                               space coordinate and in time}),

is evaluated with points pre-sorted by time:
  * one space dimension: a single Fenwick-max sweep, O(n log n);
  * two space dimensions: offline divide and conquer over the time
    order with a Fenwick-max over second-coordinate ranks, O(n log^2 n);
  * three or more: direct O(n^2) scan (desk-scale inputs only).

Each routine has a small-n numpy reference used by the tests.
"""

from __future__ import annotations

import numpy as np
from numba import njit

NEG_INF = -np.inf


@njit(cache=True)
def _fen_update(tree, ver, stamp, i, val):
    n = tree.shape[0] - 1
    while i <= n:
        if ver[i] != stamp or tree[i] < val:
            if ver[i] != stamp:
                tree[i] = val
            elif tree[i] < val:
                tree[i] = val
            ver[i] = stamp
        i += i & (-i)


@njit(cache=True)
def _fen_query(tree, ver, stamp, i):
    best = NEG_INF
    while i > 0:
        if ver[i] == stamp and tree[i] > best:
            best = tree[i]
        i -= i & (-i)
    return best


@njit(cache=True)
def lpp_values_1d(x, ell):
    """W for one space dimension; points already sorted by time."""
    n = x.shape[0]
    w = np.empty(n, dtype=np.float64)
    rank = np.argsort(np.argsort(x)) + 1  # 1-based ranks
    tree = np.full(n + 1, NEG_INF, dtype=np.float64)
    ver = np.zeros(n + 1, dtype=np.int64)
    for i in range(n):
        best = _fen_query(tree, ver, 1, rank[i] - 1)
        cand = ell[i]
        if best > cand:
            cand = best
        w[i] = 1.0 + cand
        _fen_update(tree, ver, 1, rank[i], w[i])
    return w


@njit(cache=True)
def lpp_values_2d(x1, x2, ell):
    """W for two space dimensions; points already sorted by time."""
    n = x1.shape[0]
    w = np.empty(n, dtype=np.float64)
    for i in range(n):
        w[i] = 1.0 + ell[i]
    if n == 0:
        return w
    rank2 = np.argsort(np.argsort(x2)) + 1
    tree = np.full(n + 1, NEG_INF, dtype=np.float64)
    ver = np.full(n + 1, -1, dtype=np.int64)
    stamp = 0
    # explicit-stack in-order divide and conquer on the time order:
    # solve left half, push its influence onto the right half, solve right
    stack_lo = np.empty(4 * 64, dtype=np.int64)
    stack_hi = np.empty(4 * 64, dtype=np.int64)
    stack_st = np.empty(4 * 64, dtype=np.int64)
    top = 0
    stack_lo[top] = 0
    stack_hi[top] = n
    stack_st[top] = 0
    top += 1
    while top > 0:
        top -= 1
        lo = stack_lo[top]
        hi = stack_hi[top]
        st = stack_st[top]
        if hi - lo <= 1:
            continue
        mid = (lo + hi) // 2
        if st == 0:
            stack_lo[top] = lo
            stack_hi[top] = hi
            stack_st[top] = 1
            top += 1
            stack_lo[top] = lo
            stack_hi[top] = mid
            stack_st[top] = 0
            top += 1
        else:
            # left block [lo, mid) is final; sweep by x1 into [mid, hi)
            left = lo + np.argsort(x1[lo:mid])
            right = mid + np.argsort(x1[mid:hi])
            stamp += 1
            li = 0
            nl = mid - lo
            for rj in range(hi - mid):
                q = right[rj]
                while li < nl and x1[left[li]] < x1[q]:
                    j = left[li]
                    _fen_update(tree, ver, stamp, rank2[j], w[j])
                    li += 1
                best = _fen_query(tree, ver, stamp, rank2[q] - 1)
                if best + 1.0 > w[q]:
                    w[q] = best + 1.0
            stack_lo[top] = mid
            stack_hi[top] = hi
            stack_st[top] = 0
            top += 1
    return w


@njit(cache=True)
def lpp_values_nd(space, ell):
    """W for any space dimension, O(n^2); points already sorted by time."""
    n = space.shape[0]
    d = space.shape[1]
    w = np.empty(n, dtype=np.float64)
    for i in range(n):
        best = ell[i]
        for j in range(i):
            ok = True
            for k in range(d):
                if space[j, k] >= space[i, k]:
                    ok = False
                    break
            if ok and w[j] > best:
                best = w[j]
        w[i] = 1.0 + best
    return w


@njit(cache=True)
def dominated_max(space, times, w, q_space, q_times):
    """For each query x: max over cloud points p with p.space <= x
    (every axis, non-strict) and p.time <= t of w[p]; -inf when none."""
    n = space.shape[0]
    d = space.shape[1]
    m = q_space.shape[0]
    out = np.full(m, NEG_INF, dtype=np.float64)
    for qi in range(m):
        t = q_times[qi]
        best = NEG_INF
        for i in range(n):
            if times[i] > t:
                continue
            ok = True
            for k in range(d):
                if space[i, k] > q_space[qi, k]:
                    ok = False
                    break
            if ok and w[i] > best:
                best = w[i]
        out[qi] = best
    return out


@njit(cache=True)
def chain_dp(points):
    """Longest strictly increasing chain, O(n^2); points sorted by axis 0."""
    n = points.shape[0]
    d = points.shape[1]
    if n == 0:
        return 0
    length = np.ones(n, dtype=np.int64)
    best_all = 1
    for i in range(n):
        best = 0
        for j in range(i):
            ok = True
            for k in range(d):
                if points[j, k] >= points[i, k]:
                    ok = False
                    break
            if ok and length[j] > best:
                best = length[j]
        length[i] = best + 1
        if length[i] > best_all:
            best_all = length[i]
    return best_all


def lpp_values(space: np.ndarray, ell: np.ndarray) -> np.ndarray:
    """Dispatch the W recursion on the number of space dimensions."""
    d = space.shape[1]
    if space.shape[0] == 0:
        return np.empty(0, dtype=np.float64)
    if d == 1:
        return lpp_values_1d(np.ascontiguousarray(space[:, 0]), ell)
    if d == 2:
        return lpp_values_2d(np.ascontiguousarray(space[:, 0]),
                             np.ascontiguousarray(space[:, 1]), ell)
    return lpp_values_nd(np.ascontiguousarray(space), ell)


def lpp_values_reference(space: np.ndarray, ell: np.ndarray) -> np.ndarray:
    """Plain numpy O(n^2) recursion, the oracle for the compiled kernels."""
    n = space.shape[0]
    w = np.empty(n, dtype=np.float64)
    for i in range(n):
        mask = np.all(space[:i] < space[i], axis=1)
        best = ell[i]
        if mask.any():
            best = max(best, np.max(w[:i][mask]))
        w[i] = 1.0 + best
    return w


@njit(cache=True)
def hammersley_sweep(positions, ys):
    """Interacting-particle sweep: for each arrival position y (already in
    time order) the leftmost particle strictly right of y jumps to y.
    Mutates `positions` (kept sorted) and returns per-event jumping index
    (-1 for no jump) and the vacated position."""
    n = positions.shape[0]
    m = ys.shape[0]
    idxs = np.full(m, -1, dtype=np.int64)
    olds = np.empty(m, dtype=np.float64)
    for j in range(m):
        i = np.searchsorted(positions, ys[j], side="right")
        if i < n:
            olds[j] = positions[i]
            positions[i] = ys[j]
            idxs[j] = i
        else:
            olds[j] = np.nan
    return idxs, olds


def warmup() -> None:
    """Trigger JIT compilation of every kernel on tiny inputs."""
    s1 = np.array([[0.3], [0.7]])
    s2 = np.array([[0.3, 0.1], [0.7, 0.9]])
    s3 = np.array([[0.3, 0.1, 0.5], [0.7, 0.9, 0.6]])
    ell = np.zeros(2)
    lpp_values(s1, ell)
    lpp_values(s2, ell)
    lpp_values(s3, ell)
    dominated_max(s2, np.array([0.1, 0.2]), ell,
                  np.array([[1.0, 1.0]]), np.array([1.0]))
    chain_dp(s3)
    hammersley_sweep(np.array([0.5, 1.5]), np.array([0.2, 1.0]))
