"""numba versions of the kernels in :mod:`chordstats.kernels_numpy`.

Same encodings and return shapes; compiled with ``nogil`` so subtrees can be
tallied from a thread pool.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _classify_one(partner, i, j, n):
    m = 2 * n
    k = 0
    c2 = 0
    g = 0
    x2 = 0
    for u in range(m):
        if u == i or u == j:
            continue
        w = partner[u]
        if u > i and u < j:
            if w > i and w < j:
                c2 += 1
            else:
                k += 1
        elif u < i:
            if w > j:
                g += 1
            elif w < i:
                x2 += 1
        elif w > j:
            x2 += 1
    bad = 0
    if (c2 & 1) or (x2 & 1) or k + c2 // 2 + g + x2 // 2 != n - 1:
        bad = 1
    return k, c2 // 2, g, x2 // 2, bad


@njit(cache=True, nogil=True)
def decode(choices, n):
    rows = choices.shape[0]
    m = 2 * n
    partner = np.full((rows, m), -1, dtype=np.int64)
    for r in range(rows):
        v = 0
        for t in range(n):
            while partner[r, v] >= 0:
                v += 1
            want = choices[r, t]
            w = v
            seen = -1
            while seen < want:
                w += 1
                if partner[r, w] < 0:
                    seen += 1
            partner[r, v] = w
            partner[r, w] = v
    return partner


@njit(cache=True, nogil=True)
def classify(partner, marks):
    rows = partner.shape[0]
    n = partner.shape[1] // 2
    out = np.empty((rows, 5), dtype=np.int64)
    violations = 0
    for r in range(rows):
        row = partner[r]
        seen = -1
        i = -1
        for v in range(2 * n):
            if row[v] > v:
                seen += 1
                if seen == marks[r]:
                    i = v
                    break
        j = row[i]
        k, c, g, x, bad = _classify_one(row, i, j, n)
        out[r, 0] = k
        out[r, 1] = c
        out[r, 2] = g
        out[r, 3] = x
        out[r, 4] = j - i - 1
        violations += bad
    return out, violations


@njit(cache=True, nogil=True)
def _tally_all_marks(partner, n, tally, sizes):
    bad_total = 0
    for i in range(2 * n):
        j = partner[i]
        if j > i:
            k, c, g, x, bad = _classify_one(partner, i, j, n)
            tally[0, k] += 1
            tally[1, c] += 1
            tally[2, g] += 1
            tally[3, x] += 1
            sizes[j - i - 1] += 1
            bad_total += bad
    return bad_total


@njit(cache=True, nogil=True)
def enumerate_subtree(n, first):
    """Depth-first walk over matchings with ``partner[0] == first``."""
    m = 2 * n
    tally = np.zeros((4, n), dtype=np.int64)
    sizes = np.zeros(2 * n - 1, dtype=np.int64)
    partner = np.full(m, -1, dtype=np.int64)
    partner[0] = first
    partner[first] = 0
    visited = 0
    violations = 0
    if n == 1:
        violations += _tally_all_marks(partner, n, tally, sizes)
        return tally, sizes, n, violations

    lowest = np.empty(n, dtype=np.int64)
    cand = np.empty(n, dtype=np.int64)
    v = 1
    while partner[v] >= 0:
        v += 1
    lowest[0] = v
    cand[0] = v
    depth = 0
    last = n - 2
    while depth >= 0:
        v = lowest[depth]
        c = cand[depth]
        if c != v:
            partner[v] = -1
            partner[c] = -1
        c += 1
        while c < m and partner[c] >= 0:
            c += 1
        if c >= m:
            depth -= 1
            continue
        partner[v] = c
        partner[c] = v
        cand[depth] = c
        if depth == last:
            violations += _tally_all_marks(partner, n, tally, sizes)
            visited += n
        else:
            depth += 1
            u = v + 1
            while partner[u] >= 0:
                u += 1
            lowest[depth] = u
            cand[depth] = u
    return tally, sizes, visited, violations
