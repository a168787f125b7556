"""Vectorized numpy kernels: decode choice vectors into matchings, classify
chords against a marked chord, and tally whole enumeration subtrees.

A matching of ``2n`` vertices is encoded by ``n`` choices: at step ``t`` the
lowest unmatched vertex is paired with the ``choices[t]``-th (0-based)
unmatched vertex above it, so ``choices[t]`` ranges over ``2n - 1 - 2t`` values.
"""

from __future__ import annotations

import numpy as np

# Rows per block when materializing a subtree.
BLOCK_ROWS = 1 << 17


def radices(n: int) -> np.ndarray:
    return np.arange(2 * n - 1, 0, -2, dtype=np.int64)


def decode(choices: np.ndarray, n: int) -> np.ndarray:
    """``(R, n)`` choice rows -> ``(R, 2n)`` partner arrays."""
    choices = np.asarray(choices, dtype=np.int64)
    rows = choices.shape[0]
    m = 2 * n
    partner = np.full((rows, m), -1, dtype=np.int64)
    idx = np.arange(rows)
    for t in range(n):
        free = partner < 0
        v = np.argmax(free, axis=1)
        free[idx, v] = False
        rank = np.cumsum(free, axis=1)
        w = np.argmax(rank > choices[:, t, None], axis=1)
        partner[idx, v] = w
        partner[idx, w] = v
    return partner


def classify(partner: np.ndarray, marks: np.ndarray) -> tuple[np.ndarray, int]:
    """Per-row ``(k, c, g, x, size)`` relative to chord ``marks[r]`` (chords
    indexed by ascending left endpoint), plus the number of rows violating
    ``k + c + g + x = n - 1``."""
    partner = np.asarray(partner, dtype=np.int64)
    rows, m = partner.shape
    n = m // 2
    idx = np.arange(rows)
    verts = np.arange(m)[None, :]
    lefts = np.nonzero(partner > verts)[1].reshape(rows, n)
    i = lefts[idx, np.asarray(marks, dtype=np.int64)][:, None]
    j = partner[idx, i[:, 0]][:, None]

    inside = (verts > i) & (verts < j)
    partner_inside = (partner > i) & (partner < j)
    left = verts < i
    right = verts > j
    k = np.count_nonzero(inside & ~partner_inside, axis=1)
    c2 = np.count_nonzero(inside & partner_inside, axis=1)
    g = np.count_nonzero(left & (partner > j), axis=1)
    x2 = np.count_nonzero(left & (partner < i), axis=1) + np.count_nonzero(
        right & (partner > j), axis=1
    )
    out = np.stack([k, c2 // 2, g, x2 // 2, (j - i - 1)[:, 0]], axis=1).astype(np.int64)
    bad = (out[:, :4].sum(axis=1) != n - 1) | (c2 % 2 == 1) | (x2 % 2 == 1)
    return out, int(np.count_nonzero(bad))


def _subtree_choices(n: int, first: int, start: int, stop: int) -> np.ndarray:
    """Choice rows ``start..stop`` (lexicographic) of the subtree where vertex 0
    is paired with vertex ``first``."""
    r = radices(n)
    linear = np.arange(start, stop, dtype=np.int64)
    out = np.zeros((stop - start, n), dtype=np.int64)
    out[:, 0] = first - 1
    for t in range(n - 1, 0, -1):
        linear, out[:, t] = np.divmod(linear, r[t])
    return out


def enumerate_subtree(n: int, first: int) -> tuple[np.ndarray, np.ndarray, int, int]:
    """Tally every (matching, mark) pair in one subtree.

    Returns ``(tally[4, n], size_tally[2n - 1], visited, violations)``.
    """
    total = int(np.prod(radices(n)[1:]))
    tally = np.zeros((4, n), dtype=np.int64)
    sizes = np.zeros(2 * n - 1, dtype=np.int64)
    visited = 0
    violations = 0
    for start in range(0, total, BLOCK_ROWS):
        stop = min(total, start + BLOCK_ROWS)
        partner = decode(_subtree_choices(n, first, start, stop), n)
        for mark in range(n):
            res, bad = classify(partner, np.full(stop - start, mark, dtype=np.int64))
            violations += bad
            visited += stop - start
            for s in range(4):
                tally[s] += np.bincount(res[:, s], minlength=n)[:n]
            sizes += np.bincount(res[:, 4], minlength=2 * n - 1)[: 2 * n - 1]
    return tally, sizes, visited, violations
