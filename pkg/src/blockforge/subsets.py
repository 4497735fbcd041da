"""Vectorized k-subset machinery: colex ranking, orbit BFS, pair counting.

Subsets travel as ``(N, k)`` integer arrays of 0-based points, each row sorted
ascending. When ``C(n, k)`` is small enough the BFS keeps a dense visited
bitmap indexed by colex rank; otherwise it falls back to lexicographic packed
keys held in a sorted array.
"""

from __future__ import annotations

import logging
from math import comb
from typing import Callable, Sequence

import numpy as np

from .config import orbit_cap
from .errors import BudgetExceeded

log = logging.getLogger(__name__)

BITMAP_LIMIT = 1 << 27
CHUNK = 1 << 20


def point_dtype(n: int):
    return np.uint8 if n <= 255 else np.int16


def binom_table(n: int, k: int) -> np.ndarray:
    """``T[x, j] = C(x, j)`` for 0 <= x <= n, 0 <= j <= k."""
    T = np.zeros((n + 1, k + 1), dtype=np.int64)
    for x in range(n + 1):
        for j in range(k + 1):
            T[x, j] = comb(x, j)
    return T


def colex_rank(arr: np.ndarray, table: np.ndarray) -> np.ndarray:
    arr = arr.astype(np.int64, copy=False)
    r = np.zeros(arr.shape[0], dtype=np.int64)
    for j in range(arr.shape[1]):
        r += table[arr[:, j], j + 1]
    return r


def colex_unrank(ranks: np.ndarray, n: int, k: int, table: np.ndarray) -> np.ndarray:
    ranks = np.asarray(ranks, dtype=np.int64).copy()
    out = np.empty((ranks.size, k), dtype=point_dtype(n))
    for j in range(k, 0, -1):
        col = table[:, j]
        # largest x with C(x, j) <= rank
        x = np.searchsorted(col, ranks, side="right") - 1
        out[:, j - 1] = x
        ranks -= col[x]
    return out


def pack_lex(arr: np.ndarray, n: int) -> np.ndarray:
    """Order-preserving integer key of each sorted row."""
    key = np.zeros(arr.shape[0], dtype=np.int64)
    for j in range(arr.shape[1]):
        key = key * n + arr[:, j].astype(np.int64)
    return key


def unpack_lex(keys: np.ndarray, n: int, k: int) -> np.ndarray:
    keys = np.asarray(keys, dtype=np.int64).copy()
    out = np.empty((keys.size, k), dtype=point_dtype(n))
    for j in range(k - 1, -1, -1):
        out[:, j] = keys % n
        keys //= n
    return out


def lex_sorted(arr: np.ndarray) -> np.ndarray:
    if arr.shape[0] == 0:
        return arr
    order = np.lexsort(arr.T[::-1])
    return arr[order]


def _images(g: np.ndarray, frontier: np.ndarray) -> np.ndarray:
    img = g[frontier]
    img.sort(axis=1)
    return img


def subset_orbit(
    gens: Sequence[Sequence[int]],
    n: int,
    seed: Sequence[int],
    *,
    collect: bool = True,
    on_frontier: Callable[[np.ndarray], None] | None = None,
    cap: int | None = None,
) -> tuple[int, np.ndarray | None]:
    """Orbit of a k-subset under the group generated by ``gens``.

    ``gens`` are 0-based image sequences of length ``n``; ``seed`` is a
    0-based subset. Returns ``(size, blocks)`` where ``blocks`` is the
    lexicographically sorted ``(size, k)`` array (``None`` when
    ``collect=False``). ``on_frontier`` sees every newly discovered batch
    exactly once, so callers can stream over the orbit.
    """
    cap = orbit_cap() if cap is None else cap
    dt = point_dtype(n)
    seed_arr = np.array(sorted(seed), dtype=dt)[None, :]
    k = seed_arr.shape[1]
    if len(set(seed)) != k:
        raise ValueError("seed subset has repeated points")
    garr = [np.asarray(g, dtype=dt) for g in gens]
    total = comb(n, k)
    if total <= BITMAP_LIMIT:
        return _orbit_bitmap(garr, n, k, seed_arr, collect, on_frontier, cap)
    if n ** k >= 1 << 62:
        raise BudgetExceeded(f"cannot key {k}-subsets of {n} points in 64 bits")
    return _orbit_keys(garr, n, k, seed_arr, collect, on_frontier, cap)


def _orbit_bitmap(garr, n, k, seed_arr, collect, on_frontier, cap):
    table = binom_table(n, k)
    visited = np.zeros(comb(n, k), dtype=bool)
    visited[colex_rank(seed_arr, table)] = True
    frontier = seed_arr
    size = 1
    if on_frontier is not None:
        on_frontier(frontier)
    while frontier.shape[0]:
        parts = []
        for start in range(0, frontier.shape[0], CHUNK):
            chunk = frontier[start:start + CHUNK]
            for g in garr:
                img = _images(g, chunk)
                r = colex_rank(img, table)
                fresh = ~visited[r]
                if not fresh.any():
                    continue
                r, idx = np.unique(r[fresh], return_index=True)
                visited[r] = True
                parts.append(img[fresh][idx])
        frontier = np.concatenate(parts) if parts else frontier[:0]
        size += frontier.shape[0]
        if size > cap:
            raise BudgetExceeded(f"orbit size exceeds cap {cap}")
        if frontier.shape[0] and on_frontier is not None:
            on_frontier(frontier)
    if not collect:
        return size, None
    ranks = np.flatnonzero(visited)
    del visited
    return size, lex_sorted(colex_unrank(ranks, n, k, table))


def _orbit_keys(garr, n, k, seed_arr, collect, on_frontier, cap):
    seen = pack_lex(seed_arr, n)
    frontier = seed_arr
    if on_frontier is not None:
        on_frontier(frontier)
    while frontier.shape[0]:
        parts = []
        for g in garr:
            img = _images(g, frontier)
            keys = np.unique(pack_lex(img, n))
            keys = keys[~np.isin(keys, seen, assume_unique=True)]
            if keys.size:
                seen = np.union1d(seen, keys)
                parts.append(keys)
        if parts:
            frontier = unpack_lex(np.unique(np.concatenate(parts)), n, k)
        else:
            frontier = frontier[:0]
        if seen.size > cap:
            raise BudgetExceeded(f"orbit size exceeds cap {cap}")
        if frontier.shape[0] and on_frontier is not None:
            on_frontier(frontier)
    if not collect:
        return int(seen.size), None
    return int(seen.size), unpack_lex(seen, n, k)


def tsubset_counts(blocks: np.ndarray, v: int, t: int, counts: np.ndarray | None = None) -> np.ndarray:
    """Add, for every t-subset of points, the number of blocks containing it.

    Indexed by colex rank (for t = 2: ``b*(b-1)/2 + a`` with a < b, 0-based).
    """
    from itertools import combinations

    size = comb(v, t)
    if counts is None:
        counts = np.zeros(size, dtype=np.int64)
    if blocks.shape[0] == 0:
        return counts
    table = binom_table(v, t)
    k = blocks.shape[1]
    for start in range(0, blocks.shape[0], CHUNK):
        chunk = blocks[start:start + CHUNK].astype(np.int64)
        for cols in combinations(range(k), t):
            idx = np.zeros(chunk.shape[0], dtype=np.int64)
            for j, c in enumerate(cols):
                idx += table[chunk[:, c], j + 1]
            counts += np.bincount(idx, minlength=size)
    return counts


def orbit_labels(gens: Sequence[Sequence[int]], rows: np.ndarray, n: int) -> np.ndarray:
    """Orbit label of every row of an invariant set of sorted k-subsets.

    ``rows`` must be lex-sorted and closed under every generator. The label of
    a row is the index of the first (lex-least) row of its orbit.
    """
    keys = pack_lex(rows, n)
    succ = []
    for g in gens:
        img = _images(np.asarray(g, dtype=rows.dtype), rows)
        pos = np.searchsorted(keys, pack_lex(img, n))
        if (pos >= keys.size).any() or (keys[np.minimum(pos, keys.size - 1)] != pack_lex(img, n)).any():
            raise ValueError("row set is not closed under the generators")
        succ.append(pos)
    labels = np.arange(rows.shape[0], dtype=np.int64)
    while True:
        old = labels
        for pos in succ:
            # propagate along the edge in both directions
            labels = np.minimum(labels, labels[pos])
            np.minimum.at(labels, pos, labels)
        labels = labels[labels]
        if np.array_equal(labels, old):
            return labels
