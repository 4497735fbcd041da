"""Design isomorphism through canonical labeling of the point-block incidence.

Individualization-refinement over the points only: block colors are always
derived from point colors, and a discrete point partition fixes the block
order by sorting. The search keeps the lexicographically least leaf under
the key (refinement traces along the path, relabeled block list), prunes with
automorphisms found from equal leaves, and jumps back to the divergence
point whenever such an automorphism turns up.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .config import ISO_NODE_CAP
from .designs import Design, tsubset_table
from .errors import BudgetExceeded
from .subsets import lex_sorted, pack_lex

MAX_STORED_AUTOMORPHISMS = 256


def _digest(*arrays: np.ndarray) -> bytes:
    h = hashlib.blake2b(digest_size=16)
    for a in arrays:
        h.update(str(a.shape).encode())
        h.update(np.ascontiguousarray(a).tobytes())
    return h.digest()


def _compact(arr: np.ndarray) -> np.ndarray:
    """Row-unique relabeling: rows sorted lexicographically, label = row rank."""
    _, inv = np.unique(arr, axis=0, return_inverse=True)
    return inv.reshape(-1).astype(np.int64)


class _Incidence:
    def __init__(self, D: Design):
        self.v = D.v
        self.b = D.b
        self.k = D.k
        self.blocks = D.array0.astype(np.int64)
        # flattened point index of every incidence, for histogramming
        self.inc_points = self.blocks.reshape(-1)

    def initial_colors(self) -> np.ndarray:
        v = self.v
        if self.b == 0:
            return np.zeros(v, dtype=np.int64)
        rep = np.bincount(self.inc_points, minlength=v)
        profile = np.zeros((v, v), dtype=np.int64)
        if self.k >= 2:
            pairs = tsubset_table(Design.from_array0(v, self.blocks, validate=False,
                                                     presorted=True), 2)
            iu = np.triu_indices(v, 1)
            # colex index of (a, b), a < b, is b(b-1)/2 + a
            idx = iu[1] * (iu[1] - 1) // 2 + iu[0]
            profile[iu] = pairs[idx]
            profile = profile + profile.T
        prof = np.sort(profile, axis=1)
        return _compact(np.column_stack([rep, prof]))

    def refine(self, colors: np.ndarray) -> tuple[np.ndarray, bytes]:
        trace = []
        ncol = int(colors.max()) + 1
        packable = self.v ** self.k < 1 << 62
        while True:
            bsig = np.sort(colors[self.blocks], axis=1)
            if packable:
                ubkeys, bcol = np.unique(pack_lex(bsig, self.v), return_inverse=True)
            else:
                ubkeys, bcol = np.unique(bsig, axis=0, return_inverse=True)
            bcol = bcol.reshape(-1)
            nb = ubkeys.shape[0]
            hist = np.bincount(self.inc_points * nb + np.repeat(bcol, self.k),
                               minlength=self.v * nb).reshape(self.v, nb)
            # old color leads each signature, so the new partition refines the old
            psig = np.column_stack([colors, hist]).astype(">i4")
            rows = [r.tobytes() for r in psig]
            order = sorted(set(rows))
            rank = {r: i for i, r in enumerate(order)}
            new = np.array([rank[r] for r in rows], dtype=np.int64)
            trace.append(_digest(ubkeys, np.frombuffer(b"".join(order), dtype=np.uint8)))
            colors = new
            if len(order) == ncol:
                break
            ncol = len(order)
        return colors, b"".join(trace)

    def leaf_cert(self, colors: np.ndarray) -> bytes:
        arr = lex_sorted(np.sort(colors[self.blocks], axis=1))
        return arr.astype(np.int16).tobytes()


def _individualize(colors: np.ndarray, w: int) -> np.ndarray:
    c = colors[w]
    new = np.where(colors > c, colors + 1, colors)
    new[colors == c] = c + 1
    new[w] = c
    return new


def _orbit_roots(auts: list[np.ndarray], v: int) -> list[int]:
    parent = list(range(v))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in auts:
        for x in range(v):
            a, b = find(x), find(int(g[x]))
            if a != b:
                parent[max(a, b)] = min(a, b)
    return [find(x) for x in range(v)]


@dataclass
class CanonicalForm:
    labeling: np.ndarray   # labeling[p] = canonical position of 0-based point p
    cert: bytes
    nodes: int
    automorphisms: list[np.ndarray]


class _Search:
    def __init__(self, inc: _Incidence, node_cap: int):
        self.inc = inc
        self.node_cap = node_cap
        self.nodes = 0
        self.best_key: tuple | None = None
        self.best_colors: np.ndarray | None = None
        self.best_path: list[int] = []
        self.best_traces: list[bytes] = []
        self.auts: list[np.ndarray] = []

    def run(self) -> CanonicalForm:
        colors, trace = self.inc.refine(self.inc.initial_colors())
        self._search(colors, [], [trace])
        return CanonicalForm(self.best_colors, self._final_cert(), self.nodes, self.auts)

    def _final_cert(self) -> bytes:
        inc = self.inc
        lab = self.best_colors
        rows = lex_sorted(np.sort(lab[inc.blocks], axis=1))
        mat = np.zeros((inc.b, inc.v), dtype=np.uint8)
        if inc.b:
            mat[np.repeat(np.arange(inc.b), inc.k), rows.reshape(-1)] = 1
        return struct.pack(">III", inc.v, inc.b, inc.k) + np.packbits(mat).tobytes()

    def _search(self, colors: np.ndarray, path: list[int], traces: list[bytes]) -> int | None:
        """Returns a depth to jump back to, or None to continue normally."""
        self.nodes += 1
        if self.nodes > self.node_cap:
            raise BudgetExceeded(f"canonical labeling exceeded {self.node_cap} search nodes")
        depth = len(path)
        if self.best_key is not None:
            bt = self.best_traces[:len(traces)]
            if traces > bt:
                return None
        counts = np.bincount(colors)
        if counts.max() == 1:
            return self._leaf(colors, path, traces)
        size = counts.max()
        target = int(np.flatnonzero(counts == size)[0])
        cell = [int(p) for p in np.flatnonzero(colors == target)]
        explored: list[int] = []
        for w in cell:
            fixing = [g for g in self.auts if all(g[p] == p for p in path)]
            if fixing and explored:
                roots = _orbit_roots(fixing, self.inc.v)
                if roots[w] in {roots[e] for e in explored}:
                    continue
            child, trace = self.inc.refine(_individualize(colors, w))
            jump = self._search(child, path + [w], traces + [trace])
            explored.append(w)
            if jump is not None and jump < depth:
                return jump
        return None

    def _leaf(self, colors, path, traces):
        key = (traces, self.inc.leaf_cert(colors))
        if self.best_key is None or key < self.best_key:
            self.best_key = key
            self.best_colors = colors
            self.best_path = list(path)
            self.best_traces = list(traces)
            return None
        if key == self.best_key:
            # colors and best_colors send D to the same relabeled structure
            inv_best = np.empty_like(self.best_colors)
            inv_best[self.best_colors] = np.arange(self.inc.v)
            gamma = inv_best[colors]
            if len(self.auts) < MAX_STORED_AUTOMORPHISMS:
                self.auts.append(gamma)
            common = 0
            for a, b in zip(path, self.best_path):
                if a != b:
                    break
                common += 1
            return common
        return None


def canonical_form(D: Design, node_cap: int = ISO_NODE_CAP) -> CanonicalForm:
    if D.v > 256 or D.b > 10**5:
        raise BudgetExceeded("certificate mode supports v <= 256 and b <= 100000")
    return _Search(_Incidence(D), node_cap).run()


_CERT_CACHE: dict[bytes, CanonicalForm] = {}


def _content_key(D: Design) -> bytes:
    return _digest(np.array([D.v, D.k]), D.array0)


def cached_form(D: Design, node_cap: int = ISO_NODE_CAP) -> CanonicalForm:
    key = _content_key(D)
    form = _CERT_CACHE.get(key)
    if form is None:
        form = canonical_form(D, node_cap)
        _CERT_CACHE[key] = form
    return form


def canonical_cert(D: Design, node_cap: int = ISO_NODE_CAP) -> bytes:
    return cached_form(D, node_cap).cert


def invariant_screen(D1: Design, D2: Design) -> str | None:
    """A reason the designs cannot be isomorphic, or None."""
    if (D1.v, D1.b, D1.k) != (D2.v, D2.b, D2.k):
        return f"parameters differ: (v,b,k)={(D1.v, D1.b, D1.k)} vs {(D2.v, D2.b, D2.k)}"
    if D1.lam != D2.lam:
        return f"lambda differs: {D1.lam} vs {D2.lam}"
    if D1.k >= 2:
        def profile(D):
            t = tsubset_table(D, 2)
            v = D.v
            m = np.zeros((v, v), dtype=np.int64)
            iu = np.triu_indices(v, 1)
            m[iu] = t[iu[1] * (iu[1] - 1) // 2 + iu[0]]
            m = m + m.T
            return sorted(map(tuple, np.sort(m, axis=1)))
        if profile(D1) != profile(D2):
            return "pair-degree profiles differ"
    return None


def are_isomorphic(D1: Design, D2: Design, node_cap: int = ISO_NODE_CAP):
    """A 1-based point bijection (list of images) mapping D1's blocks onto D2's, or None."""
    if invariant_screen(D1, D2) is not None:
        return None
    f1 = cached_form(D1, node_cap)
    f2 = cached_form(D2, node_cap)
    if f1.cert != f2.cert:
        return None
    inv2 = np.empty_like(f2.labeling)
    inv2[f2.labeling] = np.arange(D2.v)
    phi = inv2[f1.labeling]
    if D1.relabel(phi + 1) != D2:
        raise AssertionError("canonical maps do not compose to an isomorphism")
    return [int(x) + 1 for x in phi]


def non_isomorphism_reason(D1: Design, D2: Design, node_cap: int = ISO_NODE_CAP) -> str | None:
    reason = invariant_screen(D1, D2)
    if reason:
        return reason
    if canonical_cert(D1, node_cap) != canonical_cert(D2, node_cap):
        return "canonical certificates differ"
    return None


def dedupe(designs: Sequence[Design], node_cap: int = ISO_NODE_CAP) -> list[tuple[int, list[int]]]:
    """Isomorphism classes as ``(representative index, member indices)``.

    The representative is the smallest input index of its class; classes are
    listed in order of their representatives.
    """
    classes: dict[bytes, list[int]] = {}
    for i, D in enumerate(designs):
        classes.setdefault(canonical_cert(D, node_cap), []).append(i)
    return sorted(((m[0], m) for m in classes.values()), key=lambda t: t[0])


def brute_force_isomorphism(D1: Design, D2: Design):
    """Exhaustive backtracking over point bijections; for small designs only.

    A partial map is extended only while the image of every partially mapped
    block of D1 lies inside some block of D2, which never discards a solution.
    """
    if (D1.v, D1.b, D1.k) != (D2.v, D2.b, D2.k):
        return None
    v = D1.v
    blocks2 = [tuple(row) for row in D2.array0.tolist()]
    target = set(blocks2)
    inside = {sub for blk in blocks2 for r in range(1, len(blk) + 1)
              for sub in combinations(blk, r)}
    blocks1 = [tuple(row) for row in D1.array0.tolist()]
    through: list[list[tuple]] = [[] for _ in range(v)]
    for blk in blocks1:
        for p in blk:
            through[p].append(blk)
    # visit points so that blocks fill up early
    order: list[int] = []
    filled = {blk: 0 for blk in blocks1}
    left = set(range(v))
    while left:
        p = max(sorted(left), key=lambda q: sum(filled[blk] for blk in through[q]))
        order.append(p)
        left.discard(p)
        for blk in through[p]:
            filled[blk] += 1
    phi = [-1] * v
    used = [False] * v

    def consistent(p: int) -> bool:
        for blk in through[p]:
            img = tuple(sorted(phi[x] for x in blk if phi[x] >= 0))
            if img not in (target if len(img) == len(blk) else inside):
                return False
        return True

    def extend(i: int) -> bool:
        if i == v:
            return True
        p = order[i]
        for q in range(v):
            if used[q]:
                continue
            phi[p] = q
            if consistent(p):
                used[q] = True
                if extend(i + 1):
                    return True
                used[q] = False
        phi[p] = -1
        return False

    if extend(0):
        return [x + 1 for x in phi]
    return None
