"""Incidence structures developed from base blocks, and exact design checks.

All designs are simple: a block set, never a multiset.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ParameterInfeasible, ParseError
from .groups.group import PermGroup, set_orbit_array
from .subsets import binom_table, lex_sorted, pack_lex, point_dtype, tsubset_counts


class Design:
    """Point count ``v`` plus a lexicographically sorted set of k-blocks.

    Blocks are held as a read-only ``(b, k)`` array of 0-based points
    (``array0``); ``blocks`` gives the 1-based tuples.
    """

    def __init__(self, v: int, blocks: Iterable[Sequence[int]], k: int | None = None):
        rows = [tuple(sorted(int(p) for p in blk)) for blk in blocks]
        if k is None:
            if not rows:
                raise ValueError("cannot infer k from an empty block list")
            k = len(rows[0])
        arr = np.array(rows, dtype=np.int64).reshape(len(rows), k) - 1
        self._init(v, k, arr, validate=True)

    @classmethod
    def from_array0(cls, v: int, arr: np.ndarray, *, validate: bool = True,
                    presorted: bool = False) -> Design:
        arr = np.asarray(arr)
        if arr.ndim != 2:
            raise ValueError("block array must be 2-dimensional")
        d = cls.__new__(cls)
        if not presorted:
            arr = np.sort(arr, axis=1)
        d._init(v, arr.shape[1], arr, validate=validate, presorted=presorted)
        return d

    def _init(self, v, k, arr, validate, presorted=False):
        if v < 1 or k < 1:
            raise ValueError("v and k must be positive")
        if validate:
            if arr.size and (arr.min() < 0 or arr.max() >= v):
                raise ValueError(f"block point out of range 1..{v}")
            if k > 1 and arr.shape[0] and (np.diff(arr, axis=1) == 0).any():
                raise ValueError("block with repeated points")
        arr = arr.astype(point_dtype(v))
        if not presorted:
            arr = lex_sorted(arr)
        if validate and arr.shape[0] > 1 and (arr[1:] == arr[:-1]).all(axis=1).any():
            raise ValueError("duplicate blocks; only simple designs are supported")
        arr.flags.writeable = False
        self.v = v
        self.k = k
        self.array0 = arr

    @property
    def b(self) -> int:
        return self.array0.shape[0]

    @property
    def blocks(self) -> list[tuple[int, ...]]:
        return [tuple(int(x) + 1 for x in row) for row in self.array0]

    @cached_property
    def keys(self) -> np.ndarray:
        return pack_lex(self.array0, self.v)

    @cached_property
    def lam(self) -> int | None:
        return verify_2design(self)

    @property
    def r(self) -> int:
        return self.b * self.k // self.v

    def params(self) -> DesignParams | None:
        if self.lam is None:
            return None
        return DesignParams(self.v, self.b, self.r, self.k, self.lam)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Design) and self.v == other.v and self.k == other.k
                and np.array_equal(self.array0, other.array0))

    def __hash__(self):
        return hash((self.v, self.k, self.array0.tobytes()))

    def __repr__(self) -> str:
        return f"Design(v={self.v}, k={self.k}, b={self.b})"

    def relabel(self, perm: Sequence[int]) -> Design:
        """Apply a point map given as 1-based images."""
        img = np.asarray(perm, dtype=np.int64) - 1
        return Design.from_array0(self.v, img[self.array0.astype(np.int64)], validate=False)


@dataclass(frozen=True)
class DesignParams:
    v: int
    b: int
    r: int
    k: int
    lam: int

    def satisfies_counting(self) -> bool:
        return self.v * self.r == self.b * self.k and self.lam * (self.v - 1) == self.r * (self.k - 1)


def params_from(v: int, k: int, lam: int) -> DesignParams:
    if lam * (v - 1) % (k - 1):
        raise ParameterInfeasible(f"parameter-infeasible: (k-1) does not divide lambda(v-1) for {(v, k, lam)}")
    r = lam * (v - 1) // (k - 1)
    if v * r % k:
        raise ParameterInfeasible(f"parameter-infeasible: k does not divide vr for {(v, k, lam)}")
    return DesignParams(v, v * r // k, r, k, lam)


def min_lambda(v: int, k: int) -> int:
    """Smallest lambda for which ``params_from(v, k, lambda)`` succeeds."""
    lam = 1
    while lam * (v - 1) % (k - 1) or v * (lam * (v - 1) // (k - 1)) % k:
        lam += 1
    return lam


def replication_bound_ok(p: DesignParams) -> bool:
    """Strict lower bound 5r > lambda v for block size 5."""
    if p.k != 5:
        raise ValueError("the replication bound is stated for k = 5")
    return 5 * p.r > p.lam * p.v


def subdegree_divisibility_ok(p: DesignParams, subdegs: Iterable[int]) -> bool:
    """Check r | 5 lambda d and (v-1) | 20 d for every nontrivial subdegree d."""
    if p.k != 5:
        raise ValueError("the subdegree filter is stated for k = 5")
    rest = sorted(subdegs)
    if sum(rest) != p.v:
        raise ValueError("subdegrees must sum to v")
    rest.remove(1)  # the orbit {alpha} itself
    return all((5 * p.lam * d) % p.r == 0 and (20 * d) % (p.v - 1) == 0 for d in rest)


def _lex_tsubsets(v: int, t: int) -> np.ndarray:
    """Colex ranks of all t-subsets of {0..v-1}, listed in lexicographic order."""
    table = binom_table(v, t)
    combos = np.array(list(combinations(range(v), t)), dtype=np.int64)
    ranks = np.zeros(combos.shape[0], dtype=np.int64)
    for j in range(t):
        ranks += table[combos[:, j], j + 1]
    return combos, ranks


def tsubset_table(D: Design, t: int) -> np.ndarray:
    if not 1 <= t <= min(3, D.k):
        raise ValueError("t must be between 1 and min(3, k)")
    return tsubset_counts(D.array0, D.v, t)


def verify_tdesign(D: Design, t: int) -> int | None:
    """Return lambda_t if every t-subset lies in the same positive number of blocks."""
    counts = tsubset_table(D, t)
    first = int(counts[0])
    if first > 0 and (counts == first).all():
        return first
    return None


def verify_2design(D: Design) -> int | None:
    if D.k < 2 or D.v < 2:
        return None
    return verify_tdesign(D, 2)


def nonuniform_witness(D: Design, t: int = 2):
    """Two t-subsets with different block counts, or None if counts are uniform.

    The reference subset is {1..t}; the witness is the lexicographically first
    t-subset whose count differs from it. Returns
    ``((subset, count), (reference, reference_count))`` with 1-based points.
    """
    counts = tsubset_table(D, t)
    combos, ranks = _lex_tsubsets(D.v, t)
    lex_counts = counts[ranks]
    diff = np.flatnonzero(lex_counts != lex_counts[0])
    ref = tuple(int(x) + 1 for x in combos[0])
    if diff.size == 0:
        return None
    i = int(diff[0])
    return ((tuple(int(x) + 1 for x in combos[i]), int(lex_counts[i])),
            (ref, int(lex_counts[0])))


def develop(G: PermGroup, base: Sequence[int]) -> Design:
    """The design whose blocks are the G-orbit of ``base``."""
    _, arr = set_orbit_array(G, base)
    return Design.from_array0(G.degree, arr, validate=False, presorted=True)


def _contains_all(D: Design, arr: np.ndarray) -> bool:
    keys = pack_lex(np.sort(arr, axis=1), D.v)
    return bool(np.isin(keys, D.keys).all())


def is_block_transitive(G: PermGroup, D: Design) -> bool:
    if G.degree != D.v:
        raise ValueError("degree mismatch")
    if D.b == 0:
        return False
    blocks = D.array0.astype(np.int64)
    for g in G.raw_generators:
        if not _contains_all(D, np.asarray(g, dtype=np.int64)[blocks]):
            return False
    size, _ = set_orbit_array(G, [int(x) + 1 for x in D.array0[0]], collect=False)
    return size == D.b


def develop_overgroup(D: Design, H: PermGroup) -> Design:
    """Union of the H-orbits of all blocks of D."""
    if H.degree != D.v:
        raise ValueError("degree mismatch")
    if D.b == 0:
        raise ValueError("design has no blocks")
    covered = np.zeros(0, dtype=np.int64)
    parts = []
    for row, key in zip(D.array0, D.keys):
        if covered.size and np.isin(key, covered):
            continue
        _, arr = set_orbit_array(H, [int(x) + 1 for x in row])
        keys = pack_lex(arr, D.v)
        covered = np.union1d(covered, keys)
        parts.append(arr)
    arr = lex_sorted(np.concatenate(parts))
    return Design.from_array0(D.v, arr, validate=False, presorted=True)


def check_counting(D: Design) -> DesignParams:
    """Counting identities vr = bk and lambda(v-1) = r(k-1) for a verified 2-design; raises if violated."""
    lam = D.lam
    if lam is None:
        raise ValueError("not a 2-design")
    if D.b * D.k % D.v:
        raise AssertionError("bk is not divisible by v")
    p = DesignParams(D.v, D.b, D.b * D.k // D.v, D.k, lam)
    if not p.satisfies_counting():
        raise AssertionError(f"counting identities fail for {p}")
    return p


# .dsn files: "v k" header, one block per line, '#' comments.

def format_design(D: Design) -> str:
    lines = [f"{D.v} {D.k}"]
    lines.extend(" ".join(str(int(x) + 1) for x in row) for row in D.array0)
    return "\n".join(lines) + "\n"


def write_design(D: Design, path: str | Path) -> None:
    Path(path).write_text(format_design(D))


def parse_design_text(text: str) -> Design:
    header = None
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            nums = [int(x) for x in parts]
        except ValueError:
            raise ParseError(f"non-integer token in {line!r}", lineno) from None
        if header is None:
            if len(nums) != 2:
                raise ParseError("header must be 'v k'", lineno)
            header = nums
            continue
        v, k = header
        if len(nums) != k:
            raise ParseError(f"block has {len(nums)} points, expected {k}", lineno)
        if any(b <= a for a, b in zip(nums, nums[1:])):
            raise ParseError("block points must be strictly increasing", lineno)
        if nums[0] < 1 or nums[-1] > v:
            raise ParseError(f"point out of range 1..{v}", lineno)
        if rows and rows[-1] >= nums:
            raise ParseError("blocks must be in strictly increasing lexicographic order "
                             "(duplicates are not allowed)", lineno)
        rows.append(nums)
    if header is None:
        raise ParseError("missing 'v k' header", 1)
    return Design(header[0], rows, k=header[1])


def read_design(path: str | Path) -> Design:
    return parse_design_text(Path(path).read_text())
