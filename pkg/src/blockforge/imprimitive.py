"""Block-transitive, point-imprimitive 2-(v,5,lambda) designs.

Covers the arithmetic that pins down the admissible (v, c, d) triples, the
designs of the full wreath products S_c wr S_d, and the catalog-driven
search for designs admitting a given imprimitive transitive group.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Iterator, Sequence

import numpy as np

from .catalog import CatalogEntry
from .designs import Design, check_counting, develop
from .errors import BudgetExceeded
from .groups.families import symmetric, wreath_imprimitive, wreath_on_system
from .groups.group import BlockSystem, PermGroup, all_block_systems, set_orbit_array
from .subsets import orbit_labels, tsubset_counts

log = logging.getLogger(__name__)

# Full enumeration above this many blocks is refused unless streaming.
ENUMERATION_CAP = 2_000_000


@dataclass(frozen=True)
class PartitionPattern:
    """Weakly decreasing intersection sizes of a block with d classes of size c."""

    x: tuple[int, ...]
    c: int

    def __post_init__(self):
        if any(a < b for a, b in zip(self.x, self.x[1:])):
            raise ValueError("pattern must be weakly decreasing")
        if self.x and (self.x[-1] < 0 or self.x[0] > self.c):
            raise ValueError("pattern parts must lie in 0..c")

    @property
    def k(self) -> int:
        return sum(self.x)

    @property
    def d(self) -> int:
        return len(self.x)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.x)) + ")"


@dataclass(frozen=True)
class FeasibleTriple:
    v: int
    c: int
    d: int
    patterns: tuple[PartitionPattern, ...]

    def __str__(self) -> str:
        return f"({self.v},{self.c},{self.d})"


@dataclass(frozen=True)
class ClassifiedDesign:
    degree: int
    catalog_index: int
    base: tuple[int, ...]
    lam: int
    b: int
    system: str
    iso_class: int | None = None
    design: Design | None = field(default=None, compare=False, repr=False)


def partitions(k: int, parts: int, max_part: int) -> Iterator[tuple[int, ...]]:
    """Weakly decreasing tuples of length ``parts`` with entries in 0..max_part summing to k."""
    def rec(remaining, slots, cap):
        if slots == 0:
            if remaining == 0:
                yield ()
            return
        for first in range(min(cap, remaining), -1, -1):
            if first * slots < remaining:
                break
            for rest in rec(remaining - first, slots - 1, first):
                yield (first,) + rest
    yield from rec(k, parts, max_part)


def b2_of(x: PartitionPattern | Sequence[int]) -> int:
    parts = x.x if isinstance(x, PartitionPattern) else x
    return sum(a * (a - 1) for a in parts)


def required_b2(v: int, c: int, k: int = 5) -> int | None:
    """The intersection statistic a pattern needs for its wreath orbit to be a 2-design."""
    val = Fraction(k * (k - 1) * (c - 1), v - 1)
    return int(val) if val.denominator == 1 else None


def point_bound(k: int) -> int:
    """Upper bound on v for block-transitive point-imprimitive 2-designs."""
    return (comb(k, 2) - 1) ** 2


def feasible_triples(k: int = 5) -> list[FeasibleTriple]:
    """All (v, c, d) admitting a pattern with the required b2, with those patterns.

    Only v > k + 1 is considered, since a 2-design needs k < v - 1.
    """
    out = []
    bound = point_bound(k)
    for v in range(k + 2, bound + 1):
        for c in range(2, v // 2 + 1):
            if v % c:
                continue
            d = v // c
            need = required_b2(v, c, k)
            if need is None or need <= 0 or need % 2:
                continue
            pats = tuple(PartitionPattern(x, c) for x in partitions(k, d, c) if b2_of(x) == need)
            if pats:
                out.append(FeasibleTriple(v, c, d, pats))
    return out


def wreath_block_count(c: int, d: int, x: PartitionPattern | Sequence[int]) -> int:
    """Size of the S_c wr S_d orbit of any block with intersection pattern x."""
    parts = tuple(x.x if isinstance(x, PartitionPattern) else x)
    parts = parts + (0,) * (d - len(parts))
    if len(parts) != d:
        raise ValueError("pattern has more parts than classes")
    mult = {}
    for a in parts:
        mult[a] = mult.get(a, 0) + 1
    arrangements = factorial(d)
    for m in mult.values():
        arrangements //= factorial(m)
    prod = 1
    for a in parts:
        prod *= comb(c, a)
    return arrangements * prod


def pattern_base(c: int, d: int, x: PartitionPattern | Sequence[int]) -> tuple[int, ...]:
    """A block with pattern x w.r.t. the consecutive classes {1..c}, {c+1..2c}, ..."""
    parts = x.x if isinstance(x, PartitionPattern) else tuple(x)
    pts = []
    for j, a in enumerate(parts):
        pts.extend(j * c + i for i in range(1, a + 1))
    return tuple(pts)


def pattern_of(block: Iterable[int], system: BlockSystem) -> tuple[int, ...]:
    idx = system.class_of()
    counts = [0] * system.d
    for p in block:
        counts[idx[p]] += 1
    return tuple(sorted(counts, reverse=True))


def _triple_for(c: int, d: int, k: int = 5) -> FeasibleTriple:
    for t in feasible_triples(k):
        if (t.c, t.d) == (c, d):
            return t
    raise ValueError(f"(c, d) = ({c}, {d}) is not a feasible triple for k = {k}")


@dataclass(frozen=True)
class WreathResult:
    c: int
    d: int
    pattern: PartitionPattern
    b: int
    lam: int
    design: Design | None


def full_wreath_design(c: int, d: int, *, stream: bool | None = None) -> WreathResult:
    """Develop the unique admissible pattern under S_c wr S_d and verify it.

    When ``stream`` is true (default for orbits over ``ENUMERATION_CAP``) the
    orbit is walked frontier by frontier into a pair-count table and never
    held in memory; the returned ``design`` is then None. Either way lambda
    comes from the pair counts, and the counting identities plus the closed
    form orbit size are asserted.
    """
    triple = _triple_for(c, d)
    if len(triple.patterns) != 1:
        raise ValueError("expected a unique admissible pattern")
    pat = triple.patterns[0]
    expected_b = wreath_block_count(c, d, pat)
    if stream is None:
        stream = expected_b > ENUMERATION_CAP
    W = wreath_imprimitive(symmetric(c), d)
    base = pattern_base(c, d, pat)
    v = c * d
    if stream:
        counts = np.zeros(comb(v, 2), dtype=np.int64)
        size, _ = set_orbit_array(W, base, collect=False,
                                  on_frontier=lambda f: tsubset_counts(f, v, 2, counts))
        lam = int(counts[0])
        if not (counts == lam).all() or lam == 0:
            raise AssertionError("full wreath structure is not a 2-design")
        design = None
        b = size
    else:
        if expected_b > ENUMERATION_CAP:
            raise BudgetExceeded(f"{expected_b} blocks exceeds the enumeration cap; use streaming")
        design = develop(W, base)
        lam = design.lam
        if lam is None:
            raise AssertionError("full wreath structure is not a 2-design")
        check_counting(design)
        b = design.b
    if b != expected_b:
        raise AssertionError(f"orbit size {b} disagrees with closed form {expected_b}")
    r = lam * (v - 1) // 4
    if v * r != b * 5 or lam * (v - 1) != 4 * r:
        raise AssertionError("counting identities fail")
    return WreathResult(c, d, pat, b, lam, design)


# -- catalog-driven search ---------------------------------------------------

def _feasible_pairs(k: int = 5) -> dict[tuple[int, int], PartitionPattern]:
    return {(t.c, t.d): t.patterns[0] for t in feasible_triples(k)}


def designs_for_group(G: PermGroup, k: int = 5) -> list[tuple[tuple[int, ...], int, int, str, Design]]:
    """All block-transitive 2-designs of G whose blocks follow the forced pattern.

    Returns ``(base, lambda, b, system_label, design)`` with ``base`` the
    lex-least block of its G-orbit. Groups with an invariant partition whose
    (c, d) is not feasible are skipped: no 2-design can admit them.
    """
    systems = all_block_systems(G)
    if not systems:
        return []
    feasible = _feasible_pairs(k)
    if any((s.c, s.d) not in feasible for s in systems):
        return []
    system = systems[0]
    pat = feasible[(system.c, system.d)]
    H = wreath_on_system(system)
    base = [system.classes[j][i] for j, a in enumerate(pat.x) for i in range(a)]
    _, cand = set_orbit_array(H, base)
    labels = orbit_labels(G.raw_generators, cand, G.degree)
    uniq, inverse = np.unique(labels, return_inverse=True)
    v = G.degree
    npairs = comb(v, 2)
    # pair counts per candidate orbit in one pass
    from .subsets import binom_table
    table = binom_table(v, 2)
    cand64 = cand.astype(np.int64)
    per = np.zeros(uniq.size * npairs, dtype=np.int64)
    for a in range(k):
        for b in range(a + 1, k):
            idx = table[cand64[:, a], 1] + table[cand64[:, b], 2]
            per += np.bincount(inverse * npairs + idx, minlength=per.size)
    per = per.reshape(uniq.size, npairs)
    sizes = np.bincount(inverse)
    out = []
    for j in np.flatnonzero((per == per[:, :1]).all(axis=1) & (per[:, 0] > 0)):
        rows = cand[inverse == j]
        design = Design.from_array0(v, rows, validate=False, presorted=True)
        lam = int(per[j, 0])
        base_block = tuple(int(p) + 1 for p in cand[uniq[j]])
        out.append((base_block, lam, int(sizes[j]), system.label(), design))
    out.sort(key=lambda t: (t[1], t[0]))
    return out


def _classify_entry(entry: CatalogEntry, v: int, k: int = 5):
    G = entry.group
    if G.degree != v:
        raise ValueError(f"catalog entry {entry.index} has degree {G.degree}, expected {v}")
    if not G.is_transitive():
        log.warning("catalog entry deg%d_n%d is intransitive; skipped", v, entry.index)
        return []
    return [ClassifiedDesign(v, entry.index, base, lam, b, sys_label, None, design)
            for base, lam, b, sys_label, design in designs_for_group(G, k)]


def classify(catalog: Sequence[CatalogEntry], v: int, *, jobs: int = 1,
             iso: bool = True) -> list[ClassifiedDesign]:
    """Search every catalog group of degree v; output sorted by (lambda, index, base).

    With ``iso`` the designs are grouped into isomorphism classes and
    ``iso_class`` numbers them in order of first appearance.
    """
    entries = sorted(catalog, key=lambda e: e.index)
    results: list[ClassifiedDesign] = []
    if jobs > 1 and len(entries) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(_classify_entry, entries, [v] * len(entries)):
                results.extend(part)
    else:
        for e in entries:
            results.extend(_classify_entry(e, v))
    results.sort(key=lambda r: (r.lam, r.catalog_index, r.base))
    if not iso:
        return results
    from .isomorphism import dedupe

    classes = dedupe([r.design for r in results])
    cls_of = {}
    for cid, (rep, members) in enumerate(classes, start=1):
        for m in members:
            cls_of[m] = cid
    return [ClassifiedDesign(r.degree, r.catalog_index, r.base, r.lam, r.b, r.system,
                             cls_of[i], r.design) for i, r in enumerate(results)]


def default_jobs() -> int:
    return max(1, os.cpu_count() or 1)
