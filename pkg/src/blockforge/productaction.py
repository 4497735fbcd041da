"""Product-action analysis on a v0 x v0 grid.

Grid point (row, col), 1-based, is flattened row-major to (row-1)*v0 + col.
Under the full group S_v0 wr S_2 the orbit of a 5-subset is its "shape":
the bipartite row/column incidence of its points up to relabeling rows,
relabeling columns, and transposing. Nineteen shapes contain two points in a
common row; PHI counts blocks of a shape through (1,1),(1,2) and PSI those
through (1,1),(2,2). For a rank-3 group, an orbit is a 2-design exactly
when the two counts agree.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .designs import check_counting, develop, replication_bound_ok
from .errors import BudgetExceeded
from .groups.families import frobenius_psl2_8, grid_perm, psl2, psl3_2
from .groups.group import PermGroup
from .groups.perm import Permutation
from .subsets import binom_table, colex_rank, colex_unrank, pack_lex

RANK3_V0 = (7, 9, 19, 39)
BRUTEFORCE_CAP = 2_000_000


@dataclass(frozen=True)
class GridPoint:
    row: int
    col: int

    def flatten(self, v0: int) -> int:
        return (self.row - 1) * v0 + self.col

    @classmethod
    def unflatten(cls, p: int, v0: int) -> GridPoint:
        return cls((p - 1) // v0 + 1, (p - 1) % v0 + 1)


@dataclass(frozen=True)
class PhiPsi:
    phi: int
    psi: int


# -- arithmetic filters ------------------------------------------------------

def product_feasible(v0: int, m: int, s: int) -> bool:
    """(v0^m - 1)/(v0 - 1) <= 20m/(s - 1), compared exactly."""
    return (v0 ** m - 1) * (s - 1) <= 20 * m * (v0 - 1)


def rank3_admissible(v0: int) -> bool:
    return 40 % (v0 + 1) == 0


# -- shapes ------------------------------------------------------------------

# The third to fifth points of each representative; the first two are (1,1), (1,2).
CASE_COMPLETIONS: dict[int, tuple[tuple[int, int], ...]] = {
    1: ((1, 3), (1, 5), (1, 7)),
    2: ((1, 7), (5, 1), (5, 2)),
    3: ((3, 2), (4, 2), (5, 2)),
    4: ((5, 3), (5, 5), (5, 6)),
    5: ((1, 3), (3, 3), (6, 3)),
    6: ((2, 7), (3, 7), (5, 7)),
    7: ((1, 3), (3, 3), (3, 5)),
    8: ((2, 1), (2, 2), (3, 3)),
    9: ((1, 7), (2, 1), (5, 2)),
    10: ((1, 4), (1, 6), (4, 5)),
    11: ((4, 2), (4, 6), (5, 1)),
    12: ((2, 7), (6, 4), (6, 7)),
    13: ((5, 1), (6, 1), (7, 3)),
    14: ((2, 2), (6, 6), (7, 1)),
    15: ((1, 7), (5, 4), (7, 3)),
    16: ((3, 5), (5, 3), (5, 4)),
    17: ((3, 5), (5, 7), (7, 6)),
    18: ((3, 3), (5, 6), (6, 3)),
    19: ((2, 2), (3, 5), (7, 6)),
}

# The commonly printed case 8 completion has the shape of case 11 (a path
# through three rows and three columns). The counts for case 8 belong to the
# one shape left over, two full rows on two columns plus an isolated point,
# which is what CASE_COMPLETIONS uses.
PRINTED_CASE8 = ((4, 3), (6, 3), (6, 2))

MARKED = ((1, 1), (1, 2))
DIAGONAL = ((1, 1), (2, 2))


def _normalize(points: Sequence[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    """Relabel rows and columns by first appearance in sorted order."""
    rows: dict[int, int] = {}
    cols: dict[int, int] = {}
    out = []
    for r, c in sorted(points):
        out.append((rows.setdefault(r, len(rows)), cols.setdefault(c, len(cols))))
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def _canonical_normalized(norm: tuple[tuple[int, int], ...]) -> tuple:
    best = None
    for pts in (norm, tuple((c, r) for r, c in norm)):
        nrows = 1 + max(r for r, _ in pts)
        ncols = 1 + max(c for _, c in pts)
        for perm in itertools.permutations(range(nrows)):
            masks = [0] * ncols
            for r, c in pts:
                masks[c] |= 1 << perm[r]
            key = (nrows, tuple(sorted(masks)))
            if best is None or key < best:
                best = key
    return best


def shape_key(points: Sequence[tuple[int, int]]) -> tuple:
    """Invariant of a point set under row/column relabeling and transposition."""
    return _canonical_normalized(_normalize(points))


_CASE_OF_SHAPE = {shape_key(MARKED + rep): case for case, rep in CASE_COMPLETIONS.items()}
if len(_CASE_OF_SHAPE) != len(CASE_COMPLETIONS):
    raise AssertionError("case representatives are not pairwise inequivalent")


def classify_shape(block: Sequence[tuple[int, int] | GridPoint]) -> int | str:
    """Case number 1..19 of a 5-subset through (1,1) and (1,2), or "other"."""
    pts = [(p.row, p.col) if isinstance(p, GridPoint) else tuple(p) for p in block]
    if len(set(pts)) != 5:
        raise ValueError("expected five distinct grid points")
    if not set(MARKED) <= set(pts):
        raise ValueError("block must contain (1,1) and (1,2)")
    return _CASE_OF_SHAPE.get(shape_key(pts), "other")


def _shape_case(pts) -> int | str:
    return _CASE_OF_SHAPE.get(shape_key(pts), "other")


# -- closed forms ------------------------------------------------------------

_F = Fraction
# (phi coefficient, phi factors, psi coefficient, psi factors); a factor j stands for (v0 - j)
_CLOSED: dict[int, tuple[Fraction, tuple[int, ...], Fraction, tuple[int, ...]]] = {
    1: (_F(1, 6), (2, 3, 4), _F(0), ()),
    2: (_F(6), (1, 2), _F(8), (2,)),
    3: (_F(7, 3), (1, 2, 3), _F(2), (2, 3)),
    4: (_F(2, 3), (1, 2, 3, 4), _F(2), (2, 3, 4)),
    5: (_F(3, 2), (1, 2, 2), _F(2), (2, 2)),
    6: (_F(2, 3), (1, 2, 2, 3), _F(2), (2, 2, 3)),
    7: (_F(5), (1, 2, 3), _F(10), (2, 3)),
    8: (_F(1), (1, 2, 2), _F(3), (2, 2)),
    9: (_F(5), (1, 2, 2), _F(10), (2, 2)),
    10: (_F(1, 2), (1, 2, 3, 4), _F(2, 3), (2, 3, 4)),
    11: (_F(4), (1, 2, 2), _F(12), (2, 2)),
    12: (_F(3), (1, 2, 2, 3), _F(14), (2, 2, 3)),
    13: (_F(4), (1, 2, 2, 3), _F(12), (2, 2, 3)),
    14: (_F(3), (1, 2, 2, 3), _F(14), (2, 2, 3)),
    15: (_F(1, 2), (1, 2, 2, 3, 4), _F(7, 3), (2, 2, 3, 4)),
    16: (_F(1, 2), (1, 2, 2, 3, 4), _F(4), (2, 2, 3, 4)),
    17: (_F(1, 6), (1, 2, 2, 3, 3, 4), _F(3), (2, 2, 3, 3, 4)),
    18: (_F(1, 2), (1, 2, 2, 3, 3), _F(4), (2, 2, 3, 3)),
    19: (_F(1), (1, 2, 2, 3, 3), _F(8), (2, 2, 3, 3)),
}


def _evaluate(case: int, which: str, coef: Fraction, factors: tuple[int, ...], v0: int) -> int:
    val = coef
    for j in factors:
        val *= v0 - j
    if val.denominator != 1:
        raise ArithmeticError(f"case {case}: {which} is not integral at v0 = {v0}")
    return int(val)


def phi_psi_closed(case: int, v0: int) -> PhiPsi:
    if case not in _CLOSED:
        raise ValueError(f"case must be in 1..19, got {case}")
    pc, pf, sc, sf = _CLOSED[case]
    return PhiPsi(_evaluate(case, "phi", pc, pf, v0), _evaluate(case, "psi", sc, sf, v0))


# -- brute force and counting oracles ----------------------------------------

def _tally(v0: int, marked: tuple[tuple[int, int], ...]) -> dict:
    grid = [(r, c) for r in range(1, v0 + 1) for c in range(1, v0 + 1) if (r, c) not in marked]
    counts: dict = {}
    for trio in itertools.combinations(grid, 3):
        case = _shape_case(marked + trio)
        counts[case] = counts.get(case, 0) + 1
    return counts


@lru_cache(maxsize=None)
def phi_psi_table_bruteforce(v0: int) -> dict[int | str, PhiPsi]:
    """Counts for every case by classifying each completion of the marked pairs.

    The key "other" collects completions outside the nineteen cases; for PHI
    it must be zero, for PSI it holds the shapes with no two points on a line.
    """
    if v0 < 2:
        raise ValueError("v0 must be at least 2")
    if comb(v0 * v0 - 2, 3) > BRUTEFORCE_CAP:
        raise BudgetExceeded(f"{comb(v0 * v0 - 2, 3)} completions exceed the brute-force cap")
    phi = _tally(v0, MARKED)
    psi = _tally(v0, DIAGONAL)
    keys = sorted(set(CASE_COMPLETIONS) | ({"other"} if "other" in phi or "other" in psi else set()),
                  key=lambda c: (isinstance(c, str), c if isinstance(c, int) else 0))
    return {c: PhiPsi(phi.get(c, 0), psi.get(c, 0)) for c in keys}


def phi_psi_bruteforce(case: int, v0: int) -> PhiPsi:
    return phi_psi_table_bruteforce(v0)[case]


@lru_cache(maxsize=None)
def _pattern_weights(marked: tuple[tuple[int, int], ...]) -> dict:
    """Completions on a small grid whose fresh rows and columns are initial segments.

    Every completion uses at most three rows and three columns beyond the
    marked ones; relabeling those to the smallest unused labels is a
    bijection onto the completions counted here, weighted by the number of
    ways to choose the actual labels.
    """
    mrows = sorted({r for r, _ in marked})
    mcols = sorted({c for _, c in marked})
    nrows, ncols = len(mrows) + 3, len(mcols) + 3
    grid = [(r, c) for r in range(1, nrows + 1) for c in range(1, ncols + 1) if (r, c) not in marked]
    out: dict = {}
    for trio in itertools.combinations(grid, 3):
        fresh_r = sorted({r for r, _ in trio} - set(mrows))
        fresh_c = sorted({c for _, c in trio} - set(mcols))
        if fresh_r != list(range(len(mrows) + 1, len(mrows) + 1 + len(fresh_r))):
            continue
        if fresh_c != list(range(len(mcols) + 1, len(mcols) + 1 + len(fresh_c))):
            continue
        key = (_shape_case(marked + trio), len(fresh_r), len(fresh_c))
        out[key] = out.get(key, 0) + 1
    return out


def phi_psi_counting(v0: int) -> dict[int | str, PhiPsi]:
    """Exact PHI/PSI for any v0 >= 5 by weighted pattern counting."""
    result = {}
    for label, marked in (("phi", MARKED), ("psi", DIAGONAL)):
        mr = len({r for r, _ in marked})
        mc = len({c for _, c in marked})
        for (case, a, b), n in _pattern_weights(marked).items():
            w = n * comb(v0 - mr, a) * comb(v0 - mc, b)
            result.setdefault(case, {"phi": 0, "psi": 0})[label] += w
    return {c: PhiPsi(d["phi"], d["psi"]) for c, d in result.items()}


def solve_phi_eq_psi(v0s: Sequence[int] = RANK3_V0) -> list[tuple[int, int, int]]:
    """(case, v0, lambda) with PHI = PSI = lambda > 0 from the closed forms."""
    out = []
    for v0 in v0s:
        for case in sorted(_CLOSED):
            pp = phi_psi_closed(case, v0)
            if pp.phi == pp.psi > 0:
                out.append((case, v0, pp.phi))
    return sorted(out, key=lambda t: (t[1], t[2], t[0]))


# -- explicit groups on the grid ---------------------------------------------

SOCLE_TOPS = ("wr2", "sigma_wr2", "c6", "s3")


def socle_group(family: str = "psl28", top: str = "wr2") -> PermGroup:
    """Overgroups of T x T on the grid, T = PSL(2,8) on 9 points (or PSL(2,7) on 7 with wr2)."""
    if family == "psl27":
        if top != "wr2":
            raise ValueError("only the wr2 top is available for psl27")
        T, v0, phi = psl3_2(), 7, None
    elif family == "psl28":
        T, v0, phi = psl2(8), 9, frobenius_psl2_8()
    else:
        raise ValueError(f"unsupported family {family!r}")
    if top not in SOCLE_TOPS:
        raise ValueError(f"unsupported top {top!r}; choose from {', '.join(SOCLE_TOPS)}")
    gens = []
    for g in T.generators:
        gens.append(grid_perm(v0, 2, [g, None]))
        gens.append(grid_perm(v0, 2, [None, g]))
    swap = (1, 0)
    if top == "wr2":
        gens.append(grid_perm(v0, 2, [None, None], swap))
    elif top == "sigma_wr2":
        gens += [grid_perm(v0, 2, [None, None], swap),
                 grid_perm(v0, 2, [phi, None]), grid_perm(v0, 2, [None, phi])]
    elif top == "c6":
        gens.append(grid_perm(v0, 2, [phi, phi], swap))
    else:
        gens += [grid_perm(v0, 2, [phi, phi.inverse()]), grid_perm(v0, 2, [None, None], swap)]
    return PermGroup(gens, v0 * v0, name=f"{family}^2.{top}")


# -- orbits on 5-subsets through a line pair ----------------------------------

@dataclass(frozen=True)
class ProductOrbit:
    base: tuple[int, ...]   # lex-least block of the orbit, 1-based
    phi: int
    psi: int


@dataclass(frozen=True)
class ProductDesign:
    base: tuple[int, ...]
    lam: int
    b: int


def _grid_side(G: PermGroup) -> int:
    v0 = int(round(G.degree ** 0.5))
    if v0 * v0 != G.degree:
        raise ValueError("group degree is not a square")
    return v0


def _pair_transversal(gens: list[np.ndarray], n: int):
    """Orbit of the pair {0,1} with, per pair, a permutation carrying {0,1} onto it."""
    pair_id = -np.ones((n, n), dtype=np.int64)
    forward = [np.arange(n)]
    pairs = [(0, 1)]
    pair_id[0, 1] = pair_id[1, 0] = 0
    i = 0
    while i < len(pairs):
        for g in gens:
            h = g[forward[i]]
            x, y = sorted((int(h[0]), int(h[1])))
            if pair_id[x, y] < 0:
                pair_id[x, y] = pair_id[y, x] = len(pairs)
                pairs.append((x, y))
                forward.append(h)
        i += 1
    forward = np.array(forward)
    inverse = np.argsort(forward, axis=1)
    return pairs, pair_id, forward, inverse


def _pair_stabilizer(G: PermGroup, gens, pairs, pair_id, forward, inverse) -> list[np.ndarray]:
    """Generators of the setwise stabilizer of {0,1}, grown until the order is right."""
    target = G.order() // len(pairs)
    n = G.degree
    chosen: list[np.ndarray] = []
    seen = set()
    order = 1
    rng = np.random.default_rng(0)
    for i in rng.permutation(len(pairs)):
        for g in gens:
            h = g[forward[i]]
            j = pair_id[h[0], h[1]]
            s = inverse[j][h]
            key = s.tobytes()
            if key in seen or (s == np.arange(n)).all():
                continue
            seen.add(key)
            chosen.append(s)
            order = PermGroup([Permutation([int(x) + 1 for x in c]) for c in chosen], n).order()
            if order == target:
                return chosen
    raise AssertionError(f"pair stabilizer generators reach order {order}, expected {target}")


def _completion_index(rows: np.ndarray, table: np.ndarray) -> np.ndarray:
    """Index of sorted 5-subsets containing points 0 and 1 among all such subsets."""
    return colex_rank(rows[:, 2:].astype(np.int64) - 2, table)


def product_orbits(G: PermGroup) -> list[ProductOrbit]:
    """G-orbits on 5-subsets meeting a row in two points, with PHI and PSI.

    Requires G to act with rank 3 and subdegrees 1, 2(v0-1), (v0-1)^2, so
    that pairs on a common row or column form one G-orbit.
    """
    v0 = _grid_side(G)
    n = G.degree
    expected = [1, 2 * (v0 - 1), (v0 - 1) ** 2]
    if sorted(G.subdegrees()) != expected:
        raise ValueError(f"expected subdegrees {expected}, got {sorted(G.subdegrees())}")
    gens = [np.asarray(g, dtype=np.int64) for g in G.raw_generators]
    pairs, pair_id, forward, inverse = _pair_transversal(gens, n)
    if len(pairs) != n * 2 * (v0 - 1) // 2:
        raise AssertionError("line pairs do not form a single orbit")
    stab = _pair_stabilizer(G, gens, pairs, pair_id, forward, inverse)

    table = binom_table(n - 2, 3)
    total = comb(n - 2, 3)
    comp = colex_unrank(np.arange(total), n - 2, 3, table).astype(np.int64) + 2
    comp = np.column_stack([np.zeros(total, np.int64), np.ones(total, np.int64), comp])

    src, dst = [], []
    for s in stab:
        img = np.sort(s[comp], axis=1)
        src.append(np.arange(total))
        dst.append(_completion_index(img, table))
    for i, j in itertools.combinations(range(5), 2):
        if (i, j) == (0, 1):
            continue
        pid = pair_id[comp[:, i], comp[:, j]]
        mask = pid >= 0
        img = np.sort(inverse[pid[mask][:, None], comp[mask]], axis=1)
        src.append(np.flatnonzero(mask))
        dst.append(_completion_index(img, table))
    src = np.concatenate(src)
    dst = np.concatenate(dst)
    graph = coo_matrix((np.ones(src.size, dtype=np.int8), (src, dst)), shape=(total, total))
    ncomp, labels = connected_components(graph, directed=True, connection="weak")

    phi = np.bincount(labels, minlength=ncomp)
    psi = np.bincount(_diagonal_labels(n, v0, pair_id, inverse, table, labels), minlength=ncomp)
    keys = pack_lex(comp, n)
    best = np.full(ncomp, np.iinfo(np.int64).max)
    np.minimum.at(best, labels, keys)
    # completions are in colex order, so locate each minimum through a sort
    by_key = np.argsort(keys)
    where = by_key[np.searchsorted(keys[by_key], best)]
    out = []
    for c in range(ncomp):
        row = comp[where[c]]
        out.append(ProductOrbit(tuple(int(x) + 1 for x in row), int(phi[c]), int(psi[c])))
    out.sort(key=lambda o: o.base)
    return out


def _diagonal_labels(n, v0, pair_id, inverse, table, labels) -> np.ndarray:
    """Orbit label of every 5-subset through (1,1),(2,2) that meets a line twice."""
    a, b = 0, v0 + 1
    others = np.array([p for p in range(n) if p not in (a, b)], dtype=np.int64)
    trip = others[colex_unrank(np.arange(comb(n - 2, 3)), n - 2, 3, binom_table(n - 2, 3)).astype(np.int64)]
    rows = np.sort(np.column_stack([np.full(len(trip), a), np.full(len(trip), b), trip]), axis=1)
    pid = -np.ones(len(rows), dtype=np.int64)
    for i, j in itertools.combinations(range(5), 2):
        cand = pair_id[rows[:, i], rows[:, j]]
        pid = np.where(pid < 0, cand, pid)
    mask = pid >= 0
    img = np.sort(inverse[pid[mask][:, None], rows[mask]], axis=1)
    return labels[_completion_index(img, table)]


def product_designs(G: PermGroup) -> list[ProductDesign]:
    """Block-transitive 2-designs of G with blocks meeting a row twice, verified."""
    out = []
    for orb in product_orbits(G):
        if orb.phi != orb.psi or orb.phi == 0:
            continue
        D = develop(G, orb.base)
        lam = D.lam
        if lam != orb.phi:
            raise AssertionError(f"orbit of {orb.base}: lambda {lam} but PHI = PSI = {orb.phi}")
        check_counting(D)
        if not replication_bound_ok(D.params()):
            raise AssertionError(f"orbit of {orb.base} violates 5r > lambda v")
        out.append(ProductDesign(orb.base, lam, D.b))
    out.sort(key=lambda d: (d.lam, d.base))
    return out
