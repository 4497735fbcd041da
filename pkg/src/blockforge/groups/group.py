from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Iterable, Sequence

from ..config import DEGREE_CAP
from ..errors import BudgetExceeded, NotTransitive
from .chain import StabChain, schreier_sims
from .perm import Permutation, Raw, raw_is_identity


@dataclass(frozen=True)
class BlockSystem:
    """Invariant partition of {1..degree} into d classes of size c."""

    degree: int
    classes: tuple[tuple[int, ...], ...]

    @property
    def c(self) -> int:
        return len(self.classes[0])

    @property
    def d(self) -> int:
        return len(self.classes)

    def class_of(self) -> dict[int, int]:
        return {p: i for i, cls in enumerate(self.classes) for p in cls}

    def is_preserved_by(self, perm: Permutation) -> bool:
        idx = self.class_of()
        for cls in self.classes:
            targets = {idx[perm(p)] for p in cls}
            if len(targets) != 1:
                return False
        return True

    def label(self) -> str:
        return f"{self.c}x{self.d}"


class PermGroup:
    """A permutation group given by generators.

    The stabilizer chain is built lazily on first use, under a lock, and never
    changes afterwards.
    """

    def __init__(self, generators: Sequence[Permutation], degree: int | None = None,
                 name: str | None = None):
        gens = list(generators)
        if degree is None:
            if not gens:
                raise ValueError("need a degree or at least one generator")
            degree = gens[0].degree
        if degree > DEGREE_CAP:
            raise BudgetExceeded(f"degree {degree} exceeds cap {DEGREE_CAP}")
        for g in gens:
            if g.degree != degree:
                raise ValueError("generator degree mismatch")
        if not gens:
            gens = [Permutation.identity(degree)]
        self.degree = degree
        self.generators: tuple[Permutation, ...] = tuple(gens)
        self.name = name
        self._chain: StabChain | None = None
        self._lock = threading.Lock()

    def __getstate__(self):
        state = self.__dict__.copy()
        del state["_lock"]
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._lock = threading.Lock()

    def __repr__(self) -> str:
        label = self.name or f"<{len(self.generators)} generators>"
        return f"PermGroup({label}, degree={self.degree})"

    @property
    def raw_generators(self) -> list[Raw]:
        return [g.raw for g in self.generators]

    @property
    def chain(self) -> StabChain:
        if self._chain is None:
            with self._lock:
                if self._chain is None:
                    self._chain = schreier_sims(self.raw_generators, self.degree)
        return self._chain

    def order(self) -> int:
        return self.chain.order()

    def __contains__(self, perm: Permutation) -> bool:
        if perm.degree != self.degree:
            return False
        return self.chain.contains(perm.raw)

    def _check_point(self, point: int) -> None:
        if not 1 <= point <= self.degree:
            raise ValueError(f"point {point} out of range 1..{self.degree}")

    def orbit(self, point: int) -> list[int]:
        self._check_point(point)
        gens = self.raw_generators
        seen = {point - 1}
        queue = [point - 1]
        for p in queue:
            for g in gens:
                q = g[p]
                if q not in seen:
                    seen.add(q)
                    queue.append(q)
        return sorted(q + 1 for q in seen)

    def orbits(self) -> list[list[int]]:
        done: set[int] = set()
        out = []
        for p in range(1, self.degree + 1):
            if p not in done:
                orb = self.orbit(p)
                done.update(orb)
                out.append(orb)
        return out

    def is_transitive(self) -> bool:
        return len(self.orbit(1)) == self.degree

    def point_stabilizer(self, point: int) -> PermGroup:
        self._check_point(point)
        chain = schreier_sims(self.raw_generators, self.degree, base_prefix=(point - 1,))
        gens = [Permutation._from_raw(g) for g in chain.level_generators(1)]
        stab = PermGroup(gens, self.degree, name=f"stab({point})")
        # the truncated chain is already a valid chain for the stabilizer
        stab._chain = StabChain(self.degree, chain.base[1:], chain.strong[1:],
                                chain.transversals[1:])
        return stab

    def subdegrees(self) -> list[int]:
        if not self.is_transitive():
            raise NotTransitive("subdegrees need a transitive group")
        return sorted(len(o) for o in self.point_stabilizer(1).orbits())

    def rank(self) -> int:
        return len(self.subdegrees())

    def block_systems(self) -> list[BlockSystem]:
        return find_block_systems(self)

    def is_primitive(self) -> bool:
        return self.is_transitive() and not self.block_systems()


def _minimal_block(gens: list[Raw], n: int, beta: int) -> list[int]:
    """Finest invariant partition joining 0 and beta, as a parent array."""
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    parent[beta] = 0
    queue = [(0, beta)]
    for a, b in queue:
        for g in gens:
            ra, rb = find(g[a]), find(g[b])
            if ra != rb:
                if rb < ra:
                    ra, rb = rb, ra
                parent[rb] = ra
                queue.append((ra, rb))
    return [find(x) for x in range(n)]


def find_block_systems(G: PermGroup) -> list[BlockSystem]:
    """All minimal nontrivial block systems of a transitive group."""
    if not G.is_transitive():
        raise NotTransitive("block systems need a transitive group")
    n = G.degree
    gens = [g for g in G.raw_generators if not raw_is_identity(g)]
    found: dict[tuple, BlockSystem] = {}
    for beta in range(1, n):
        roots = _minimal_block(gens, n, beta)
        groups: dict[int, list[int]] = {}
        for x, r in enumerate(roots):
            groups.setdefault(r, []).append(x + 1)
        classes = tuple(sorted(tuple(c) for c in groups.values()))
        if len(classes) == 1:
            continue
        found.setdefault(classes, BlockSystem(n, classes))
    systems = list(found.values())
    first_class = {s: set(s.classes[0]) for s in systems}
    minimal = [s for s in systems
               if not any(first_class[t] < first_class[s] for t in systems)]
    return sorted(minimal, key=lambda s: (s.c, s.classes))


# Functional aliases mirroring the module contract.

def group_order(G: PermGroup) -> int:
    return G.order()


def orbit(G: PermGroup, point: int) -> list[int]:
    return G.orbit(point)


def point_stabilizer(G: PermGroup, point: int) -> PermGroup:
    return G.point_stabilizer(point)


def subdegrees(G: PermGroup) -> list[int]:
    return G.subdegrees()


def generated_closure(gens: Iterable[Permutation], degree: int, limit: int = 10**6) -> set[Raw]:
    """Brute-force element enumeration; used as an independent order oracle."""
    gens = [g.raw for g in gens]
    ident = tuple(range(degree))
    seen = {ident}
    queue = [ident]
    for x in queue:
        for g in gens:
            y = tuple([g[i] for i in x])
            if y not in seen:
                seen.add(y)
                if len(seen) > limit:
                    raise BudgetExceeded("closure limit exceeded")
                queue.append(y)
    return seen


def set_orbit_array(G: PermGroup, block: Sequence[int], *, collect: bool = True,
                    on_frontier=None) -> tuple[int, object]:
    """Orbit of a 1-based k-subset as a 0-based lex-sorted numpy array."""
    from ..subsets import subset_orbit

    pts = list(block)
    if not pts:
        raise ValueError("empty subset")
    for p in pts:
        if not 1 <= p <= G.degree:
            raise ValueError(f"point {p} out of range 1..{G.degree}")
    if len(set(pts)) != len(pts):
        raise ValueError("subset has repeated points")
    return subset_orbit(G.raw_generators, G.degree, [p - 1 for p in pts],
                        collect=collect, on_frontier=on_frontier)


def set_orbit(G: PermGroup, block: Sequence[int]) -> list[tuple[int, ...]]:
    """Orbit of a k-subset under G, as sorted 1-based tuples in lex order."""
    _, arr = set_orbit_array(G, block)
    return [tuple(int(x) + 1 for x in row) for row in arr]


def _join(n: int, a: tuple, b: tuple) -> tuple:
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for classes in (a, b):
        for cls in classes:
            r0 = find(cls[0] - 1)
            for p in cls[1:]:
                rp = find(p - 1)
                if rp != r0:
                    parent[max(rp, r0)] = min(rp, r0)
                    r0 = min(rp, r0)
    groups: dict[int, list[int]] = {}
    for x in range(n):
        groups.setdefault(find(x), []).append(x + 1)
    return tuple(sorted(tuple(c) for c in groups.values()))


def all_block_systems(G: PermGroup) -> list[BlockSystem]:
    """Every nontrivial block system (minimal or not), sorted by class size.

    Joins of invariant partitions are invariant, and every block through
    point 1 is a union of minimal blocks of pairs {1, beta}, so closing the
    pair systems under joins reaches them all.
    """
    if not G.is_transitive():
        raise NotTransitive("block systems need a transitive group")
    n = G.degree
    gens = [g for g in G.raw_generators if not raw_is_identity(g)]
    found: set[tuple] = set()
    for beta in range(1, n):
        roots = _minimal_block(gens, n, beta)
        groups: dict[int, list[int]] = {}
        for x, r in enumerate(roots):
            groups.setdefault(r, []).append(x + 1)
        found.add(tuple(sorted(tuple(c) for c in groups.values())))
    frontier = list(found)
    while frontier:
        new = []
        current = list(found)
        for a in frontier:
            for b in current:
                j = _join(n, a, b)
                if j not in found:
                    found.add(j)
                    new.append(j)
        frontier = new
    systems = [BlockSystem(n, cls) for cls in found if 1 < len(cls) < n]
    return sorted(systems, key=lambda s: (s.c, s.classes))
