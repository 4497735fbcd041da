"""Deterministic Schreier-Sims.

New base points are always the smallest point moved by the element that
forced the extension, so base, transversals and strong generators are
reproducible for a given generator list.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .perm import Raw, raw_identity, raw_inv, raw_is_identity, raw_mul


def _first_moved(p: Raw) -> int:
    for i, j in enumerate(p):
        if i != j:
            return i
    raise ValueError("identity moves no point")


def _transversal(gens: list[Raw], root: int, n: int) -> dict[int, tuple[Raw, Raw]]:
    ident = raw_identity(n)
    trans = {root: (ident, ident)}
    queue = [root]
    for p in queue:
        u = trans[p][0]
        for s in gens:
            q = s[p]
            if q not in trans:
                w = raw_mul(u, s)
                trans[q] = (w, raw_inv(w))
                queue.append(q)
    return trans


@dataclass
class StabChain:
    degree: int
    base: list[int] = field(default_factory=list)
    strong: list[list[Raw]] = field(default_factory=list)
    transversals: list[dict[int, tuple[Raw, Raw]]] = field(default_factory=list)

    def order(self) -> int:
        result = 1
        for t in self.transversals:
            result *= len(t)
        return result

    def strip(self, g: Raw, start: int = 0) -> tuple[Raw, int]:
        h = g
        for j in range(start, len(self.base)):
            beta = h[self.base[j]]
            entry = self.transversals[j].get(beta)
            if entry is None:
                return h, j
            h = raw_mul(h, entry[1])
        return h, len(self.base)

    def contains(self, g: Raw) -> bool:
        h, j = self.strip(g)
        return j == len(self.base) and raw_is_identity(h)

    def level_generators(self, level: int) -> list[Raw]:
        return list(self.strong[level]) if level < len(self.strong) else []


def schreier_sims(gens: list[Raw], n: int, base_prefix: tuple[int, ...] = ()) -> StabChain:
    gens = [g for g in dict.fromkeys(gens) if not raw_is_identity(g)]
    base = list(base_prefix)
    for g in gens:
        if all(g[b] == b for b in base):
            base.append(_first_moved(g))
    strong = [[g for g in gens if all(g[b] == b for b in base[:i])] for i in range(len(base))]
    trans = [_transversal(strong[i], base[i], n) for i in range(len(base))]
    chain = StabChain(n, base, strong, trans)

    i = len(base) - 1
    while i >= 0:
        extended = False
        level_t = chain.transversals[i]
        for beta, (u, _) in list(level_t.items()):
            for s in chain.strong[i]:
                img = s[beta]
                h = raw_mul(raw_mul(u, s), level_t[img][1])
                if raw_is_identity(h):
                    continue
                y, j = chain.strip(h, i + 1)
                if j < len(chain.base) or not raw_is_identity(y):
                    if j == len(chain.base):
                        chain.base.append(_first_moved(y))
                        chain.strong.append([])
                        chain.transversals.append({})
                    for lev in range(i + 1, j + 1):
                        chain.strong[lev].append(y)
                        chain.transversals[lev] = _transversal(
                            chain.strong[lev], chain.base[lev], n
                        )
                    i = j
                    extended = True
                    break
            if extended:
                break
        if not extended:
            i -= 1
    return chain
