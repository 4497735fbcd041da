"""Permutations of {1..n}.

Internally a permutation is a tuple of 0-based images; the public surface is
1-based, matching how points are written in design tables. Products act on
the right: ``(p * q)(x) == q(p(x))``, i.e. apply ``p`` first.
"""

from __future__ import annotations

import re
from typing import Iterable, Sequence

from ..config import DEGREE_CAP
from ..errors import BudgetExceeded, ParseError

Raw = tuple  # 0-based image tuple


def raw_identity(n: int) -> Raw:
    return tuple(range(n))


def raw_mul(p: Raw, q: Raw) -> Raw:
    """Apply p, then q."""
    return tuple([q[i] for i in p])


def raw_inv(p: Raw) -> Raw:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def raw_is_identity(p: Raw) -> bool:
    return all(i == j for i, j in enumerate(p))


class Permutation:
    __slots__ = ("_img", "_hash")

    def __init__(self, images: Sequence[int]):
        """Build from 1-based images: ``images[i-1]`` is the image of ``i``."""
        n = len(images)
        if n < 1:
            raise ValueError("degree must be positive")
        if n > DEGREE_CAP:
            raise BudgetExceeded(f"degree {n} exceeds cap {DEGREE_CAP}")
        img = tuple(int(x) - 1 for x in images)
        if sorted(img) != list(range(n)):
            raise ValueError("images do not form a bijection on 1..n")
        self._img = img
        self._hash = None

    @classmethod
    def _from_raw(cls, img: Raw) -> Permutation:
        p = cls.__new__(cls)
        p._img = img
        p._hash = None
        return p

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls._from_raw(raw_identity(n))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], degree: int) -> Permutation:
        img = list(range(degree))
        seen: set[int] = set()
        for cyc in cycles:
            for a in cyc:
                if not 1 <= a <= degree:
                    raise ValueError(f"point {a} out of range 1..{degree}")
                if a in seen:
                    raise ValueError(f"point {a} repeated")
                seen.add(a)
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                img[a - 1] = b - 1
        return cls._from_raw(tuple(img))

    @property
    def degree(self) -> int:
        return len(self._img)

    @property
    def images(self) -> list[int]:
        return [i + 1 for i in self._img]

    @property
    def raw(self) -> Raw:
        return self._img

    def __call__(self, point: int) -> int:
        return self._img[point - 1] + 1

    def __mul__(self, other: Permutation) -> Permutation:
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        return Permutation._from_raw(raw_mul(self._img, other._img))

    def __pow__(self, e: int) -> Permutation:
        if e < 0:
            return self.inverse() ** (-e)
        result = raw_identity(self.degree)
        base = self._img
        while e:
            if e & 1:
                result = raw_mul(result, base)
            base = raw_mul(base, base)
            e >>= 1
        return Permutation._from_raw(result)

    def inverse(self) -> Permutation:
        return Permutation._from_raw(raw_inv(self._img))

    def is_identity(self) -> bool:
        return raw_is_identity(self._img)

    def cycles(self) -> list[tuple[int, ...]]:
        """Nontrivial cycles, each starting at its smallest point."""
        seen = [False] * self.degree
        out = []
        for start in range(self.degree):
            if seen[start] or self._img[start] == start:
                continue
            cyc = [start + 1]
            seen[start] = True
            j = self._img[start]
            while j != start:
                seen[j] = True
                cyc.append(j + 1)
                j = self._img[j]
            out.append(tuple(cyc))
        return out

    def order(self) -> int:
        from math import lcm

        result = 1
        for c in self.cycles():
            result = lcm(result, len(c))
        return result

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Permutation) and self._img == other._img

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._img)
        return self._hash

    def __str__(self) -> str:
        return format_cycles(self)

    def __repr__(self) -> str:
        return f"Permutation({format_cycles(self)!r}, degree={self.degree})"


def format_cycles(p: Permutation) -> str:
    cyc = p.cycles()
    if not cyc:
        return "()"
    return "".join("(" + ",".join(map(str, c)) + ")" for c in cyc)


_TOKEN = re.compile(r"\s*(?:(\()|(\))|(,)|(\d+))")


def parse_permutation(text: str, degree: int) -> Permutation:
    """Parse disjoint-cycle notation such as ``"(1,2,3)(4,5)"``.

    ``"()"`` (or an empty string) is the identity. Errors carry the character
    offset of the offending token.
    """
    if degree < 1:
        raise ParseError("degree must be positive")
    if degree > DEGREE_CAP:
        raise BudgetExceeded(f"degree {degree} exceeds cap {DEGREE_CAP}")
    img = list(range(degree))
    seen: set[int] = set()
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        if text[pos] != "(":
            raise ParseError(f"expected '(' but found {text[pos]!r}", pos)
        pos += 1
        cycle: list[int] = []
        expect_number = True
        while True:
            m = _TOKEN.match(text, pos)
            if m is None:
                if pos >= n:
                    raise ParseError("unterminated cycle", pos)
                raise ParseError(f"unexpected character {text[pos]!r}", pos)
            tok_pos = m.start(m.lastindex)
            if m.group(4) is not None:
                if not expect_number:
                    raise ParseError("missing ',' between points", tok_pos)
                a = int(m.group(4))
                if not 1 <= a <= degree:
                    raise ParseError(f"point {a} out of range 1..{degree}", tok_pos)
                if a in seen:
                    raise ParseError(f"point {a} repeated", tok_pos)
                seen.add(a)
                cycle.append(a)
                expect_number = False
            elif m.group(3) is not None:
                if expect_number:
                    raise ParseError("unexpected ','", tok_pos)
                expect_number = True
            elif m.group(2) is not None:
                if expect_number and cycle:
                    raise ParseError("dangling ','", tok_pos)
                pos = m.end()
                break
            else:
                raise ParseError("nested '('", tok_pos)
            pos = m.end()
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            img[a - 1] = b - 1
    return Permutation._from_raw(tuple(img))
