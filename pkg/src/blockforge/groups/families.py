"""Concrete permutation group families.

Grid and wreath flattening is row-major with 1-based labels:
an m-tuple (g1, ..., gm) over {1..n} is point sum((gi - 1) * n**(m - i)) + 1.
"""

from __future__ import annotations

import itertools

from ..config import DEGREE_CAP
from ..errors import BudgetExceeded
from .group import PermGroup
from .perm import Permutation


def symmetric(n: int) -> PermGroup:
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return PermGroup([], 1, name="S1")
    if n == 2:
        return PermGroup([Permutation.from_cycles([(1, 2)], 2)], name="S2")
    gens = [Permutation.from_cycles([(1, 2)], n),
            Permutation.from_cycles([tuple(range(1, n + 1))], n)]
    return PermGroup(gens, name=f"S{n}")


def alternating(n: int) -> PermGroup:
    if n < 1:
        raise ValueError("n must be positive")
    if n < 3:
        return PermGroup([], n, name=f"A{n}")
    if n % 2:
        cyc = tuple(range(1, n + 1))
    else:
        cyc = tuple(range(2, n + 1))
    gens = [Permutation.from_cycles([(1, 2, 3)], n)]
    if n > 3:
        gens.append(Permutation.from_cycles([cyc], n))
    return PermGroup(gens, name=f"A{n}")


def cyclic(n: int) -> PermGroup:
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return PermGroup([], 1, name="C1")
    return PermGroup([Permutation.from_cycles([tuple(range(1, n + 1))], n)], name=f"C{n}")


# GF(8) = GF(2)[w]/(w^3 + w + 1); element with bits (b2 b1 b0) is b2 w^2 + b1 w + b0.
# Projective-line point i (1..8) is the field element with integer code i - 1;
# point 9 is infinity.

def _gf8_mul(a: int, b: int) -> int:
    r = 0
    for i in range(3):
        if b >> i & 1:
            r ^= a << i
    for bit in (4, 3):
        if r >> bit & 1:
            r ^= 0b1011 << (bit - 3)
    return r


def _gf8_inv(a: int) -> int:
    for b in range(1, 8):
        if _gf8_mul(a, b) == 1:
            return b
    raise ZeroDivisionError("0 has no inverse in GF(8)")


_INF = 8  # 0-based index of infinity


def _line_perm(f) -> Permutation:
    return Permutation([f(i - 1) + 1 for i in range(1, 10)])


def _affine(a: int, c: int):
    def f(x: int) -> int:
        return _INF if x == _INF else _gf8_mul(a, x) ^ c
    return f


def _invert(x: int) -> int:
    if x == _INF:
        return 0
    if x == 0:
        return _INF
    return _gf8_inv(x)


def _frobenius(x: int) -> int:
    return x if x == _INF else _gf8_mul(x, x)


def frobenius_psl2_8() -> Permutation:
    """x -> x^2 on the 9-point projective line over GF(8)."""
    return _line_perm(_frobenius)


def psl2(q: int) -> PermGroup:
    """PSL(2, q) on the projective line; only q = 8 is supported."""
    if q != 8:
        raise ValueError(f"psl2 is implemented for q = 8 only, not {q}")
    gens = [_line_perm(_affine(1, 1)), _line_perm(_affine(0b010, 0)), _line_perm(_invert)]
    return PermGroup(gens, name="PSL(2,8)")


def sigma_psl2(q: int) -> PermGroup:
    """PSigmaL(2, q): PSL(2, q) extended by the Frobenius map."""
    base = psl2(q)
    return PermGroup(list(base.generators) + [frobenius_psl2_8()], name="PSigmaL(2,8)")


def psl3_2() -> PermGroup:
    """GL(3,2) ~ PSL(2,7) on the 7 nonzero vectors of GF(2)^3.

    Point i is the vector with integer code i. Generators: the Singer cycle
    multiplication by w in GF(8) and a transvection.
    """
    singer = Permutation([_gf8_mul(i, 0b010) for i in range(1, 8)])
    # transvection e0 -> e0 + e1, fixing e1, e2
    def trans(v: int) -> int:
        return v ^ (0b010 if v & 1 else 0)
    transvection = Permutation([trans(i) for i in range(1, 8)])
    return PermGroup([singer, transvection], name="PSL(2,7)")


def _check_degree(n: int) -> None:
    if n > DEGREE_CAP:
        raise BudgetExceeded(f"degree {n} exceeds cap {DEGREE_CAP}")


def wreath_imprimitive(K: PermGroup, d: int) -> PermGroup:
    """K wr S_d on d consecutive blocks of deg(K) points."""
    if d < 2:
        raise ValueError("d must be at least 2")
    c = K.degree
    n = c * d
    _check_degree(n)
    gens = []
    for k in K.generators:
        if k.is_identity():
            continue
        for j in range(d):
            img = list(range(1, n + 1))
            for i in range(1, c + 1):
                img[j * c + i - 1] = j * c + k(i)
            gens.append(Permutation(img))
    for top in symmetric(d).generators:
        img = [0] * n
        for j in range(d):
            for i in range(c):
                img[j * c + i] = (top(j + 1) - 1) * c + i + 1
        gens.append(Permutation(img))
    name = f"{K.name or 'K'} wr S{d}"
    return PermGroup(gens, n, name=name)


def _tuple_index(coords: tuple[int, ...], n: int) -> int:
    p = 0
    for g in coords:
        p = p * n + (g - 1)
    return p + 1


def grid_perm(n: int, m: int, coord_maps, swap: tuple[int, ...] | None = None) -> Permutation:
    """Permutation of the flattened m-fold grid.

    ``coord_maps[i]`` is a Permutation of {1..n} (or None) applied to
    coordinate i; ``swap`` then sends the value in coordinate i to coordinate
    ``swap[i]``.
    """
    images = [0] * n ** m
    for coords in itertools.product(range(1, n + 1), repeat=m):
        new = [coord_maps[i](g) if coord_maps[i] is not None else g for i, g in enumerate(coords)]
        if swap is not None:
            moved = [0] * m
            for i, t in enumerate(swap):
                moved[t] = new[i]
            new = moved
        images[_tuple_index(coords, n) - 1] = _tuple_index(tuple(new), n)
    return Permutation(images)


def wreath_product_action(K: PermGroup, m: int) -> PermGroup:
    """K wr S_m in product action on deg(K)^m points."""
    if m < 2:
        raise ValueError("m must be at least 2")
    n = K.degree
    if n ** m > DEGREE_CAP:
        raise BudgetExceeded(f"degree {n}^{m} exceeds cap {DEGREE_CAP}")
    gens = []
    for k in K.generators:
        if k.is_identity():
            continue
        for i in range(m):
            maps = [None] * m
            maps[i] = k
            gens.append(grid_perm(n, m, maps))
    for top in symmetric(m).generators:
        swap = tuple(top(i + 1) - 1 for i in range(m))
        gens.append(grid_perm(n, m, [None] * m, swap))
    return PermGroup(gens, n ** m, name=f"{K.name or 'K'} wr S{m} (product)")


def wreath_on_system(classes) -> PermGroup:
    """S_c wr S_d preserving the given partition (a BlockSystem or list of classes).

    Class j plays the role of block j of ``wreath_imprimitive(symmetric(c), d)``
    with points in ascending order.
    """
    classes = [sorted(c) for c in getattr(classes, "classes", classes)]
    d = len(classes)
    c = len(classes[0])
    if any(len(cls) != c for cls in classes):
        raise ValueError("classes must have equal size")
    flat = [p for cls in classes for p in cls]
    n = len(flat)
    if sorted(flat) != list(range(1, n + 1)):
        raise ValueError("classes must partition 1..n")
    std = wreath_imprimitive(symmetric(c), d)
    # conjugate: standard position i <-> point flat[i]
    gens = []
    for g in std.generators:
        img = [0] * n
        for i in range(n):
            img[flat[i] - 1] = flat[g(i + 1) - 1]
        gens.append(Permutation(img))
    return PermGroup(gens, n, name=f"S{c} wr S{d}")
