import itertools
import random
from math import factorial

import pytest
from hypothesis import given, settings, strategies as st

from blockforge.errors import BudgetExceeded, NotTransitive, ParseError
from blockforge.groups import (PermGroup, Permutation, alternating, cyclic, find_block_systems,
                               format_cycles, format_group, group_order, orbit,
                               parse_group_text, parse_permutation, point_stabilizer, psl2,
                               psl3_2, set_orbit, sigma_psl2, subdegrees, symmetric,
                               wreath_imprimitive, wreath_on_system, wreath_product_action)
from blockforge.groups.group import all_block_systems, generated_closure


# -- permutations -------------------------------------------------------------

def test_parse_cycles():
    assert parse_permutation("(1,2,3)(4,5)", 5).images == [2, 3, 1, 5, 4]


def test_parse_identity():
    p = parse_permutation("()", 4)
    assert p.is_identity() and p.degree == 4


@pytest.mark.parametrize("text, where", [("(1,2)(1,3)", 6), ("(1,9)", 3), ("(1,2", None), ("(1,,2)", None)])
def test_parse_errors_carry_position(text, where):
    # positions are 0-based character offsets
    with pytest.raises(ParseError) as err:
        parse_permutation(text, 8)
    assert err.value.position is not None
    if where is not None:
        assert err.value.position == where


def test_repeated_point_message():
    with pytest.raises(ParseError, match="1"):
        parse_permutation("(1,2)(1,3)", 3)


def test_out_of_range():
    with pytest.raises(ParseError):
        parse_permutation("(1,4)", 3)


perm_st = st.integers(2, 9).flatmap(lambda n: st.permutations(list(range(1, n + 1))))


@given(perm_st)
def test_cycle_roundtrip(images):
    p = Permutation(images)
    assert parse_permutation(format_cycles(p), p.degree) == p


@given(st.integers(2, 8).flatmap(
    lambda n: st.tuples(*(st.permutations(list(range(1, n + 1))) for _ in range(3)))))
def test_composition_laws(triple):
    a, b, c = (Permutation(x) for x in triple)
    e = Permutation.identity(a.degree)
    assert (a * b) * c == a * (b * c)
    assert a * e == a == e * a
    assert a * a.inverse() == e
    # products act on the right: x^(ab) = (x^a)^b
    assert all((a * b)(x) == b(a(x)) for x in range(1, a.degree + 1))


def test_order_of_element():
    assert parse_permutation("(1,2,3)(4,5)", 5).order() == 6


# -- orders -------------------------------------------------------------------

def test_wreath_order():
    assert group_order(wreath_imprimitive(symmetric(4), 4)) == 24 ** 4 * 24


def test_psl28_order_against_closure():
    G = psl2(8)
    assert group_order(G) == 504 == len(generated_closure(G.generators, 9))


def test_small_orders_against_closure():
    for G in (symmetric(5), alternating(5), cyclic(21), psl3_2(), sigma_psl2(8)):
        assert G.order() == len(generated_closure(G.generators, G.degree))
    assert psl3_2().order() == 168
    assert sigma_psl2(8).order() == 1512


def test_cyclic_order():
    assert cyclic(21).order() == 21


def test_unsupported_q():
    with pytest.raises(ValueError):
        psl2(7)


def test_psl28_sharply_three_transitive():
    G = psl2(8)
    start = (1, 2, 3)
    seen = {start}
    queue = [start]
    for t in queue:
        for g in G.generators:
            u = tuple(g(x) for x in t)
            if u not in seen:
                seen.add(u)
                queue.append(u)
    assert len(seen) == 9 * 8 * 7 == G.order()


def test_psl28_generators_pinned():
    # x -> x+1 on codes 0..7 is XOR with 1; infinity = 9 fixed
    g = psl2(8).generators[0]
    assert [g(i) for i in range(1, 10)] == [2, 1, 4, 3, 6, 5, 8, 7, 9]


# -- membership ----------------------------------------------------------------

def test_sifting_accepts_random_products():
    G = wreath_imprimitive(symmetric(3), 4)
    rnd = random.Random(5)
    for _ in range(50):
        g = Permutation.identity(G.degree)
        for _ in range(rnd.randint(0, 20)):
            g = g * rnd.choice(G.generators)
        assert g in G


def test_sifting_rejects_outsider():
    G = wreath_imprimitive(symmetric(3), 4)
    # a transposition across two classes breaks the block system
    assert parse_permutation("(3,4)", 12) not in G
    H = PermGroup([parse_permutation("(1,2)", 4)])
    assert parse_permutation("(3,4)", 4) not in H


# -- orbits and stabilizers -------------------------------------------------------

def test_orbits_basic():
    assert orbit(cyclic(21), 1) == list(range(1, 22))
    assert orbit(PermGroup([], 5), 3) == [3]
    with pytest.raises(ValueError):
        orbit(cyclic(5), 6)


def test_stabilizer_orbit_in_wreath():
    W = wreath_imprimitive(symmetric(4), 4)
    S = point_stabilizer(W, 1)
    assert orbit(S, 2) == [2, 3, 4]
    # independent check on explicit stabilizer generators
    assert all(g(1) == 1 for g in S.generators)


def test_stabilizer_orders():
    assert point_stabilizer(symmetric(5), 1).order() == 24
    assert orbit(point_stabilizer(symmetric(5), 1), 2) == [2, 3, 4, 5]
    assert point_stabilizer(cyclic(21), 1).order() == 1
    S = point_stabilizer(psl2(8), 1)
    assert S.order() == 56 == len(generated_closure(S.generators, 9))


@pytest.mark.parametrize("G", [wreath_imprimitive(symmetric(3), 3), psl2(8), cyclic(12), psl3_2(),
                               PermGroup([parse_permutation("(1,2)(3,4)", 6), parse_permutation("(5,6)", 6)])])
def test_orbit_stabilizer(G):
    for a in range(1, G.degree + 1):
        assert len(orbit(G, a)) * point_stabilizer(G, a).order() == G.order()


def test_set_orbit_examples():
    W = wreath_imprimitive(symmetric(4), 4)
    assert len(set_orbit(W, (1, 2, 5, 6, 9))) == 1728
    assert set_orbit(PermGroup([], 5), (1, 2, 3, 4, 5)) == [(1, 2, 3, 4, 5)]
    assert len(set_orbit(cyclic(21), (1, 2, 5, 15, 17))) == 21
    with pytest.raises(ValueError):
        set_orbit(cyclic(5), (1, 1, 2))
    with pytest.raises(ValueError):
        set_orbit(cyclic(5), (1, 6))


def test_set_orbit_closed_and_sorted():
    G = psl3_2()
    orb = set_orbit(G, (1, 2, 4))
    s = set(orb)
    assert orb == sorted(s)
    for blk in orb:
        for g in G.generators:
            assert tuple(sorted(g(x) for x in blk)) in s


def test_set_orbit_against_closure():
    G = alternating(6)
    elements = generated_closure(G.generators, 6)
    expected = {tuple(sorted(e[x - 1] + 1 for x in (1, 2, 3))) for e in elements}
    assert set_orbit(G, (1, 2, 3)) == sorted(expected)


def test_set_orbit_cap(monkeypatch):
    monkeypatch.setenv("BLOCKFORGE_BUDGET_ORBIT", "10")
    with pytest.raises(BudgetExceeded):
        set_orbit(symmetric(8), (1, 2, 3))


# -- subdegrees --------------------------------------------------------------------

def test_subdegrees_product_rank3():
    assert sorted(subdegrees(wreath_product_action(symmetric(9), 2))) == [1, 16, 64]


@pytest.mark.parametrize("K, v0", [(symmetric(5), 5), (alternating(6), 6)])
def test_subdegrees_product_rank4(K, v0):
    assert sorted(subdegrees(wreath_product_action(K, 3))) == sorted(
        [1, 3 * (v0 - 1), 3 * (v0 - 1) ** 2, (v0 - 1) ** 3])


def test_subdegrees_regular():
    assert subdegrees(cyclic(21)) == [1] * 21


def test_subdegrees_intransitive():
    with pytest.raises(NotTransitive):
        subdegrees(PermGroup([parse_permutation("(1,2)", 4)]))


def test_subdegrees_independent_of_base_point():
    for G in (wreath_imprimitive(symmetric(3), 3), psl2(8), psl3_2()):
        assert sorted(len(o) for o in point_stabilizer(G, 2).orbits()) == sorted(subdegrees(G))
        assert sum(subdegrees(G)) == G.degree


def test_product_action_psl28():
    G = wreath_product_action(psl2(8), 2)
    assert G.degree == 81 and G.order() == 508032
    assert sorted(G.subdegrees()) == [1, 16, 64]


def test_product_action_degree_cap():
    with pytest.raises(BudgetExceeded):
        wreath_product_action(symmetric(11), 4)


# -- block systems -----------------------------------------------------------------

def test_block_systems_cyclic21():
    systems = find_block_systems(cyclic(21))
    assert sorted((s.c, s.d) for s in systems) == [(3, 7), (7, 3)]
    for s in systems:
        assert all(s.is_preserved_by(g) for g in cyclic(21).generators)


def test_block_systems_primitive():
    assert find_block_systems(symmetric(5)) == []
    assert psl2(8).is_primitive()
    for n in (3, 4, 6, 7):
        assert symmetric(n).is_primitive()


def test_block_systems_wreath():
    W = wreath_imprimitive(symmetric(4), 4)
    systems = find_block_systems(W)
    assert [s.label() for s in systems] == ["4x4"]
    assert systems[0].classes == ((1, 2, 3, 4), (5, 6, 7, 8), (9, 10, 11, 12), (13, 14, 15, 16))


def _brute_block_systems(G):
    """All nontrivial invariant partitions, by testing every candidate block through 1."""
    n = G.degree
    found = set()
    for size in range(2, n):
        if n % size:
            continue
        for rest in itertools.combinations(range(2, n + 1), size - 1):
            block = frozenset((1,) + rest)
            images = {block}
            queue = [block]
            ok = True
            for b in queue:
                for g in G.generators:
                    img = frozenset(g(x) for x in b)
                    if img in images:
                        continue
                    if any(img & other for other in images):
                        ok = False
                        break
                    images.add(img)
                    queue.append(img)
                if not ok:
                    break
            if ok and sum(len(b) for b in images) == n:
                found.add(tuple(sorted(tuple(sorted(b)) for b in images)))
    return found


@pytest.mark.parametrize("G", [cyclic(12), cyclic(8), wreath_imprimitive(symmetric(2), 4),
                               wreath_imprimitive(cyclic(3), 3)])
def test_all_block_systems_against_brute_force(G):
    got = {s.classes for s in all_block_systems(G)}
    assert got == _brute_block_systems(G)
    minimal = {s.classes for s in find_block_systems(G)}
    assert minimal <= got


def test_wreath_on_system_matches_classes():
    sysm = find_block_systems(cyclic(21))[0]
    H = wreath_on_system(sysm)
    assert H.order() == factorial(sysm.c) ** sysm.d * factorial(sysm.d)
    assert all(sysm.is_preserved_by(g) for g in H.generators)
    assert all(g in H for g in cyclic(21).generators)


# -- files ------------------------------------------------------------------------------

def test_group_file_roundtrip(tmp_path):
    G = psl2(8)
    text = format_group(G, comment="PSL(2,8) on the projective line")
    H = parse_group_text(text)
    assert H.degree == 9 and H.generators == G.generators


def test_group_file_errors():
    with pytest.raises(ParseError) as err:
        parse_group_text("5\n(1,2)\n(1,7)\n")
    assert err.value.position == 3
    with pytest.raises(ParseError):
        parse_group_text("# nothing\n")
    with pytest.raises(ParseError):
        parse_group_text("x\n")
