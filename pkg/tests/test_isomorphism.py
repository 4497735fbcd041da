import itertools

import numpy as np
import pytest

from blockforge.designs import Design, develop
from blockforge.errors import BudgetExceeded
from blockforge.groups import cyclic, symmetric, wreath_imprimitive
from blockforge.imprimitive import designs_for_group, full_wreath_design
from blockforge.isomorphism import (are_isomorphic, brute_force_isomorphism, canonical_cert,
                                    canonical_form, dedupe, invariant_screen,
                                    non_isomorphism_reason)

PLANE_A = develop(cyclic(21), (1, 2, 5, 15, 17))
PLANE_B = develop(cyclic(21), (3, 6, 7, 12, 14))


def _shuffle(D, rng):
    return D.relabel(rng.permutation(D.v) + 1)


def _random_design(rng, v, k, b):
    blocks = set()
    while len(blocks) < b:
        blocks.add(tuple(sorted(int(x) + 1 for x in rng.choice(v, k, replace=False))))
    return Design(v, sorted(blocks))


def _check_bijection(D1, D2, phi):
    mapped = {tuple(sorted(phi[x - 1] for x in blk)) for blk in D1.blocks}
    assert mapped == set(D2.blocks)


@pytest.mark.parametrize("D", [PLANE_A, develop(cyclic(7), (1, 2, 4)),
                               develop(wreath_imprimitive(symmetric(2), 4), (1, 2, 3, 5))],
                         ids=["plane", "fano", "wreath24"])
def test_relabel_invariance(D, rng):
    cert = canonical_cert(D)
    for _ in range(100):
        assert canonical_cert(_shuffle(D, rng)) == cert


def test_relabel_invariance_wreath44(rng):
    D = full_wreath_design(4, 4).design
    cert = canonical_cert(D)
    for _ in range(10):
        assert canonical_cert(_shuffle(D, rng)) == cert


def test_cert_layout():
    cert = canonical_cert(PLANE_A)
    assert cert[:12] == (21).to_bytes(4, "big") + (21).to_bytes(4, "big") + (5).to_bytes(4, "big")
    bits = np.unpackbits(np.frombuffer(cert[12:], dtype=np.uint8))[:21 * 21]
    assert bits.reshape(21, 21).sum(axis=1).tolist() == [5] * 21


def test_planes_isomorphic():
    assert canonical_cert(PLANE_A) == canonical_cert(PLANE_B)
    phi = are_isomorphic(PLANE_A, PLANE_B)
    _check_bijection(PLANE_A, PLANE_B, phi)
    assert brute_force_isomorphism(PLANE_A, PLANE_B) is not None


def test_all_cyclic_planes_one_class():
    planes = [D for _, _, _, _, D in designs_for_group(cyclic(21))]
    assert len(dedupe(planes)) == 1


def test_parameter_separation():
    W = full_wreath_design(4, 4).design
    other = develop(cyclic(16), (1, 2, 3, 5, 9))
    assert canonical_cert(W) != canonical_cert(other)
    assert are_isomorphic(W, other) is None
    assert "parameters differ" in non_isomorphism_reason(W, other)


def test_shuffled_blocks(rng):
    order = rng.permutation(PLANE_A.b)
    shuffled = Design(21, [PLANE_A.blocks[i] for i in order])
    phi = are_isomorphic(PLANE_A, shuffled)
    _check_bijection(PLANE_A, shuffled, phi)


def test_one_block_replaced():
    blocks = list(PLANE_A.blocks)
    blocks[0] = (1, 2, 3, 4, 6)
    E = Design(21, blocks)
    assert are_isomorphic(PLANE_A, E) is None
    assert non_isomorphism_reason(PLANE_A, E) is not None


def test_dedupe_repeats(rng):
    D = develop(cyclic(13), (1, 2, 4, 10))
    classes = dedupe([D, _shuffle(D, rng), _shuffle(D, rng)])
    assert classes == [(0, [0, 1, 2])]


def test_dedupe_order():
    fano = develop(cyclic(7), (1, 2, 4))
    other = develop(cyclic(7), (1, 2, 3))
    assert dedupe([other, fano, other]) == [(0, [0, 2]), (1, [1])]


def test_screen_never_rejects_isomorphic(rng):
    for _ in range(30):
        D = _random_design(rng, 9, 3, 12)
        assert invariant_screen(D, _shuffle(D, rng)) is None


def test_oracle_agreement(rng):
    """are_isomorphic matches exhaustive backtracking on small designs."""
    agree_iso = agree_non = 0
    for trial in range(150):
        v = int(rng.integers(5, 11))
        k = int(rng.integers(2, 4))
        b = int(rng.integers(2, 31))
        b = min(b, len(list(itertools.combinations(range(v), k))))
        D1 = _random_design(rng, v, k, b)
        if trial % 2:
            D2 = _shuffle(D1, rng)
            # perturb half of the isomorphic pairs by swapping one block
            if trial % 4 == 1:
                blocks = set(D2.blocks)
                spare = [c for c in itertools.combinations(range(1, v + 1), k) if c not in blocks]
                if spare:
                    blocks.discard(sorted(blocks)[int(rng.integers(len(blocks)))])
                    blocks.add(spare[int(rng.integers(len(spare)))])
                    D2 = Design(v, sorted(blocks))
        else:
            D2 = _random_design(rng, v, k, b)
        got = are_isomorphic(D1, D2)
        oracle = brute_force_isomorphism(D1, D2)
        assert (got is None) == (oracle is None)
        if got is not None:
            _check_bijection(D1, D2, got)
            agree_iso += 1
        else:
            agree_non += 1
    assert agree_iso > 20 and agree_non > 20


def test_regular_structures_agree(rng):
    """Highly symmetric inputs stress pruning; compare against the oracle."""
    cases = [develop(cyclic(9), (1, 2, 4)), develop(cyclic(9), (1, 2, 5)),
             develop(wreath_imprimitive(symmetric(2), 4), (1, 3, 5)),
             develop(wreath_imprimitive(cyclic(3), 3), (1, 4, 7))]
    for D1, D2 in itertools.product(cases, repeat=2):
        E2 = _shuffle(D2, rng)
        assert (are_isomorphic(D1, E2) is None) == (brute_force_isomorphism(D1, E2) is None)


def test_automorphisms_are_automorphisms():
    form = canonical_form(PLANE_A)
    blocks = set(PLANE_A.blocks)
    assert form.automorphisms
    for g in form.automorphisms:
        assert {tuple(sorted(int(g[x - 1]) + 1 for x in blk)) for blk in blocks} == blocks


def test_node_cap():
    with pytest.raises(BudgetExceeded):
        canonical_form(PLANE_A, node_cap=1)
