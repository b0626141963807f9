import pytest
from hypothesis import given

from gl2lab.classify import (
    A4,
    A5,
    BOREL,
    CONTAINS_SL2,
    NONSPLIT_NORMALIZER,
    S4,
    SPLIT_NORMALIZER,
    check_witnesses,
    classify,
    is_abelian,
    is_diagonalizable,
    projective_quotient_histogram,
)
from gl2lab.groups import (
    closure,
    conjugate_contains,
    conjugate_subgroup,
    gamma,
    gl2_space,
    sl2_intersection,
    standard,
)
from gl2lab.mat2 import Mat2
from conftest import lattice_subgroups
from strategies import prime_and_mats

import oracle

# Label counts over every subgroup of GL2(p), derived by tests/oracle.py.
ORACLE_TAG_COUNTS = {
    5: {BOREL: 273, CONTAINS_SL2: 3, A4: 10, A5: 2, S4: 5, NONSPLIT_NORMALIZER: 213, SPLIT_NORMALIZER: 248},
}


def as_set(G):
    return frozenset((m.a, m.b, m.c, m.d) for m in G.elements)


def test_sl2_labels():
    # PSL2(5) is isomorphic to A5, so SL2(5) is also exceptional
    assert classify(standard("SL2", 5)).tags == {CONTAINS_SL2, A5}
    assert classify(standard("SL2", 7)).tags == {CONTAINS_SL2}
    assert classify(standard("GL2", 11)).tags == {CONTAINS_SL2}


def test_split_cartan_labels_with_identity_witness():
    res = classify(standard("Cs", 5))
    assert {BOREL, SPLIT_NORMALIZER} <= res.tags
    assert res.label(BOREL).witness == Mat2.identity(5)
    assert res.label(SPLIT_NORMALIZER).witness == Mat2.identity(5)


def test_octahedral_subgroups_of_gl2_5():
    # the S4-image subgroups all contain the full scalar group, so they have
    # order 4 * 24 = 96; no subgroup of order 48 has projective image of order 24
    subs = lattice_subgroups("GL2", 5)
    octa = [G for G in subs if S4 in classify(G).tags]
    assert [G.order for G in octa] == [96] * 5
    for G in octa:
        assert projective_quotient_histogram(G) == {1: 1, 2: 9, 3: 8, 4: 6}
        assert standard("Z", 5).is_subgroup_of(G)
    assert all(classify(G).projective_order != 24 for G in subs if G.order == 48)


def test_predicates():
    for p in (3, 5, 7, 11):
        assert is_abelian(standard("Cns", p))
    assert is_diagonalizable(closure(5, [gamma(5)])) is None
    G = closure(5, [Mat2(5, 2, 1, 0, 3)])
    w = is_diagonalizable(G)
    assert w is not None
    assert conjugate_subgroup(w, G).is_subgroup_of(standard("Cs", 5))


def test_projective_histograms():
    for p in (5, 7, 11):
        assert projective_quotient_histogram(standard("Z", p)) == {1: 1}
        assert projective_quotient_histogram(standard("GammaZ", p)) == {1: 1, p: p - 1}
    assert projective_quotient_histogram(standard("Ns", 5)) == {1: 1, 2: 5, 4: 2}


def test_rejects_even_modulus():
    with pytest.raises(ValueError):
        classify(standard("GL2", 4))
    with pytest.raises(ValueError):
        classify(standard("SL2", 2))


def test_json_shape():
    doc = classify(closure(5, [Mat2.diag(5, 2, 1)])).to_json()
    assert set(doc) == {"key", "labels", "projective_order", "is_abelian", "is_diagonalizable", "det_image_order"}
    assert doc["labels"][0] == {"tag": BOREL, "witness": "1,0,0,1"}


def test_labels_match_oracle_at_three():
    for G in lattice_subgroups("GL2", 3):
        assert classify(G).tags == oracle.dickson_tags(as_set(G), 3)


@pytest.mark.parametrize("p", sorted(ORACLE_TAG_COUNTS))
def test_tag_counts_match_oracle(p):
    counts = {}
    for G in lattice_subgroups("GL2", p):
        for t in classify(G).tags:
            counts[t] = counts.get(t, 0) + 1
    assert counts == ORACLE_TAG_COUNTS[p]


@pytest.mark.parametrize("p", [3, 5, 7])
def test_totality_and_witnesses(p):
    for G in lattice_subgroups("GL2", p):
        res = classify(G)
        assert res.labels
        assert check_witnesses(G, res)
        # det image times the SL2 part recovers the order
        assert res.det_image_order * sl2_intersection(G).order == G.order
        for tag in (A4, S4, A5):
            if tag in res.tags:
                assert res.projective_order == {A4: 12, S4: 24, A5: 60}[tag]


@pytest.mark.parametrize("p", [3, 5, 7])
def test_abelian_subgroups_sit_in_borel_or_normalizer(p):
    for G in lattice_subgroups("GL2", p, abelian_only=True):
        assert classify(G).tags & {BOREL, SPLIT_NORMALIZER, NONSPLIT_NORMALIZER}


@pytest.mark.parametrize("p", [3, 5, 7])
def test_diagonalizable_iff_order_prime_to_p(p):
    b0 = standard("B0", p)
    for G in lattice_subgroups("GL2", p, abelian_only=True):
        if conjugate_contains(b0, G) is None:
            continue
        assert (is_diagonalizable(G) is not None) == (G.order % p != 0)


def test_labels_conjugation_invariant_exhaustive_at_three():
    conjugators = [Mat2.from_code(c, 3) for c in gl2_space(3).codes.tolist()]
    for G in lattice_subgroups("GL2", 3):
        tags = classify(G).tags
        for m in conjugators:
            assert classify(conjugate_subgroup(m, G)).tags == tags


@given(prime_and_mats(count=3, primes=(5, 7, 11, 13)))
def test_labels_conjugation_invariant_random(args):
    p, m, x, y = args
    G = closure(p, [x, y])
    H = conjugate_subgroup(m, G)
    a, b = classify(G), classify(H)
    assert a.tags == b.tags
    assert (a.projective_order, a.is_abelian, a.is_diagonalizable, a.det_image_order) == (
        b.projective_order,
        b.is_abelian,
        b.is_diagonalizable,
        b.det_image_order,
    )
    assert check_witnesses(H, b)
