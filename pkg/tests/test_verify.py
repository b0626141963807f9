import pytest

from gl2lab import verify
from gl2lab.groups import BudgetExceeded, closure, gamma, join, scalar_subgroups, standard
from gl2lab.verify import (
    guided_enumeration_agrees,
    verify_dickson,
    verify_index2_lemma,
    verify_lemma33,
    verify_lemma34,
    verify_prop31_group_side,
    verify_prop32,
)
from conftest import lattice_subgroups

import oracle


def as_set(G):
    return frozenset((m.a, m.b, m.c, m.d) for m in G.elements)


# -- index-two lemma ------------------------------------------------------------------


@pytest.mark.parametrize("pair", ["ns", "nns"])
def test_index_two_lemma_at_five(pair):
    rep = verify_lemma33(5, pair)
    assert rep.passed and rep.failure_count == 0
    assert rep.checked > 0
    # subgroups inside C have no x outside C and are skipped
    assert rep.details["subgroups_skipped_inside_C"] > 0


def test_index_two_lemma_rejects_bad_pairs():
    with pytest.raises(ValueError):
        verify_index2_lemma(standard("Ns", 5), standard("D", 5))
    with pytest.raises(ValueError):
        verify_index2_lemma(standard("Ns", 5), standard("Cns", 5))
    with pytest.raises(ValueError):
        verify_lemma33(5, "borel")


def test_index_two_lemma_on_other_pairs():
    rep = verify_index2_lemma(standard("GL2", 3), standard("SL2", 3))
    outside = [H for H in oracle.all_subgroups(3) if any(oracle.det(h, 3) != 1 for h in H)]
    assert rep.passed
    # one check per (G, x) with x in G outside SL2, and exactly half of such G lies outside
    assert rep.checked == sum(len(H) // 2 for H in outside)


# -- containment lemma ---------------------------------------------------------------


def test_containment_part_a_at_five():
    rep = verify_lemma34(5, "a")
    assert rep.passed
    assert rep.details["a"]["search"] == [4, 8, 12, 16, 20, 24]


def test_containment_specific_cases():
    c = verify_lemma34(7, "c")
    assert 2 not in c.details["c.Nns"]["search"]
    d = verify_lemma34(7, "d")
    assert 8 in d.details["d"]["search"]
    assert standard("Cns", 7, 8) == standard("Z", 7)


def test_containment_search_sets_match_naive_search():
    p = 5
    G = oracle.group(p)
    std = oracle.named(p)
    gz = as_set(standard("GammaZ", p))
    ks = range(1, p * p)
    a = {k for k in ks if oracle.conjugates_into(as_set(standard("D", p, k)), gz, p, G)}
    cns = {k for k in ks if oracle.conjugates_into(as_set(standard("D", p, k)), std["Cns"], p, G)}
    nns = {k for k in ks if oracle.conjugates_into(as_set(standard("D", p, k)), std["Nns"], p, G)}
    d = {k for k in ks if oracle.conjugates_into(as_set(standard("Cns", p, k)), gz, p, G)}
    assert verify_lemma34(p, "a").details["a"]["search"] == sorted(a)
    c_rep = verify_lemma34(p, "c").details
    assert c_rep["c.Cns"]["search"] == sorted(cns)
    assert c_rep["c.Nns"]["search"] == sorted(nns)
    assert verify_lemma34(p, "d").details["d"]["search"] == sorted(d)


@pytest.mark.parametrize("p", [5, 7])
def test_containment_part_b(p):
    rep = verify_lemma34(p, "b")
    assert rep.passed
    regime = [k for k in range(1, p * p) if k % (p - 1)]
    assert rep.details["b.ii"]["search"] == [k for k in regime if 2 * k % (p - 1) == 0]


def test_verifier_reports_discrepancies(monkeypatch):
    monkeypatch.setattr(verify, "divisibility_oracle", lambda p, e, e0, case: True)
    rep = verify_lemma34(5, "a")
    assert not rep.passed
    assert rep.failure_count == 24 - 6
    assert rep.exit_code == 1
    assert rep.to_json()["failures"][0]["in_oracle"] is True


def test_containment_errors():
    with pytest.raises(ValueError):
        verify_lemma34(5, "e")
    with pytest.raises(ValueError):
        verify_lemma34(9, "a")
    with pytest.raises(BudgetExceeded):
        verify_lemma34(29, "a")


# -- abelian-subgroup proposition --------------------------------------------------


def test_abelian_shapes_all_parts_at_three():
    rep = verify_prop32(3)
    assert rep.passed and rep.checked > 0


def test_abelian_shapes_part_b_at_five():
    rep = verify_prop32(5, "b")
    assert rep.passed
    shapes = {join(Z, [gamma(5)]) for Z in scalar_subgroups(5)}
    found = {G for G in lattice_subgroups("B0", 5) if G.is_abelian and G.order % 5 == 0}
    assert found == shapes
    assert rep.details["b_abelian_with_p_dividing_order"] == len(shapes) == 3


def test_split_cartan_has_no_unipotent_shape():
    cs = standard("Cs", 7)
    assert cs.is_abelian and cs.order % 7
    # Cs is diagonal, so the unipotent case does not apply
    assert cs not in {join(Z, [gamma(7)]) for Z in scalar_subgroups(7)}


def test_abelian_shapes_budgets():
    with pytest.raises(BudgetExceeded):
        verify_prop32(11, "a")
    with pytest.raises(BudgetExceeded):
        verify_prop32(17, "b")
    assert verify_prop32(11, "c").passed


@pytest.mark.parametrize("p", [3, 5])
def test_guided_enumeration_agrees(p):
    rep = guided_enumeration_agrees(p)
    assert rep.passed
    assert rep.details["lattice_classes"] == rep.details["guided_classes"]


# -- cyclotomic criterion, group side -------------------------------------------------


def test_trivial_sl2_part_examples():
    from gl2lab.groups import sl2_intersection

    for p in (5, 7):
        D = standard("D", p)
        assert sl2_intersection(D).order == 1 and D.is_abelian and len(D.det_image()) == D.order
        S = standard("SL2", p)
        assert sl2_intersection(S) == S and S.det_image() == (1,)
    G = closure(6, [gamma(6)])
    assert sl2_intersection(G) == G


@pytest.mark.parametrize("n", [3, 4, 6])
def test_trivial_sl2_part_group_side(n):
    rep = verify_prop31_group_side(n)
    assert rep.passed
    assert rep.details["with_trivial_sl2_part"] > 0


def test_trivial_sl2_part_sampled_path():
    rep = verify_prop31_group_side(10, samples=30)
    assert rep.passed and rep.checked > 30


def test_trivial_sl2_part_budget():
    with pytest.raises(BudgetExceeded):
        verify_prop31_group_side(21)
    with pytest.raises(ValueError):
        verify_prop31_group_side(1)


# -- totality --------------------------------------------------------------------------


def test_dickson_totality_at_three():
    rep = verify_dickson(3)
    assert rep.passed and rep.details["subgroups"] == 55


def test_dickson_budget():
    with pytest.raises(BudgetExceeded):
        verify_dickson(11)


def test_report_json_roundtrip():
    import json

    doc = verify_lemma33(5, "ns").to_json()
    assert json.loads(json.dumps(doc)) == doc
    assert set(doc) == {"name", "params", "passed", "checked", "failure_count", "failures", "details"}
