import json
import random
from math import factorial

import pytest

from gl2lab import scan as scan_mod
from gl2lab.groups import BudgetExceeded, closure, conjugate_subgroup, gamma, gl2_space, join, scalar_subgroups
from gl2lab.mat2 import Mat2
from gl2lab.scan import (
    ABELIAN,
    CYCLOTOMIC,
    ORD_TAME,
    ORD_WILD,
    REDUCTIONS,
    SS_WILD,
    InertiaConstraint,
    ScanParams,
    divisibility_oracle,
    evaluate_class,
    expected_required_order,
    replay_violation,
    run_scan,
    scan_abelian,
    scan_cyclotomic,
)


def strip(doc):
    doc = dict(doc)
    doc.pop("elapsed_ms")
    return doc


# -- arithmetic ------------------------------------------------------------------------


def test_divisibility_oracle_thresholds():
    assert divisibility_oracle(13, 6, 1, "b") is True
    assert divisibility_oracle(17, 6, 1, "b") is False
    assert divisibility_oracle(5, 6, 1, "d") is True
    assert divisibility_oracle(7, 6, 1, "d") is False
    with pytest.raises(ValueError):
        divisibility_oracle(5, 1, 1, "z")


def test_oracle_case_b_allows_only_small_primes():
    primes = [p for p in range(3, 200) if all(p % q for q in range(2, p))]
    allowed = {p for p in primes if any(divisibility_oracle(p, e, 1, "b") for e in (1, 2, 3, 4, 6))}
    assert max(allowed) == 13
    allowed_d = {p for p in primes if any(divisibility_oracle(p, e, 1, "d") for e in (1, 2, 3, 4, 6))}
    assert max(allowed_d) == 5


@pytest.mark.parametrize("p", [5, 7, 11, 13, 17, 19])
def test_required_subgroup_orders(p):
    for d in (1, 2):
        for e0 in range(1, d + 1):
            for e in (1, 2, 3, 4, 6):
                for red in REDUCTIONS:
                    if red == SS_WILD and d > 1:
                        continue
                    c = InertiaConstraint(e, e0, d, red)
                    R = c.required(p)
                    assert R.order == expected_required_order(p, c)
                    if red in (ORD_WILD, SS_WILD):
                        assert gamma(p) in R


def test_constraint_validation_and_labels():
    c = InertiaConstraint(4, 2, 3, ORD_TAME)
    assert c.label == "OrdinaryOrMultTame(e=4,e0=2)" and c.exponent == 8
    assert InertiaConstraint(1, 1, 1, SS_WILD).exponent == 720
    with pytest.raises(ValueError):
        InertiaConstraint(5, 1, 1, ORD_TAME)
    with pytest.raises(ValueError):
        InertiaConstraint(1, 3, 2, ORD_TAME)
    with pytest.raises(ValueError):
        InertiaConstraint(1, 1, 1, "Potentially")


def test_params_thresholds():
    assert not ScanParams(13).asserted and ScanParams(17).asserted
    assert ScanParams(17, d=2, ramified=True).threshold == 25
    assert not ScanParams(23, d=2, ramified=True).asserted
    assert not ScanParams(13, mode=ABELIAN).asserted
    assert ScanParams(17, mode=ABELIAN).asserted
    assert ScanParams(19, mode=ABELIAN, ramified=True).threshold == factorial(6) + 1
    assert list(ScanParams(7, d=3, ramified=True).e0_range) == [1, 2, 3]
    assert list(ScanParams(7, d=3).e0_range) == [1]
    for bad in (dict(p=9), dict(p=2), dict(p=7, d=0), dict(p=7, mode="galois")):
        with pytest.raises(ValueError):
            ScanParams(**bad)


# -- scans -------------------------------------------------------------------------------


def test_cyclotomic_scan_below_threshold_is_descriptive():
    rep = scan_cyclotomic(ScanParams(5))
    doc = rep.to_json()
    assert doc["asserted"] is False and rep.exit_code == 0
    assert doc["totals"] == {"classes": 15, "admissible": 2, "violations": 0}
    assert doc["threshold"] == 13
    assert {"params", "classes", "violations", "totals", "elapsed_ms"} <= set(doc)
    row = doc["classes"][0]
    assert {"key", "order", "constraints_met", "labels", "conclusion_ok"} <= set(row)
    assert doc["params"] == {"p": 5, "d": 1, "ramified": False, "mode": CYCLOTOMIC}
    json.dumps(doc)


def test_cyclotomic_rows_have_trivial_sl2_part():
    rep = scan_cyclotomic(ScanParams(11))
    for row in rep.classes:
        if not row["excluded_by"]:
            assert row["det_image_order"] == row["order"]
        if row["admissible"]:
            assert all(m.startswith(ORD_TAME) for m in row["constraints_met"])


def test_abelian_scan_below_threshold():
    rep = scan_abelian(ScanParams(13, mode=ABELIAN))
    assert not rep.asserted and rep.exit_code == 0
    assert rep.totals["classes"] == 75
    for row in rep.classes:
        if row["p_divides_order"]:
            assert "det_image_in_squares" in row["excluded_by"]


def test_gamma_shapes_excluded_by_squares():
    p = 7
    params = ScanParams(p, mode=ABELIAN)
    for Z in scalar_subgroups(p):
        row = evaluate_class(join(Z, [gamma(p)]), params)
        assert row["excluded_by"] == ["det_not_surjective", "det_image_in_squares"]
        assert not row["admissible"]


def test_ramified_scans_are_descriptive():
    rep = scan_cyclotomic(ScanParams(7, d=2, ramified=True))
    assert not rep.asserted
    labels = set(rep.constraint_summary)
    assert "OrdinaryOrMultTame(e=6,e0=2)" in labels
    doc = rep.to_json()
    assert [(r["e"], r["e0"]) for r in doc["oracle"]][:6] == [(1, 1), (2, 1), (3, 1), (4, 1), (6, 1), (1, 2)]
    rab = scan_abelian(ScanParams(5, d=1, ramified=True, mode=ABELIAN))
    assert not rab.asserted and rab.to_json()["threshold"] == 721


def test_mode_and_budget_errors():
    with pytest.raises(ValueError):
        scan_cyclotomic(ScanParams(7, mode=ABELIAN))
    with pytest.raises(ValueError):
        scan_abelian(ScanParams(7))
    with pytest.raises(BudgetExceeded):
        run_scan(ScanParams(53))
    with pytest.raises(BudgetExceeded):
        run_scan(ScanParams(23, mode=ABELIAN))
    # budgets can be tightened as well as loosened
    with pytest.raises(BudgetExceeded):
        run_scan(ScanParams(11, mode=ABELIAN, max_p=7))
    with pytest.raises(BudgetExceeded):
        run_scan(ScanParams(11, max_p=7))


# -- determinism and invariance ---------------------------------------------------------


@pytest.mark.parametrize("mode", [CYCLOTOMIC, ABELIAN])
def test_reports_are_deterministic(mode):
    a = run_scan(ScanParams(7, mode=mode)).to_json()
    b = run_scan(ScanParams(7, mode=mode)).to_json()
    assert json.dumps(strip(a), sort_keys=True) == json.dumps(strip(b), sort_keys=True)


@pytest.mark.parametrize("mode", [CYCLOTOMIC, ABELIAN])
def test_worker_count_does_not_change_results(mode):
    one = run_scan(ScanParams(11, mode=mode, workers=1)).to_json()
    two = run_scan(ScanParams(11, mode=mode, workers=2)).to_json()
    three = run_scan(ScanParams(11, mode=mode, workers=3)).to_json()
    assert strip(one) == strip(two) == strip(three)


@pytest.mark.parametrize("mode", [CYCLOTOMIC, ABELIAN])
def test_conclusion_predicate_is_conjugation_invariant(mode):
    p = 7
    params = ScanParams(p, mode=mode)
    rng = random.Random(7)
    codes = gl2_space(p).codes.tolist()
    groups = scan_mod.enumerate_cyclic_subgroups(p) if mode == CYCLOTOMIC else scan_mod.enumerate_abelian_subgroups(p)
    for G in groups:
        m = Mat2.from_code(rng.choice(codes), p)
        H = conjugate_subgroup(m, G)
        a, b = evaluate_class(G, params), evaluate_class(H, params)
        for field in ("excluded_by", "constraints_met", "admissible", "conclusion_ok", "order", "det_image_order"):
            assert a[field] == b[field], field
        assert {x["tag"] for x in a["labels"]} == {x["tag"] for x in b["labels"]}


# -- violations are replayable -------------------------------------------------------------


def test_violations_replay(monkeypatch):
    params = ScanParams(17)
    monkeypatch.setattr(scan_mod, "conclusion_holds", lambda G, mode, met=None: G.order % 2 == 1)
    rep = scan_cyclotomic(params)
    assert rep.violations and rep.exit_code == 1
    for v in rep.violations:
        assert replay_violation(v, params)
    monkeypatch.undo()
    assert not any(replay_violation(v, params) for v in rep.violations)


def test_replay_rebuilds_group_from_key():
    params = ScanParams(7)
    G = closure(7, [Mat2.diag(7, 3, 1)])
    entry = {"key": G.key}
    assert replay_violation(entry, params) is False
