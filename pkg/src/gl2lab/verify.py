"""Exhaustive checks of the group-theoretic lemmas at concrete moduli.

Each ``verify_*`` function returns a :class:`Report`; ``passed`` is False
as soon as one counterexample is found, and the first few counterexamples
are kept for inspection.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from .classify import classify, check_witnesses
from .groups import (
    BudgetExceeded,
    Subgroup,
    closure,
    conjugate_contains,
    flip_subgroup,
    from_elements,
    gamma,
    gl2_space,
    intersect,
    join,
    standard,
    subgroups_of_cs,
    enumerate_abelian_subgroups,
)
from .lattice import Lattice
from .mat2 import Mat2, batch_decode, batch_det, batch_mul, gl2_order, is_prime, mul
from .scan import divisibility_oracle

MAX_FAILURES_KEPT = 20
FULL_LATTICE_MAX_P = 7
SUBLATTICE_MAX_P = 13
CONTAINMENT_MAX_P = 23
GROUP_SIDE_MAX_ORDER = 25_000


@dataclass
class Report:
    name: str
    params: dict
    checked: int = 0
    failures: list[dict] = field(default_factory=list)
    failure_count: int = 0
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failure_count == 0

    def fail(self, **info):
        self.failure_count += 1
        if len(self.failures) < MAX_FAILURES_KEPT:
            self.failures.append(info)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "params": self.params,
            "passed": self.passed,
            "checked": self.checked,
            "failure_count": self.failure_count,
            "failures": self.failures,
            "details": self.details,
        }


def _odd_prime(p: int):
    if not (is_prime(p) and p >= 3):
        raise ValueError(f"p must be an odd prime, got {p}")


def _scalars(G: Subgroup) -> Subgroup:
    a, b, c, d = batch_decode(G.codes, G.n)
    return from_elements(G.n, G.codes[(b == 0) & (c == 0) & (a == d)])


# -- index-two lemma -------------------------------------------------------------


def verify_index2_lemma(N: Subgroup, C: Subgroup, name: str = "") -> Report:
    """For every G <= N not inside C and every x in G \\ C:
    G = <x, G n C>, <x> n C = <x^2>, 2 | ord(x), [G : G n C] = 2."""
    if N.order != 2 * C.order or not C.is_subgroup_of(N):
        raise ValueError("C must be a subgroup of index two in N")
    rep = Report("lemma33", {"p": N.n, "pair": name or "custom"})
    skipped = 0
    for G in Lattice(N).all_subgroups():
        if G.is_subgroup_of(C):
            skipped += 1
            continue
        GC = intersect(G, C)
        if G.order != 2 * GC.order:
            rep.fail(key=G.digest, claim="index", order=G.order, inter=GC.order)
        outside = G.codes[~C.contains_codes(G.codes)]
        for code in outside.tolist():
            x = Mat2.from_code(code, G.n)
            rep.checked += 1
            if join(GC, [x]) != G:
                rep.fail(key=G.digest, x=x.encode(), claim="G = <x, G n C>")
            cyc = closure(G.n, [x])
            lhs = cyc.codes[C.contains_codes(cyc.codes)]
            rhs = closure(G.n, [mul(x, x)]).codes
            if not np.array_equal(lhs, rhs):
                rep.fail(key=G.digest, x=x.encode(), claim="<x> n C = <x^2>")
            if cyc.order % 2:
                rep.fail(key=G.digest, x=x.encode(), claim="2 | ord(x)")
    rep.details = {"subgroups_skipped_inside_C": skipped, "pairs_checked": rep.checked}
    return rep


def verify_lemma33(p: int, pair: str) -> Report:
    _odd_prime(p)
    if pair == "ns":
        return verify_index2_lemma(standard("Ns", p), standard("Cs", p), "ns")
    if pair == "nns":
        return verify_index2_lemma(standard("Nns", p), standard("Cns", p), "nns")
    raise ValueError(f"pair must be 'ns' or 'nns', got {pair!r}")


# -- semi-Cartan / nonsplit-Cartan lemma --------------------------------------------


class _ContainmentMemo:
    """conjugate_contains memoised on the element sets involved."""

    def __init__(self):
        self._memo = {}

    def __call__(self, G: Subgroup, H: Subgroup):
        key = (G.codes.tobytes(), H.codes.tobytes())
        if key not in self._memo:
            self._memo[key] = conjugate_contains(G, H)
        return self._memo[key]


def _antidiagonal_conjugate_exists(h: Mat2) -> bool:
    space = gl2_space(h.n)
    imgs = batch_mul(batch_mul(space.codes, np.int64(h.code), h.n), space.inv_codes, h.n)
    a, _, _, d = batch_decode(imgs, h.n)
    return bool(np.any((a == 0) & (d == 0)))


def _compare_sets(rep: Report, label: str, search: set[int], oracle: set[int]):
    diff = sorted(search ^ oracle)
    rep.details[label] = {
        "search": sorted(search),
        "oracle": sorted(oracle),
        "discrepancies": diff,
    }
    for k in diff:
        rep.fail(claim=label, k=k, in_search=k in search, in_oracle=k in oracle)


def verify_lemma34(p: int, part: str, ks: range | None = None, max_p: int = CONTAINMENT_MAX_P) -> Report:
    """Brute-force conjugator search for each k, compared with the divisibility arithmetic.

    part a: D^k inside <gamma, Z> up to conjugacy  <=>  p-1 | k
    part b: for k with p-1 not dividing k:
            (i) every G <= Cs absorbing a conjugate of D^k contains D^k or its flip;
            (ii) some conjugate of the generator of D^k is antidiagonal  <=>  p-1 | 2k
    part c: D^k inside Cns  <=>  p-1 | k;  D^k inside Nns  <=>  p-1 | 2k
    part d: Cns^k inside <gamma, Z>  <=>  p+1 | gcd(k, p^2-1)
    """
    _odd_prime(p)
    if p > max_p:
        raise BudgetExceeded(f"conjugator search capped at p <= {max_p}, got {p}")
    if part not in ("a", "b", "c", "d"):
        raise ValueError(f"part must be one of a, b, c, d; got {part!r}")
    ks = ks if ks is not None else range(1, p * p)
    rep = Report("lemma34", {"p": p, "part": part, "k_min": ks.start, "k_max": ks.stop - 1})
    cc = _ContainmentMemo()
    if part == "a":
        gz = standard("GammaZ", p)
        search = {k for k in ks if cc(gz, standard("D", p, k)) is not None}
        oracle = {k for k in ks if divisibility_oracle(p, k, 1, "a")}
        rep.checked = len(ks)
        _compare_sets(rep, "a", search, oracle)
    elif part == "b":
        regime = [k for k in ks if k % (p - 1)]
        cs_subs = subgroups_of_cs(p)
        for k in regime:
            H = standard("D", p, k)
            Hf = flip_subgroup(H)
            for G in cs_subs:
                if cc(G, H) is None:
                    continue
                rep.checked += 1
                if not (H.is_subgroup_of(G) or Hf.is_subgroup_of(G)):
                    rep.fail(claim="b.i", k=k, G=G.digest)
        search = {k for k in regime if _antidiagonal_conjugate_exists(standard("D", p, k).generators[0])}
        oracle = {k for k in regime if divisibility_oracle(p, k, 1, "b")}
        rep.checked += len(regime)
        _compare_sets(rep, "b.ii", search, oracle)
        rep.details["b.i_subgroups_of_Cs"] = len(cs_subs)
    elif part == "c":
        cns, nns = standard("Cns", p), standard("Nns", p)
        search_cns = {k for k in ks if cc(cns, standard("D", p, k)) is not None}
        search_nns = {k for k in ks if cc(nns, standard("D", p, k)) is not None}
        rep.checked = 2 * len(ks)
        _compare_sets(rep, "c.Cns", search_cns, {k for k in ks if divisibility_oracle(p, k, 1, "a")})
        _compare_sets(rep, "c.Nns", search_nns, {k for k in ks if divisibility_oracle(p, k, 1, "c")})
    else:
        gz = standard("GammaZ", p)
        search = {k for k in ks if cc(gz, standard("Cns", p, k)) is not None}
        oracle = {k for k in ks if divisibility_oracle(p, k, 1, "d")}
        rep.checked = len(ks)
        _compare_sets(rep, "d", search, oracle)
    return rep


# -- abelian-subgroup proposition ------------------------------------------------


def _check_gamma_form(rep: Report, G: Subgroup):
    """p | |G| for abelian G <= B0 forces G = <gamma, G n Z>."""
    p = G.n
    target = join(_scalars(G), [gamma(p)])
    if target != G:
        rep.fail(claim="b: G = <gamma, G n Z>", key=G.digest, order=G.order)


def verify_prop32(p: int, parts: str = "abc", max_p: int = SUBLATTICE_MAX_P) -> Report:
    _odd_prime(p)
    if p > max_p:
        raise BudgetExceeded(f"B0/Ns/Nns lattices capped at p <= {max_p}, got {p}")
    rep = Report("prop32", {"p": p, "parts": parts})
    cs = standard("Cs", p)
    if "a" in parts:
        if p > FULL_LATTICE_MAX_P:
            raise BudgetExceeded(f"part a needs the full GL2 lattice; capped at p <= {FULL_LATTICE_MAX_P}")
        targets = [standard(t, p) for t in ("B0", "Ns", "Nns")]
        abelian = Lattice(standard("GL2", p)).all_subgroups(abelian_only=True)
        for G in abelian:
            rep.checked += 1
            if all(conjugate_contains(T, G) is None for T in targets):
                rep.fail(claim="a", key=G.digest, order=G.order)
        rep.details["a_abelian_subgroups"] = len(abelian)
    if "b" in parts:
        b0 = standard("B0", p)
        subs = Lattice(b0).all_subgroups(abelian_only=p > FULL_LATTICE_MAX_P)
        hyp = 0
        for G in subs:
            rep.checked += 1
            diag = conjugate_contains(cs, G) is not None
            if diag != (G.order % p != 0):
                rep.fail(claim="b: diagonalizable iff p does not divide |G|", key=G.digest, order=G.order)
            if G.is_abelian and G.order % p == 0:
                hyp += 1
                _check_gamma_form(rep, G)
        rep.details["b_subgroups_of_B0"] = len(subs)
        rep.details["b_abelian_with_p_dividing_order"] = hyp
    if "c" in parts:
        for ntag, ctag in (("Ns", "Cs"), ("Nns", "Cns")):
            C = standard(ctag, p)
            count = 0
            for G in Lattice(standard(ntag, p)).all_subgroups(abelian_only=True):
                if G.is_subgroup_of(C):
                    continue
                count += 1
                Z = _scalars(G)
                for code in G.codes[~C.contains_codes(G.codes)].tolist():
                    rep.checked += 1
                    x = Mat2.from_code(code, p)
                    if join(Z, [x]) != G:
                        rep.fail(claim=f"c: G = <x, G n Z> in {ntag}", key=G.digest, x=x.encode())
            rep.details[f"c_{ntag}_abelian_outside_{ctag}"] = count
    return rep


def guided_enumeration_agrees(p: int) -> Report:
    """The shape-guided abelian class list equals the lattice-derived one."""
    _odd_prime(p)
    if p > FULL_LATTICE_MAX_P:
        raise BudgetExceeded(f"needs the full GL2 lattice; capped at p <= {FULL_LATTICE_MAX_P}")
    rep = Report("prop32_guided_agreement", {"p": p})
    classes = Lattice(standard("GL2", p)).class_subgroups(abelian_only=True)
    where = {}
    for i, members in enumerate(classes):
        for s in members:
            where[s.codes.tobytes()] = i
    guided = enumerate_abelian_subgroups(p)
    hit = [where.get(G.codes.tobytes()) for G in guided]
    rep.checked = len(guided)
    if None in hit:
        rep.fail(claim="guided class missing from lattice")
    if sorted(h for h in hit if h is not None) != list(range(len(classes))):
        rep.fail(claim="class lists differ", guided=len(guided), lattice=len(classes))
    rep.details = {"lattice_classes": len(classes), "guided_classes": len(guided)}
    return rep


# -- cyclotomic criterion, group side -----------------------------------------------


def _group_side_subgroups(n: int, samples: int, seed: int) -> list[Subgroup]:
    if gl2_order(n) <= 2100:
        return Lattice(standard("GL2", n)).all_subgroups()
    space = gl2_space(n)
    rng = random.Random(seed)
    found = {}
    seen = np.zeros(n**4, dtype=bool)
    for code in space.codes.tolist():
        if seen[code]:
            continue
        C = closure(n, [Mat2.from_code(code, n)])
        seen[C.codes[C.element_orders() == C.order]] = True
        found[C.codes.tobytes()] = C
    codes = space.codes.tolist()
    for _ in range(samples):
        x, y = rng.sample(codes, 2)
        G = closure(n, [Mat2.from_code(x, n), Mat2.from_code(y, n)])
        found.setdefault(G.codes.tobytes(), G)
    return list(found.values())


def verify_prop31_group_side(n: int, samples: int = 200, seed: int = 0) -> Report:
    """G n SL2(n) is the kernel of det on G; if trivial, G is abelian and det is injective."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if gl2_order(n) > GROUP_SIDE_MAX_ORDER:
        raise BudgetExceeded(f"|GL2({n})| = {gl2_order(n)} is beyond the enumeration budget")
    rep = Report("prop31", {"n": n})
    sl2 = standard("SL2", n)
    trivial_count = 0
    for G in _group_side_subgroups(n, samples, seed):
        rep.checked += 1
        kernel = G.codes[batch_det(G.codes, n) == 1]
        if not np.array_equal(intersect(G, sl2).codes, kernel):
            rep.fail(claim="G n SL2 = ker det", key=G.digest)
        if kernel.size == 1:
            trivial_count += 1
            if not G.is_abelian or len(G.det_image()) != G.order:
                rep.fail(claim="trivial G n SL2 => abelian, det injective", key=G.digest)
    rep.details = {"subgroups": rep.checked, "with_trivial_sl2_part": trivial_count}
    return rep


# -- Dickson totality ----------------------------------------------------------------


def verify_dickson(p: int) -> Report:
    """Every subgroup of GL2(p) gets at least one label, and every witness checks out."""
    _odd_prime(p)
    if p > FULL_LATTICE_MAX_P:
        raise BudgetExceeded(f"full GL2 lattice capped at p <= {FULL_LATTICE_MAX_P}")
    rep = Report("dickson", {"p": p})
    counts: dict[str, int] = {}
    subs = Lattice(standard("GL2", p)).all_subgroups()
    for G in subs:
        rep.checked += 1
        res = classify(G)
        if not res.labels:
            rep.fail(claim="unlabelled", key=G.digest, order=G.order)
        if not check_witnesses(G, res):
            rep.fail(claim="bad witness", key=G.digest)
        for t in res.tags:
            counts[t] = counts.get(t, 0) + 1
    rep.details = {"subgroups": len(subs), "label_counts": dict(sorted(counts.items()))}
    return rep


__all__ = [
    "Report",
    "verify_index2_lemma",
    "verify_lemma33",
    "verify_lemma34",
    "verify_prop32",
    "verify_prop31_group_side",
    "verify_dickson",
    "guided_enumeration_agrees",
]
