"""Inertia constraints and exhaustive scans over cyclotomic/abelian image shapes.

A scan fixes (p, d, ramified) and walks every candidate subgroup class,
recording which inertia constraints it can absorb up to conjugacy and
whether it satisfies the conclusion predicate for the mode.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import factorial, gcd

from .classify import classify
from .groups import (
    ABELIAN_MAX_P,
    CYCLIC_MAX_P,
    Subgroup,
    closure,
    conjugate_contains,
    enumerate_abelian_subgroups,
    enumerate_cyclic_subgroups,
    gamma,
    sl2_intersection,
    standard,
)
from .mat2 import Mat2, is_prime

log = logging.getLogger(__name__)

SEMISTABILITY_INDICES = (1, 2, 3, 4, 6)

ORD_TAME = "OrdinaryOrMultTame"
ORD_WILD = "OrdinaryOrMultWild"
SS_TAME = "SupersingularTame"
SS_WILD = "SupersingularWild"
REDUCTIONS = (ORD_TAME, ORD_WILD, SS_TAME, SS_WILD)

CYCLOTOMIC = "cyclotomic"
ABELIAN = "abelian"


@dataclass(frozen=True)
class InertiaConstraint:
    """A subgroup that must sit inside the mod-p image up to conjugacy.

    OrdinaryOrMultTame needs D^(e*e0), OrdinaryOrMultWild needs
    <D^(e*e0), gamma>, SupersingularTame needs Cns^(e*e0), and
    SupersingularWild needs <gamma, D^((6d)!)>.
    """

    e: int
    e0: int
    d: int
    reduction: str

    def __post_init__(self):
        if self.e not in SEMISTABILITY_INDICES:
            raise ValueError(f"e must be one of {SEMISTABILITY_INDICES}, got {self.e}")
        if not 1 <= self.e0 <= self.d:
            raise ValueError(f"need 1 <= e0 <= d, got e0={self.e0}, d={self.d}")
        if self.reduction not in REDUCTIONS:
            raise ValueError(f"unknown reduction type {self.reduction!r}")

    @property
    def label(self) -> str:
        return f"{self.reduction}(e={self.e},e0={self.e0})"

    @property
    def exponent(self) -> int:
        if self.reduction == SS_WILD:
            return factorial(6 * self.d)
        return self.e * self.e0

    def required(self, p: int) -> Subgroup:
        k = self.exponent
        if self.reduction == SS_TAME:
            return standard("Cns", p, k)
        dk = standard("D", p, k)
        if self.reduction == ORD_TAME:
            return dk
        return closure(p, list(dk.generators) + [gamma(p)])


def expected_required_order(p: int, c: InertiaConstraint) -> int:
    k = c.exponent
    if c.reduction == SS_TAME:
        return (p * p - 1) // gcd(k, p * p - 1)
    dk = (p - 1) // gcd(k, p - 1)
    return dk if c.reduction == ORD_TAME else dk * p


def divisibility_oracle(p: int, e: int, e0: int, case: str) -> bool:
    """Divisibility conditions the semi-Cartan / nonsplit-Cartan lemma imposes on k = e*e0.

    a: p-1 | k        (D^k inside <gamma, Z>, or inside Cns)
    b: p-1 | 2k       (D^k meeting the antidiagonal coset of Ns)
    c: p-1 | 2k       (D^k inside Nns)
    d: p+1 | gcd(k, p^2-1)   (Cns^k inside <gamma, Z>)
    """
    k = e * e0
    if case == "a":
        return k % (p - 1) == 0
    if case in ("b", "c"):
        return (2 * k) % (p - 1) == 0
    if case == "d":
        return gcd(k, p * p - 1) % (p + 1) == 0
    raise ValueError(f"case must be one of a, b, c, d; got {case!r}")


@dataclass
class ScanParams:
    p: int
    d: int = 1
    ramified: bool = False
    mode: str = CYCLOTOMIC
    max_p: int | None = None
    workers: int = 1

    def __post_init__(self):
        if not (is_prime(self.p) and self.p >= 3):
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if self.d < 1:
            raise ValueError("degree d must be >= 1")
        if self.mode not in (CYCLOTOMIC, ABELIAN):
            raise ValueError(f"mode must be {CYCLOTOMIC!r} or {ABELIAN!r}")

    @property
    def e0_range(self) -> range:
        return range(1, self.d + 1) if self.ramified else range(1, 2)

    @property
    def threshold(self) -> int:
        """The conclusion is claimed for p strictly above this value."""
        if self.mode == CYCLOTOMIC:
            return 12 * self.d + 1 if self.ramified else 13
        return factorial(6 * self.d) + 1 if self.ramified else 16

    @property
    def asserted(self) -> bool:
        return self.p > self.threshold

    def to_json(self) -> dict:
        return {"p": self.p, "d": self.d, "ramified": self.ramified, "mode": self.mode}


@dataclass
class ScanReport:
    params: ScanParams
    classes: list[dict]
    violations: list[dict]
    elapsed_ms: int = 0
    constraint_summary: dict[str, int] = field(default_factory=dict)

    @property
    def asserted(self) -> bool:
        return self.params.asserted

    @property
    def totals(self) -> dict:
        return {
            "classes": len(self.classes),
            "admissible": sum(1 for c in self.classes if c["admissible"]),
            "violations": len(self.violations),
        }

    @property
    def exit_code(self) -> int:
        return 1 if self.asserted and self.violations else 0

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json(),
            "asserted": self.asserted,
            "classes": self.classes,
            "violations": self.violations,
            "totals": self.totals,
            "constraint_summary": self.constraint_summary,
            "threshold": self.params.threshold,
            "oracle": oracle_table(self.params),
            "elapsed_ms": self.elapsed_ms,
        }


def oracle_table(params: ScanParams) -> list[dict]:
    """divisibility_oracle outcomes for each (e, e0) the scan considers."""
    return [
        {"e": e, "e0": e0, **{c: divisibility_oracle(params.p, e, e0, c) for c in "abcd"}}
        for e0 in params.e0_range
        for e in SEMISTABILITY_INDICES
    ]


def constraints_for(params: ScanParams) -> list[InertiaConstraint]:
    kinds = (ORD_TAME, SS_TAME) if params.mode == CYCLOTOMIC else REDUCTIONS
    out = []
    for e0 in params.e0_range:
        for e in SEMISTABILITY_INDICES:
            for red in kinds:
                out.append(InertiaConstraint(e, e0, params.d, red))
    return out


def is_square_image(G: Subgroup) -> bool:
    p = G.n
    squares = {x * x % p for x in range(1, p)}
    return set(G.det_image()) <= squares


def conclusion_holds(G: Subgroup, mode: str, met: list[str] | None = None) -> bool:
    """The mode's conclusion predicate.

    cyclotomic: G conjugates into Cs(p) and some D^(e*e0) constraint is met;
    abelian: G conjugates into Cs(p) or Cns(p).
    """
    p = G.n
    in_cs = conjugate_contains(standard("Cs", p), G) is not None
    if mode == CYCLOTOMIC:
        return in_cs and any(m.startswith(ORD_TAME) for m in (met or []))
    return in_cs or conjugate_contains(standard("Cns", p), G) is not None


def evaluate_class(G: Subgroup, params: ScanParams) -> dict:
    p = G.n
    excluded = []
    sl2_trivial = sl2_intersection(G).order == 1
    det_order = len(G.det_image())
    if params.mode == CYCLOTOMIC and not sl2_trivial:
        excluded.append("sl2_intersection_nontrivial")
    if not params.ramified and det_order != p - 1:
        excluded.append("det_not_surjective")
        if is_square_image(G):
            excluded.append("det_image_in_squares")
    met = []
    if not excluded:
        if params.mode == CYCLOTOMIC:
            # trivial G n SL2 makes det injective, so G embeds in the cyclic unit group
            assert G.is_abelian and det_order == G.order, G
        for c in constraints_for(params):
            if conjugate_contains(G, c.required(p)) is not None:
                met.append(c.label)
    result = classify(G)
    ok = conclusion_holds(G, params.mode, met)
    return {
        "key": G.key,
        "digest": G.digest,
        "generators": [g.encode() for g in G.generators],
        "order": G.order,
        "det_image_order": det_order,
        "p_divides_order": G.order % p == 0,
        "excluded_by": excluded,
        "constraints_met": met,
        "admissible": bool(met),
        "labels": [lab.to_json() for lab in result.labels],
        "conclusion_ok": ok,
    }


def _evaluate_chunk(args):
    groups, params = args
    return [evaluate_class(G, params) for G in groups]


def _evaluate_all(groups: list[Subgroup], params: ScanParams) -> list[dict]:
    if params.workers <= 1 or len(groups) < 2:
        rows = [evaluate_class(G, params) for G in groups]
    else:
        w = params.workers
        chunks = [(groups[i::w], params) for i in range(w)]
        with ProcessPoolExecutor(max_workers=w) as pool:
            rows = [r for part in pool.map(_evaluate_chunk, chunks) for r in part]
    rows.sort(key=lambda r: (r["order"], r["key"]))
    return rows


def _finish(params: ScanParams, rows: list[dict], started: float) -> ScanReport:
    violations = [
        {"key": r["key"], "digest": r["digest"], "order": r["order"], "reason": "conclusion_predicate_failed"}
        for r in rows
        if r["admissible"] and not r["conclusion_ok"]
    ]
    summary = {c.label: 0 for c in constraints_for(params)}
    for r in rows:
        for m in r["constraints_met"]:
            summary[m] += 1
    report = ScanReport(params, rows, violations, constraint_summary=summary)
    report.elapsed_ms = int((time.perf_counter() - started) * 1000)
    return report


def scan_cyclotomic(params: ScanParams, cache=None) -> ScanReport:
    if params.mode != CYCLOTOMIC:
        raise ValueError("scan_cyclotomic needs mode='cyclotomic'")
    started = time.perf_counter()
    cap = params.max_p or CYCLIC_MAX_P
    if cache is not None:
        groups = cache.load_or_build("cyclic", params.p, cap, lambda: enumerate_cyclic_subgroups(params.p, cap))
    else:
        groups = enumerate_cyclic_subgroups(params.p, cap)
    log.info("p=%d: %d cyclic classes", params.p, len(groups))
    return _finish(params, _evaluate_all(groups, params), started)


def scan_abelian(params: ScanParams, cache=None) -> ScanReport:
    if params.mode != ABELIAN:
        raise ValueError("scan_abelian needs mode='abelian'")
    started = time.perf_counter()
    cap = params.max_p or ABELIAN_MAX_P
    if cache is not None:
        groups = cache.load_or_build("abelian", params.p, cap, lambda: enumerate_abelian_subgroups(params.p, cap))
    else:
        groups = enumerate_abelian_subgroups(params.p, cap)
    log.info("p=%d: %d abelian classes", params.p, len(groups))
    return _finish(params, _evaluate_all(groups, params), started)


def run_scan(params: ScanParams, cache=None) -> ScanReport:
    if params.mode == CYCLOTOMIC:
        return scan_cyclotomic(params, cache)
    return scan_abelian(params, cache)


def replay_violation(entry: dict, params: ScanParams) -> bool:
    """Rebuild the subgroup from its key and re-check; True if the failure reproduces."""
    p = params.p
    mats = [Mat2.parse(t, p) for t in entry["key"].split(";")]
    from .groups import from_elements

    G = from_elements(p, [m.code for m in mats])
    row = evaluate_class(G, params)
    return row["admissible"] and not row["conclusion_ok"]


__all__ = [
    "InertiaConstraint",
    "ScanParams",
    "ScanReport",
    "divisibility_oracle",
    "oracle_table",
    "scan_cyclotomic",
    "scan_abelian",
    "run_scan",
    "replay_violation",
]
