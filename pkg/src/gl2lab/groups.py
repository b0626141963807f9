"""Subgroups of GL_2(Z/nZ): construction, closure, containment, conjugacy.

A :class:`Subgroup` stores its elements as a sorted numpy array of matrix
codes (see :mod:`gl2lab.mat2`).  Sorting by code is the same as sorting the
``(a, b, c, d)`` residue tuples lexicographically, so the canonical key and
the conjugator search order both follow that ordering.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from .mat2 import (
    Mat2,
    ModulusMismatch,
    NotInvertible,
    batch_decode,
    batch_det,
    batch_encode,
    batch_inv,
    batch_mul,
    codes_of,
    flip,
    gl2_order,
    is_invertible,
    is_prime,
    least_primitive_root,
    power,
)


class BudgetExceeded(RuntimeError):
    pass


# -- per-modulus element space -----------------------------------------------


class GL2Space:
    """All of GL_2(Z/nZ) as sorted code arrays, plus scratch buffers."""

    def __init__(self, n: int):
        self.n = n
        allc = np.arange(n**4, dtype=np.int64)
        dets = batch_det(allc, n)
        units = np.array([gcd(t, n) == 1 for t in range(n)])
        self.codes = allc[units[dets]]
        self.inv_codes = batch_inv(self.codes, n)
        self.identity = Mat2.identity(n).code
        self._scratch = np.zeros(n**4, dtype=bool)
        assert self.codes.size == gl2_order(n)

    @property
    def order(self) -> int:
        return int(self.codes.size)

    def conjugation_generators(self) -> np.ndarray:
        """A small generating set of GL_2(n), used for orbit walks."""
        n = self.n
        gens = [Mat2(n, 1, 1, 0, 1), Mat2(n, 1, 0, 1, 1)]
        gens += [Mat2.diag(n, u, 1) for u in range(2, n) if gcd(u, n) == 1]
        if is_prime(n) and n > 2:
            gens = gens[:2] + [Mat2.diag(n, least_primitive_root(n), 1)]
        return codes_of(gens)


@lru_cache(maxsize=None)
def gl2_space(n: int) -> GL2Space:
    return GL2Space(n)


def _sorted_member(haystack: np.ndarray, needles: np.ndarray) -> np.ndarray:
    if haystack.size == 0:
        return np.zeros(np.shape(needles), dtype=bool)
    idx = np.searchsorted(haystack, needles)
    idx = np.minimum(idx, haystack.size - 1)
    return haystack[idx] == needles


def _close_codes(n: int, gens: np.ndarray, start: np.ndarray | None = None) -> np.ndarray:
    """Breadth-first product closure; returns the sorted element codes."""
    space = gl2_space(n)
    mask = space._scratch
    if start is None:
        start = np.array([space.identity], dtype=np.int64)
    gens = np.unique(np.asarray(gens, dtype=np.int64))
    mask[start] = True
    chunks = [start]
    frontier = start
    try:
        while frontier.size and gens.size:
            prods = batch_mul(frontier[:, None], gens[None, :], n).ravel()
            new = np.unique(prods[~mask[prods]])
            mask[new] = True
            chunks.append(new)
            frontier = new
    finally:
        allc = np.concatenate(chunks)
        mask[allc] = False
    allc.sort()
    return allc


# -- the Subgroup type ---------------------------------------------------------


class Subgroup:
    """A finite subgroup of GL_2(Z/nZ).

    Build these through :func:`closure`, :func:`from_elements` or
    :func:`standard`; the constructor itself trusts its input.
    """

    __slots__ = ("n", "generators", "codes", "_cache")

    def __init__(self, n: int, codes: np.ndarray, generators: Sequence[Mat2]):
        codes = np.asarray(codes, dtype=np.int64)
        codes.setflags(write=False)
        self.n = n
        self.codes = codes
        self.generators = tuple(generators)
        self._cache = {}
        if gl2_order(n) % codes.size:
            raise ValueError(f"order {codes.size} does not divide |GL2({n})|")

    # basic protocol
    def __len__(self):
        return int(self.codes.size)

    @property
    def order(self) -> int:
        return int(self.codes.size)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x: Mat2) -> bool:
        return x.n == self.n and bool(_sorted_member(self.codes, np.array([x.code]))[0])

    def __eq__(self, other):
        if not isinstance(other, Subgroup):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.codes, other.codes)

    def __hash__(self):
        return hash((self.n, self.codes.tobytes()))

    def __repr__(self):
        gens = " ".join(g.encode() for g in self.generators)
        return f"<Subgroup n={self.n} order={self.order} gens=[{gens}]>"

    @property
    def elements(self) -> tuple[Mat2, ...]:
        if "elements" not in self._cache:
            self._cache["elements"] = tuple(Mat2.from_code(c, self.n) for c in self.codes)
        return self._cache["elements"]

    @property
    def key(self) -> str:
        """Canonical key: sorted element encodings joined by ';'."""
        if "key" not in self._cache:
            a, b, c, d = batch_decode(self.codes, self.n)
            self._cache["key"] = ";".join(
                f"{w},{x},{y},{z}" for w, x, y, z in zip(a.tolist(), b.tolist(), c.tolist(), d.tolist())
            )
        return self._cache["key"]

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.key.encode()).hexdigest()[:16]

    def serialize(self) -> str:
        return self.key.replace(";", "\n")

    # membership helpers
    def contains_codes(self, codes: np.ndarray) -> np.ndarray:
        return _sorted_member(self.codes, np.asarray(codes, dtype=np.int64))

    def generator_codes(self) -> np.ndarray:
        return codes_of(self.generators)

    # cached invariants
    def element_orders(self) -> np.ndarray:
        if "orders" not in self._cache:
            self._cache["orders"] = batch_orders(self.codes, self.n)
        return self._cache["orders"]

    def order_histogram(self) -> dict[int, int]:
        if "hist" not in self._cache:
            vals, counts = np.unique(self.element_orders(), return_counts=True)
            self._cache["hist"] = dict(zip(vals.tolist(), counts.tolist()))
        return self._cache["hist"]

    def det_image(self) -> tuple[int, ...]:
        return tuple(np.unique(batch_det(self.codes, self.n)).tolist())

    @property
    def is_abelian(self) -> bool:
        if "abelian" not in self._cache:
            g = self.generator_codes()
            lhs = batch_mul(g[:, None], g[None, :], self.n)
            rhs = batch_mul(g[None, :], g[:, None], self.n)
            self._cache["abelian"] = bool(np.array_equal(lhs, rhs))
        return self._cache["abelian"]

    def is_subgroup_of(self, other: Subgroup) -> bool:
        _same_modulus(self, other)
        return bool(other.contains_codes(self.codes).all())


def _same_modulus(*groups: Subgroup):
    ns = {g.n for g in groups}
    if len(ns) != 1:
        raise ModulusMismatch(f"moduli differ: {sorted(ns)}")


def batch_orders(codes: np.ndarray, n: int) -> np.ndarray:
    """Element orders by iterated multiplication, vectorised."""
    codes = np.asarray(codes, dtype=np.int64)
    result = np.zeros(codes.size, dtype=np.int64)
    ident = Mat2.identity(n).code
    idx = np.arange(codes.size)
    y = codes.copy()
    k = 1
    while idx.size:
        done = y == ident
        result[idx[done]] = k
        idx, y = idx[~done], y[~done]
        y = batch_mul(y, codes[idx], n)
        k += 1
    return result


def batch_projective_orders(codes: np.ndarray, n: int) -> np.ndarray:
    """Least k >= 1 with x^k scalar."""
    codes = np.asarray(codes, dtype=np.int64)
    result = np.zeros(codes.size, dtype=np.int64)
    idx = np.arange(codes.size)
    y = codes.copy()
    k = 1
    while idx.size:
        a, b, c, d = batch_decode(y, n)
        done = (b == 0) & (c == 0) & (a == d)
        result[idx[done]] = k
        idx, y = idx[~done], y[~done]
        y = batch_mul(y, codes[idx], n)
        k += 1
    return result


# -- construction --------------------------------------------------------------


def _check_gens(n: int, gens: Iterable[Mat2]) -> list[Mat2]:
    gens = list(gens)
    for g in gens:
        if g.n != n:
            raise ModulusMismatch(f"generator {g.encode()} has modulus {g.n}, expected {n}")
        if not is_invertible(g):
            raise NotInvertible(f"generator {g.encode()} is not invertible mod {n}")
    return gens


def closure(n: int, gens: Iterable[Mat2]) -> Subgroup:
    """Smallest subgroup of GL_2(n) containing ``gens``."""
    gens = _check_gens(n, gens)
    return Subgroup(n, _close_codes(n, codes_of(gens)), gens)


def join(G: Subgroup, extra: Iterable[Mat2]) -> Subgroup:
    extra = _check_gens(G.n, extra)
    codes = _close_codes(G.n, np.concatenate([G.generator_codes(), codes_of(extra)]), start=G.codes)
    return Subgroup(G.n, codes, G.generators + tuple(extra))


def from_elements(n: int, codes: Iterable[int] | np.ndarray, generators: Sequence[Mat2] | None = None) -> Subgroup:
    """Subgroup with exactly the given elements.

    Raises ``ValueError`` if the set is not a subgroup.  When no generators
    are supplied a generating set is picked greedily in code order.
    """
    codes = np.unique(np.asarray(list(codes) if not isinstance(codes, np.ndarray) else codes, dtype=np.int64))
    if generators is None:
        gens: list[int] = []
        have = np.array([Mat2.identity(n).code], dtype=np.int64)
        while have.size < codes.size:
            missing = codes[~_sorted_member(have, codes)]
            if missing.size == 0:
                break
            gens.append(int(missing[-1]))
            have = _close_codes(n, np.array(gens), start=have)
            if have.size > codes.size:
                break
        generators = [Mat2.from_code(c, n) for c in gens]
    generated = _close_codes(n, codes_of(_check_gens(n, generators)))
    if not np.array_equal(generated, codes):
        raise ValueError(f"element set of size {codes.size} is not a subgroup of GL2({n})")
    return Subgroup(n, codes, generators)


def trivial(n: int) -> Subgroup:
    return Subgroup(n, np.array([Mat2.identity(n).code]), ())


# -- the named groups ----------------------------------------------------------

TAGS = ("Cs", "Ns", "Cns", "Nns", "B0", "D", "Z", "GammaZ", "SL2", "GL2")
_POWERED = ("D", "Cns")


@dataclass(frozen=True)
class StandardKind:
    tag: str
    p: int
    k: int = 1

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown tag {self.tag!r}; expected one of {TAGS}")
        if self.k < 1:
            raise ValueError("power k must be >= 1")
        if self.k != 1 and self.tag not in _POWERED:
            raise ValueError(f"power k only applies to {_POWERED}")
        if self.tag in ("SL2", "GL2"):
            if self.p < 2:
                raise ValueError("modulus must be >= 2")
        elif not (is_prime(self.p) and self.p >= 3):
            raise ValueError(f"{self.tag} needs an odd prime, got {self.p}")


def gamma(n: int) -> Mat2:
    return Mat2(n, 1, 1, 0, 1)


def nonsquare(p: int) -> int:
    """The fixed non-square: least positive primitive root mod p."""
    return least_primitive_root(p)


@lru_cache(maxsize=None)
def cns_generator(p: int) -> Mat2:
    """First element of Cns(p), in code order, of order p^2 - 1."""
    eps = nonsquare(p)
    N = p * p - 1
    qs = [q for q in range(2, N + 1) if N % q == 0 and is_prime(q)]
    one = Mat2.identity(p)
    for a in range(p):
        for b in range(p):
            x = Mat2(p, a, b * eps, b, a)
            if (a, b) == (0, 0):
                continue
            if all(power(x, N // q) != one for q in qs):
                return x
    raise AssertionError("Cns(p) is cyclic; a generator must exist")


def _formula_mask(kind: StandardKind, a, b, c, d, dt):
    p = kind.p
    g = least_primitive_root(p) if is_prime(p) and p > 2 else None
    scalar = (b == 0) & (c == 0) & (a == d)
    diag = (b == 0) & (c == 0)
    if kind.tag == "Cs":
        return diag
    if kind.tag == "Ns":
        return diag | ((a == 0) & (d == 0))
    if kind.tag in ("Cns", "Nns"):
        eps = nonsquare(p)
        cns = (d == a) & (b == eps * c % p)
        if kind.tag == "Cns":
            if kind.k == 1:
                return cns
            return None
        return cns | ((d == (-a) % p) & (b == (-eps * c) % p))
    if kind.tag == "B0":
        return c == 0
    if kind.tag == "D":
        powers = {pow(g, kind.k * i, p) for i in range(p - 1)}
        return diag & (d == 1) & np.isin(a, sorted(powers))
    if kind.tag == "Z":
        return scalar
    if kind.tag == "GammaZ":
        return (c == 0) & (a == d)
    if kind.tag == "SL2":
        return dt == 1
    if kind.tag == "GL2":
        return np.ones_like(a, dtype=bool)
    raise AssertionError(kind.tag)


def _standard_generators(kind: StandardKind) -> list[Mat2]:
    p = kind.p
    if kind.tag in ("SL2", "GL2"):
        gens = [Mat2(p, 1, 1, 0, 1), Mat2(p, 1, 0, 1, 1)]
        if kind.tag == "GL2":
            gens += [Mat2.diag(p, u, 1) for u in range(2, p) if gcd(u, p) == 1]
        return gens
    g = least_primitive_root(p)
    if kind.tag == "Cs":
        return [Mat2.diag(p, g, 1), Mat2.diag(p, 1, g)]
    if kind.tag == "Ns":
        return [Mat2.diag(p, g, 1), Mat2.diag(p, 1, g), Mat2(p, 0, 1, 1, 0)]
    if kind.tag == "Cns":
        return [power(cns_generator(p), kind.k)]
    if kind.tag == "Nns":
        return [cns_generator(p), Mat2.diag(p, 1, -1)]
    if kind.tag == "B0":
        return [Mat2.diag(p, g, 1), Mat2.diag(p, 1, g), gamma(p)]
    if kind.tag == "D":
        return [Mat2.diag(p, pow(g, kind.k, p), 1)]
    if kind.tag == "Z":
        return [Mat2.scalar(p, g)]
    if kind.tag == "GammaZ":
        return [gamma(p), Mat2.scalar(p, g)]
    raise AssertionError(kind.tag)


@lru_cache(maxsize=256)
def _standard(kind: StandardKind) -> Subgroup:
    p = kind.p
    gens = _standard_generators(kind)
    space = gl2_space(p)
    a, b, c, d = batch_decode(space.codes, p)
    mask = _formula_mask(kind, a, b, c, d, (a * d - b * c) % p)
    if mask is None:
        # Cns^k: the k-th powers of Cns
        base = _standard(StandardKind("Cns", p))
        expected = np.unique(batch_power(base.codes, kind.k, p))
    else:
        expected = space.codes[mask]
    return from_elements(p, expected, gens)


def standard(kind: StandardKind | str, p: int | None = None, k: int = 1) -> Subgroup:
    """The named group; the formula set is checked against its generators."""
    if not isinstance(kind, StandardKind):
        kind = StandardKind(kind, p, k)
    return _standard(kind)


def batch_power(codes: np.ndarray, k: int, n: int) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    result = np.full(codes.shape, Mat2.identity(n).code, dtype=np.int64)
    base = codes.copy()
    while k:
        if k & 1:
            result = batch_mul(result, base, n)
        base = batch_mul(base, base, n)
        k >>= 1
    return result


def scalar_subgroups(p: int) -> list[Subgroup]:
    """All subgroups of Z(p), ordered by increasing order."""
    g = least_primitive_root(p)
    out = []
    for t in range(1, p):
        if (p - 1) % t == 0:
            out.append(closure(p, [Mat2.scalar(p, pow(g, (p - 1) // t, p))]))
    return out


# -- set operations ------------------------------------------------------------


def intersect(G: Subgroup, H: Subgroup) -> Subgroup:
    _same_modulus(G, H)
    return from_elements(G.n, np.intersect1d(G.codes, H.codes))


def sl2_intersection(G: Subgroup) -> Subgroup:
    """Kernel of det restricted to G."""
    return from_elements(G.n, G.codes[batch_det(G.codes, G.n) == 1])


def flip_subgroup(H: Subgroup) -> Subgroup:
    a, b, c, d = batch_decode(H.codes, H.n)
    if np.any(b != 0) or np.any(c != 0):
        raise ValueError("flip_subgroup needs a subgroup of the split Cartan group")
    flipped = batch_encode(d, b, c, a, H.n)
    return from_elements(H.n, flipped, [flip(g) for g in H.generators])


def semisimplify(H: Subgroup) -> Subgroup:
    a, b, c, d = batch_decode(H.codes, H.n)
    if np.any(c != 0):
        raise ValueError("semisimplify needs an upper-triangular subgroup")
    return from_elements(H.n, batch_encode(a, 0 * b, c, d, H.n))


def conjugate_subgroup(m: Mat2, G: Subgroup) -> Subgroup:
    if m.n != G.n:
        raise ModulusMismatch(f"conjugator modulus {m.n} vs subgroup modulus {G.n}")
    from .mat2 import conjugate, inv

    mi = inv(m)
    codes = batch_mul(batch_mul(np.int64(m.code), G.codes, G.n), np.int64(mi.code), G.n)
    return Subgroup(G.n, np.sort(codes), [conjugate(m, g) for g in G.generators])


def contains(G: Subgroup, H: Subgroup) -> bool:
    return H.is_subgroup_of(G)


def _hist_dominated(H: Subgroup, G: Subgroup) -> bool:
    hg = G.order_histogram()
    return all(hg.get(k, 0) >= v for k, v in H.order_histogram().items())


def conjugate_contains(G: Subgroup, H: Subgroup, conjugators: np.ndarray | None = None) -> Mat2 | None:
    """Some m with m H m^-1 inside G, or None.

    The identity is tried first; after that conjugators are scanned in
    code order and the first one that works is returned, so results are
    deterministic.
    """
    _same_modulus(G, H)
    n = G.n
    if H.is_subgroup_of(G):
        return Mat2.identity(n)
    if G.order % H.order or not _hist_dominated(H, G):
        return None
    space = gl2_space(n)
    if conjugators is None:
        m, mi = space.codes, space.inv_codes
    else:
        m = np.asarray(conjugators, dtype=np.int64)
        mi = batch_inv(m, n)
    for h in H.generator_codes():
        ok = G.contains_codes(batch_mul(batch_mul(m, h, n), mi, n))
        m, mi = m[ok], mi[ok]
        if m.size == 0:
            return None
    for mc, mic in zip(m.tolist(), mi.tolist()):
        image = batch_mul(batch_mul(np.int64(mc), H.codes, n), np.int64(mic), n)
        if G.contains_codes(image).all():
            return Mat2.from_code(mc, n)
    return None


def is_conjugate(G: Subgroup, H: Subgroup) -> Mat2 | None:
    """A conjugator m with m H m^-1 = G, or None."""
    if G.order != H.order or G.order_histogram() != H.order_histogram():
        return None
    return conjugate_contains(G, H)


def conjugacy_signature(G: Subgroup) -> tuple:
    """Conjugation-invariant fingerprint used to bucket before explicit checks."""
    a, b, c, d = batch_decode(G.codes, G.n)
    tr = (a + d) % G.n
    dt = (a * d - b * c) % G.n
    scalar = (b == 0) & (c == 0) & (a == d)
    charpolys = Counter(zip(tr.tolist(), dt.tolist(), scalar.tolist()))
    return (
        G.order,
        tuple(sorted(G.order_histogram().items())),
        len(G.det_image()),
        tuple(sorted(charpolys.items())),
    )


def dedupe_up_to_conjugacy(groups: Iterable[Subgroup]) -> list[Subgroup]:
    """Keep one representative per GL_2-conjugacy class, in input order."""
    by_key: set[bytes] = set()
    buckets: dict[tuple, list[Subgroup]] = {}
    reps: list[Subgroup] = []
    for G in groups:
        kb = G.codes.tobytes()
        if kb in by_key:
            continue
        by_key.add(kb)
        sig = conjugacy_signature(G)
        bucket = buckets.setdefault(sig, [])
        if any(conjugate_contains(R, G) is not None for R in bucket):
            continue
        bucket.append(G)
        reps.append(G)
    return reps


# -- enumeration -----------------------------------------------------------------

CYCLIC_MAX_P = 47


def conjugacy_orbit_codes(n: int, start: np.ndarray) -> np.ndarray:
    """Union of the GL_2(n)-conjugacy classes of the given elements."""
    space = gl2_space(n)
    gens = space.conjugation_generators()
    gens_inv = batch_inv(gens, n)
    mask = space._scratch
    start = np.unique(np.asarray(start, dtype=np.int64))
    mask[start] = True
    chunks = [start]
    frontier = start
    try:
        while frontier.size:
            imgs = batch_mul(batch_mul(gens[None, :], frontier[:, None], n), gens_inv[None, :], n).ravel()
            new = np.unique(imgs[~mask[imgs]])
            mask[new] = True
            chunks.append(new)
            frontier = new
    finally:
        out = np.concatenate(chunks)
        mask[out] = False
    out.sort()
    return out


def enumerate_cyclic_subgroups(p: int, max_p: int = CYCLIC_MAX_P) -> list[Subgroup]:
    """One cyclic subgroup per GL_2(p)-conjugacy class, ordered by first generator.

    Elements are visited in code order; once <x> is taken as a
    representative, the conjugacy orbits of all generators of <x> are
    marked so no conjugate of <x> is taken again.
    """
    if not (is_prime(p) and p >= 3):
        raise ValueError(f"p must be an odd prime, got {p}")
    if p > max_p:
        raise BudgetExceeded(f"cyclic enumeration capped at p <= {max_p}, got {p}")
    space = gl2_space(p)
    covered = np.zeros(p**4, dtype=bool)
    reps = []
    for code in space.codes.tolist():
        if covered[code]:
            continue
        x = Mat2.from_code(code, p)
        C = closure(p, [x])
        orders = C.element_orders()
        gens_of_c = C.codes[orders == C.order]
        covered[conjugacy_orbit_codes(p, gens_of_c)] = True
        reps.append(C)
    return reps


def subgroups_of_cs(p: int) -> list[Subgroup]:
    """Every subgroup of Cs(p), which is a product of two cyclic groups."""
    cs = standard("Cs", p)
    cyclic: dict[bytes, Subgroup] = {}
    for x in cs.elements:
        C = closure(p, [x])
        cyclic.setdefault(C.codes.tobytes(), C)
    cyc = sorted(cyclic.values(), key=lambda s: (s.order, s.codes.tobytes()))
    found: dict[bytes, Subgroup] = {}
    for i, A in enumerate(cyc):
        found.setdefault(A.codes.tobytes(), A)
        for B in cyc[i + 1:]:
            if B.is_subgroup_of(A) or A.is_subgroup_of(B):
                continue
            J = join(A, B.generators)
            found.setdefault(J.codes.tobytes(), J)
    return sorted(found.values(), key=lambda s: (s.order, s.codes.tobytes()))


def guided_abelian_candidates(p: int) -> list[Subgroup]:
    """Abelian subgroups in the shapes allowed by the abelian-subgroup proposition.

    Subgroups of Cs, <antidiagonal, scalars>, subgroups of Cns,
    <Nns reflection, scalars>, <gamma, scalars>.  Deduplicated by element
    set only, not by conjugacy.
    """
    found: dict[bytes, Subgroup] = {}

    def add(G):
        found.setdefault(G.codes.tobytes(), G)

    for G in subgroups_of_cs(p):
        add(G)
    zs = scalar_subgroups(p)
    ns = standard("Ns", p)
    cns = standard("Cns", p)
    nns = standard("Nns", p)
    antidiag = [x for x in ns.elements if not x.is_diagonal]
    reflections = [x for x in nns.elements if x not in cns]
    for Zk in zs:
        zgen = list(Zk.generators)
        for x in antidiag + reflections:
            add(closure(p, [x] + zgen))
        add(closure(p, [gamma(p)] + zgen))
    N = p * p - 1
    for t in range(1, N + 1):
        if N % t == 0:
            add(standard("Cns", p, N // t))
    return sorted(found.values(), key=lambda s: (s.order, s.codes.tobytes()))


ABELIAN_MAX_P = 19


def enumerate_abelian_subgroups(p: int, max_p: int = ABELIAN_MAX_P) -> list[Subgroup]:
    """Abelian subgroups of GL_2(p) up to conjugacy, via the guided shape list."""
    if not (is_prime(p) and p >= 3):
        raise ValueError(f"p must be an odd prime, got {p}")
    if p > max_p:
        raise BudgetExceeded(f"abelian enumeration capped at p <= {max_p}, got {p}")
    cands = guided_abelian_candidates(p)
    for G in cands:
        assert G.is_abelian, G
    return dedupe_up_to_conjugacy(cands)


def enumerate_subgroups(ambient: Subgroup, max_order: int | None = None, abelian_only: bool = False) -> list[Subgroup]:
    """All subgroups of ``ambient`` (see :mod:`gl2lab.lattice`)."""
    from .lattice import Lattice, LATTICE_MAX_ORDER

    cap = LATTICE_MAX_ORDER if max_order is None else max_order
    if ambient.order > cap:
        raise BudgetExceeded(f"ambient order {ambient.order} exceeds lattice budget {cap}")
    return Lattice(ambient).all_subgroups(abelian_only=abelian_only)
