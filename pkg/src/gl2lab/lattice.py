"""Full subgroup enumeration for small ambient groups.

Elements of the ambient group are indexed 0..N-1 in code order and a
multiplication table is built once.  Subgroups are grown by joining a
known subgroup with one cyclic subgroup at a time; new subgroups are
recorded together with their whole conjugacy orbit under the ambient
group, so only one representative per orbit is ever extended.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .groups import BudgetExceeded, Subgroup, gl2_space
from .mat2 import Mat2, batch_mul

# The table and the per-orbit masks are N x N; this keeps them in memory.
LATTICE_MAX_ORDER = 8192


def _is_prime_power(k: int) -> bool:
    if k < 2:
        return False
    q = next(d for d in range(2, k + 1) if k % d == 0)
    while k % q == 0:
        k //= q
    return k == 1


class Lattice:
    def __init__(self, ambient: Subgroup, max_order: int = LATTICE_MAX_ORDER):
        if ambient.order > max_order:
            raise BudgetExceeded(f"ambient order {ambient.order} exceeds lattice budget {max_order}")
        self.ambient = ambient
        self.n = ambient.n
        self.codes = np.asarray(ambient.codes)
        N = self.N = self.codes.size
        dtype = np.int16 if N < 2**15 else np.int32
        table = np.empty((N, N), dtype=dtype)
        step = max(1, 2_000_000 // N)
        for lo in range(0, N, step):
            prods = batch_mul(self.codes[lo:lo + step, None], self.codes[None, :], self.n)
            table[lo:lo + step] = np.searchsorted(self.codes, prods)
        self.table = table
        ident = gl2_space(self.n).identity
        self.identity = int(np.searchsorted(self.codes, ident))
        self.inverse = np.argmax(table == self.identity, axis=1)

    # -- primitives ----------------------------------------------------------

    def _key(self, mask: np.ndarray) -> bytes:
        return np.packbits(mask).tobytes()

    def cyclic(self) -> list[tuple[int, np.ndarray]]:
        """Distinct cyclic subgroups as (generator index, mask), generator minimal."""
        N = self.N
        rows = np.arange(N)
        masks = np.zeros((N, N), dtype=bool)
        cur = rows.copy()
        live = np.ones(N, dtype=bool)
        while live.any():
            masks[rows[live], cur[live]] = True
            cur = self.table[cur, rows]
            live &= cur != self.identity
        masks[:, self.identity] = True
        packed = np.packbits(masks, axis=1)
        _, first = np.unique(packed, axis=0, return_index=True)
        first.sort()
        return [(int(i), masks[i]) for i in first]

    def join(self, mask: np.ndarray, gens: list[int]) -> np.ndarray:
        mask = mask.copy()
        g = np.asarray(gens, dtype=np.int64)
        frontier = np.flatnonzero(mask)
        fresh = np.zeros(self.N, dtype=bool)
        while frontier.size:
            fresh[self.table[frontier[:, None], g[None, :]].ravel()] = True
            fresh &= ~mask
            frontier = np.flatnonzero(fresh)
            mask |= fresh
            fresh[:] = False
        return mask

    def orbit(self, mask: np.ndarray):
        """Distinct conjugates g H g^-1 as (first conjugator index, mask) pairs."""
        N = self.N
        elems = np.flatnonzero(mask)
        left = self.table[:, elems]
        conj = self.table[left, self.inverse[:, None]]
        masks = np.zeros((N, N), dtype=bool)
        masks[np.arange(N)[:, None], conj] = True
        packed = np.packbits(masks, axis=1)
        first: dict[bytes, int] = {}
        for g in range(N):
            first.setdefault(packed[g].tobytes(), g)
        return [(g, masks[g], k) for k, g in first.items()]

    def _commutes(self, x: int, gens: list[int]) -> bool:
        return all(self.table[x, y] == self.table[y, x] for y in gens)

    # -- enumeration ---------------------------------------------------------

    def class_representatives(self, abelian_only: bool = False):
        """(mask, generator indices, orbit) per conjugacy class of subgroups."""
        # every element is a product of prime-power-order powers of itself,
        # so these joins still reach every subgroup
        cyc = [(c, m) for c, m in self.cyclic() if _is_prime_power(int(m.sum()))]
        start = np.zeros(self.N, dtype=bool)
        start[self.identity] = True
        seen = set()
        classes = []
        orbit = self.orbit(start)
        seen.update(k for _, _, k in orbit)
        classes.append((start, [], orbit))
        queue = deque([(start, [])])
        while queue:
            mask, gens = queue.popleft()
            for c, _ in cyc:
                if mask[c]:
                    continue
                if abelian_only and not self._commutes(c, gens):
                    continue
                J = self.join(mask, gens + [c])
                k = self._key(J)
                if k in seen:
                    continue
                orbit = self.orbit(J)
                seen.update(k2 for _, _, k2 in orbit)
                classes.append((J, gens + [c], orbit))
                queue.append((J, gens + [c]))
        return classes

    def _to_subgroup(self, mask: np.ndarray, gens: list[int], conj: int | None = None) -> Subgroup:
        codes = self.codes[np.flatnonzero(mask)]
        if conj is None:
            gidx = gens
        else:
            gidx = [int(self.table[self.table[conj, y], self.inverse[conj]]) for y in gens]
        return Subgroup(self.n, codes, [Mat2.from_code(int(self.codes[i]), self.n) for i in gidx])

    def class_subgroups(self, abelian_only: bool = False) -> list[list[Subgroup]]:
        """Subgroups grouped by ambient-conjugacy class; first entry is the representative."""
        out = []
        for mask, gens, orbit in self.class_representatives(abelian_only):
            members = [self._to_subgroup(m, gens, g) for g, m, _ in orbit]
            rep = self._to_subgroup(mask, gens)
            members = [rep] + [s for s in members if s != rep]
            out.append(members)
        out.sort(key=lambda ms: (ms[0].order, ms[0].codes.tobytes()))
        return out

    def all_subgroups(self, abelian_only: bool = False) -> list[Subgroup]:
        subs = [s for cls in self.class_subgroups(abelian_only) for s in cls]
        subs.sort(key=lambda s: (s.order, s.codes.tobytes()))
        return subs
