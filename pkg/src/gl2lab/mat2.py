"""2x2 matrices over Z/nZ.

Scalar arithmetic lives on the frozen :class:`Mat2` value type.  The
``batch_*`` helpers at the bottom operate on integer *codes*
(``((a*n + b)*n + c)*n + d``) held in numpy arrays; the subgroup engine
uses them for closures and conjugator searches, where looping in Python
over a few hundred thousand matrices would be far too slow.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable

import numpy as np


class ModulusMismatch(ValueError):
    pass


class NotInvertible(ValueError):
    pass


@dataclass(frozen=True, slots=True, order=True)
class Mat2:
    """Row-major matrix ``[[a, b], [c, d]]`` with entries reduced mod ``n``.

    Ordering is lexicographic on ``(n, a, b, c, d)``, which is also the
    numeric order of :attr:`code` for a fixed modulus.
    """

    n: int
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"modulus must be >= 2, got {self.n}")
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, getattr(self, name) % self.n)

    @classmethod
    def identity(cls, n: int) -> Mat2:
        return cls(n, 1, 0, 0, 1)

    @classmethod
    def diag(cls, n: int, u: int, v: int) -> Mat2:
        return cls(n, u, 0, 0, v)

    @classmethod
    def scalar(cls, n: int, u: int) -> Mat2:
        return cls(n, u, 0, 0, u)

    @classmethod
    def parse(cls, text: str, n: int) -> Mat2:
        """Parse the canonical ``"a,b,c,d"`` encoding."""
        parts = text.strip().split(",")
        if len(parts) != 4:
            raise ValueError(f"expected 'a,b,c,d', got {text!r}")
        try:
            a, b, c, d = (int(x) for x in parts)
        except ValueError:
            raise ValueError(f"non-integer entry in {text!r}") from None
        return cls(n, a, b, c, d)

    @classmethod
    def from_code(cls, code: int, n: int) -> Mat2:
        code, d = divmod(int(code), n)
        code, c = divmod(code, n)
        a, b = divmod(code, n)
        return cls(n, a, b, c, d)

    @property
    def code(self) -> int:
        n = self.n
        return ((self.a * n + self.b) * n + self.c) * n + self.d

    def encode(self) -> str:
        return f"{self.a},{self.b},{self.c},{self.d}"

    def __str__(self):
        return self.encode()

    def __matmul__(self, other: Mat2) -> Mat2:
        return mul(self, other)

    def __pow__(self, k: int) -> Mat2:
        return power(self, k)

    @property
    def is_diagonal(self) -> bool:
        return self.b == 0 and self.c == 0

    @property
    def is_scalar(self) -> bool:
        return self.is_diagonal and self.a == self.d


def mul(x: Mat2, y: Mat2) -> Mat2:
    if x.n != y.n:
        raise ModulusMismatch(f"moduli differ: {x.n} vs {y.n}")
    return Mat2(
        x.n,
        x.a * y.a + x.b * y.c,
        x.a * y.b + x.b * y.d,
        x.c * y.a + x.d * y.c,
        x.c * y.b + x.d * y.d,
    )


def det(x: Mat2) -> int:
    return (x.a * x.d - x.b * x.c) % x.n


def trace(x: Mat2) -> int:
    return (x.a + x.d) % x.n


def is_in_sl2(x: Mat2) -> bool:
    return det(x) == 1


def is_invertible(x: Mat2) -> bool:
    return gcd(det(x), x.n) == 1


def inv(x: Mat2) -> Mat2:
    """Adjugate times the inverse determinant."""
    dt = det(x)
    if gcd(dt, x.n) != 1:
        raise NotInvertible(f"{x.encode()} has det {dt} sharing a factor with {x.n}")
    u = pow(dt, -1, x.n)
    return Mat2(x.n, u * x.d, -u * x.b, -u * x.c, u * x.a)


def power(x: Mat2, k: int) -> Mat2:
    if k < 0:
        return power(inv(x), -k)
    result = Mat2.identity(x.n)
    base = x
    while k:
        if k & 1:
            result = mul(result, base)
        base = mul(base, base)
        k >>= 1
    return result


def element_order(x: Mat2) -> int:
    if not is_invertible(x):
        raise NotInvertible(f"{x.encode()} is not invertible mod {x.n}")
    one = Mat2.identity(x.n)
    k, y = 1, x
    while y != one:
        y = mul(y, x)
        k += 1
    return k


def conjugate(m: Mat2, x: Mat2) -> Mat2:
    """Return ``m x m^-1``."""
    return mul(mul(m, x), inv(m))


def flip(x: Mat2) -> Mat2:
    if not x.is_diagonal:
        raise ValueError(f"flip is only defined on diagonal matrices, got {x.encode()}")
    return Mat2(x.n, x.d, 0, 0, x.a)


def gl2_order(n: int) -> int:
    """|GL_2(Z/nZ)| via the prime factorisation of n."""
    order = 1
    m = n
    q = 2
    while m > 1:
        if q * q > m:
            q = m
        if m % q == 0:
            e = 0
            while m % q == 0:
                m //= q
                e += 1
            order *= q ** (4 * (e - 1)) * (q * q - 1) * (q * q - q)
        q += 1
    return order


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % q for q in range(2, int(n**0.5) + 1))


def least_primitive_root(p: int) -> int:
    """Least positive generator of (Z/pZ)^x, by direct order check."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p == 2:
        return 1
    for g in range(2, p):
        x, k = g, 1
        while x != 1:
            x = x * g % p
            k += 1
        if k == p - 1:
            return g
    raise AssertionError("unreachable")


# -- batch arithmetic on codes ----------------------------------------------


def batch_decode(codes: np.ndarray, n: int):
    codes = np.asarray(codes, dtype=np.int64)
    rest, d = np.divmod(codes, n)
    rest, c = np.divmod(rest, n)
    a, b = np.divmod(rest, n)
    return a, b, c, d


def batch_encode(a, b, c, d, n: int) -> np.ndarray:
    return ((a * n + b) * n + c) * n + d


def batch_mul(x: np.ndarray, y: np.ndarray, n: int) -> np.ndarray:
    """Elementwise (broadcasting) product of code arrays."""
    xa, xb, xc, xd = batch_decode(x, n)
    ya, yb, yc, yd = batch_decode(y, n)
    return batch_encode(
        (xa * ya + xb * yc) % n,
        (xa * yb + xb * yd) % n,
        (xc * ya + xd * yc) % n,
        (xc * yb + xd * yd) % n,
        n,
    )


def batch_det(codes: np.ndarray, n: int) -> np.ndarray:
    a, b, c, d = batch_decode(codes, n)
    return (a * d - b * c) % n


def batch_inv(codes: np.ndarray, n: int) -> np.ndarray:
    a, b, c, d = batch_decode(codes, n)
    dt = (a * d - b * c) % n
    u = _unit_inverses(n)[dt]
    return batch_encode(u * d % n, (-u * b) % n, (-u * c) % n, u * a % n, n)


_UNIT_INV_CACHE: dict[int, np.ndarray] = {}


def _unit_inverses(n: int) -> np.ndarray:
    """Table t -> t^-1 mod n, with 0 for non-units."""
    table = _UNIT_INV_CACHE.get(n)
    if table is None:
        table = np.zeros(n, dtype=np.int64)
        for t in range(1, n):
            if gcd(t, n) == 1:
                table[t] = pow(t, -1, n)
        _UNIT_INV_CACHE[n] = table
    return table


def codes_of(mats: Iterable[Mat2]) -> np.ndarray:
    return np.array([m.code for m in mats], dtype=np.int64)
