"""Hypothesis strategies for matrices and small subgroups."""

from math import gcd

from hypothesis import strategies as st

from gl2lab.mat2 import Mat2

SMALL_PRIMES = (3, 5, 7, 11, 13)


def invertible(n: int):
    return (
        st.tuples(*[st.integers(0, n - 1)] * 4)
        .filter(lambda t: gcd((t[0] * t[3] - t[1] * t[2]) % n, n) == 1)
        .map(lambda t: Mat2(n, *t))
    )


def any_matrix(n: int):
    return st.tuples(*[st.integers(0, n - 1)] * 4).map(lambda t: Mat2(n, *t))


@st.composite
def prime_and_mats(draw, count=1, primes=SMALL_PRIMES):
    p = draw(st.sampled_from(primes))
    return (p, *[draw(invertible(p)) for _ in range(count)])
