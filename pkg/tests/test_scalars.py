import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from builders import random_poly, rand_gauss, q
from pfaffian.scalars import (ExactScalar, LaurentPoly, WeightVector, canonicalize, format_rational,
                              graded_parts, parse_rational)

seeds = st.integers(0, 2 ** 32 - 1)
V2 = ("t1", "t2")
rationals = st.fractions(max_denominator=50).filter(lambda f: abs(f) < 10 ** 6)


def naive_product(p, r):
    out = {}
    for e1, c1 in p.terms.items():
        for e2, c2 in r.terms.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, ExactScalar(0)) + c1 * c2
    return {e: c for e, c in out.items() if c}


@given(rationals, rationals, rationals, rationals)
def test_exact_scalar_add_sub_roundtrip(a, b, c, e):
    x, y = ExactScalar(a, b), ExactScalar(c, e)
    assert (x + y) - y == x
    if y:
        assert (x * y) / y == x


def test_exact_scalar_lowest_terms():
    x = ExactScalar(Fraction(6, -4))
    assert x.re.numerator == -3 and x.re.denominator == 2


def test_exact_times_complex_promotes():
    assert q(1, 2) * 2j == 1j
    assert isinstance(q(1) + 0.5, complex)


def test_canonicalize_examples():
    t1, t2 = LaurentPoly.var(0, V2), LaurentPoly.var(1, V2)
    assert canonicalize(t1 * 0 + t2 - t2).is_zero()
    assert (t1 + t1) == t1 * 2
    prod = (t1 - t2) * (t1 + t2)
    assert prod == t1 ** 2 - t2 ** 2
    assert prod.terms == naive_product(t1 - t2, t1 + t2)


def test_graded_parts_examples():
    t1, t2 = LaurentPoly.var(0, V2), LaurentPoly.var(1, V2)
    one = LaurentPoly.constant(1, V2)
    assert graded_parts(one + t1 + t1 * t2, (1, 1)) == [(0, one), (1, t1), (2, t1 * t2)]
    assert graded_parts(t1 ** -1, (1, 1)) == [(-1, t1 ** -1)]
    w1, w2 = LaurentPoly.var(0, ("w1", "w2")), LaurentPoly.var(1, ("w1", "w2"))
    P = w1 ** 3 + w2 ** 2
    assert graded_parts(P, (2, 3)) == [(6, P)]


def test_weights_must_be_positive():
    with pytest.raises(ValueError):
        WeightVector([1, 0])


@given(seeds)
def test_ring_axioms(seed):
    rng = random.Random(seed)
    a, b, c = (random_poly(rng, V2, 3, -2, 2, rand_gauss) for _ in range(3))
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    assert (a * b).terms == naive_product(a, b)


@given(seeds, st.lists(st.integers(1, 4), min_size=2, max_size=2))
def test_graded_parts_resum(seed, w):
    rng = random.Random(seed)
    p = random_poly(rng, V2, 5, -2, 3)
    parts = graded_parts(p, w)
    total = LaurentPoly.zero(V2)
    for deg, part in parts:
        assert all(WeightVector(w).degree(e) == deg for e in part.terms)
        total = total + part
    assert total == p
    degs = [deg for deg, _ in parts]
    assert degs == sorted(set(degs))


@given(rationals)
def test_rational_text_roundtrip(x):
    assert Fraction(str(parse_rational(format_rational(x)))) == x


@pytest.mark.parametrize("bad", ["1/0", "1.5", "a", "1/2/3", ""])
def test_parse_rational_rejects(bad):
    with pytest.raises(ValueError):
        parse_rational(bad)


def test_float_polynomial_evaluation():
    t1, t2 = LaurentPoly.var(0, V2), LaurentPoly.var(1, V2)
    p = t1 * q(1, 2) + t2 ** -1
    assert p.evaluate([2, 4]) == ExactScalar(Fraction(5, 4))
    assert abs(p.evaluate([1j, 2.0]) - (0.5j + 0.5)) < 1e-15
