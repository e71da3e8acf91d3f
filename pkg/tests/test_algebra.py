import random
from fractions import Fraction

import pytest

from eqgenus.algebra import (
    GeneratorTableMismatch,
    GradedElement,
    IntegrationTable,
    MissingTableEntry,
    NonInvertibleLeadingCoefficient,
    NonNilpotentInput,
    QSeries,
    WLaurentPoly,
    WLaurentRational,
    fiber_integrate,
    graded_exp,
    graded_invert,
    graded_mul,
    series_invert,
    series_mul,
    wpoly_gcd,
)


def q_int(d, n8):
    """Series with integer q-exponents given as {exp: coeff}."""
    return QSeries({8 * k: Fraction(v) for k, v in d.items()}, n8)


# -- series_mul ---------------------------------------------------------------

def test_mul_difference_of_squares():
    a = q_int({0: 1, 1: 1}, 16)
    b = q_int({0: 1, 1: -1}, 16)
    assert series_mul(a, b) == q_int({0: 1, 2: -1}, 16)


def test_mul_identity():
    a = QSeries({0: Fraction(3), 5: Fraction(-1, 2), 9: Fraction(7)}, 24)
    assert series_mul(a, QSeries.one(24)) == a


def test_mul_euler_product_prefix():
    # (1-q)(1-q^2)(1-q^3) expanded by hand
    out = q_int({0: 1}, 48)
    for n in (1, 2, 3):
        out = series_mul(out, q_int({0: 1, n: -1}, 48))
    assert out == q_int({0: 1, 1: -1, 2: -1, 4: 1, 5: 1, 6: -1}, 48)


# -- series_invert ------------------------------------------------------------

def test_invert_geometric():
    a = q_int({0: 1, 1: -1}, 40)
    inv = series_invert(a)
    assert inv == q_int({k: 1 for k in range(6)}, 40)


def test_invert_monomial():
    a = QSeries({1: Fraction(1)}, 16)
    inv = series_invert(a)
    assert inv.c == {-1: Fraction(1)}
    assert series_mul(a, inv).c == {0: Fraction(1)}


def test_invert_geometric_in_w():
    # invert(1 - q z) over WLaurentRational, z = w^2
    z = WLaurentRational.w(2)
    a = QSeries({0: WLaurentRational.one(), 8: -z}, 32)
    inv = series_invert(a)
    for n in range(5):
        assert inv.c.get(8 * n, WLaurentRational.zero()) == z ** n


def test_invert_zero_raises():
    with pytest.raises(NonInvertibleLeadingCoefficient):
        series_invert(QSeries.zero(8))


def test_invert_noninvertible_graded_leading():
    gens = (("x", 2),)
    x = GradedElement.generator(gens, 4, "x")
    with pytest.raises(NonInvertibleLeadingCoefficient):
        series_invert(QSeries({0: x}, 8))


def test_invert_roundtrip_random():
    rng = random.Random(7)
    for _ in range(100):
        n8 = rng.randrange(4, 20)
        coeffs = {0: Fraction(rng.choice([1, -1, 2, 3]), rng.choice([1, 2]))}
        for k in range(1, n8 + 1):
            if rng.random() < 0.4:
                coeffs[k] = Fraction(rng.randrange(-4, 5), rng.choice([1, 2, 3]))
        a = QSeries(coeffs, n8)
        prod = series_mul(a, series_invert(a))
        assert prod.c == {0: Fraction(1)}


# -- ring axioms on random samples --------------------------------------------

def _rand_series(rng, n8=12):
    return QSeries({k: Fraction(rng.randrange(-5, 6), rng.choice([1, 2, 3]))
                    for k in range(n8 + 1) if rng.random() < 0.5}, n8)


def test_series_ring_axioms():
    rng = random.Random(11)
    for _ in range(40):
        a, b, c = (_rand_series(rng) for _ in range(3))
        assert series_mul(series_mul(a, b), c) == series_mul(a, series_mul(b, c))
        assert series_mul(a, b) == series_mul(b, a)
        lhs = series_mul(a, b + c)
        rhs = series_mul(a, b) + series_mul(a, c)
        assert lhs == rhs


def _rand_wrat(rng):
    num = WLaurentPoly({rng.randrange(-3, 4): Fraction(rng.randrange(-4, 5))
                        for _ in range(rng.randrange(1, 4))})
    den = WLaurentPoly({k: Fraction(rng.randrange(-3, 4)) for k in range(rng.randrange(1, 3) + 1)})
    if not den:
        den = WLaurentPoly.one()
    if not num:
        num = WLaurentPoly.w(-1)
    return WLaurentRational(num, den)


def test_wrational_field_axioms():
    rng = random.Random(13)
    for _ in range(40):
        a, b, c = (_rand_wrat(rng) for _ in range(3))
        assert (a * b) * c == a * (b * c)
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c
        if a:
            assert a * a.inverse() == WLaurentRational.one()


def test_wrational_canonical_reduction():
    rng = random.Random(17)
    for _ in range(60):
        a = _rand_wrat(rng)
        b = _rand_wrat(rng)
        if not b:
            continue
        # a/b in two presentations reduces to one canonical form
        junk = _rand_wrat(rng)
        if not junk:
            junk = WLaurentRational.one()
        lhs = a * b.inverse()
        rhs = (a * junk) * (b * junk).inverse()
        assert lhs == rhs
        # equality iff cross multiplication is the zero polynomial
        assert (lhs.num * rhs.den - rhs.num * lhs.den) == WLaurentPoly.zero()


def test_wrational_normal_form_shape():
    r = WLaurentRational(WLaurentPoly({1: Fraction(2), -1: Fraction(-2)}),
                         WLaurentPoly({2: Fraction(4), 0: Fraction(-4)}))
    # den normalized: low exponent 0, primitive, positive leading coefficient
    assert r.den.low == 0
    assert r.den.c[r.den.high] > 0
    assert r == WLaurentRational(WLaurentPoly({-1: Fraction(1, 2)}))


def test_wpoly_gcd_basic():
    a = WLaurentPoly({0: 1, 2: -1})          # 1 - w^2 up to sign
    b = WLaurentPoly({1: 1, 2: -1})          # w - w^2
    g = wpoly_gcd(a, b)
    # common factor (w - 1) up to unit/sign
    assert g.degree_span() == 1


# -- graded elements ----------------------------------------------------------

GENS = (("x", 2), ("y", 2))


def test_graded_cap_truncation():
    x = GradedElement.generator(GENS, 2, "x")
    assert graded_mul(x, x) == GradedElement.zero(GENS, 2)


def test_graded_identity_and_binomial():
    x = GradedElement.generator(GENS, 4, "x")
    y = GradedElement.generator(GENS, 4, "y")
    one = GradedElement.scalar(GENS, 4, Fraction(1))
    a = x + y * Fraction(2)
    assert graded_mul(a, one) == a
    sq = graded_mul(x + y, x + y)
    assert sq == GradedElement(GENS, 4, {(2, 0): Fraction(1), (1, 1): Fraction(2), (0, 2): Fraction(1)})


def test_graded_table_mismatch():
    x = GradedElement.generator(GENS, 4, "x")
    z = GradedElement.generator((("z", 2),), 4, "z")
    with pytest.raises(GeneratorTableMismatch):
        graded_mul(x, z)


def test_graded_exp():
    x = GradedElement.generator(GENS, 4, "x")
    assert graded_exp(GradedElement.zero(GENS, 4)) == GradedElement.scalar(GENS, 4, Fraction(1))
    e = graded_exp(x)
    assert e == GradedElement(GENS, 4, {(0, 0): Fraction(1), (1, 0): Fraction(1), (2, 0): Fraction(1, 2)})


def test_graded_exp_additivity():
    rng = random.Random(23)
    cap = 8
    gens = (("x", 2), ("b", 2))
    for _ in range(20):
        a = GradedElement(gens, cap, {(1, 0): Fraction(rng.randrange(-3, 4)),
                                      (0, 1): Fraction(rng.randrange(-3, 4))})
        b = GradedElement(gens, cap, {(1, 1): Fraction(rng.randrange(-3, 4)),
                                      (0, 1): Fraction(rng.randrange(-3, 4))})
        assert graded_exp(a + b) == graded_mul(graded_exp(a), graded_exp(b))


def test_graded_exp_non_nilpotent():
    one = GradedElement.scalar(GENS, 4, Fraction(1))
    with pytest.raises(NonNilpotentInput):
        graded_exp(one)


def test_graded_invert():
    x = GradedElement.generator(GENS, 4, "x")
    one = GradedElement.scalar(GENS, 4, Fraction(1))
    u = one + x
    assert graded_mul(u, graded_invert(u)) == one


# -- fiber integration ---------------------------------------------------------

def test_fiber_integrate_projective_style():
    gens = (("x", 2), ("b", 2))
    table = IntegrationTable(("x",), 2, {(2,): Fraction(1)})
    a = GradedElement(gens, 6, {(2, 0): Fraction(3), (2, 1): Fraction(5), (1, 0): Fraction(7)})
    out = fiber_integrate(a, table)
    assert out.gens == (("b", 2),)
    assert out == GradedElement((("b", 2),), 2, {(0,): Fraction(3), (1,): Fraction(5)})


def test_fiber_integrate_degree_mismatch_annihilates():
    gens = (("x", 2),)
    table = IntegrationTable(("x",), 1, {(1,): Fraction(1)})
    one = GradedElement.scalar(gens, 2, Fraction(1))
    assert not fiber_integrate(one, table)


def test_fiber_integrate_missing_entry():
    gens = (("x", 2), ("y", 2))
    table = IntegrationTable(("x", "y"), 1, {(1, 0): Fraction(1)})
    y = GradedElement.generator(gens, 2, "y")
    with pytest.raises(MissingTableEntry):
        fiber_integrate(y, table)


def test_fiber_integrate_point():
    gens = (("b", 2),)
    table = IntegrationTable((), 0, {})
    a = GradedElement(gens, 4, {(0,): Fraction(2), (1,): Fraction(-1)})
    assert fiber_integrate(a, table) == a


def test_fiber_integrate_linear():
    rng = random.Random(29)
    gens = (("x", 2), ("b", 2))
    table = IntegrationTable(("x",), 1, {(1,): Fraction(2)})
    for _ in range(20):
        a = GradedElement(gens, 4, {(i, j): Fraction(rng.randrange(-3, 4))
                                    for i in range(3) for j in range(3)})
        b = GradedElement(gens, 4, {(i, j): Fraction(rng.randrange(-3, 4))
                                    for i in range(3) for j in range(3)})
        assert fiber_integrate(a + b, table) == fiber_integrate(a, table) + fiber_integrate(b, table)


# -- truncation bookkeeping ----------------------------------------------------

def test_truncation_propagates_min():
    a = q_int({0: 1, 1: 1}, 16)
    b = q_int({0: 1}, 8)
    assert series_mul(a, b).n8 == 8
    assert (a + b).n8 == 8


def test_shift_and_coefficient_access():
    a = q_int({0: 1}, 16).shift_q8(-3)
    assert a.c == {-3: Fraction(1)}
    assert a.n8 == 13
