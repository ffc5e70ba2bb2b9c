from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from padicforms.errors import DivisionByZero, FormatError, NegativeValuation, PrecisionExhausted
from padicforms.padic import PadicScalar, arith, from_rational, parse_scalar, reduce_mod, valuation, working_precision


def S(n, p=2):
    return PadicScalar.from_int(n, p)


@pytest.mark.parametrize("n,p,v", [(8, 2, 3), (1, 2, 0), (-15, 2, 0), (9, 3, 2), (0, 5, float("inf"))])
def test_valuation(n, p, v):
    assert valuation(S(n, p)) == v


def test_arith_examples():
    x = arith("mul", S(2), S(6))
    assert (x.val, x.unit) == (2, 3)
    assert arith("add", S(1), S(-1)).is_zero
    y = arith("add", S(2), S(2))
    assert (y.val, y.unit) == (2, 1)
    assert arith("div", S(6), S(3)).to_fraction() == 2


def test_division_by_zero():
    with pytest.raises(DivisionByZero):
        S(1) / S(0)
    with pytest.raises(ZeroDivisionError):
        S(1) / S(0)


@pytest.mark.parametrize("num,den,p,val,unit", [(12, 1, 2, 2, 3), (1, 2, 2, -1, 1), (9, 1, 3, 2, 1)])
def test_from_rational(num, den, p, val, unit):
    x = from_rational(num, den, p)
    assert (x.val, x.unit) == (val, unit)


@pytest.mark.parametrize("n,p,k,r", [(-15, 2, 4, 1), (16, 2, 4, 0), (7, 3, 2, 7)])
def test_reduce_mod(n, p, k, r):
    assert reduce_mod(S(n, p), k) == r


def test_reduce_mod_errors():
    with pytest.raises(NegativeValuation):
        reduce_mod(from_rational(1, 2, 2), 3)
    with pytest.raises(PrecisionExhausted):
        reduce_mod(PadicScalar(2, 0, 1, 4), 8)


def test_zero_marked_keeps_absolute_precision():
    z = PadicScalar(2, 0, 1, 10) - PadicScalar(2, 0, 1, 10)
    assert z.is_zero and z.absprec == 10
    assert z.token() == "inf:0:10"


def test_cancellation_loses_relative_precision():
    a = PadicScalar(2, 0, 5, 8)
    b = PadicScalar(2, 0, 1, 8)
    c = a - b
    assert c.val == 2 and c.absprec == 8


def test_tokens_round_trip():
    for n in (1, 6, -40, 1024):
        x = S(n)
        y = parse_scalar(x.token(), 2)
        assert y == x
    assert parse_scalar("3/4", 2).to_fraction() == Fraction(3, 4)
    assert parse_scalar("inf:0:12", 2).is_zero
    with pytest.raises(FormatError):
        parse_scalar("1:2:8", 2)
    with pytest.raises(FormatError):
        parse_scalar("abc", 2)


def test_working_precision_context():
    with working_precision(10):
        assert S(3).prec == 10
    assert S(3).prec == 64


rationals = st.fractions(min_value=-10**6, max_value=10**6, max_denominator=10**4)


@settings(max_examples=200, deadline=None)
@given(rationals, rationals, st.sampled_from([2, 3, 5]))
def test_round_trip_against_exact_arithmetic(a, b, p):
    x = from_rational(a.numerator, a.denominator, p)
    y = from_rational(b.numerator, b.denominator, p)
    for op, exact in (("add", a + b), ("sub", a - b), ("mul", a * b)):
        r = arith(op, x, y)
        if exact == 0:
            assert r.is_zero
            continue
        e = from_rational(exact.numerator, exact.denominator, p)
        assert r.val == e.val
        k = r.prec
        assert r.unit % p**k == e.unit % p**k
