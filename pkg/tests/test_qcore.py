import math
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mlqpasep.qcore import DomainError, as_q, binom, binom0, fmt, multinom, parse_rational, q_factorial, q_int

unit_q = st.fractions(min_value=0, max_value=1, max_denominator=50)


@pytest.mark.parametrize(
    "k, q, expected",
    [(0, F(1, 2), 0), (3, F(1, 2), F(7, 4)), (5, F(0), 1), (1, F(0), 1), (4, F(1), 4)],
)
def test_q_int_values(k, q, expected):
    assert q_int(k, q) == expected


@pytest.mark.parametrize("k, q, expected", [(0, F(1, 3), 1), (3, F(1, 2), F(21, 8)), (5, F(1), 120)])
def test_q_factorial_values(k, q, expected):
    assert q_factorial(k, q) == expected


def test_binomials():
    assert binom(4, 2) == 6
    assert multinom(3, (1, 2, 0)) == 3
    assert multinom(5, (2, 2, 1)) == 30
    assert binom0(2, 3) == 0 and binom0(-1, 0) == 0 and binom0(0, 0) == 1


@pytest.mark.parametrize("call", [lambda: binom(3, 4), lambda: binom(3, -1), lambda: multinom(4, (1, 2)),
                                  lambda: multinom(3, (4, -1)), lambda: q_int(-1, F(1, 2)),
                                  lambda: q_factorial(-2, F(1))])
def test_out_of_range(call):
    with pytest.raises(DomainError):
        call()


@given(st.integers(0, 30), unit_q)
def test_q_int_geometric_sum(k, q):
    assert q_int(k, q) * (1 - q) == 1 - q**k


@given(st.integers(0, 12), unit_q)
def test_q_factorial_recurrence(k, q):
    assert q_factorial(k + 1, q) == q_factorial(k, q) * q_int(k + 1, q)


@given(st.integers(0, 40), st.data())
def test_binom_symmetry(n, data):
    k = data.draw(st.integers(0, n))
    assert binom(n, k) == binom(n, n - k) == binom0(n, k)


@given(st.lists(st.integers(0, 6), min_size=1, max_size=5))
def test_multinom_is_product_of_binomials(parts):
    n = sum(parts)
    expected, left = 1, n
    for p in parts:
        expected *= math.comb(left, p)
        left -= p
    assert multinom(n, parts) == expected


@given(st.fractions(max_denominator=1000))
def test_fmt_roundtrip(x):
    assert parse_rational(fmt(x)) == x


@pytest.mark.parametrize("text, value", [("7/4", F(7, 4)), ("0", F(0)), ("-3", F(-3)), (" 2/4 ", F(1, 2))])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("text", ["2/0", "0.5", "", "1/2/3", "a"])
def test_parse_rational_rejects(text):
    with pytest.raises(DomainError):
        parse_rational(text)


def test_fmt_canonical():
    assert fmt(F(14, 8)) == "7/4"
    assert fmt(F(3, -6)) == "-1/2"
    assert fmt(F(0)) == "0" and fmt(1) == "1"


def test_as_q():
    assert as_q("1/2") == F(1, 2)
    assert as_q(1) == 1
    for bad in ("3/2", -1, 0.5, True):
        with pytest.raises(DomainError):
            as_q(bad)
