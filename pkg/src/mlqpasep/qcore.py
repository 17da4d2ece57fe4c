"""Exact scalar arithmetic at a fixed rational value of q.

Every weight, probability and closed form in this package is a
:class:`fractions.Fraction`.  ``q`` itself is just a ``Fraction`` in ``[0, 1]``;
:func:`as_q` validates and normalizes user input.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

QParam = Fraction
ExactScalar = Fraction

RationalLike = Union[int, str, Fraction]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/r"`` or a bare integer.  Decimals are rejected."""
    match = _RATIONAL_RE.match(text)
    if match is None:
        raise DomainError(f"not a rational literal: {text!r}")
    num = int(match.group(1))
    den = int(match.group(2)) if match.group(2) is not None else 1
    if den == 0:
        raise DomainError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def as_q(value: RationalLike) -> Fraction:
    """Return ``value`` as an exact q in [0, 1]."""
    if isinstance(value, str):
        q = parse_rational(value)
    elif isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        q = Fraction(value)
    else:
        raise DomainError(f"q must be an exact rational, got {type(value).__name__}")
    if not 0 <= q <= 1:
        raise DomainError(f"q must lie in [0, 1], got {q}")
    return q


def fmt(x: Fraction | int) -> str:
    """Canonical text form: lowest terms, positive denominator, no ``/1``."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


@lru_cache(maxsize=4096)
def q_int(k: int, q: Fraction) -> Fraction:
    """The q-integer ``1 + q + ... + q**(k-1)``; zero for ``k == 0``."""
    if k < 0:
        raise DomainError(f"q_int needs k >= 0, got {k}")
    total = Fraction(0)
    power = Fraction(1)
    for _ in range(k):
        total += power
        power *= q
    return total


def q_factorial(k: int, q: Fraction) -> Fraction:
    if k < 0:
        raise DomainError(f"q_factorial needs k >= 0, got {k}")
    result = Fraction(1)
    for i in range(1, k + 1):
        result *= q_int(i, q)
    return result


def binom(n: int, k: int) -> int:
    if not 0 <= k <= n:
        raise DomainError(f"binom({n}, {k}) out of range")
    return math.comb(n, k)


def multinom(n: int, parts: Iterable[int]) -> int:
    parts = list(parts)
    if any(p < 0 for p in parts) or sum(parts) != n:
        raise DomainError(f"multinom({n}; {parts}) needs nonnegative parts summing to {n}")
    result = math.factorial(n)
    for p in parts:
        result //= math.factorial(p)
    return result


def binom0(n: int, k: int) -> int:
    """Binomial coefficient that counts an empty family as zero (any ``k`` outside ``[0, n]``)."""
    if n < 0 or k < 0 or k > n:
        return 0
    return math.comb(n, k)
