"""Closed forms for two-point correlations of the multispecies PASEP, plus
brute-force counterparts computed from the MLQ linking and the exact chain.

Notation: for the three-label type ``(s, t, n - s - t)``,
``T_gt(s, t)`` is the stationary probability that sites 1, 2 read (3, 2) and
``T_lt(s, t)`` that they read (2, 3).  The two-point correlation
``c(n, i, j)`` of type ``iden(n)`` is recovered from either by
inclusion–exclusion over the lumped label classes.

For ``i < j`` the closed form is available in two variants:

``"printed"``
    the leading term is the q = 0 correlation (three-case form) and the
    third correction term carries ``q**(i - j)``, a negative power.
``"corrected"``
    the leading term is ``1/n**2`` and the third correction carries
    ``q**(j - i)``.  This is what the inclusion–exclusion composition yields.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Literal

from .markov import stationary
from .mlq import MultilineQueue, SpeciesCount, enumerate_mlqs, link_distribution
from .qcore import DomainError, binom, binom0, multinom, q_int

Variant = Literal["printed", "corrected"]
CaseKind = Literal["A", "B", "C", "D"]

VARIANTS = ("printed", "corrected")
CASE_KINDS = ("A", "B", "C", "D")

# first two columns as (row 1, row 2) occupancy at sites 1 and 2, and the target prefix
CASE_PATTERNS = {
    "A": (((0, 0), (0, 1)), (3, 2)),
    "B": (((1, 0), (0, 1)), (3, 2)),
    "C": (((0, 1), (0, 0)), (2, 3)),
    "D": (((0, 1), (1, 0)), (2, 3)),
}


def _check_pair(n: int, i: int, j: int) -> None:
    if not (1 <= i <= n and 1 <= j <= n):
        raise DomainError(f"labels ({i}, {j}) out of range for n = {n}")
    if i == j:
        raise DomainError("type iden has one particle per label, so i must differ from j")


def _den(n: int) -> int:
    return n * n * (n - 1)


def c0_formula(n: int, i: int, j: int) -> Fraction:
    """Two-point correlation of the multispecies TASEP (q = 0)."""
    _check_pair(n, i, j)
    if i > j:
        return Fraction(i - j, n * binom(n, 2))
    if i == j - 1:
        return Fraction(1, n * n) + Fraction(i * (n - i), _den(n))
    return Fraction(1, n * n)


def cq_formula(n: int, i: int, j: int, q: Fraction, variant: Variant = "corrected") -> Fraction:
    _check_pair(n, i, j)
    if variant not in VARIANTS:
        raise DomainError(f"unknown variant {variant!r}")
    q = Fraction(q)
    D = _den(n)
    if i > j:
        d = i - j
        return (
            c0_formula(n, i, j)
            - Fraction((d + 2) * (j - 1) * (n - i)) * q * q_int(d + 1, q) / (D * q_int(d + 2, q))
            - Fraction(j * d * (n - i + 1)) * q * q_int(d - 1, q) / (D * q_int(d, q))
            + Fraction((d + 1) * (2 * j * (n - i) + i + j - n - 1)) * q * q_int(d, q) / (D * q_int(d + 1, q))
        )
    d = j - i
    if variant == "printed":
        if q == 0:
            raise DomainError("printed form undefined at q=0")
        lead = c0_formula(n, i, j)
        third_power = q ** (i - j)
    else:
        lead = Fraction(1, n * n)
        third_power = q**d
    return (
        lead
        + Fraction(i * d * (n - j + 1)) * q ** (d - 1) / (D * q_int(d, q))
        + Fraction((i - 1) * (d + 2) * (n - j)) * q ** (d + 1) / (D * q_int(d + 2, q))
        - Fraction((d + 1) * (2 * i * (n - j) + i + j - n - 1)) * third_power / (D * q_int(d + 1, q))
    )


def _check_st(s: int, t: int, n: int) -> None:
    if s < 0 or t < 0 or s + t > n or n < 2:
        raise DomainError(f"need 0 <= s, t, s + t <= n and n >= 2; got (s, t, n) = ({s}, {t}, {n})")


def T_gt_formula(s: int, t: int, n: int, q: Fraction) -> Fraction:
    _check_st(s, t, n)
    q = Fraction(q)
    D = _den(n)
    return Fraction(t * (n - s) * (n - s - t), D) + Fraction(s * (t + 1) * (n - s - t)) * q * q_int(t, q) / (
        D * q_int(t + 1, q)
    )


def T_lt_formula(s: int, t: int, n: int, q: Fraction) -> Fraction:
    _check_st(s, t, n)
    q = Fraction(q)
    D = _den(n)
    return Fraction((s + t * n) * (n - s - t), D) - Fraction(s * (t + 1) * (n - s - t)) * q**t / (D * q_int(t + 1, q))


def cq_via_pie(n: int, i: int, j: int, q: Fraction) -> Fraction:
    """Correlation assembled from the T closed forms by inclusion–exclusion."""
    _check_pair(n, i, j)
    if i > j:
        T, a, b = T_gt_formula, j, i - j
    else:
        T, a, b = T_lt_formula, i, j - i
    return T(a - 1, b, n, q) - T(a, b - 1, n, q) - T(a - 1, b + 1, n, q) + T(a, b, n, q)


def T_bruteforce(order: str, s: int, t: int, n: int, q: Fraction, cap: int = 10**5) -> Fraction:
    """Read T_gt (``order == ">"``) or T_lt (``"<"``) off the exact chain of type (s, t, n-s-t)."""
    _check_st(s, t, n)
    prefix = {">": (3, 2), "<": (2, 3)}.get(order)
    if prefix is None:
        raise DomainError(f"order must be '>' or '<', got {order!r}")
    return stationary(SpeciesCount.mst(s, t, n), Fraction(q), cap).prefix_probability(prefix)


# ---------------------------------------------------------------------------
# eta: no-trivial-link MLQs starting with an empty/occupied first column
# ---------------------------------------------------------------------------


def C_count(s: int, t: int, k: int) -> int:
    """Number of two-row MLQs of type (s, t, k-s-t), no doubly occupied column, first column (hole/particle)."""
    return multinom(k - 1, (s, s + t - 1, k - 2 * s - t))


def eta_formula(s: int, t: int, k: int) -> Fraction:
    if s < 1 or t < 1 or 2 * s + t > k:
        raise DomainError(f"eta needs s, t >= 1 and 2s + t <= k; got ({s}, {t}, {k})")
    return Fraction(t, s + t) * C_count(s, t, k)


def _eta_extended(s: int, t: int, k: int) -> Fraction:
    """eta with the empty cases counted as zero and s = 0 allowed."""
    if t < 1 or s < 0 or 2 * s + t > k:
        return Fraction(0)
    return Fraction(t, s + t) * C_count(s, t, k)


def _theta_starts(s: int, t: int, k: int):
    for M in enumerate_mlqs(SpeciesCount.mst(s, t, k)):
        top, bottom = set(M.rows[0]), set(M.rows[1])
        if top & bottom or 0 in top or 0 not in bottom:
            continue
        yield M


def eta_bruteforce(s: int, t: int, k: int, q: Fraction) -> Fraction:
    """Total weight of linkings projecting to a word that starts with 2."""
    if s < 1 or t < 1 or 2 * s + t > k:
        raise DomainError(f"eta needs s, t >= 1 and 2s + t <= k; got ({s}, {t}, {k})")
    q = Fraction(q)
    total = Fraction(0)
    for M in _theta_starts(s, t, k):
        total += sum((p for w, p in link_distribution(M, q).items() if w[0] == 2), Fraction(0))
    return total


def eta_mlq_count(s: int, t: int, k: int) -> int:
    return sum(1 for _ in _theta_starts(s, t, k))


# ---------------------------------------------------------------------------
# case weights
# ---------------------------------------------------------------------------


def tau_formula(kind: CaseKind, s: int, t: int, n: int, q: Fraction) -> Fraction:
    """Weight of the no-trivial-link MLQs of case ``kind`` whose word starts with the case prefix.

    Empty configuration classes give zero, which is what the sums over
    trivial-column counts need at their boundary.
    """
    q = Fraction(q)
    if kind == "A":
        if s < 0 or t < 0:
            raise DomainError(f"tau A needs s, t >= 0; got ({s}, {t})")
        return _eta_extended(s, t, n - 1)
    if kind not in ("B", "D"):
        raise DomainError(f"tau is defined for kinds A, B, D; got {kind!r}")
    if s < 1 or t < 0:
        raise DomainError(f"tau {kind} needs s >= 1 and t >= 0; got ({s}, {t})")
    prefactor = Fraction(t + 1, s + t) * binom0(n - 2, s - 1) * binom0(n - s - 1, s + t - 1)
    if kind == "B":
        return prefactor * (1 - 1 / q_int(t + 1, q))
    return prefactor * (1 - q**t / q_int(t + 1, q))


def W_formula(kind: CaseKind, s: int, t: int, n: int, q: Fraction) -> Fraction:
    """Case weight normalized by binom(n, s) * binom(n, s + t)."""
    _check_st(s, t, n)
    q = Fraction(q)
    D = _den(n)
    if kind in ("A", "C"):
        return Fraction(t * (n - s) * (n - s - t), D)
    if kind == "B":
        return Fraction(s * (t + 1) * (n - s - t), D) * (1 - 1 / q_int(t + 1, q))
    if kind == "D":
        return Fraction(s * (t + 1) * (n - s - t), D) * (1 - q**t / q_int(t + 1, q))
    raise DomainError(f"unknown case kind {kind!r}")


def W_from_tau(kind: CaseKind, s: int, t: int, n: int, q: Fraction) -> Fraction:
    """Normalized case weight rebuilt from tau by summing over the number of doubly occupied columns."""
    _check_st(s, t, n)
    top = s if kind == "A" else s - 1
    total = sum((binom0(n - 2, i) * tau_formula(kind, s - i, t, n - i, q) for i in range(top + 1)), Fraction(0))
    return total / (binom(n, s) * binom(n, s + t))


def case_mlqs(kind: CaseKind, s: int, t: int, n: int):
    """MLQs of type (s, t, n-s-t) whose first two columns match ``kind``."""
    (col1, col2), _ = CASE_PATTERNS[kind]
    for M in enumerate_mlqs(SpeciesCount.mst(s, t, n)):
        top, bottom = set(M.rows[0]), set(M.rows[1])
        if ((0 in top), (0 in bottom)) == col1 and ((1 in top), (1 in bottom)) == col2:
            yield M


def W_bruteforce(kind: CaseKind, s: int, t: int, n: int, q: Fraction) -> Fraction:
    if kind not in CASE_PATTERNS:
        raise DomainError(f"unknown case kind {kind!r}")
    _check_st(s, t, n)
    q = Fraction(q)
    prefix = CASE_PATTERNS[kind][1]
    total = Fraction(0)
    for M in case_mlqs(kind, s, t, n):
        total += sum((p for w, p in link_distribution(M, q).items() if w[:2] == prefix), Fraction(0))
    return total / (binom(n, s) * binom(n, s + t))


def swap_first_columns(M: MultilineQueue) -> MultilineQueue:
    swap = {0: 1, 1: 0}
    return MultilineQueue(M.N, tuple(tuple(swap.get(a, a) for a in r) for r in M.rows))
