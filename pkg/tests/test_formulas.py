import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mlqpasep.formulas import (
    C_count,
    T_bruteforce,
    T_gt_formula,
    T_lt_formula,
    W_bruteforce,
    W_formula,
    W_from_tau,
    c0_formula,
    case_mlqs,
    cq_formula,
    cq_via_pie,
    eta_bruteforce,
    eta_formula,
    eta_mlq_count,
    swap_first_columns,
    tau_formula,
)
from mlqpasep.markov import stationary, two_point
from mlqpasep.mlq import SpeciesCount
from mlqpasep.qcore import DomainError, binom

unit_q = st.fractions(min_value=0, max_value=1, max_denominator=30)
open_q = st.fractions(min_value=F(1, 30), max_value=1, max_denominator=30)


def pairs(n):
    return st.tuples(st.integers(1, n), st.integers(1, n)).filter(lambda ij: ij[0] != ij[1])


@pytest.mark.parametrize("n, i, j, value", [(3, 2, 1, F(1, 9)), (3, 1, 2, F(2, 9)), (4, 1, 3, F(1, 16))])
def test_c0_values(n, i, j, value):
    assert c0_formula(n, i, j) == value


@pytest.mark.parametrize("n", range(2, 8))
def test_c0_is_a_distribution_on_pairs(n):
    total = sum(c0_formula(n, i, j) for i, j in itertools.permutations(range(1, n + 1), 2))
    assert total == 1


def test_same_label_rejected():
    with pytest.raises(DomainError):
        c0_formula(3, 2, 2)
    with pytest.raises(DomainError):
        cq_formula(3, 1, 4, F(1, 2))


def test_cq_three_sites():
    q = F(1, 2)
    assert cq_formula(3, 2, 1, q) == F(4, 27) == cq_via_pie(3, 2, 1, q)
    for q in (F(0), F(1, 5), F(1)):
        assert cq_formula(3, 2, 1, q) == (1 + 2 * q) / (9 * (1 + q))


def test_printed_variant_domain():
    with pytest.raises(DomainError, match="printed form undefined at q=0"):
        cq_formula(4, 1, 2, F(0), "printed")
    with pytest.raises(DomainError):
        cq_formula(4, 1, 2, F(1, 2), "misprint")
    # for i > j both variants coincide
    assert cq_formula(4, 3, 1, F(0), "printed") == cq_formula(4, 3, 1, F(0))


def test_printed_variant_disagrees_with_chain():
    q = F(1, 2)
    c = two_point(stationary(SpeciesCount.iden(4), q))
    assert cq_formula(4, 1, 2, q, "printed") != c[1, 2]
    assert cq_formula(4, 1, 2, q, "corrected") == c[1, 2]


@given(st.integers(2, 12).flatmap(lambda n: st.tuples(st.just(n), pairs(n))))
def test_q_limits(args):
    n, (i, j) = args
    assert cq_formula(n, i, j, F(0)) == c0_formula(n, i, j)
    assert cq_formula(n, i, j, F(1)) == F(1, n * (n - 1))


@given(st.integers(2, 10).flatmap(lambda n: st.tuples(st.just(n), pairs(n))), unit_q)
def test_formula_equals_inclusion_exclusion(args, q):
    n, (i, j) = args
    assert cq_formula(n, i, j, q) == cq_via_pie(n, i, j, q)


@given(st.integers(2, 9), unit_q)
def test_correlations_sum_to_one(n, q):
    assert sum(cq_formula(n, i, j, q) for i, j in itertools.permutations(range(1, n + 1), 2)) == 1


@given(st.integers(2, 9), open_q)
def test_row_marginals(n, q):
    # site 2 is uniform over the remaining labels once site 1 is fixed, on average
    for i in range(1, n + 1):
        assert sum(cq_formula(n, i, j, q) for j in range(1, n + 1) if j != i) == F(1, n)


# -- T and its oracles ------------------------------------------------------


def test_T_examples():
    assert T_bruteforce(">", 0, 1, 4, F(1, 2)) == F(1, 4) == T_gt_formula(0, 1, 4, F(1, 2))
    assert T_bruteforce("<", 1, 1, 3, F(1, 2)) == T_lt_formula(1, 1, 3, F(1, 2))
    assert T_gt_formula(2, 2, 4, F(1, 3)) == 0
    assert T_gt_formula(2, 0, 5, F(1, 3)) == 0 == T_bruteforce(">", 2, 0, 5, F(1, 3))


@pytest.mark.parametrize("n", range(2, 6))
@pytest.mark.parametrize("q", [F(0), F(2, 3)])
def test_T_against_chain(n, q):
    for s in range(n + 1):
        for t in range(n - s + 1):
            assert T_bruteforce(">", s, t, n, q) == T_gt_formula(s, t, n, q)
            assert T_bruteforce("<", s, t, n, q) == T_lt_formula(s, t, n, q)


def test_T_domain():
    for bad in [(-1, 0, 3), (2, 2, 3), (0, 0, 1)]:
        with pytest.raises(DomainError):
            T_gt_formula(*bad, F(1, 2))
    with pytest.raises(DomainError):
        T_bruteforce("=", 1, 1, 3, F(1, 2))


# -- eta --------------------------------------------------------------------


def test_eta_values():
    assert eta_formula(1, 2, 4) == 2
    assert eta_formula(2, 1, 6) == 10
    assert C_count(1, 2, 4) == 3 == eta_mlq_count(1, 2, 4)
    for q in (F(1, 3), F(1, 2), F(2, 3)):
        assert eta_bruteforce(1, 2, 4, q) == 2
    assert eta_bruteforce(2, 1, 6, F(1, 2)) == 10


@pytest.mark.parametrize("args", [(1, 1, 2), (0, 1, 3), (1, 0, 3)])
def test_eta_domain(args):
    with pytest.raises(DomainError):
        eta_formula(*args)
    with pytest.raises(DomainError):
        eta_bruteforce(*args, F(1, 2))


@pytest.mark.parametrize("k", range(3, 7))
def test_eta_mlq_counts(k):
    for s in range(1, k):
        for t in range(1, k - 2 * s + 1):
            assert eta_mlq_count(s, t, k) == C_count(s, t, k)


# -- tau and W --------------------------------------------------------------


def test_tau_values():
    assert tau_formula("A", 1, 2, 5, F(1, 3)) == eta_formula(1, 2, 4) == 2
    assert tau_formula("B", 2, 1, 6, F(0)) == 0
    assert tau_formula("D", 1, 1, 4, F(1, 2)) == F(4, 3)
    # no top-row particles: every placement with site 1 occupied below starts with 2
    assert tau_formula("A", 0, 2, 5, F(1, 2)) == binom(3, 1)
    with pytest.raises(DomainError):
        tau_formula("C", 1, 1, 4, F(1, 2))
    with pytest.raises(DomainError):
        tau_formula("B", 0, 1, 4, F(1, 2))


def test_W_values():
    assert W_formula("A", 1, 1, 4, F(1, 2)) == F(1, 8) == W_bruteforce("A", 1, 1, 4, F(1, 2))
    n, t = 5, 2
    assert W_formula("A", 0, t, n, F(1, 3)) == F(t * n * (n - t), n * n * (n - 1))
    assert W_formula("B", 0, t, n, F(1, 3)) == 0
    assert W_bruteforce("B", 2, 0, 4, F(1, 2)) == 0
    with pytest.raises(DomainError):
        W_formula("E", 1, 1, 4, F(1, 2))


@settings(max_examples=80)
@given(st.integers(2, 9).flatmap(lambda n: st.tuples(
    st.just(n), st.integers(0, n - 1).flatmap(lambda s: st.tuples(st.just(s), st.integers(0, n - 1 - s))))),
    unit_q, st.sampled_from("ABD"))
def test_W_rebuilt_from_tau(args, q, kind):
    n, (s, t) = args
    if kind != "A" and s == 0:
        assert W_formula(kind, s, t, n, q) == 0
        return
    assert W_from_tau(kind, s, t, n, q) == W_formula(kind, s, t, n, q)


@given(st.integers(2, 9).flatmap(lambda n: st.tuples(
    st.just(n), st.integers(0, n).flatmap(lambda s: st.tuples(st.just(s), st.integers(0, n - s))))), unit_q)
def test_W_sums_to_T(args, q):
    n, (s, t) = args
    assert W_formula("A", s, t, n, q) + W_formula("B", s, t, n, q) == T_gt_formula(s, t, n, q)
    assert W_formula("C", s, t, n, q) + W_formula("D", s, t, n, q) == T_lt_formula(s, t, n, q)


def test_case_mlqs_partition_by_swap():
    # swapping the first two columns maps case A onto C and B onto D
    for kind, image in (("A", "C"), ("B", "D")):
        src = set(case_mlqs(kind, 1, 1, 4))
        dst = set(case_mlqs(image, 1, 1, 4))
        assert {swap_first_columns(M) for M in src} == dst


def test_case_normalization():
    s, t, n = 1, 2, 5
    total = sum(1 for kind in "ABCD" for _ in case_mlqs(kind, s, t, n))
    assert total < binom(n, s) * binom(n, s + t)
