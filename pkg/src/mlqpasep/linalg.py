"""Sparse Gaussian elimination over the rationals."""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Mapping, Sequence, Tuple


class SingularSystem(ArithmeticError):
    pass


def solve_sparse(rows: Sequence[Mapping[int, Fraction]], rhs: Sequence[Fraction], ncols: int) -> List[Fraction]:
    """Solve the square system ``rows · x = rhs`` exactly.

    ``rows[i]`` maps column index to coefficient.  Pivots are picked by the
    Markowitz criterion (fewest row entries times column entries) to limit
    fill-in.
    """
    if len(rows) != ncols:
        raise ValueError("system must be square")
    A: List[Dict[int, Fraction]] = [{c: Fraction(v) for c, v in r.items() if v} for r in rows]
    b = [Fraction(v) for v in rhs]
    col_rows: Dict[int, set] = {c: set() for c in range(ncols)}
    for i, r in enumerate(A):
        for c in r:
            col_rows[c].add(i)

    active = set(range(len(A)))
    pivots: List[Tuple[int, int]] = []
    while active:
        best = None
        for i in active:
            r = A[i]
            if not r:
                raise SingularSystem(f"row {i} vanished during elimination")
            rlen = len(r) - 1
            for c in r:
                cost = rlen * (len(col_rows[c]) - 1)
                if best is None or cost < best[0]:
                    best = (cost, i, c)
            if best[0] == 0:
                break
        _, p, pc = best
        active.discard(p)
        prow = A[p]
        pval = prow[pc]
        for c in prow:
            col_rows[c].discard(p)
        for i in list(col_rows[pc]):
            r = A[i]
            f = r[pc] / pval
            for c, v in prow.items():
                nv = r.get(c, 0) - f * v
                if nv:
                    if c not in r:
                        col_rows[c].add(i)
                    r[c] = nv
                elif c in r:
                    del r[c]
                    col_rows[c].discard(i)
            b[i] -= f * b[p]
        pivots.append((p, pc))

    x: Dict[int, Fraction] = {}
    for p, pc in reversed(pivots):
        r = A[p]
        acc = b[p]
        for c, v in r.items():
            if c != pc:
                acc -= v * x[c]
        x[pc] = acc / r[pc]
    return [x[c] for c in range(ncols)]


def stationary_vector(size: int, rates: Mapping[Tuple[int, int], Fraction]) -> List[Fraction]:
    """Probability vector ``pi`` with ``pi · G = 0`` for the generator given by off-diagonal ``rates``.

    The balance equation of state 0 is replaced by the normalization
    ``sum(pi) = 1``; the chain must be irreducible.
    """
    cols: List[Dict[int, Fraction]] = [dict() for _ in range(size)]
    outflow = [Fraction(0)] * size
    for (i, j), r in rates.items():
        if i == j or not r:
            continue
        cols[j][i] = cols[j].get(i, 0) + r
        outflow[i] += r
    for i in range(size):
        cols[i][i] = cols[i].get(i, 0) - outflow[i]
    cols[0] = {i: Fraction(1) for i in range(size)}
    rhs = [Fraction(0)] * size
    rhs[0] = Fraction(1)
    return solve_sparse(cols, rhs, size)
