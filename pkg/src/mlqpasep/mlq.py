"""Multiline queues and the q-bully path linking algorithm.

Sites are 0-based in the Python API (``word[k]`` is the label of ring site
``k + 1``).  Text and JSON dumps use 1-based rows and sites.

A multiline queue of type ``m = (m_1, ..., m_{n+1})`` has ``n`` rows on a ring
of ``N = sum(m)`` sites; row ``k`` holds ``S_k = m_1 + ... + m_k`` particles.
Linking proceeds row by row.  In row ``r`` the particles are handled in
increasing order of the label they inherited from row ``r - 1``; within one
label class every particle with a free particle directly below takes it
(a trivial link of weight 1), and the rest choose among the free particles of
row ``r + 1`` in cyclic order to the right, the ``i``-th of ``t`` choices
carrying weight ``q**(i-1) / [t]_q``.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from .qcore import DomainError, q_int

Word = Tuple[int, ...]
Order = Union[None, str, Sequence[int]]

DEFAULT_MLQ_CAP = 10**7
DEFAULT_LINK_CAP = 10**6


class CapExceeded(RuntimeError):
    """An enumeration would exceed its configured size cap."""


# ---------------------------------------------------------------------------
# types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpeciesCount:
    """Particle counts per label; the last entry counts holes."""

    counts: Tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        object.__setattr__(self, "counts", counts)
        if len(counts) < 2:
            raise DomainError("a type needs at least two entries")
        if any(c < 0 for c in counts):
            raise DomainError(f"negative count in {counts}")
        if sum(counts) < 1:
            raise DomainError("a type needs at least one site")

    @classmethod
    def iden(cls, n: int) -> "SpeciesCount":
        """``(1, ..., 1)`` with ``n`` entries: one particle of each label on ``n`` sites."""
        if n < 2:
            raise DomainError(f"iden needs n >= 2, got {n}")
        return cls((1,) * n)

    @classmethod
    def mst(cls, s: int, t: int, n: int) -> "SpeciesCount":
        """The three-label type ``(s, t, n - s - t)``."""
        if s < 0 or t < 0 or s + t > n:
            raise DomainError(f"invalid (s, t, n) = ({s}, {t}, {n})")
        return cls((s, t, n - s - t))

    @classmethod
    def parse(cls, text: str) -> "SpeciesCount":
        try:
            counts = tuple(int(x) for x in text.split(","))
        except ValueError:
            raise DomainError(f"bad type literal {text!r}") from None
        return cls(counts)

    @property
    def N(self) -> int:
        return sum(self.counts)

    @property
    def n(self) -> int:
        """Number of particle labels, which is also the number of MLQ rows."""
        return len(self.counts) - 1

    @property
    def row_sums(self) -> Tuple[int, ...]:
        return tuple(itertools.accumulate(self.counts[:-1]))

    def mlq_count(self) -> int:
        return math.prod(math.comb(self.N, s) for s in self.row_sums)

    def state_count(self) -> int:
        result = math.factorial(self.N)
        for c in self.counts:
            result //= math.factorial(c)
        return result

    def words(self) -> Iterator[Word]:
        """All words of this type in lexicographic order."""
        remaining = list(self.counts)
        word: List[int] = []

        def rec():
            if len(word) == self.N:
                yield tuple(word)
                return
            for label, left in enumerate(remaining):
                if left:
                    remaining[label] -= 1
                    word.append(label + 1)
                    yield from rec()
                    word.pop()
                    remaining[label] += 1

        yield from rec()

    def __str__(self):
        return ",".join(map(str, self.counts))


@dataclass(frozen=True)
class MultilineQueue:
    """Occupied sites of each row, top to bottom."""

    N: int
    rows: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(sorted(set(r))) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        if not rows:
            raise DomainError("an MLQ needs at least one row")
        for r in rows:
            if any(not 0 <= a < self.N for a in r):
                raise DomainError(f"site out of range in row {r}")
        sizes = [len(r) for r in rows]
        if sizes != sorted(sizes):
            raise DomainError(f"row sizes must be nondecreasing, got {sizes}")

    @classmethod
    def from_text(cls, lines: Sequence[str]) -> "MultilineQueue":
        """Build from lines like ``".#.."`` (``#`` = particle, ``.`` = hole)."""
        lines = [ln.strip() for ln in lines if ln.strip()]
        if not lines or len({len(ln) for ln in lines}) != 1 or any(set(ln) - {".", "#"} for ln in lines):
            raise DomainError(f"bad MLQ text {lines!r}")
        N = len(lines[0])
        return cls(N, tuple(tuple(k for k, ch in enumerate(ln) if ch == "#") for ln in lines))

    def to_text(self) -> List[str]:
        out = []
        for r in self.rows:
            occ = set(r)
            out.append("".join("#" if k in occ else "." for k in range(self.N)))
        return out

    @property
    def species(self) -> SpeciesCount:
        sizes = [len(r) for r in self.rows]
        counts = [sizes[0]] + [b - a for a, b in zip(sizes, sizes[1:])] + [self.N - sizes[-1]]
        return SpeciesCount(tuple(counts))

    def __str__(self):
        return "\n".join(self.to_text())


@dataclass(frozen=True)
class Link:
    """A link from ``from_site`` in ``row`` (1-based) to ``to_site`` in ``row + 1``.

    Trivial (straight) links have ``rank == availability == 0`` and weight 1.
    """

    row: int
    from_site: int
    to_site: int
    rank: int
    availability: int
    weight: Fraction

    @property
    def trivial(self) -> bool:
        return self.from_site == self.to_site

    def triple(self) -> List[int]:
        return [self.row, self.from_site + 1, self.to_site + 1]


@dataclass(frozen=True)
class LinkedMLQ:
    base: MultilineQueue
    links: Tuple[Link, ...]
    weight: Fraction
    word: Word

    def to_json(self) -> dict:
        from .qcore import fmt

        return {
            "mlq": self.base.to_text(),
            "links": [lk.triple() for lk in self.links],
            "weight": fmt(self.weight),
            "word": list(self.word),
        }


# ---------------------------------------------------------------------------
# linking
# ---------------------------------------------------------------------------


def availability_order(a: int, available: Iterable[int], N: int) -> List[int]:
    """Sort free sites by cyclic distance ``(b - a) mod N`` to the right of ``a``."""
    sites = list(available)
    if not sites:
        raise RuntimeError("linking invariant violated: no available particle")
    return sorted(sites, key=lambda b: (b - a) % N)


@lru_cache(maxsize=1024)
def _choice_weights(t: int, q: Fraction) -> Tuple[Fraction, ...]:
    denom = q_int(t, q)
    return tuple(q**i / denom for i in range(t))


def _order_key(order: Order, N: int) -> Callable[[int], int]:
    if order is None or order == "ltr":
        return lambda a: a
    if order == "rtl":
        return lambda a: -a
    if isinstance(order, str):
        raise DomainError(f"unknown processing order {order!r}")
    position = {site: k for k, site in enumerate(order)}
    if sorted(position) != list(range(N)):
        raise DomainError("an explicit processing order must be a permutation of the sites")
    return position.__getitem__


def _trivial_mode(trivial: str) -> bool:
    if trivial not in ("first", "inline"):
        raise DomainError(f"trivial must be 'first' or 'inline', got {trivial!r}")
    return trivial == "first"


# a chooser receives (ranked free sites, weights) and returns the (rank, site) pairs to follow
Chooser = Callable[[List[int], Tuple[Fraction, ...]], Iterable[Tuple[int, int]]]


def _choose_all(q: Fraction) -> Chooser:
    if q == 0:
        return lambda ranked, weights: [(1, ranked[0])]
    return lambda ranked, weights: list(enumerate(ranked, start=1))


def _link_row(
    upper: Dict[int, int],
    lower: Sequence[int],
    N: int,
    q: Fraction,
    row: int,
    key: Callable[[int], int],
    choose: Chooser,
    trivial_first: bool = True,
) -> Iterator[Tuple[Tuple[Link, ...], Fraction, Dict[int, int]]]:
    """Yield ``(links, weight, lower_types)`` for each way to link ``row`` into ``row + 1``.

    ``upper`` maps the occupied sites of ``row`` to their labels.  In the
    result, linked particles of ``row + 1`` inherit the label of the particle
    linking to them and unlinked ones get label ``row + 1``.  With
    ``trivial_first`` off, a particle takes the particle directly below only
    if it is still free when its own turn comes.
    """
    classes = sorted(set(upper.values()))
    groups = {c: [a for a in upper if upper[a] == c] for c in classes}

    def by_class(ci, free, links, weight, types):
        if ci == len(classes):
            out = dict(types)
            for b in free:
                out[b] = row + 1
            yield tuple(links), weight, out
            return
        label = classes[ci]
        free = set(free)
        links = list(links)
        types = dict(types)
        pending = []
        for a in sorted(groups[label]):
            if trivial_first and a in free:
                free.discard(a)
                links.append(Link(row, a, a, 0, 0, Fraction(1)))
                types[a] = label
            else:
                pending.append(a)
        pending.sort(key=key)
        yield from nontrivial(ci, label, pending, 0, free, links, weight, types)

    def nontrivial(ci, label, pending, k, free, links, weight, types):
        if k == len(pending):
            yield from by_class(ci + 1, free, links, weight, types)
            return
        a = pending[k]
        if a in free:
            free.discard(a)
            links.append(Link(row, a, a, 0, 0, Fraction(1)))
            types[a] = label
            yield from nontrivial(ci, label, pending, k + 1, free, links, weight, types)
            del types[a]
            links.pop()
            free.add(a)
            return
        ranked = availability_order(a, free, N)
        weights = _choice_weights(len(ranked), q)
        for rank, b in choose(ranked, weights):
            w = weights[rank - 1]
            links.append(Link(row, a, b, rank, len(ranked), w))
            types[b] = label
            free.discard(b)
            yield from nontrivial(ci, label, pending, k + 1, free, links, weight * w, types)
            free.add(b)
            del types[b]
            links.pop()

    yield from by_class(0, set(lower), [], Fraction(1), {})


def _word(types: Dict[int, int], N: int, hole: int) -> Word:
    return tuple(types.get(k, hole) for k in range(N))


def _check_link_cap(M: MultilineQueue, cap: int) -> None:
    bound = 1
    for r in range(len(M.rows) - 1):
        s, s_next = len(M.rows[r]), len(M.rows[r + 1])
        bound *= math.perm(s_next, s)
        if bound > cap:
            raise CapExceeded(f"linking explosion at row {r + 1}: more than {cap} linkings")


def enumerate_linkings(
    M: MultilineQueue,
    q: Fraction,
    order: Order = None,
    cap: int = DEFAULT_LINK_CAP,
    trivial: str = "first",
) -> List[LinkedMLQ]:
    """Every maximal link set of ``M`` with its weight and projected word.

    ``order`` sets the processing order of particles of equal label that
    have no trivial link: ``"ltr"`` (default), ``"rtl"`` or an explicit
    permutation of the sites.  ``trivial="inline"`` makes each particle look
    for a trivial link only at its own turn instead of before everything else.
    At ``q == 0`` only the nearest free particle is ever chosen, so no
    zero-weight linkings are produced.
    """
    _check_link_cap(M, cap)
    N, rows = M.N, M.rows
    n = len(rows)
    key = _order_key(order, N)
    choose = _choose_all(q)
    trivial_first = _trivial_mode(trivial)
    out: List[LinkedMLQ] = []

    def rec(r, types, links, weight):
        if r == n:
            out.append(LinkedMLQ(M, tuple(links), weight, _word(types, N, n + 1)))
            return
        for row_links, w, lower in _link_row(types, rows[r], N, q, r, key, choose, trivial_first):
            rec(r + 1, lower, links + list(row_links), weight * w)

    rec(1, {a: 1 for a in rows[0]}, [], Fraction(1))
    return out


def project(L: LinkedMLQ) -> Word:
    """Recompute the projected word of ``L`` from its links alone."""
    rows, N = L.base.rows, L.base.N
    types = {a: 1 for a in rows[0]}
    incoming: Dict[int, Dict[int, int]] = defaultdict(dict)
    for lk in L.links:
        incoming[lk.row][lk.to_site] = lk.from_site
    for r in range(1, len(rows)):
        lower = {}
        for b in rows[r]:
            src = incoming[r].get(b)
            lower[b] = types[src] if src is not None else r + 1
        types = lower
    return _word(types, N, len(rows) + 1)


def link_distribution(
    M: MultilineQueue,
    q: Fraction,
    order: Order = None,
    cap: int = DEFAULT_LINK_CAP,
    trivial: str = "first",
) -> Dict[Word, Fraction]:
    """Total linking weight per projected word.

    Aggregates row by row: the labelling of row ``r + 1`` depends only on the
    labelling of row ``r``, so partial weights are merged per labelling.
    """
    _check_link_cap(M, cap)
    N, rows = M.N, M.rows
    key = _order_key(order, N)
    choose = _choose_all(q)
    trivial_first = _trivial_mode(trivial)
    dist: Dict[Tuple[Tuple[int, int], ...], Fraction] = {tuple((a, 1) for a in rows[0]): Fraction(1)}
    for r in range(1, len(rows)):
        nxt: Dict[Tuple[Tuple[int, int], ...], Fraction] = defaultdict(Fraction)
        for labels, w in dist.items():
            for _, lw, lower in _link_row(dict(labels), rows[r], N, q, r, key, choose, trivial_first):
                nxt[tuple(sorted(lower.items()))] += w * lw
        dist = nxt
    hole = len(rows) + 1
    out: Dict[Word, Fraction] = defaultdict(Fraction)
    for labels, w in dist.items():
        out[_word(dict(labels), N, hole)] += w
    return dict(out)


# ---------------------------------------------------------------------------
# enumeration, rotation, sampling
# ---------------------------------------------------------------------------


def enumerate_mlqs(m: SpeciesCount, cap: int = DEFAULT_MLQ_CAP) -> Iterator[MultilineQueue]:
    """All MLQs of type ``m``, lexicographic over rows then sites."""
    total = m.mlq_count()
    if total > cap:
        raise CapExceeded(f"enumeration too large: {total} MLQs of type {m} (cap {cap})")
    N = m.N
    choices = [list(itertools.combinations(range(N), s)) for s in m.row_sums]
    for rows in itertools.product(*choices):
        yield MultilineQueue(N, rows)


def rotate_word(word: Sequence[int], d: int) -> Word:
    """Shift a cyclic word ``d`` sites to the right: the label at site k moves to site k + d."""
    N = len(word)
    out = [0] * N
    for k, x in enumerate(word):
        out[(k + d) % N] = x
    return tuple(out)


def rotate_mlq(M: MultilineQueue, d: int) -> MultilineQueue:
    return MultilineQueue(M.N, tuple(tuple((a + d) % M.N for a in r) for r in M.rows))


def rotate_linked(L: LinkedMLQ, d: int) -> LinkedMLQ:
    N = L.base.N
    links = tuple(
        Link(lk.row, (lk.from_site + d) % N, (lk.to_site + d) % N, lk.rank, lk.availability, lk.weight)
        for lk in L.links
    )
    return LinkedMLQ(rotate_mlq(L.base, d), links, L.weight, rotate_word(L.word, d))


def _uniform64(rng: random.Random) -> Fraction:
    return Fraction(rng.getrandbits(64), 1 << 64)


def _sampling_chooser(rng: random.Random) -> Chooser:
    def choose(ranked, weights):
        u = _uniform64(rng)
        acc = Fraction(0)
        for rank, w in enumerate(weights, start=1):
            acc += w
            if u < acc:
                return [(rank, ranked[rank - 1])]
        # acc == 1 exactly, so this is unreachable
        raise AssertionError("cumulative weights do not reach 1")

    return choose


def sample_word(m: SpeciesCount, q: Fraction, rng: Union[random.Random, int], order: Order = None) -> Word:
    """Draw one word from the stationary law of type ``m``.

    A uniform MLQ is linked with random choices, each option taken with its
    link weight.
    """
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    N = m.N
    rows = [sorted(rng.sample(range(N), s)) for s in m.row_sums]
    key = _order_key(order, N)
    choose = _sampling_chooser(rng)
    types = {a: 1 for a in rows[0]}
    for r in range(1, len(rows)):
        _, _, types = next(_link_row(types, rows[r], N, q, r, key, choose))
    return _word(types, N, len(rows) + 1)


def sample_words(m: SpeciesCount, q: Fraction, count: int, seed: int) -> List[Word]:
    rng = random.Random(seed)
    return [sample_word(m, q, rng) for _ in range(count)]
