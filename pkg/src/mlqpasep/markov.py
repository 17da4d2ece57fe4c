"""Brute-force ground truth for the multispecies PASEP on a ring.

The process: for every cyclically adjacent pair of sites (k, k+1) holding
labels (i, j), the pair swaps at rate 1 if i > j and at rate q if i < j.
"""

from __future__ import annotations

import bisect
import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .linalg import stationary_vector
from .mlq import CapExceeded, SpeciesCount, Word, enumerate_mlqs, link_distribution, rotate_word
from .qcore import DomainError, fmt

DEFAULT_STATE_CAP = 10**5


class NonUniqueStationary(ArithmeticError):
    pass


@dataclass(frozen=True)
class GeneratorMatrix:
    species: SpeciesCount
    q: Fraction
    states: Tuple[Word, ...]
    rates: Dict[Tuple[int, int], Fraction] = field(repr=False)

    @property
    def index(self) -> Dict[Word, int]:
        return {w: k for k, w in enumerate(self.states)}

    def outflow(self, i: int) -> Fraction:
        return sum((r for (a, _), r in self.rates.items() if a == i), Fraction(0))

    def apply_left(self, pi: List[Fraction]) -> List[Fraction]:
        """Return ``pi · G``."""
        out = [Fraction(0)] * len(self.states)
        for (i, j), r in self.rates.items():
            flow = pi[i] * r
            out[j] += flow
            out[i] -= flow
        return out


@dataclass(frozen=True)
class Distribution:
    """Exact probabilities over the words of one type, in lexicographic order."""

    species: SpeciesCount
    q: Optional[Fraction]
    probs: Dict[Word, Fraction]

    def __post_init__(self):
        object.__setattr__(self, "probs", dict(sorted(self.probs.items())))

    @property
    def support(self) -> List[Word]:
        return list(self.probs)

    def __getitem__(self, word: Word) -> Fraction:
        return self.probs.get(tuple(word), Fraction(0))

    def __eq__(self, other):
        if not isinstance(other, Distribution):
            return NotImplemented
        keys = set(self.probs) | set(other.probs)
        return self.species == other.species and all(self[w] == other[w] for w in keys)

    def total(self) -> Fraction:
        return sum(self.probs.values(), Fraction(0))

    def prefix_probability(self, prefix: Tuple[int, ...]) -> Fraction:
        k = len(prefix)
        return sum((p for w, p in self.probs.items() if w[:k] == tuple(prefix)), Fraction(0))

    def to_json(self) -> dict:
        return {
            "type": list(self.species.counts),
            "q": None if self.q is None else fmt(self.q),
            "probs": {",".join(map(str, w)): fmt(p) for w, p in self.probs.items()},
        }

    @classmethod
    def from_json(cls, data: Union[str, dict]) -> "Distribution":
        from .qcore import parse_rational

        if isinstance(data, str):
            data = json.loads(data)
        probs = {tuple(int(x) for x in k.split(",")): parse_rational(v) for k, v in data["probs"].items()}
        q = None if data.get("q") is None else parse_rational(data["q"])
        return cls(SpeciesCount(tuple(data["type"])), q, probs)


@dataclass(frozen=True)
class CorrelationTable:
    """Probabilities that sites 1 and 2 carry labels (i, j)."""

    labels: int
    entries: Dict[Tuple[int, int], Union[Fraction, float]]

    def __getitem__(self, ij: Tuple[int, int]):
        return self.entries.get(ij, 0)

    def to_csv(self) -> str:
        lines = ["i,j,exact,decimal"]
        for i in range(1, self.labels + 1):
            for j in range(1, self.labels + 1):
                v = self[(i, j)]
                if isinstance(v, Fraction):
                    lines.append(f"{i},{j},{fmt(v)},{_decimal(v)}")
                else:
                    lines.append(f"{i},{j},,{v:.15f}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "labels": self.labels,
            "entries": [
                {"i": i, "j": j, "value": fmt(v) if isinstance(v, Fraction) else float(v)}
                for (i, j), v in sorted(self.entries.items())
            ],
        }


def _decimal(x: Fraction, digits: int = 15) -> str:
    scaled = round(x * 10**digits)
    sign = "-" if scaled < 0 else ""
    scaled = abs(scaled)
    return f"{sign}{scaled // 10**digits}.{scaled % 10**digits:0{digits}d}"


# ---------------------------------------------------------------------------
# generator and exact solve
# ---------------------------------------------------------------------------


def _swaps(word: Word, q) -> Iterator[Tuple[Word, object]]:
    N = len(word)
    for k in range(N):
        nxt = (k + 1) % N
        if nxt == k:
            continue
        i, j = word[k], word[nxt]
        if i == j:
            continue
        w = list(word)
        w[k], w[nxt] = j, i
        yield tuple(w), (1 if i > j else q)


def build_generator(m: SpeciesCount, q: Fraction, cap: int = DEFAULT_STATE_CAP) -> GeneratorMatrix:
    size = m.state_count()
    if size > cap:
        raise CapExceeded(f"state space too large: {size} states of type {m} (cap {cap})")
    q = Fraction(q)
    states = tuple(m.words())
    index = {w: k for k, w in enumerate(states)}
    rates: Dict[Tuple[int, int], Fraction] = defaultdict(Fraction)
    for i, w in enumerate(states):
        for v, r in _swaps(w, q):
            rates[i, index[v]] += r
    return GeneratorMatrix(m, q, states, {k: v for k, v in rates.items() if v})


def closed_classes(G: GeneratorMatrix) -> List[List[int]]:
    """Closed communicating classes of the chain, each as sorted state indices."""
    S = len(G.states)
    edges = [(i, j) for (i, j), r in G.rates.items() if r]
    if edges:
        src, dst = zip(*edges)
    else:
        src, dst = (), ()
    adj = csr_matrix((np.ones(len(edges)), (src, dst)), shape=(S, S))
    ncomp, comp = connected_components(adj, directed=True, connection="strong")
    leaves = np.ones(ncomp, dtype=bool)
    for i, j in edges:
        if comp[i] != comp[j]:
            leaves[comp[i]] = False
    return [sorted(np.flatnonzero(comp == c).tolist()) for c in range(ncomp) if leaves[c]]


def solve_stationary(G: GeneratorMatrix, use_rotation: bool = True) -> Distribution:
    """The unique stationary distribution of ``G``, exactly.

    States outside the unique closed class (transient states, which occur at
    q = 0) get probability zero.  With ``use_rotation`` the chain is first
    lumped over cyclic rotations of the ring, which commute with the dynamics;
    either way the result is checked against ``pi · G = 0`` on the full
    generator before it is returned.
    """
    classes = closed_classes(G)
    if len(classes) != 1:
        sizes = [len(c) for c in classes]
        raise NonUniqueStationary(f"non-unique stationary distribution: {len(classes)} closed classes of sizes {sizes}")
    recurrent = classes[0]
    members = set(recurrent)
    index = G.index
    N = G.species.N

    if use_rotation:
        orbit_of: Dict[int, int] = {}
        orbits: List[List[int]] = []
        for i in recurrent:
            if i in orbit_of:
                continue
            orbit = sorted({index[rotate_word(G.states[i], d)] for d in range(N)})
            for k in orbit:
                orbit_of[k] = len(orbits)
            orbits.append(orbit)
    else:
        orbit_of = {i: k for k, i in enumerate(recurrent)}
        orbits = [[i] for i in recurrent]

    reps = {orbit[0]: k for k, orbit in enumerate(orbits)}
    lumped: Dict[Tuple[int, int], Fraction] = defaultdict(Fraction)
    for (i, j), r in G.rates.items():
        if i in reps and j in members:
            a, b = reps[i], orbit_of[j]
            if a != b:
                lumped[a, b] += r
    weights = stationary_vector(len(orbits), lumped)

    pi = [Fraction(0)] * len(G.states)
    for k, orbit in enumerate(orbits):
        share = weights[k] / len(orbit)
        for i in orbit:
            pi[i] = share
    residual = G.apply_left(pi)
    if any(residual) or sum(pi) != 1:
        raise ArithmeticError("exact stationarity check failed")
    return Distribution(G.species, G.q, dict(zip(G.states, pi)))


def stationary(m: SpeciesCount, q: Fraction, cap: int = DEFAULT_STATE_CAP) -> Distribution:
    return solve_stationary(build_generator(m, q, cap))


# ---------------------------------------------------------------------------
# marginals and lumping
# ---------------------------------------------------------------------------


def two_point(d: Distribution) -> CorrelationTable:
    entries: Dict[Tuple[int, int], Fraction] = defaultdict(Fraction)
    for w, p in d.probs.items():
        entries[w[0], w[1 % len(w)]] += p
    labels = len(d.species.counts)
    full = {(i, j): entries.get((i, j), Fraction(0)) for i in range(1, labels + 1) for j in range(1, labels + 1)}
    return CorrelationTable(labels, full)


def lump_map(n: int, s: int, t: int) -> Dict[int, int]:
    if not (1 <= s and 0 <= t and s + t <= n):
        raise DomainError(f"invalid lumping (s, t) = ({s}, {t}) for n = {n}")
    return {label: 1 if label <= s else 2 if label <= s + t else 3 for label in range(1, n + 1)}


def lump(d: Distribution, s: int, t: int) -> Distribution:
    """Merge labels 1..s into 1, s+1..s+t into 2 and the rest into 3."""
    n = d.species.N
    if d.species.counts != (1,) * n:
        raise DomainError("lumping expects a distribution of type iden(n)")
    relabel = lump_map(n, s, t)
    out: Dict[Word, Fraction] = defaultdict(Fraction)
    for w, p in d.probs.items():
        out[tuple(relabel[x] for x in w)] += p
    return Distribution(SpeciesCount.mst(s, t, n), d.q, dict(out))


def mlq_stationary(m: SpeciesCount, q: Fraction, mlq_cap: int = 10**7) -> Distribution:
    """Stationary law read off the multiline queues: average of per-MLQ link distributions."""
    totals: Dict[Word, Fraction] = {w: Fraction(0) for w in m.words()}
    count = 0
    for M in enumerate_mlqs(m, mlq_cap):
        count += 1
        for w, p in link_distribution(M, q).items():
            totals[w] += p
    return Distribution(m, Fraction(q), {w: p / count for w, p in totals.items()})


# ---------------------------------------------------------------------------
# simulation
# ---------------------------------------------------------------------------


def gillespie(
    m: SpeciesCount,
    q: float,
    horizon: float,
    burn_in: float,
    seed: int,
    chunk: int = 1 << 16,
) -> CorrelationTable:
    """Time-averaged estimate of the two-point table over ``[burn_in, horizon]``."""
    if not (horizon > burn_in >= 0):
        raise DomainError(f"need horizon > burn_in >= 0, got horizon={horizon}, burn_in={burn_in}")
    q = float(q)
    if not 0 <= q <= 1:
        raise DomainError(f"q must lie in [0, 1], got {q}")
    states = list(m.words())
    index = {w: k for k, w in enumerate(states)}
    cumulative: List[List[float]] = []
    targets: List[List[int]] = []
    for w in states:
        acc, cum, tgt = 0.0, [], []
        for v, r in _swaps(w, q):
            if r:
                acc += r
                cum.append(acc)
                tgt.append(index[v])
        cumulative.append(cum)
        targets.append(tgt)

    rng = np.random.default_rng(seed)
    occupation = [0.0] * len(states)
    state, clock = 0, 0.0
    expo = rng.standard_exponential(chunk).tolist()
    unif = rng.random(chunk).tolist()
    k = 0
    while clock < horizon:
        cum = cumulative[state]
        if not cum:
            occupation[state] += horizon - max(clock, burn_in)
            break
        if k == chunk:
            expo = rng.standard_exponential(chunk).tolist()
            unif = rng.random(chunk).tolist()
            k = 0
        total = cum[-1]
        nxt_clock = clock + expo[k] / total
        lo, hi = max(clock, burn_in), min(nxt_clock, horizon)
        if hi > lo:
            occupation[state] += hi - lo
        state = targets[state][bisect.bisect_right(cum, unif[k] * total)]
        clock = nxt_clock
        k += 1

    window = horizon - burn_in
    labels = len(m.counts)
    entries = {(i, j): 0.0 for i in range(1, labels + 1) for j in range(1, labels + 1)}
    for w, t in zip(states, occupation):
        entries[w[0], w[1 % len(w)]] += t / window
    return CorrelationTable(labels, entries)
