"""Identity suite: every check pairs two independent computations.

Families and what they compare:

* ``weight_sum``       linking weights of each MLQ vs 1
* ``rotation``         link distribution of a rotated MLQ vs the rotated distribution
* ``order_invariance`` left-to-right vs right-to-left vs shuffled processing,
  and trivial links taken up front vs at each particle's turn
* ``eta``              MLQ enumeration vs the multinomial closed form
* ``tau_W``            case weights by enumeration, by tau sums and in closed form
* ``T_formula``        T closed forms vs the exact chain, and vs sums of chain correlations
* ``lumping``          lumped iden(n) law vs the exact three-label chain
* ``mlq_vs_ctmc``      MLQ stationary law vs the exact chain
* ``cq_variants``      correlation closed forms vs the exact chain
* ``q0_reduction``     q = 0 closed forms vs the TASEP three-case form
* ``q1_uniformity``    q = 1 chain and closed forms vs the uniform law
* ``sampler_tv``       sampled word frequencies vs the exact law
* ``gillespie``        simulated two-point table vs the exact one
"""

from __future__ import annotations

import itertools
import json
import random
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence

from . import __version__
from .formulas import (
    CASE_KINDS,
    T_bruteforce,
    T_gt_formula,
    T_lt_formula,
    W_bruteforce,
    W_formula,
    W_from_tau,
    c0_formula,
    cq_formula,
    cq_via_pie,
    eta_bruteforce,
    eta_formula,
)
from .markov import build_generator, gillespie, lump, mlq_stationary, solve_stationary, two_point
from .mlq import (
    CapExceeded,
    SpeciesCount,
    enumerate_linkings,
    enumerate_mlqs,
    link_distribution,
    rotate_mlq,
    rotate_word,
    sample_words,
)
from .qcore import DomainError, fmt

FAMILIES = (
    "weight_sum",
    "rotation",
    "order_invariance",
    "eta",
    "tau_W",
    "T_formula",
    "lumping",
    "mlq_vs_ctmc",
    "cq_variants",
    "q0_reduction",
    "q1_uniformity",
    "sampler_tv",
    "gillespie",
)

DEFAULT_Q_LIST = (Fraction(0), Fraction(1, 10), Fraction(1, 2), Fraction(9, 10))

SAMPLER_TV_TOL = 0.02
GILLESPIE_TOL = 0.01


@dataclass
class CheckResult:
    id: str
    family: str
    params: Dict[str, object]
    lhs: str
    rhs: str
    equal: bool
    detail: str = ""
    skipped: bool = False


@dataclass
class SuiteConfig:
    max_sites: int = 5
    q_list: Sequence[Fraction] = DEFAULT_Q_LIST
    seed: int = 0
    families: Optional[Sequence[str]] = None
    max_rows: int = 3
    iden_max_rows: int = 4
    formula_max_n: int = 8
    sampler_type: Sequence[int] = (1, 1, 1)
    sampler_q: Fraction = Fraction(3, 10)
    sampler_samples: int = 100_000
    gillespie_type: Sequence[int] = (1, 1, 1)
    gillespie_q: float = 0.5
    gillespie_horizon: float = 1e6
    gillespie_burn_in: float = 1e4

    def echo(self) -> dict:
        return {
            "max_sites": self.max_sites,
            "q_list": [fmt(q) for q in self.q_list],
            "seed": self.seed,
            "families": list(self.families) if self.families else None,
            "max_rows": self.max_rows,
            "iden_max_rows": self.iden_max_rows,
            "formula_max_n": self.formula_max_n,
            "sampler": {"type": list(self.sampler_type), "q": fmt(self.sampler_q), "samples": self.sampler_samples},
            "gillespie": {
                "type": list(self.gillespie_type),
                "q": self.gillespie_q,
                "horizon": self.gillespie_horizon,
                "burn_in": self.gillespie_burn_in,
            },
        }


@dataclass
class VerificationReport:
    version: str
    config: dict
    checks: List[CheckResult] = field(default_factory=list)
    variant_adjudication: List[dict] = field(default_factory=list)

    def summary(self) -> dict:
        families: Dict[str, Dict[str, int]] = {}
        for c in self.checks:
            f = families.setdefault(c.family, {"run": 0, "failed": 0, "skipped": 0})
            if c.skipped:
                f["skipped"] += 1
            else:
                f["run"] += 1
                f["failed"] += 0 if c.equal else 1
        return {"pass": all(f["failed"] == 0 for f in families.values()), "families": families}

    @property
    def passed(self) -> bool:
        return self.summary()["pass"]

    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.skipped and not c.equal]

    def to_json(self) -> dict:
        return {
            "version": self.version,
            "config": self.config,
            "checks": [asdict(c) for c in self.checks],
            "summary": self.summary(),
            "variant_adjudication": self.variant_adjudication,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"


def qtag(q: Fraction) -> str:
    return "q=" + fmt(q).replace("/", "-")


def mlq_types(max_sites: int, max_rows: int, iden_max_rows: int) -> List[SpeciesCount]:
    """Every type with N <= max_sites and at most ``max_rows`` rows, then iden types with more rows."""
    out = []
    for N in range(1, max_sites + 1):
        for length in range(2, max_rows + 2):
            for counts in itertools.product(range(N + 1), repeat=length):
                if sum(counts) == N:
                    out.append(SpeciesCount(counts))
    for n in range(max_rows + 2, min(iden_max_rows + 1, max_sites) + 1):
        out.append(SpeciesCount.iden(n))
    return out


class _Suite:
    def __init__(self, config: SuiteConfig):
        self.cfg = config
        self.report = VerificationReport(__version__, config.echo())
        self._dist_cache: Dict[tuple, dict] = {}

    # -- bookkeeping --------------------------------------------------------

    def exact(self, family, cid, params, lhs, rhs, detail=""):
        self.report.checks.append(CheckResult(cid, family, params, fmt(lhs), fmt(rhs), lhs == rhs, detail))

    def statistical(self, family, cid, params, lhs: float, rhs: float, tol: float, detail=""):
        ok = abs(lhs - rhs) <= tol
        self.report.checks.append(CheckResult(cid, family, params, repr(lhs), repr(rhs), ok, detail))

    def guarded(self, family, cid, params, fn: Callable[[], None]):
        try:
            fn()
        except CapExceeded as exc:
            self.report.checks.append(CheckResult(cid, family, params, "", "", False, str(exc), skipped=True))

    def wants(self, family: str) -> bool:
        return not self.cfg.families or family in self.cfg.families

    def types(self):
        return mlq_types(self.cfg.max_sites, self.cfg.max_rows, self.cfg.iden_max_rows)

    def dists(self, m: SpeciesCount, q: Fraction):
        key = (m.counts, q)
        if key not in self._dist_cache:
            self._dist_cache[key] = {M: link_distribution(M, q) for M in enumerate_mlqs(m)}
        return self._dist_cache[key]

    # -- MLQ families --------------------------------------------------------

    def weight_sum(self):
        for m in self.types():
            for q in self.cfg.q_list:
                cid = f"weight_sum/type={m}/{qtag(q)}"

                def run(m=m, q=q, cid=cid):
                    total = good = 0
                    bad = ""
                    for M in enumerate_mlqs(m):
                        total += 1
                        s = sum((L.weight for L in enumerate_linkings(M, q)), Fraction(0))
                        if s == 1:
                            good += 1
                        elif not bad:
                            bad = f"first failure: {'/'.join(M.to_text())} sums to {fmt(s)}"
                    self.exact("weight_sum", cid, {"type": str(m), "q": fmt(q)}, good, total, bad)

                self.guarded("weight_sum", cid, {"type": str(m), "q": fmt(q)}, run)

    def rotation(self):
        for m in self.types():
            for q in self.cfg.q_list:
                cid = f"rotation/type={m}/{qtag(q)}"

                def run(m=m, q=q, cid=cid):
                    dists = self.dists(m, q)
                    total = good = 0
                    for M, dist in dists.items():
                        for d in range(m.N):
                            total += 1
                            rotated = {rotate_word(w, d): p for w, p in dist.items()}
                            if dists[rotate_mlq(M, d)] == rotated:
                                good += 1
                    self.exact("rotation", cid, {"type": str(m), "q": fmt(q)}, good, total)

                self.guarded("rotation", cid, {"type": str(m), "q": fmt(q)}, run)

    def order_invariance(self):
        for m in self.types():
            perm = list(range(m.N))
            random.Random(self.cfg.seed * 1000 + m.N).shuffle(perm)
            for q in self.cfg.q_list:
                cid = f"order_invariance/type={m}/{qtag(q)}"

                def run(m=m, q=q, cid=cid, perm=perm):
                    total = good = 0
                    for M, dist in self.dists(m, q).items():
                        total += 1
                        if all(link_distribution(M, q, order=o) == dist for o in ("rtl", perm)) and (
                            link_distribution(M, q, trivial="inline") == dist
                        ):
                            good += 1
                    self.exact(
                        "order_invariance", cid, {"type": str(m), "q": fmt(q)}, good, total, f"shuffled order {perm}, inline trivial links"
                    )

                self.guarded("order_invariance", cid, {"type": str(m), "q": fmt(q)}, run)

    def mlq_vs_ctmc(self):
        for m in self.types():
            for q in self.cfg.q_list:
                cid = f"mlq_vs_ctmc/type={m}/{qtag(q)}"
                params = {"type": str(m), "q": fmt(q)}

                def run(m=m, q=q, cid=cid, params=params):
                    a = mlq_stationary(m, q)
                    b = solve_stationary(build_generator(m, q))
                    words = sorted(set(a.probs) | set(b.probs))
                    diff = [w for w in words if a[w] != b[w]]
                    detail = f"{len(diff)} of {len(words)} words differ" if diff else ""
                    self.exact("mlq_vs_ctmc", cid, params, len(words) - len(diff), len(words), detail)

                self.guarded("mlq_vs_ctmc", cid, params, run)

    # -- closed forms ------------------------------------------------------------

    def eta(self):
        K = self.cfg.max_sites
        for s in range(1, K + 1):
            for t in range(1, K + 1):
                for k in range(2 * s + t, K + 1):
                    for q in self.cfg.q_list:
                        cid = f"eta/s={s},t={t},k={k}/{qtag(q)}"
                        params = {"s": s, "t": t, "k": k, "q": fmt(q)}
                        self.guarded(
                            "eta",
                            cid,
                            params,
                            lambda s=s, t=t, k=k, q=q, cid=cid, params=params: self.exact(
                                "eta", cid, params, eta_bruteforce(s, t, k, q), eta_formula(s, t, k)
                            ),
                        )

    def tau_W(self):
        for n in range(2, self.cfg.max_sites + 1):
            for s in range(0, 4):
                for t in range(0, 4):
                    if s + t >= n:
                        continue
                    for q in self.cfg.q_list:
                        base = f"s={s},t={t},n={n}/{qtag(q)}"
                        params = {"s": s, "t": t, "n": n, "q": fmt(q)}

                        def run(s=s, t=t, n=n, q=q, base=base, params=params):
                            brute = {}
                            for kind in CASE_KINDS:
                                brute[kind] = W_bruteforce(kind, s, t, n, q)
                                formula = W_formula(kind, s, t, n, q)
                                self.exact("tau_W", f"tau_W/W{kind}-enum/{base}", params, brute[kind], formula)
                                if kind == "A" or (kind in ("B", "D") and s >= 1):
                                    self.exact(
                                        "tau_W", f"tau_W/W{kind}-tau-sum/{base}", params, W_from_tau(kind, s, t, n, q), formula
                                    )
                            self.exact("tau_W", f"tau_W/WA+WB=T_gt/{base}", params, brute["A"] + brute["B"], T_gt_formula(s, t, n, q))
                            self.exact("tau_W", f"tau_W/WC+WD=T_lt/{base}", params, brute["C"] + brute["D"], T_lt_formula(s, t, n, q))

                        self.guarded("tau_W", f"tau_W/{base}", params, run)

    def T_formula(self):
        for n in range(2, self.cfg.max_sites + 1):
            for q in self.cfg.q_list:
                for s in range(0, n + 1):
                    for t in range(0, n - s + 1):
                        params = {"s": s, "t": t, "n": n, "q": fmt(q)}
                        for order, formula in ((">", T_gt_formula), ("<", T_lt_formula)):
                            name = "T_gt" if order == ">" else "T_lt"
                            cid = f"T_formula/{name}/s={s},t={t},n={n}/{qtag(q)}"
                            self.guarded(
                                "T_formula",
                                cid,
                                params,
                                lambda order=order, formula=formula, s=s, t=t, n=n, q=q, cid=cid, params=params: self.exact(
                                    "T_formula", cid, params, T_bruteforce(order, s, t, n, q), formula(s, t, n, q)
                                ),
                            )
                cid = f"T_formula/double-sums/n={n}/{qtag(q)}"
                self.guarded("T_formula", cid, {"n": n, "q": fmt(q)}, lambda n=n, q=q: self._double_sums(n, q))

    def _double_sums(self, n, q):
        c = two_point(solve_stationary(build_generator(SpeciesCount.iden(n), q)))
        for s in range(0, n + 1):
            for t in range(0, n - s + 1):
                params = {"s": s, "t": t, "n": n, "q": fmt(q)}
                lt = sum((c[i, j] for j in range(s + t + 1, n + 1) for i in range(s + 1, s + t + 1)), Fraction(0))
                gt = sum((c[i, j] for i in range(s + t + 1, n + 1) for j in range(s + 1, s + t + 1)), Fraction(0))
                tag = f"s={s},t={t},n={n}/{qtag(q)}"
                self.exact("T_formula", f"T_formula/T_lt-sum/{tag}", params, lt, T_lt_formula(s, t, n, q))
                self.exact("T_formula", f"T_formula/T_gt-sum/{tag}", params, gt, T_gt_formula(s, t, n, q))

    def lumping(self):
        for n in range(2, self.cfg.max_sites + 1):
            for q in self.cfg.q_list:

                def run(n=n, q=q):
                    full = solve_stationary(build_generator(SpeciesCount.iden(n), q))
                    for s in range(1, n + 1):
                        for t in range(0, n - s + 1):
                            m = SpeciesCount.mst(s, t, n)
                            a = lump(full, s, t)
                            b = solve_stationary(build_generator(m, q))
                            words = list(m.words())
                            good = sum(1 for w in words if a[w] == b[w])
                            cid = f"lumping/s={s},t={t},n={n}/{qtag(q)}"
                            self.exact("lumping", cid, {"s": s, "t": t, "n": n, "q": fmt(q)}, good, len(words))

                self.guarded("lumping", f"lumping/n={n}/{qtag(q)}", {"n": n, "q": fmt(q)}, run)

    def cq_variants(self):
        printed_mismatch = False
        for n in range(2, self.cfg.max_sites + 1):
            for q in self.cfg.q_list:

                def run(n=n, q=q):
                    nonlocal printed_mismatch
                    c = two_point(solve_stationary(build_generator(SpeciesCount.iden(n), q)))
                    for i in range(1, n + 1):
                        for j in range(1, n + 1):
                            if i == j:
                                continue
                            params = {"n": n, "i": i, "j": j, "q": fmt(q)}
                            tag = f"n={n},i={i},j={j}/{qtag(q)}"
                            oracle = c[i, j]
                            corrected = cq_formula(n, i, j, q, "corrected")
                            self.exact("cq_variants", f"cq_variants/corrected/{tag}", params, corrected, oracle)
                            self.exact("cq_variants", f"cq_variants/pie/{tag}", params, cq_via_pie(n, i, j, q), oracle)
                            if i < j:
                                try:
                                    printed = cq_formula(n, i, j, q, "printed")
                                except DomainError:
                                    printed = None
                                p_ok = printed == oracle
                                c_ok = corrected == oracle
                                if printed is not None and not p_ok and c_ok:
                                    printed_mismatch = True
                                matched = {(True, True): "both", (True, False): "printed", (False, True): "corrected"}.get(
                                    (p_ok, c_ok), "neither"
                                )
                                self.report.variant_adjudication.append(
                                    {
                                        "n": n,
                                        "i": i,
                                        "j": j,
                                        "q": fmt(q),
                                        "matched": matched,
                                        "oracle": fmt(oracle),
                                        "printed": None if printed is None else fmt(printed),
                                        "corrected": fmt(corrected),
                                    }
                                )

                self.guarded("cq_variants", f"cq_variants/n={n}/{qtag(q)}", {"n": n, "q": fmt(q)}, run)
        if any(q > 0 for q in self.cfg.q_list):
            self.exact(
                "cq_variants",
                "cq_variants/printed-mismatch-recorded",
                {},
                int(printed_mismatch),
                1,
                "at least one case where the printed i<j form differs from the chain while the corrected form agrees",
            )

    def q0_reduction(self):
        for n in range(2, self.cfg.formula_max_n + 1):
            for i in range(1, n + 1):
                for j in range(1, n + 1):
                    if i != j:
                        params = {"n": n, "i": i, "j": j}
                        tag = f"n={n},i={i},j={j}"
                        expected = c0_formula(n, i, j)
                        self.exact("q0_reduction", f"q0_reduction/corrected/{tag}", params, cq_formula(n, i, j, 0), expected)
                        self.exact("q0_reduction", f"q0_reduction/pie/{tag}", params, cq_via_pie(n, i, j, 0), expected)

    def q1_uniformity(self):
        one = Fraction(1)
        for n in range(2, self.cfg.formula_max_n + 1):
            for i in range(1, n + 1):
                for j in range(1, n + 1):
                    if i != j:
                        self.exact(
                            "q1_uniformity",
                            f"q1_uniformity/corrected/n={n},i={i},j={j}",
                            {"n": n, "i": i, "j": j},
                            cq_formula(n, i, j, one),
                            Fraction(1, n * (n - 1)),
                        )
        for n in range(2, self.cfg.max_sites + 1):
            m = SpeciesCount.iden(n)
            cid = f"q1_uniformity/chain/type={m}"

            def run(m=m, cid=cid):
                d = solve_stationary(build_generator(m, one))
                size = m.state_count()
                good = sum(1 for p in d.probs.values() if p == Fraction(1, size))
                self.exact("q1_uniformity", cid, {"type": str(m)}, good, size)

            self.guarded("q1_uniformity", cid, {"type": str(m)}, run)

    # -- statistical -------------------------------------------------------------

    def sampler_tv(self):
        m = SpeciesCount(tuple(self.cfg.sampler_type))
        q = self.cfg.sampler_q
        count = self.cfg.sampler_samples
        cid = f"sampler_tv/type={m}/{qtag(q)}/samples={count}/seed={self.cfg.seed}"
        params = {"type": str(m), "q": fmt(q), "samples": count, "seed": self.cfg.seed}

        def run():
            exact = solve_stationary(build_generator(m, q))
            freq = Counter(sample_words(m, q, count, self.cfg.seed))
            tv = 0.5 * sum(abs(freq[w] / count - float(p)) for w, p in exact.probs.items())
            self.statistical("sampler_tv", cid, params, tv, 0.0, SAMPLER_TV_TOL, f"TV distance, tolerance {SAMPLER_TV_TOL}")

        self.guarded("sampler_tv", cid, params, run)

    def gillespie(self):
        cfg = self.cfg
        m = SpeciesCount(tuple(cfg.gillespie_type))
        cid = f"gillespie/type={m}/q={cfg.gillespie_q}/horizon={cfg.gillespie_horizon:g}/seed={cfg.seed}"
        params = {"type": str(m), "q": cfg.gillespie_q, "horizon": cfg.gillespie_horizon, "seed": cfg.seed}

        def run():
            q_exact = Fraction(str(cfg.gillespie_q))
            exact = two_point(solve_stationary(build_generator(m, q_exact)))
            est = gillespie(m, cfg.gillespie_q, cfg.gillespie_horizon, cfg.gillespie_burn_in, cfg.seed)
            err = max(abs(est[k] - float(exact[k])) for k in exact.entries)
            self.statistical("gillespie", cid, params, err, 0.0, GILLESPIE_TOL, f"max abs error, tolerance {GILLESPIE_TOL}")

        self.guarded("gillespie", cid, params, run)

    def run(self) -> VerificationReport:
        for family in FAMILIES:
            if self.wants(family):
                getattr(self, family)()
        return self.report


def run_suite(
    max_sites: int = 5,
    q_list: Iterable[Fraction] = DEFAULT_Q_LIST,
    seed: int = 0,
    families: Optional[Sequence[str]] = None,
    **options,
) -> VerificationReport:
    """Run the identity suite; capped checks are reported as skipped."""
    q_list = [Fraction(q) for q in q_list]
    if max_sites < 2:
        raise DomainError("max_sites must be at least 2")
    if not q_list:
        raise DomainError("q_list must be nonempty")
    if families:
        unknown = set(families) - set(FAMILIES)
        if unknown:
            raise DomainError(f"unknown families: {sorted(unknown)}")
    config = SuiteConfig(max_sites=max_sites, q_list=tuple(q_list), seed=seed, families=families, **options)
    return _Suite(config).run()
