"""Command-line interface.

Exit codes: 0 success, 1 check failure, 2 usage error, 3 cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from fractions import Fraction
from typing import List, Optional

from . import __version__
from .formulas import VARIANTS, cq_formula, cq_via_pie
from .markov import (
    DEFAULT_STATE_CAP,
    CorrelationTable,
    Distribution,
    build_generator,
    gillespie,
    mlq_stationary,
    solve_stationary,
    two_point,
)
from .mlq import DEFAULT_LINK_CAP, DEFAULT_MLQ_CAP, CapExceeded, SpeciesCount, enumerate_linkings, enumerate_mlqs, sample_words
from .qcore import DomainError, as_q, fmt, parse_rational
from .verify import DEFAULT_Q_LIST, FAMILIES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3

DEFAULTS = {
    "q": "1/2",
    "method": "formula",
    "variant": "corrected",
    "format": "csv",
    "samples": 100_000,
    "horizon": 1e6,
    "burn_in": 1e4,
    "max_sites": 5,
    "q_list": ",".join(fmt(q) for q in DEFAULT_Q_LIST),
    "seed": None,
    "state_cap": DEFAULT_STATE_CAP,
    "mlq_cap": DEFAULT_MLQ_CAP,
    "link_cap": DEFAULT_LINK_CAP,
}


class UsageError(Exception):
    pass


def _exact_q(text) -> Fraction:
    try:
        return as_q(str(text))
    except DomainError as exc:
        raise UsageError(f"invalid q {text!r}: {exc}") from None


def _decimal_q(text) -> Fraction:
    """Accept a decimal or rational literal; decimals convert exactly (0.3 -> 3/10)."""
    text = str(text)
    try:
        q = parse_rational(text) if "/" in text else Fraction(text)
    except (ValueError, ZeroDivisionError, DomainError):
        raise UsageError(f"invalid q {text!r}") from None
    if not 0 <= q <= 1:
        raise UsageError(f"q must lie in [0, 1], got {text}")
    return q


def _species(args) -> SpeciesCount:
    type_text, n = _opt(args, "type"), _opt(args, "n")
    try:
        if type_text:
            return SpeciesCount.parse(str(type_text))
        if n:
            return SpeciesCount.iden(int(n))
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    raise UsageError("give --type or --n")


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _opt(args, name, default=None):
    value = getattr(args, name, None)
    if value is None:
        value = args.config.get(name, DEFAULTS.get(name) if default is None else default)
    return value


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_correlations(args) -> int:
    n = int(_opt(args, "n") or 0)
    if n < 2:
        raise UsageError("--n must be at least 2")
    q = _exact_q(_opt(args, "q"))
    method = _opt(args, "method")
    variant = _opt(args, "variant")
    if method in ("ctmc", "mlq"):
        m = SpeciesCount.iden(n)
        if method == "ctmc":
            dist = solve_stationary(build_generator(m, q, int(_opt(args, "state_cap"))))
        else:
            dist = mlq_stationary(m, q, int(_opt(args, "mlq_cap")))
        table = two_point(dist)
    else:
        entries = {}
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if i == j:
                    entries[i, j] = Fraction(0)
                elif method == "pie":
                    entries[i, j] = cq_via_pie(n, i, j, q)
                else:
                    entries[i, j] = cq_formula(n, i, j, q, variant)
        table = CorrelationTable(n, entries)
    if _opt(args, "format") == "json":
        payload = {"n": n, "q": fmt(q), "method": method, **table.to_json()}
        if method == "formula":
            payload["variant"] = variant
        text = json.dumps(payload, indent=2) + "\n"
    else:
        text = table.to_csv()
    _emit(text, args.output)
    return EXIT_OK


def _distribution_csv(d: Distribution) -> str:
    from .markov import _decimal

    lines = ["word,exact,decimal"]
    for w, p in d.probs.items():
        lines.append(f"{'-'.join(map(str, w))},{fmt(p)},{_decimal(p)}")
    return "\n".join(lines) + "\n"


def cmd_stationary(args) -> int:
    m = _species(args)
    q = _exact_q(_opt(args, "q"))
    method = _opt(args, "method", "ctmc")
    if method == "mlq":
        d = mlq_stationary(m, q, int(_opt(args, "mlq_cap")))
    elif method == "ctmc":
        d = solve_stationary(build_generator(m, q, int(_opt(args, "state_cap"))))
    else:
        raise UsageError(f"stationary supports --method ctmc or mlq, not {method!r}")
    if _opt(args, "format") == "json":
        text = json.dumps(d.to_json(), indent=2) + "\n"
    else:
        text = _distribution_csv(d)
    _emit(text, args.output)
    return EXIT_OK


def _parse_filter(spec: Optional[str]):
    if not spec:
        return None
    key, _, value = spec.partition("=")
    if key != "word-prefix" or not value:
        raise UsageError(f"unsupported filter {spec!r}; use word-prefix=a,b,...")
    try:
        return tuple(int(x) for x in value.split(","))
    except ValueError:
        raise UsageError(f"bad prefix in {spec!r}") from None


def cmd_enumerate(args) -> int:
    m = _species(args)
    q = _exact_q(_opt(args, "q"))
    prefix = _parse_filter(args.filter)
    link_cap = int(_opt(args, "link_cap"))
    lines = []
    for M in enumerate_mlqs(m, int(_opt(args, "mlq_cap"))):
        for L in enumerate_linkings(M, q, cap=link_cap):
            if prefix is None or L.word[: len(prefix)] == prefix:
                lines.append(json.dumps(L.to_json()))
    _emit("\n".join(lines) + ("\n" if lines else ""), args.output)
    return EXIT_OK


def _require_seed(args) -> int:
    seed = _opt(args, "seed")
    if seed is None:
        raise UsageError("--seed is required")
    return int(seed)


def cmd_sample(args) -> int:
    m = _species(args)
    q = _decimal_q(_opt(args, "q"))
    seed = _require_seed(args)
    count = int(_opt(args, "samples"))
    if count < 1:
        raise UsageError("--samples must be positive")
    freq = Counter(sample_words(m, q, count, seed))
    exact = None
    if m.state_count() <= int(_opt(args, "state_cap")):
        exact = solve_stationary(build_generator(m, q))
    words = list(m.words()) if exact is not None else sorted(freq)
    tv = None
    if exact is not None:
        tv = 0.5 * sum(abs(freq[w] / count - float(exact[w])) for w in words)
    if _opt(args, "format") == "json":
        payload = {
            "type": list(m.counts),
            "q": fmt(q),
            "samples": count,
            "seed": seed,
            "counts": {",".join(map(str, w)): freq[w] for w in words},
            "total_variation": tv,
        }
        text = json.dumps(payload, indent=2) + "\n"
    else:
        rows = ["word,count,frequency,exact"]
        for w in words:
            ex = fmt(exact[w]) if exact is not None else ""
            rows.append(f"{'-'.join(map(str, w))},{freq[w]},{freq[w] / count:.6f},{ex}")
        text = "\n".join(rows) + "\n"
        if tv is not None:
            print(f"total variation distance to exact: {tv:.6f}", file=sys.stderr)
    _emit(text, args.output)
    return EXIT_OK


def cmd_gillespie(args) -> int:
    m = _species(args)
    q = _decimal_q(_opt(args, "q"))
    seed = _require_seed(args)
    horizon = float(_opt(args, "horizon"))
    burn_in = float(_opt(args, "burn_in"))
    if not horizon > burn_in >= 0:
        raise UsageError("need --horizon > --burn-in >= 0")
    table = gillespie(m, float(q), horizon, burn_in, seed)
    if _opt(args, "format") == "json":
        text = json.dumps({"type": list(m.counts), "q": float(q), "seed": seed, **table.to_json()}, indent=2) + "\n"
    else:
        text = table.to_csv()
    _emit(text, args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    max_sites = int(_opt(args, "max_sites"))
    q_text = _opt(args, "q_list")
    q_list = [_exact_q(x) for x in str(q_text).split(",") if x.strip()]
    if not q_list:
        raise UsageError("--q-list must be nonempty")
    fams = _opt(args, "families")
    families = [f for f in fams.split(",") if f] if isinstance(fams, str) else fams
    if families and set(families) - set(FAMILIES):
        raise UsageError(f"unknown families {sorted(set(families) - set(FAMILIES))}; choose from {', '.join(FAMILIES)}")
    seed = _opt(args, "seed")
    options = {}
    for key in ("sampler_samples", "gillespie_horizon", "gillespie_burn_in"):
        if key in args.config:
            options[key] = args.config[key]
    try:
        report = run_suite(max_sites, q_list, 0 if seed is None else int(seed), families, **options)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    text = report.dumps()
    path = args.report or args.output
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    summary = report.summary()
    for fam, counts in summary["families"].items():
        print(f"{fam:18s} run={counts['run']:5d} failed={counts['failed']:3d} skipped={counts['skipped']:3d}", file=sys.stderr)
    print("PASS" if summary["pass"] else "FAIL", file=sys.stderr)
    return EXIT_OK if summary["pass"] else EXIT_FAIL


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mlqpasep", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", dest="config_path", help="JSON file whose keys mirror the flags; flags win")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, type_arg=True):
        if type_arg:
            p.add_argument("--type", help="comma-separated counts, e.g. 2,1,3")
        p.add_argument("--n", type=int, help="use type iden(n)")
        p.add_argument("--q")
        p.add_argument("--format", choices=["csv", "json"])
        p.add_argument("--output", "-o")
        p.add_argument("--state-cap", type=int)
        p.add_argument("--mlq-cap", type=int)
        p.add_argument("--link-cap", type=int)

    p = sub.add_parser("correlations", help="two-point table c(i, j) for type iden(n)")
    common(p, type_arg=False)
    p.add_argument("--method", choices=["formula", "pie", "ctmc", "mlq"])
    p.add_argument("--variant", choices=list(VARIANTS))
    p.set_defaults(func=cmd_correlations)

    p = sub.add_parser("stationary", help="exact stationary distribution")
    common(p)
    p.add_argument("--method", choices=["ctmc", "mlq"])
    p.set_defaults(func=cmd_stationary)

    p = sub.add_parser("enumerate", help="linked multiline queues as JSON lines")
    common(p)
    p.add_argument("--filter", help="word-prefix=a,b,...")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("sample", help="exact sampler frequencies")
    common(p)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("gillespie", help="simulated two-point table")
    common(p)
    p.add_argument("--horizon", type=float)
    p.add_argument("--burn-in", type=float)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_gillespie)

    p = sub.add_parser("verify", help="run the identity suite")
    p.add_argument("--max-sites", type=int)
    p.add_argument("--q-list", help="comma-separated rationals")
    p.add_argument("--seed", type=int)
    p.add_argument("--families", help="comma-separated subset of: " + ", ".join(FAMILIES))
    p.add_argument("--report", help="path for the JSON report")
    p.add_argument("--output", "-o", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.config = {}
        if args.config_path:
            with open(args.config_path) as fh:
                args.config = {k.replace("-", "_"): v for k, v in json.load(fh).items()}
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (OSError, json.JSONDecodeError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
