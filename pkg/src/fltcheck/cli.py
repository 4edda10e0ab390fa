"""Command-line front end.

Exit codes: 0 success, 1 usage/config/I-O error or failed check,
2 counterexample found by ``verify``.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import oracle, poly
from .modmath import is_prime, primes_in_range
from .runner import DEFAULT_CHUNK, JOBS_ENV, CheckpointError, RunConfig, default_jobs, dump_line, run_verify
from .verifier import wieferich_check

log = logging.getLogger("fltcheck")

WIEFERICH_MAX = 10**7


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # exit status 2 is reserved for counterexamples
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def cmd_verify(args) -> int:
    jobs = args.jobs if args.jobs is not None else default_jobs()
    config = RunConfig(
        conjecture=args.conjecture,
        start=args.start,
        stop=args.stop,
        jobs=jobs,
        checkpoint_path=args.checkpoint,
        report_path=args.report,
        chunk=args.chunk,
        largest_first=args.largest_first,
    )
    try:
        config.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    summary = run_verify(config)
    records = summary.records
    n_susp = sum(len(r["suspicious"]) for r in records)
    with_susp = sum(1 for r in records if r["suspicious"])
    print(f"conjecture {config.conjecture}: {len(records)} primes in [{config.start}, {config.stop}], "
          f"{summary.new} verified this run")
    print(f"suspicious residues: {n_susp} across {with_susp} primes")
    if records:
        slow = max(records, key=lambda r: r["ms"])
        print(f"slowest prime: {slow['p']} ({slow['ms']:.1f} ms)")
    for rec in summary.counterexamples:
        print("COUNTEREXAMPLE " + dump_line(rec), end="")
    if not summary.counterexamples:
        print("all verified")
    return summary.exit_code


def _coeff_rows(p: int, mode: str, which: str) -> list[int]:
    if mode == "exact":
        if p > poly.EXACT_LIMIT:
            raise UsageError(f"exact mode needs p <= {poly.EXACT_LIMIT}")
        if which == "W":
            return list(poly.w_table(p).W)
        return list((poly.g_exact(p) if which == "G" else poly.h_exact(p)).coeffs)
    k = 1 if mode == "mod-p" else 2
    if which == "W":
        if p > poly.EXACT_LIMIT:
            raise UsageError(f"W tables need p <= {poly.EXACT_LIMIT}")
        if not is_prime(p):
            raise UsageError(f"modular modes need a prime, got {p}")
        return [c % p**k for c in poly.w_table(p).W]
    return list((poly.g_coeffs_mod(p, k) if which == "G" else poly.h_coeffs_mod(p, k)).coeffs)


def cmd_coeffs(args) -> int:
    try:
        rows = _coeff_rows(args.p, args.mode, args.which)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    sys.stdout.write("".join(f"{i}\t{c}\n" for i, c in enumerate(rows)))
    return 0


def cmd_identity(args) -> int:
    max_n = args.max_n
    if max_n % 2 == 0:
        raise UsageError("n must be odd")
    if not 3 <= max_n <= poly.EXACT_LIMIT:
        raise UsageError(f"--max-n must be in [3, {poly.EXACT_LIMIT}]")
    failures = 0
    for n in range(3, max_n + 1, 2):
        W = poly.w_table(n).W
        checks = {
            "identity": poly.verify_identity_eq2(n),
            "first": W[0] == n,
            "last": W[-1] == (-1) ** ((n - 3) // 2) * n,
        }
        if is_prime(n):
            checks["divisible"] = all(c % n == 0 for c in W)
        ok = all(checks.values())
        failures += not ok
        print(f"n={n}\t{'ok' if ok else 'FAIL'}\t" + " ".join(f"{k}={int(v)}" for k, v in checks.items()))
    return 1 if failures else 0


def cmd_wieferich(args) -> int:
    if args.to > WIEFERICH_MAX:
        raise UsageError(f"--to must be <= {WIEFERICH_MAX}")
    violations = 0
    if args.to >= 2:
        for p in primes_in_range(2, args.to):
            rec = wieferich_check(p)
            if rec.valuation >= 2:
                print(f"{p}\t{rec.valuation}")
            violations += rec.violates_corollary
    return 1 if violations else 0


def cmd_oracle(args) -> int:
    max_p = args.max_p
    if not 5 <= max_p <= oracle.ORACLE_MAX_P:
        raise UsageError(f"--max-p must be in [5, {oracle.ORACLE_MAX_P}]")
    results: list[tuple[str, bool]] = []
    for p in primes_in_range(5, max_p):
        for k in (1, 2):
            results.append((f"crosscheck p={p} k={k}", oracle.crosscheck_modular(p, k)))
        results.append((f"corollary3 p={p}", oracle.corollary3_relation_check(p)))
    triples = oracle.random_lemma1_triples(10**4)
    results.append(("lemma1 10000 random triples", all(oracle.lemma1_check(*t) for t in triples)))
    try:
        oracle.lemma3_scan(300)
        results.append(("lemma3 scan limit=300", True))
    except oracle.Lemma3Violation as exc:
        log.error("%s", exc)
        results.append(("lemma3 scan limit=300", False))
    for name, ok in results:
        print(f"{'PASS' if ok else 'FAIL'}\t{name}")
    return 0 if all(ok for _, ok in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fltcheck", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="check p^2 never divides H_p over a range of primes")
    v.add_argument("--conjecture", type=int, choices=(1, 2), required=True)
    v.add_argument("--from", dest="start", type=int, required=True)
    v.add_argument("--to", dest="stop", type=int, required=True)
    v.add_argument("--jobs", type=int, default=None, help=f"worker processes (default: ${JOBS_ENV} or 1)")
    v.add_argument("--checkpoint", type=Path)
    v.add_argument("--report", type=Path)
    v.add_argument("--chunk", type=int, default=DEFAULT_CHUNK, help="stage-1 residues per task")
    v.add_argument("--largest-first", action="store_true")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("coeffs", help="dump W, G or H coefficients")
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--mode", choices=("exact", "mod-p", "mod-p2"), required=True)
    c.add_argument("--which", choices=("W", "G", "H"), required=True)
    c.set_defaults(func=cmd_coeffs)

    i = sub.add_parser("identity", help="check the W-table expansion for odd n")
    i.add_argument("--max-n", type=int, required=True)
    i.set_defaults(func=cmd_identity)

    w = sub.add_parser("wieferich", help="valuation of 2^(p-1)-1 at p")
    w.add_argument("--to", type=int, required=True)
    w.set_defaults(func=cmd_wieferich)

    o = sub.add_parser("oracle", help="exact big-integer cross-checks")
    o.add_argument("--max-p", type=int, required=True)
    o.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, CheckpointError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
