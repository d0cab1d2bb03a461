#!/usr/bin/env python3
"""
cli.py

Command-line front end for the Jacobian search: tune the smoothness bound,
search a family of curves, verify L-polynomials, recover a zeta function from
a known group order, and run the near-prime distribution experiment.

Usage:
    jacsearch tune --bits 150 [--space-saver]
    jacsearch search --family "x^5+2x^3+7x^2+x+t" --p 2^61-1 --t-from 0 --t-to 999
                     [--config run.conf] [--u 5.8 | --B 2097152] [--targets J_3/1,J_3/1_twist]
                     [--odd-only] [--shards 8 --shard-index 0] [--out records.jsonl] [--resume]
                     [--seed 0] [--workers 4] [--batch 128] [--summary-csv summary.csv]
    jacsearch verify --records records.jsonl
    jacsearch verify --family "x^5+x+t" --t 456579 --p 2^61-1 --lpoly 867588246,503655589160075568
    jacsearch zeta --family "x^5+x+t" --t 456579 --p 2^61-1 --order <#J(C)> [--twist]
    jacsearch experiment --bits 40 --genus 2 --u 2,3,4 --sample-size 1000 [--summary-csv stats.csv]

Exit status: 0 on success, 1 on usage errors, 2 when a command fails.
"""

import argparse
import json
import logging
import random
import sys

import pandas as pd

from .curve import Jacobian, curve_new, twist
from .ff import field_new
from .search import (
    FamilyParseError,
    SearchConfig,
    choose_params,
    completed_ts,
    config_hash,
    distribution_experiment,
    load_config,
    parse_family,
    parse_int,
    partition,
    read_records,
    run_search,
    success_report,
    summary_frame,
    verify_lpoly,
    write_records,
)
from .zeta import LPolynomial, derived_orders, recover_genus2, recover_genus3, twist_lpoly


class ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list:
    return [parse_int(x) for x in text.split(",") if x.strip()]


def _curve_from_flags(parser, args):
    """Curve y^2 = f_t(x) from --family/--t/--p/--k."""
    try:
        fam = parse_family(args.family)
    except FamilyParseError as exc:
        parser.error(f"malformed family: {exc}")
    F = field_new(args.p, args.k)
    g = (fam.degree - 1) // 2
    return curve_new(g, F, [c % args.p for c in fam.polynomial(args.t)])


# -- subcommands ----------------------------------------------------------------

def cmd_tune(parser, args) -> int:
    try:
        best, saver = choose_params(args.bits)
    except ValueError as exc:
        parser.error(str(exc))
    rows = [dict(best.as_row(), variant="optimal")]
    if args.space_saver:
        rows.append(dict(saver.as_row(), variant="space-saver"))
    print(pd.DataFrame(rows).to_string(index=False))
    choice = saver if args.space_saver else best
    print(f"# recommended configuration for n = {args.bits}")
    print(f"u = {choice.u}")
    print(f"B = {choice.B}")
    return 0


_SEARCH_FLAGS = ("family", "genus", "p", "k", "t_from", "t_to", "u", "B", "odd_only", "smith",
                 "targets", "threshold", "confidence", "seed", "workers", "batch", "max_stored",
                 "out")


def cmd_search(parser, args) -> int:
    overrides = {name: getattr(args, name) for name in _SEARCH_FLAGS}
    if overrides["targets"] is not None:
        overrides["targets"] = tuple(x.strip() for x in overrides["targets"].split(","))
    try:
        if args.config:
            config = load_config(args.config, **overrides)
        else:
            if args.family is None or args.p is None:
                parser.error("--family and --p are required without --config")
            config = SearchConfig(**{k: v for k, v in overrides.items() if v is not None})
    except FamilyParseError as exc:
        parser.error(f"malformed family: {exc}")
    except (TypeError, ValueError) as exc:
        parser.error(str(exc))

    if args.shards is not None:
        if args.shard_index is None or not 0 <= args.shard_index < args.shards:
            parser.error("--shard-index must be given and lie in [0, --shards)")
        config = partition(config, args.shards)[args.shard_index]
    if args.resume and not config.out:
        parser.error("--resume needs --out")

    skip = None
    if args.resume:
        skip = completed_ts(config.out, config_hash(config))

    records = []
    for record in write_records(run_search(config, skip), config.out):
        if config.out is None:
            print(json.dumps(record.as_dict(), separators=(",", ":")), flush=True)
        records.append(record)

    counts = pd.Series([r.status for r in records], dtype=object).value_counts()
    for status, count in counts.items():
        logging.info("%s: %d", status, count)
    if any(r.status in ("success", "b-hard") for r in records):
        report = success_report(records, config)
        logging.info("Success rate %.4f against sigma(u) = %.4f (deviation %+.0f%%, floor met: %s)",
                     report["rate"], report["predicted"], 100 * report["deviation"],
                     report["meets_floor"])
    if args.summary_csv:
        summary_frame(records).to_csv(args.summary_csv, index=False)
        logging.info("Summary saved to %s", args.summary_csv)
    return 0


def _verify_frames(parser, args) -> list:
    rng = random.Random(args.seed)
    if args.records:
        frames = []
        for rec in read_records(args.records):
            if rec.get("status") != "success":
                continue
            p, k = int(rec["p"]), int(rec["k"])
            C = curve_new(int(rec["genus"]), field_new(p, k), [int(c) for c in rec["f"]])
            df = verify_lpoly(C, LPolynomial.from_dict(rec["lpoly"]), args.checks, rng=rng,
                              claimed=rec.get("derived"))
            df.insert(0, "t", rec["t"])
            frames.append(df)
        return frames
    if args.family is None or args.p is None or args.lpoly is None or args.t is None:
        parser.error("verify needs --records, or --family, --t, --p and --lpoly")
    C = _curve_from_flags(parser, args)
    half = _int_list(args.lpoly)
    if len(half) != C.genus:
        parser.error(f"--lpoly needs {C.genus} coefficients, got {len(half)}")
    P = LPolynomial.from_half(C.field.order, C.genus, half)
    df = verify_lpoly(C, P, args.checks, rng=rng)
    df.insert(0, "t", args.t)
    return [df]


def cmd_verify(parser, args) -> int:
    frames = _verify_frames(parser, args)
    if not frames:
        logging.warning("No success records to verify")
        return 0
    report = pd.concat(frames, ignore_index=True)
    print(report.to_string(index=False))
    failed = report.loc[~report["passed"].astype(bool)]
    if not failed.empty:
        logging.error("%d checks failed", len(failed))
        return 2
    logging.info("All %d checks passed", len(report))
    return 0


def cmd_zeta(parser, args) -> int:
    if args.family is None or args.p is None or args.t is None:
        parser.error("zeta needs --family, --t, --p and --order")
    C = _curve_from_flags(parser, args)
    q, g = C.field.order, C.genus
    recover = recover_genus2 if g == 2 else recover_genus3
    rng = random.Random(args.seed)
    if args.twist:
        P = twist_lpoly(recover(args.order, Jacobian(C), q, rng))
    else:
        P = recover(args.order, Jacobian(twist(C)), q, rng)
    out = {"a": [str(a) for a in P.half], "order": str(P.at(1)), "twist_order": str(P.at(-1))}
    if args.derived:
        out["derived"] = [d.as_dict() for d in derived_orders(P)]
    print(json.dumps(out, indent=2))
    return 0


def cmd_experiment(parser, args) -> int:
    u_values = [float(x) for x in args.u.split(",")]
    stats = distribution_experiment(args.bits, args.genus, u_values, args.sample_size,
                                    seed=args.seed, odd_only=args.odd_only)
    print(stats.to_string(index=False))
    if args.summary_csv:
        stats.to_csv(args.summary_csv, index=False)
        logging.info("Summary saved to %s", args.summary_csv)
    return 0


# -- parser ------------------------------------------------------------------------

def _add_curve_flags(sub):
    sub.add_argument('--family', help='Family of f with parameter t, e.g. "x^5+x+t"')
    sub.add_argument('--t', type=int, help="Value of the parameter t")
    sub.add_argument('--p', type=parse_int, help="Field characteristic (e.g. 2^61-1)")
    sub.add_argument('--k', type=int, default=1, help="Extension degree of the base field (default 1)")
    sub.add_argument('--seed', type=int, default=0, help="Random seed (default 0)")


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="jacsearch",
        description="Search hyperelliptic curve families for Jacobians of B-easy order"
    )
    noise = parser.add_mutually_exclusive_group()
    noise.add_argument('--verbose', action='store_true', help="Debug logging")
    noise.add_argument('--quiet', action='store_true', help="Warnings and errors only")
    subs = parser.add_subparsers(dest="command", required=True)

    tune = subs.add_parser("tune", help="Choose u and B for an n-bit group order")
    tune.add_argument('--bits', type=int, required=True, help="Bit size n of #J (48..256)")
    tune.add_argument('--space-saver', action='store_true',
                      help="Also report the low-memory choice within 5%% of the optimal cost")
    tune.set_defaults(func=cmd_tune)

    search = subs.add_parser("search", help="Search a family of curves")
    search.add_argument('--config', help="key=value configuration file (flags override it)")
    search.add_argument('--family', help='Family of f with parameter t, e.g. "x^5+2x^3+7x^2+x+t"')
    search.add_argument('--genus', type=int, help="Genus (2 or 3; inferred from the family)")
    search.add_argument('--p', type=parse_int, help="Field characteristic (e.g. 2^61-1)")
    search.add_argument('--k', type=int, help="Extension degree of the base field")
    search.add_argument('--t-from', type=int, help="First value of t")
    search.add_argument('--t-to', type=int, help="Last value of t (inclusive)")
    bound = search.add_mutually_exclusive_group()
    bound.add_argument('--u', type=float, help="Bound exponent: B = 2^(n/u)")
    bound.add_argument('--B', type=parse_int, help="Explicit bound B")
    search.add_argument('--odd-only', action='store_true', default=None,
                        help="Skip curves whose f is reducible (Jacobian of even order)")
    search.add_argument('--no-smith', dest="smith", action='store_false', default=None,
                        help="Disable the genus 3 factor-pattern filter")
    search.add_argument('--targets', help="Comma-separated labels: J, J_twist, J_3/1, J_3/1_twist, "
                                          "J_4/2, T_3")
    search.add_argument('--threshold', type=float, help="Near-prime bit threshold (default 0.95)")
    search.add_argument('--confidence', type=int, help="Random elements per exponent (default 6)")
    search.add_argument('--shards', type=int, help="Split the t-range into this many shards")
    search.add_argument('--shard-index', type=int, help="Shard to run (0-based)")
    search.add_argument('--out', help="JSONL output file (records are appended)")
    search.add_argument('--resume', action='store_true', help="Skip t values already in --out")
    search.add_argument('--seed', type=int, help="Random seed (default 0)")
    search.add_argument('--workers', type=int, help="Worker processes (default 1)")
    search.add_argument('--batch', type=int, help="Minimum parallel width of batched steps (default 128)")
    search.add_argument('--max-stored', type=int,
                        help="Powers kept per order computation (default 2 lg^2 of the Weil bound)")
    search.add_argument('--summary-csv', help="Write near-prime flags per t and label to CSV")
    search.set_defaults(func=cmd_search)

    verify = subs.add_parser("verify", help="Verify L-polynomials from records or flags")
    verify.add_argument('--records', help="JSONL record file; every success record is checked")
    _add_curve_flags(verify)
    verify.add_argument('--lpoly', help="Comma-separated a_1,...,a_g")
    verify.add_argument('--checks', type=int, default=20, help="Random elements per check (default 20)")
    verify.set_defaults(func=cmd_verify)

    zeta = subs.add_parser("zeta", help="Recover the L-polynomial from #J(C)")
    _add_curve_flags(zeta)
    zeta.add_argument('--order', type=parse_int, required=True, help="#J(C), or #J of the twist with --twist")
    zeta.add_argument('--twist', action='store_true', help="--order is the order of the twist")
    zeta.add_argument('--derived', action='store_true', help="Also print the derived group orders")
    zeta.set_defaults(func=cmd_zeta)

    experiment = subs.add_parser("experiment", help="Near-prime statistics over random curves")
    experiment.add_argument('--bits', type=int, required=True, help="Bit size n of #J")
    experiment.add_argument('--genus', type=int, default=2, help="Genus (default 2)")
    experiment.add_argument('--u', default="2,3,4", help="Comma-separated u values (default 2,3,4)")
    experiment.add_argument('--sample-size', type=int, default=1000, help="Number of curves (default 1000)")
    experiment.add_argument('--seed', type=int, default=0, help="Random seed (default 0)")
    experiment.add_argument('--odd-only', action='store_true', help="Irreducible f only")
    experiment.add_argument('--summary-csv', help="Write the statistics table to CSV")
    experiment.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format='%(levelname)s: %(message)s')

    try:
        return args.func(parser, args)
    except KeyboardInterrupt:
        logging.warning("Interrupted; completed records are flushed")
        return 2
    except Exception as exc:
        logging.error("%s: %s", type(exc).__name__, exc)
        logging.debug("Traceback", exc_info=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
