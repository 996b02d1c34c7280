"""Command-line interface: ``fairtoss <command> ...``.

Exit status is 0 on success, 2 for usage or validation errors and 3 when
a scripted source runs out mid-draw.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from contextlib import nullcontext
from fractions import Fraction

from fairtoss import analysis, audit, orderings
from fairtoss.entropy import SourceExhausted, make_source, splitmix64
from fairtoss.numtheory import ceil_log2, fermat, odd_part
from fairtoss.sampler import SCHEMES

CURVE_HEADER = [
    "n", "e_num", "e_den", "e_float", "lower_disc",
    "upper_sharp", "upper_cont", "fermat_peak", "mersenne_peak",
]
CURVE_MAX = 1 << 20
EXIT_USAGE = 2
EXIT_EXHAUSTED = 3


class UsageError(Exception):
    pass


def _frac(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def _residue_expectation(n: int) -> Fraction:
    a, q = odd_part(n)
    return a + (analysis.expectation_residue(q) if q > 1 else 0)


def cmd_expect(args) -> int:
    if args.n < 1:
        raise UsageError(f"n must be >= 1, got {args.n}")
    report = analysis.expectation_exact(args.n)
    values = {}
    if args.method in ("alg1", "both"):
        values["alg1"] = report.e
    if args.method in ("residue", "both"):
        values["residue"] = _residue_expectation(args.n)
    e = next(iter(values.values()))
    agree = len(set(values.values())) == 1
    if args.json:
        _emit({
            "n": args.n, "e_num": e.numerator, "e_den": e.denominator,
            "T": report.T, "decimal": analysis.render_decimal(e, args.places),
            "method": args.method, "agree": agree,
        })
    else:
        print(f"{_frac(e)} ≈ {analysis.render_decimal(e, args.places)}")
        print(f"T = {report.T}")
        if len(values) > 1:
            print("alg1 and residue agree" if agree else "METHODS DISAGREE")
    return 0 if agree else 1


def _mersenne_peaks(limit: int) -> set[int]:
    peaks = set()
    s = 1
    while analysis.peak_location(s, 1) <= limit:
        k = 1
        while (n := analysis.peak_location(s, k)) <= limit:
            peaks.add(n)
            k += 1
        s += 1
    return peaks


def curve_rows(lo: int, hi: int):
    fermats = {fermat(m) for m in range(1, hi.bit_length() + 1)}
    mersennes = _mersenne_peaks(hi)
    for n in range(lo, hi + 1):
        e = analysis.expectation(n)
        b = analysis.bounds(n)
        yield [
            n, e.numerator, e.denominator, repr(float(e)), b.lower_discrete,
            repr(float(b.upper_sharp_discrete)), repr(b.upper_continuous),
            int(n in fermats), int(n in mersennes),
        ]


def cmd_curve(args) -> int:
    if not 2 <= args.min <= args.max <= CURVE_MAX:
        raise UsageError(f"need 2 <= min <= max <= {CURVE_MAX}")
    try:
        handle = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc}") from None
    with handle if args.out != "-" else nullcontext(handle) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CURVE_HEADER)
        for row in curve_rows(args.min, args.max):
            w.writerow(row)
    return 0


def _scheme_expectation(scheme: str, n: int, b: int | None) -> Fraction | None:
    if scheme == "optimal":
        return analysis.expectation(n)
    if scheme == "oddman":
        return Fraction(analysis.expectation_odd_man_out(n))
    if scheme == "partition":
        return analysis.expectation_partition(n)
    return analysis.expectation_rejection(n, b)[1]


def _draw_fn(scheme: str, n: int, b: int | None):
    if scheme not in SCHEMES:
        raise UsageError(f"unknown scheme {scheme!r}; choose from {', '.join(SCHEMES)}")
    if scheme == "oddman" and n < 3:
        raise UsageError("odd man out needs n >= 3")
    if scheme == "rejection":
        if b is None:
            b = ceil_log2(n)
        if n > 1 << b:
            raise UsageError(f"rejection needs n <= 2**b, got n={n}, b={b}")
        return (lambda src: SCHEMES[scheme](n, b, src)), b
    return (lambda src: SCHEMES[scheme](n, src)), b


def cmd_draw(args) -> int:
    if args.n < 1:
        raise UsageError(f"n must be >= 1, got {args.n}")
    if args.count < 1:
        raise UsageError("count must be >= 1")
    if args.script is None and args.seed is None:
        raise UsageError("--seed (or --script) is required")
    draw, b = _draw_fn(args.scheme, args.n, args.b)
    try:
        src = make_source("scripted", args.script) if args.script else make_source("seeded", args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    hist = [0] * args.n
    total = 0
    for i in range(args.count):
        tr = draw(src)
        hist[tr.choice] += 1
        total += tr.bits_used
        if not args.summary:
            print(f"{tr.choice} {tr.bits_used}")
    exact = _scheme_expectation(args.scheme, args.n, b)
    expected = [args.count / args.n] * args.n
    stat = audit.chi_square(hist, expected)
    summary = {
        "n": args.n, "scheme": args.scheme, "count": args.count, "seed": args.seed,
        "mean_bits": total / args.count,
        "exact_num": exact.numerator, "exact_den": exact.denominator,
        "exact_float": float(exact), "chi2": stat, "histogram": hist,
    }
    if args.json:
        _emit(summary)
    else:
        print(f"# mean bits {total / args.count:.6f}  exact {_frac(exact)} ≈ "
              f"{analysis.render_decimal(exact, 6)}  chi2 {stat:.3f} (dof {args.n - 1})")
    return 0


def cmd_peaks(args) -> int:
    rows = []
    for s in range(1, args.s_max + 1):
        for k in range(1, args.k_max + 1):
            p = analysis.peak_spec(s, k)
            rows.append(p)
    if args.json:
        _emit([{"s": p.s, "k": p.k, "n": p.location, "value_num": p.value.numerator,
                "value_den": p.value.denominator, "epoch": p.epoch} for p in rows])
    else:
        print("s,k,n,value,value_float,epoch")
        for p in rows:
            print(f"{p.s},{p.k},{p.location},{_frac(p.value)},{float(p.value):.12f},{p.epoch}")
    return 0


def cmd_audit(args) -> int:
    if args.mapping not in ("floor", "modulo"):
        raise UsageError(f"unknown mapping {args.mapping!r}")
    try:
        if args.mapping == "floor":
            rep = audit.exact_float_counts(args.n, args.b)
        else:
            rep = audit.exact_mod_counts(args.n, args.b)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    emp = None
    if args.trials:
        emp = audit.empirical_frequencies(args.mapping, args.n, args.trials,
                                          make_source("seeded", args.seed), b=args.b)
    if args.json:
        d = rep.to_dict()
        if emp is not None:
            d["empirical"] = {"histogram": emp.histogram, "chi2": emp.chi2, "passed": emp.passed}
        _emit(d)
        return 0
    print(f"n={rep.n} b={rep.b} mapping={rep.mapping}")
    print("counts " + ",".join(map(str, rep.counts)))
    print("lucky " + ",".join(map(str, rep.lucky)))
    print(f"ratio {rep.ratio.numerator}/{rep.ratio.denominator}")
    if rep.residue_pattern is not None:
        print(f"fold mod {len(rep.residue_pattern)} " + ",".join(map(str, rep.residue_pattern)))
    if emp is not None:
        print(f"empirical chi2 {emp.chi2:.3f} (dof {emp.dof}, threshold {emp.threshold:.3f})")
    return 0


def cmd_perm(args) -> int:
    if args.k < 1:
        raise UsageError(f"k must be >= 1, got {args.k}")
    perm, bits = orderings.draw_permutation(args.k, make_source("seeded", args.seed))
    if args.json:
        _emit({"k": perm.k, "mapping": list(perm.mapping), "bits_used": bits})
    else:
        print(perm)
    return 0


def cmd_bench(args) -> int:
    seeds = splitmix64(args.seed)
    rows = []
    for n in args.n:
        if n < 1:
            raise UsageError(f"n must be >= 1, got {n}")
        for scheme in SCHEMES:
            if scheme == "oddman" and not 3 <= n <= args.oddman_max:
                continue
            draw, b = _draw_fn(scheme, n, None)
            src = make_source("seeded", next(seeds))
            total = sum(draw(src).bits_used for _ in range(args.trials))
            exact = _scheme_expectation(scheme, n, b)
            rows.append({"n": n, "scheme": scheme, "trials": args.trials,
                         "mean_bits": total / args.trials, "exact_float": float(exact),
                         "exact_num": exact.numerator, "exact_den": exact.denominator})
    if args.json:
        _emit(rows)
    else:
        print("n,scheme,trials,mean_bits,exact,exact_float")
        for r in rows:
            print(f"{r['n']},{r['scheme']},{r['trials']},{r['mean_bits']:.6f},"
                  f"{_frac(Fraction(r['exact_num'], r['exact_den']))},{r['exact_float']:.6f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fairtoss", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("expect", help="exact expected tosses e[n]")
    s.add_argument("n", type=int)
    s.add_argument("--method", choices=["alg1", "residue", "both"], default="alg1")
    s.add_argument("--places", type=int, default=analysis.DEFAULT_PLACES)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_expect)

    s = sub.add_parser("curve", help="CSV of e[n] and its bounds")
    s.add_argument("min", type=int)
    s.add_argument("max", type=int)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_curve)

    s = sub.add_parser("draw", help="draw 1 of n and summarise")
    s.add_argument("n", type=int)
    s.add_argument("--scheme", default="optimal")
    s.add_argument("--count", type=int, default=1)
    s.add_argument("--seed", type=int)
    s.add_argument("--script", help="literal 0/1 toss script instead of a seed")
    s.add_argument("--b", type=int, help="bits per round for the rejection scheme")
    s.add_argument("--summary", action="store_true", help="omit per-draw lines")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_draw)

    s = sub.add_parser("peaks", help="Mersenne peak locations and values")
    s.add_argument("--s-max", type=int, default=3)
    s.add_argument("--k-max", type=int, default=3)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_peaks)

    s = sub.add_parser("audit", help="lucky-number counts of a randint idiom")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--b", type=int, required=True)
    s.add_argument("--mapping", default="floor")
    s.add_argument("--trials", type=int, default=0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_audit)

    s = sub.add_parser("perm", help="uniform random permutation")
    s.add_argument("k", type=int)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_perm)

    s = sub.add_parser("bench", help="mean tosses per scheme against exact cost")
    s.add_argument("n", type=int, nargs="+")
    s.add_argument("--trials", type=int, default=10000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--oddman-max", type=int, default=12)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"fairtoss {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SourceExhausted as exc:
        print(f"fairtoss {args.command}: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED


if __name__ == "__main__":
    sys.exit(main())
