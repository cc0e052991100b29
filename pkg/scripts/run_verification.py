#!/usr/bin/env python3
"""Run the verification suites and print one line per suite.

    python3 scripts/run_verification.py            # all suites
    python3 scripts/run_verification.py 1 4 9 -v   # a subset, with every check
"""
import argparse
import sys

from qdspec.suites import SUITES, run_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("suites", nargs="*", type=int, default=sorted(SUITES))
    ap.add_argument("--b", type=float, default=None, help="override the couplings of every suite")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("-v", "--verbose", action="store_true")
    args = ap.parse_args()

    ok = True
    for n in args.suites:
        rep = run_suite(n, b=args.b, seed=args.seed)
        print(rep.line(), flush=True)
        if args.verbose:
            for c in rep.checks:
                mark = " " if c.passed else "!"
                print(f"   {mark} {c.name:48s} {c.residual:10.3e}  < {c.tol:.0e}")
        ok &= rep.passed
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
