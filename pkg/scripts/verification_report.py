#!/usr/bin/env python3
"""Run the full invariant suite and print a per-check summary.

Equivalent to `hyperboloid verify --format text`, with wall-clock timing
per module and optional fault injection for exercising the negative
controls."""

import argparse
import time

from hyperboloid.config import RunConfig
from hyperboloid.verify import MODULES, run_verification


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--only", choices=MODULES)
    ap.add_argument("--inject-fault", action="append", default=[])
    ap.add_argument("--a", type=float, default=1.0)
    ap.add_argument("--m", type=float, default=1.0)
    args = ap.parse_args()

    cfg = RunConfig(a=args.a, m=args.m)
    modules = (args.only,) if args.only else MODULES
    all_ok = True
    for mod in modules:
        t0 = time.monotonic()
        rep = run_verification(cfg, only=mod, faults=tuple(args.inject_fault))
        dt = time.monotonic() - t0
        for c in rep.checks:
            mark = "PASS" if c.passed else "FAIL"
            print(f"{mark} {c.module}.{c.name}: measured {c.measured:.3e} "
                  f"vs tol {c.tolerance:.1e}")
        n_fail = sum(not c.passed for c in rep.checks)
        print(f"-- {mod}: {len(rep.checks)} checks, {n_fail} failed, {dt:.1f} s")
        all_ok = all_ok and rep.passed
    print("result:", "PASS" if all_ok else "FAIL")
    return 0 if all_ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
