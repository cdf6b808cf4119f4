#!/usr/bin/env python3
"""Geodesic integrator convergence sweep: RK4 error vs dt against the
closed-form oracle, printed as a table with observed orders."""

import argparse
import math

import numpy as np

from hyperboloid.classical import (
    EmbeddedState, closed_form_geodesic, integrate_embedded,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--T", type=float, default=10.0)
    ap.add_argument("--a", type=float, default=1.0)
    ap.add_argument("--m", type=float, default=1.0)
    ap.add_argument("--p0", default="1,0,0")
    ap.add_argument("--dts", default="0.016,0.008,0.004,0.002,0.001")
    args = ap.parse_args()

    p0 = np.array([float(v) for v in args.p0.split(",")])
    s0 = EmbeddedState(np.array([0.0, 0.0, args.a]), p0)
    dts = [float(v) for v in args.dts.split(",")]

    print(f"{'dt':>10} {'max |x err|':>14} {'order':>7}")
    prev = None
    for dt in dts:
        rec = integrate_embedded(s0, args.m, args.a, dt, args.T)
        err = max(
            float(np.max(np.abs(
                rec.x[k] - closed_form_geodesic(s0, args.m, args.a, rec.t[k]).x)))
            for k in range(0, len(rec.t), max(1, len(rec.t) // 50)))
        order = "" if prev is None else f"{math.log2(prev / max(err, 1e-300)):7.2f}"
        print(f"{dt:10.4g} {err:14.3e} {order:>7}")
        prev = err


if __name__ == "__main__":
    main()
