#!/usr/bin/env python3
"""Table of gamma(x) on the real line for a few couplings, with |gamma| and the
distance of log gamma from its two asymptotic forms."""
import argparse
import cmath
import math

import numpy as np

from qdspec.params import make_params
from qdspec.qdilog import log_gamma

ap = argparse.ArgumentParser()
ap.add_argument("--b", type=float, nargs="+", default=[0.6, 1.0, 1.4])
ap.add_argument("--xs", type=float, nargs="+", default=list(np.linspace(-6, 6, 13)))
args = ap.parse_args()

for b in args.b:
    p = make_params(b)
    print(f"b = {b}   beta = {p.beta:.6f}")
    print(f"{'x':>6} {'Re gamma':>14} {'Im gamma':>14} {'|gamma|':>10} {'asym err':>10}")
    for x in args.xs:
        lg = complex(log_gamma([x], p)[0])
        g = cmath.exp(lg)
        # gamma -> 1 on the right, e^{i pi z^2 + i beta} on the left
        ref = 0.0 if x > 0 else 1j * math.pi * x * x + 1j * p.beta
        err = abs(cmath.exp(lg - ref) - 1)
        print(f"{x:6.2f} {g.real:14.8f} {g.imag:14.8f} {abs(g):10.6f} {err:10.2e}")
    print()
