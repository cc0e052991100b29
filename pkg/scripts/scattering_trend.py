#!/usr/bin/env python3
"""S(k) for the lattice problem next to its classical counterpart, and the approach
of both to -1 as k -> 0."""
import argparse

import numpy as np

from qdspec.bessel import tilde_S
from qdspec.params import make_params
from qdspec.transform import scattering_S
from qdspec.wavefunctions import WaveContext

ap = argparse.ArgumentParser()
ap.add_argument("--b", type=float, default=1.0)
args = ap.parse_args()

ctx = WaveContext(make_params(args.b))
print(f"{'k':>8} {'S(k)':>26} {'|S|-1':>10} {'|S+1|':>10} {'S~(k)':>26}")
for k in np.geomspace(2.0, 5e-4, 15):
    S = scattering_S(k, ctx)
    St = tilde_S(k)
    print(f"{k:8.4f} {S.real:12.8f}{S.imag:+13.8f}j {abs(S) - 1:10.1e} {abs(S + 1):10.2e} "
          f"{St.real:12.8f}{St.imag:+13.8f}j")
