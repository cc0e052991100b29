#!/usr/bin/env python3
"""Spectral picture of a test function: (U psi)(k), its weight |U psi|^2 rho, the
Parseval gap and the reconstruction at a few points."""
import argparse

import numpy as np

from qdspec.params import make_params
from qdspec.testfunctions import BUILTIN, evaluate
from qdspec.transform import parseval_gap, round_trip_error, spectral_samples, rho
from qdspec.wavefunctions import WaveContext

ap = argparse.ArgumentParser()
ap.add_argument("--b", type=float, default=1.0)
ap.add_argument("--psi", choices=sorted(BUILTIN), default="onepx")
ap.add_argument("--every", type=int, default=4, help="print every n-th k-node")
args = ap.parse_args()

ctx = WaveContext(make_params(args.b))
psi = BUILTIN[args.psi]
xs = np.array([-1.5, -0.5, 0.0, 0.5, 1.5])
s = spectral_samples(psi, ctx, xprobe=xs)

print(f"psi = {args.psi}, b = {args.b}, {s.grid.size} k-nodes up to k = {s.meta['k_max']:.1f}")
print(f"{'k':>8} {'U psi':>14} {'|U psi|^2 rho':>14}")
for k, v in list(zip(s.grid, s.values))[::args.every]:
    print(f"{k:8.4f} {v.real:14.6e} {abs(v) ** 2 * rho(k, ctx.params):14.6e}")
print(f"\nParseval gap     {parseval_gap(psi, ctx, samples=s):.3e}")
print(f"round-trip error {round_trip_error(psi, xs, ctx, samples=s):.3e}  on x = {xs.tolist()}")
print("psi(x)          ", np.round(evaluate(psi, xs).real, 8).tolist())
