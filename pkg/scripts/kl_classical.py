#!/usr/bin/env python3
"""Classical Kontorovich-Lebedev transform of a Gaussian in the variable x = log t:
K_{ik}(e^x) against an independent series, the spectral weight and the round trip."""
import numpy as np

from qdspec.bessel import bessel_K, kl_parseval_gap, kl_round_trip_error, kl_samples
from qdspec.oracles import bessel_K_series
from qdspec.testfunctions import BUILTIN

print("K_{ik}(e^x): Mellin-Barnes vs power series")
for x in (-2.0, 0.0, 1.0, 2.0):
    for k in (0.3, 1.5):
        a, b = bessel_K(x, k).real, bessel_K_series(x, k)
        print(f"  x={x:5.1f} k={k:4.1f}  {a:+.15e}  {b:+.15e}  diff {abs(a - b):.1e}")

psi = BUILTIN["gauss"]
s = kl_samples(psi)
xs = np.linspace(-2, 1, 7)
print(f"\nk-range [0, {s.meta['k_max']:.0f}], {s.grid.size} nodes, tail share {s.meta['tail_share']:.1e}")
print(f"Parseval gap     {kl_parseval_gap(psi, s):.2e}")
print(f"round-trip error {kl_round_trip_error(psi, xs, s):.2e}")
