"""Reference values built independently of the contour machinery.

The power series for I_nu uses scipy's reciprocal gamma, so neither the
Mellin-Barnes integrals nor the internal Lanczos gamma are involved.  These are
used by the verification suites as ground truth.
"""
from __future__ import annotations

import cmath
import math

from scipy.special import rgamma


def bessel_I_series(t: complex, nu: complex, tol: float = 1e-17, max_terms: int = 400) -> complex:
    """I_nu(t) = sum_m (t/2)^{2m+nu} / (m! Gamma(m+nu+1)), principal branch of t^nu."""
    t, nu = complex(t), complex(nu)
    half = t / 2
    lead = cmath.exp(nu * cmath.log(half))
    q = half * half
    term = complex(rgamma(nu + 1))
    total = term
    for m in range(1, max_terms):
        # ratio of consecutive terms, so rgamma is evaluated once
        term *= q / (m * (m + nu))
        total += term
        if abs(term) < tol * abs(total):
            break
    return lead * total


def bessel_K_series(x: float, k: float) -> float:
    """K_{ik}(e^x) from pi/(2 sin(pi nu)) (I_{-nu} - I_nu) with nu = ik.

    Cancellation costs about e^x/|nu| digits, so this is only meant for moderate x.
    """
    nu = 1j * k
    t = math.exp(x)
    val = math.pi / (2 * cmath.sin(math.pi * nu)) * (bessel_I_series(t, -nu) - bessel_I_series(t, nu))
    return val.real
