"""Exact arithmetic on finite sums  sum_j p_j(x) exp(-alpha x^2 + c_j x).

With alpha = 1 these are the elements of the dense domain on which the operator
H = U + U^{-1} + V is symmetric; the family is closed under complex shifts,
multiplication by exponentials and linear combination, so H acts exactly.
The Fourier image has Gaussian coefficient pi^2/alpha, which is why alpha is kept
as a parameter instead of being fixed to 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

import numpy as np
from numpy.polynomial import polynomial as P

from .contour import DEFAULT_QUAD, QuadConfig, integrate, line
from .params import LatticeParams

MERGE_TOL = 1e-12


def _trim(coeffs):
    c = np.asarray(coeffs, dtype=complex)
    if c.size == 0:
        return np.zeros(1, dtype=complex)
    nz = np.nonzero(c)[0]
    return c[: nz[-1] + 1] if nz.size else np.zeros(1, dtype=complex)


def _poly_shift(coeffs, a):
    """Coefficients of p(x + a) given those of p(x) (ascending order)."""
    coeffs = np.asarray(coeffs, dtype=complex)
    n = len(coeffs)
    out = np.zeros(n, dtype=complex)
    for j, cj in enumerate(coeffs):
        for i in range(j + 1):
            out[i] += cj * comb(j, i) * a ** (j - i)
    return out


@dataclass(frozen=True)
class TestFunction:
    __test__ = False  # keep pytest from collecting the class

    terms: tuple  # of (coeffs ndarray ascending, c complex)
    alpha: complex = 1.0

    @classmethod
    def gaussian(cls, poly=(1.0,), c=0.0, alpha=1.0) -> "TestFunction":
        return cls(((_trim(poly), complex(c)),), alpha=alpha)

    @classmethod
    def zero(cls, alpha=1.0) -> "TestFunction":
        return cls((), alpha=alpha)

    def consolidated(self) -> "TestFunction":
        merged: list = []
        for coeffs, c in self.terms:
            for i, (mc, mcoef) in enumerate(merged):
                if abs(mc - c) <= MERGE_TOL * max(1.0, abs(c)):
                    merged[i] = (mc, P.polyadd(mcoef, coeffs))
                    break
            else:
                merged.append((c, np.asarray(coeffs, dtype=complex)))
        terms = tuple((_trim(coef), c) for c, coef in merged if np.any(_trim(coef) != 0))
        return TestFunction(terms, self.alpha)

    def __add__(self, other: "TestFunction") -> "TestFunction":
        if other.alpha != self.alpha:
            raise ValueError("cannot add test functions with different Gaussian widths")
        return TestFunction(self.terms + other.terms, self.alpha).consolidated()

    def __sub__(self, other):
        return self + (-1.0) * other

    def __rmul__(self, scalar) -> "TestFunction":
        return TestFunction(tuple((coef * scalar, c) for coef, c in self.terms), self.alpha)

    __mul__ = __rmul__

    def __neg__(self):
        return (-1.0) * self

    def __call__(self, x):
        return evaluate(self, x)

    @property
    def n_terms(self) -> int:
        return len(self.terms)


def evaluate(psi: TestFunction, x):
    x = np.asarray(x, dtype=complex)
    out = np.zeros(x.shape, dtype=complex)
    for coeffs, c in psi.terms:
        out = out + P.polyval(x, coeffs) * np.exp(-psi.alpha * x * x + c * x)
    return out


def shift(psi: TestFunction, a) -> TestFunction:
    """x -> psi(x + a), re-expanded into canonical terms."""
    a = complex(a)
    al = psi.alpha
    terms = []
    for coeffs, c in psi.terms:
        # -al (x+a)^2 + c (x+a) = -al x^2 + (c - 2 al a) x + (c a - al a^2)
        scale = np.exp(c * a - al * a * a)
        terms.append((_poly_shift(coeffs, a) * scale, c - 2 * al * a))
    return TestFunction(tuple(terms), al)


def multiply_exp(psi: TestFunction, mu) -> TestFunction:
    mu = complex(mu)
    return TestFunction(tuple((coef, c + mu) for coef, c in psi.terms), psi.alpha)


def multiply_x(psi: TestFunction) -> TestFunction:
    return TestFunction(tuple((P.polymulx(coef), c) for coef, c in psi.terms), psi.alpha)


def apply_H0(psi: TestFunction, params: LatticeParams, consolidate: bool = True) -> TestFunction:
    s = 2 * params.omega_prime
    out = TestFunction(shift(psi, s).terms + shift(psi, -s).terms, psi.alpha)
    return out.consolidated() if consolidate else out


def apply_H(psi: TestFunction, params: LatticeParams, consolidate: bool = True) -> TestFunction:
    """(H psi)(x) = psi(x + 2 omega') + psi(x - 2 omega') + e^{2 pi b x} psi(x)."""
    s = 2 * params.omega_prime
    terms = shift(psi, s).terms + shift(psi, -s).terms + multiply_exp(psi, 2 * math.pi * params.b).terms
    out = TestFunction(terms, psi.alpha)
    return out.consolidated() if consolidate else out


def apply_dual_H(psi: TestFunction, params: LatticeParams) -> TestFunction:
    s = 2 * params.omega
    terms = shift(psi, s).terms + shift(psi, -s).terms + multiply_exp(psi, 2 * math.pi / params.b).terms
    return TestFunction(terms, psi.alpha).consolidated()


def _gaussian_moment_poly(n: int, alpha):
    """E[(m + Y)^n], Y ~ N(0, 1/(2 alpha)), as polynomial coefficients in m."""
    out = np.zeros(n + 1, dtype=complex)
    for j in range(0, n + 1, 2):
        dfact = 1.0
        for i in range(j - 1, 0, -2):
            dfact *= i
        out[n - j] += comb(n, j) * dfact / (2 * alpha) ** (j // 2)
    return out


def fourier(psi: TestFunction) -> TestFunction:
    """psi^(p) = int psi(x) e^{-2 pi i p x} dx, in closed form.

    int x^n e^{-al x^2 + a x} dx = sqrt(pi/al) e^{a^2/(4 al)} E[(a/(2 al) + Y)^n]
    with a = c - 2 pi i p, which is again a polynomial times a Gaussian in p.
    """
    al = complex(psi.alpha)
    new_alpha = math.pi ** 2 / al
    terms = []
    for coeffs, c in psi.terms:
        # mean m = a/(2 al) = c/(2 al) - (pi i/al) p  (linear polynomial in p)
        m_poly = np.array([c / (2 * al), -1j * math.pi / al])
        acc = np.zeros(1, dtype=complex)
        for n, cn in enumerate(coeffs):
            if cn == 0:
                continue
            mom = _gaussian_moment_poly(n, al)
            # substitute m -> m_poly
            sub = np.zeros(1, dtype=complex)
            mpow = np.ones(1, dtype=complex)
            for coef in mom:
                sub = P.polyadd(sub, coef * mpow)
                mpow = P.polymul(mpow, m_poly)
            acc = P.polyadd(acc, cn * sub)
        # e^{a^2/(4 al)} = e^{c^2/(4 al)} e^{-(pi i c/al) p} e^{-(pi^2/al) p^2}
        pref = np.sqrt(math.pi / al) * np.exp(c * c / (4 * al))
        terms.append((acc * pref, -1j * math.pi * c / al))
    return TestFunction(tuple(terms), new_alpha).consolidated()


def tail_bound_interval(psi: TestFunction, tol: float = 1e-17):
    """Interval outside of which |psi| is below tol relative to its size scale."""
    al = complex(psi.alpha).real
    lo, hi = 0.0, 0.0
    for coeffs, c in psi.terms:
        centre = c.real / (2 * al)
        deg = len(coeffs) - 1
        width = math.sqrt((math.log(1 / tol) + 2 * deg + 5) / al)
        lo = min(lo, centre - width)
        hi = max(hi, centre + width)
    return lo, hi


def l2_norm_sq(psi: TestFunction, cfg: QuadConfig = DEFAULT_QUAD) -> float:
    if not psi.terms:
        return 0.0
    lo, hi = tail_bound_interval(psi, 1e-20)
    res = integrate(lambda x: np.abs(evaluate(psi, x)) ** 2, line(lo, hi), cfg)
    return float(np.real(res.value))


def inner(psi: TestFunction, chi: TestFunction, cfg: QuadConfig = DEFAULT_QUAD) -> complex:
    if not psi.terms or not chi.terms:
        return 0j
    lo1, hi1 = tail_bound_interval(psi, 1e-20)
    lo2, hi2 = tail_bound_interval(chi, 1e-20)
    lo, hi = max(lo1, lo2), min(hi1, hi2)
    f = lambda x: np.conj(evaluate(psi, x)) * evaluate(chi, x)
    return complex(integrate(f, line(lo, hi), cfg).value)


# a few named members of the domain used by tests, scripts and the CLI
BUILTIN = {
    "gauss": TestFunction.gaussian((1.0,)),
    "xgauss": TestFunction.gaussian((0.0, 1.0)),
    "onepx": TestFunction.gaussian((1.0, 1.0)),
    "shifted": TestFunction.gaussian((1.0,), c=0.6),
}
