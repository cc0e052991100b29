"""The modular quantum dilogarithm gamma(z).

Inside the strip |Im z| < |omega| + |omega'| the function is the exponential of

    -(1/4) * int e^{itz} / (sin(omega t) sin(omega' t)) dt / t,

with the contour passing above t = 0.  With omega = i/(2b), omega' = ib/2 one has
sin(omega t) sin(omega' t) = -sinh(t/(2b)) sinh(bt/2), so

    log gamma(z) = (1/4) * int_{Im t = delta} e^{itz} / (sinh(t/(2b)) sinh(bt/2) t) dt

for any 0 < delta < min(2 pi b, 2 pi / b) (no poles are crossed).  Moving the line
below the origin instead picks up the residue of the triple pole at t = 0,

    Res_{t=0} = -2 z^2 - (tau + 1/tau)/6,

which turns into the prefactor exp(i beta + i pi z^2).  The lower line is used
for Re z < -2, where the factor |e^{itz}| = e^{-delta Re z} on the upper line
would cost digits through cancellation.

Outside the strip the two shift equations

    gamma(z + omega') = (1 + e^{-2 pi b z})   gamma(z - omega')
    gamma(z + omega)  = (1 + e^{-2 pi z / b}) gamma(z - omega)

carry the value in from the inner strip |Im z| <= min(b, 1/b)/2.  All products are
accumulated as logarithms, so values far beyond the double range are usable as
long as they are combined before exponentiation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .contour import DEFAULT_QUAD, QuadConfig, gamma_line_delta, integrate, shifted_line
from .errors import DomainError, SingularityError
from .params import LatticeParams

LATTICE_RADIUS = 1e-8
STRIP_MARGIN = 1e-3
# below this real part the line under the origin is used
_LOWER_LINE_BELOW = -2.0
_CHUNK = 128


@dataclass(frozen=True)
class GammaValue:
    """gamma(z) stored as mantissa * exp(log_scale)."""

    mantissa: complex
    log_scale: float
    at_pole: bool = False
    at_zero: bool = False

    @classmethod
    def from_log(cls, logval: complex) -> "GammaValue":
        logval = complex(logval)
        if logval.real == -math.inf:
            return cls(0j, 0.0, at_zero=True)
        if logval.real == math.inf or math.isnan(logval.real):
            return cls(complex("nan"), math.inf, at_pole=True)
        return cls(complex(np.exp(1j * logval.imag)), logval.real)

    @property
    def value(self) -> complex:
        if self.at_pole:
            raise SingularityError("gamma evaluated at a pole")
        if self.at_zero:
            return 0j
        return self.mantissa * math.exp(self.log_scale)

    @property
    def log(self) -> complex:
        if self.at_pole:
            return complex(math.inf, 0.0)
        if self.at_zero:
            return complex(-math.inf, 0.0)
        return complex(self.log_scale, np.angle(self.mantissa))

    def __complex__(self):
        return self.value


def strip_halfwidth(params: LatticeParams) -> float:
    return params.abs_omega + params.abs_omega_prime


def _log1pexp(w):
    """log(1 + e^w) without overflow (complex, any branch of the imaginary part)."""
    w = np.asarray(w, dtype=complex)
    big = w.real > 0
    out = np.empty_like(w)
    out[big] = w[big] + np.log1p(np.exp(-w[big]))
    out[~big] = np.log1p(np.exp(w[~big]))
    return out


def _integrand_factory(z, params: LatticeParams):
    b = params.b

    def f(t):
        t = t[:, None]
        # 1/(sinh(a) sinh(c)) = 4 e^{-s(a+c)} / ((1 - e^{-2sa})(1 - e^{-2sc})), s = sign Re t,
        # which stays finite far out on the line
        s = np.where(t.real >= 0, 1.0, -1.0)
        a, c = t / (2 * b), b * t / 2
        den = (1 - np.exp(-2 * s * a)) * (1 - np.exp(-2 * s * c)) * t
        return 4 * np.exp(1j * t * z[None, :] - s * (a + c)) / den

    return f


def _truncation(z, params: LatticeParams, delta: float, lower: bool) -> float:
    rate = 0.5 * (params.b + 1 / params.b) - np.max(np.abs(z.imag))
    growth = 0.0 if lower else delta * max(0.0, -float(np.min(z.real)))
    return max(12.0, (40.0 + growth) / rate)


def log_gamma_strip(z, params: LatticeParams, cfg: QuadConfig = DEFAULT_QUAD,
                    delta: float | None = None):
    """log gamma(z) by direct quadrature; z must lie in the strip (array in, array out)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    limit = strip_halfwidth(params) * (1 - STRIP_MARGIN)
    if np.any(np.abs(z.imag) > limit):
        raise DomainError(f"|Im z| must be <= {limit:.6g} for the strip integral")
    if delta is None:
        delta = gamma_line_delta(params)
    out = np.empty(z.shape, dtype=complex)
    # far out the integral is below 1e-18: the nearest poles above (below) the line sit
    # at +-2 pi i min(b, 1/b), so the remainder is O(exp(-2 pi min(b, 1/b) |Re z|))
    far = _far_distance(params)
    right = z.real > far
    left = z.real < -far
    out[right] = 0.0
    out[left] = 1j * params.beta + 1j * math.pi * z[left] ** 2
    mid = np.nonzero(~(left | right))[0]
    if mid.size:
        out[mid] = _strip_binned(z[mid], params, cfg, delta)
    return out


def _far_distance(params: LatticeParams) -> float:
    return 44.0 / (2 * math.pi * min(params.b, 1 / params.b))


def _strip_binned(z, params, cfg, delta):
    out = np.empty(z.shape, dtype=complex)
    lower = z.real < _LOWER_LINE_BELOW
    re_bin = _re_bins(z.real, lower)
    im_bin = np.searchsorted(_IM_EDGES, np.abs(z.imag) / strip_halfwidth(params))
    keys = np.stack([lower.astype(int), re_bin, im_bin], axis=1)
    for key in np.unique(keys, axis=0):
        sel = np.nonzero(np.all(keys == key, axis=1))[0]
        use_lower, rb, ib = bool(key[0]), int(key[1]), int(key[2])
        zz = z[sel]
        if ib == len(_IM_EDGES) - 1:
            out[sel] = _adaptive_strip(zz, params, cfg, float(delta), use_lower)
            continue
        nodes, wg = _strip_rule(params, cfg, float(delta), use_lower, rb, ib)
        for start in range(0, sel.size, _CHUNK):
            part = zz[start:start + _CHUNK]
            val = np.exp(1j * np.outer(part, nodes)) @ wg
            if use_lower:
                val = val + 1j * params.beta + 1j * math.pi * part ** 2
            out[sel[start:start + _CHUNK]] = val
    return out


# |Im z| / (strip half-width) bins and |Re z| bins for the cached quadrature rules
_IM_EDGES = np.array([0.5, 0.8, 0.95, 1.0])
_RULES: dict = {}


def _adaptive_strip(z, params, cfg, delta, use_lower):
    # close to the strip edge the decay is slow; integrate per chunk instead of caching
    out = np.empty(z.shape, dtype=complex)
    for start in range(0, z.size, _CHUNK):
        zz = z[start:start + _CHUNK]
        contour = shifted_line(delta, _truncation(zz, params, delta, use_lower), params)
        if use_lower:
            contour = _lowered(contour)
        val = 0.25 * np.asarray(integrate(_integrand_factory(zz, params), contour, cfg).value)
        if use_lower:
            val = val + 1j * params.beta + 1j * math.pi * zz ** 2
        out[start:start + _CHUNK] = val
    return out


def _re_bins(x, lower):
    # upper line: [-2, 1], [1, 4], then doubling; lower line mirrored
    y = np.where(lower, -x - 2.0, x + 2.0)  # distance from the switch point
    return np.where(y <= 3.0, 0, np.ceil(np.log2(np.maximum(y, 3.0) / 3.0))).astype(int)


def _bin_box(params: LatticeParams, use_lower: bool, rb: int, ib: int):
    y_hi = 3.0 * 2.0 ** rb
    y_lo = 0.0 if rb == 0 else y_hi / 2
    if use_lower:
        re_lo, re_hi = -2.0 - y_hi, -2.0 - y_lo
    else:
        re_lo, re_hi = -2.0 + y_lo, -2.0 + y_hi
    im_hi = float(_IM_EDGES[ib]) * strip_halfwidth(params)
    if ib == len(_IM_EDGES) - 1:
        im_hi = strip_halfwidth(params) * (1 - STRIP_MARGIN)
    return re_lo, re_hi, im_hi


def _strip_rule(params: LatticeParams, cfg: QuadConfig, delta: float, use_lower: bool, rb: int, ib: int):
    """Nodes and weights of the t-line, shared by all z in one (Re, Im) bin.

    Built adaptively once from probe points spanning the bin; the integrand is
    analytic in z, so the rule is accurate in between as well.
    """
    key = (params.b, cfg, delta, use_lower, rb, ib)
    rule = _RULES.get(key)
    if rule is not None:
        return rule
    re_lo, re_hi, im_hi = _bin_box(params, use_lower, rb, ib)
    probes = np.array([complex(r, i) for r in np.linspace(re_lo, re_hi, 5)
                       for i in np.linspace(-im_hi, im_hi, 5)])
    T = _truncation(probes, params, delta, use_lower)
    contour = shifted_line(delta, T, params)
    if use_lower:
        # reflect the line: t -> conj(t) runs along Im t = -delta
        contour = _lowered(contour)
    # coarse start; refinement concentrates nodes near t = 0 where the integrand varies fastest
    panels = max(8, int(math.ceil(2 * T * max(1.0, abs(re_lo), abs(re_hi)) / 16)))
    res = integrate(_integrand_factory(probes, params), contour, cfg, initial_panels=panels, keep_rule=True)
    # fold the z-independent factor and the 1/4 into the weights
    g = _integrand_factory(np.zeros(1, dtype=complex), params)(res.nodes)[:, 0]
    rule = (res.nodes, 0.25 * res.weights * g)
    _RULES[key] = rule
    return rule


def _lowered(contour):
    from .contour import ContourSpec, LineSegment

    seg = contour.segments[0]
    start = seg.start.conjugate()
    return ContourSpec((LineSegment(start, seg.direction, seg.t0, seg.t1),),
                       label="gamma-line-lower", truncation=contour.truncation)


def gamma_strip(z, params: LatticeParams, cfg: QuadConfig = DEFAULT_QUAD) -> GammaValue:
    return GammaValue.from_log(log_gamma_strip(np.array([complex(z)]), params, cfg)[0])


def lattice_flags(z, params: LatticeParams, radius: float = LATTICE_RADIUS):
    """Return boolean arrays (at_pole, at_zero) for the lattice +-((2m+1) omega + (2n+1) omega')."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    pole = np.zeros(z.shape, dtype=bool)
    zero = np.zeros(z.shape, dtype=bool)
    cand = np.nonzero(np.abs(z.real) < radius)[0]
    a, c = params.abs_omega, params.abs_omega_prime
    for i in cand:
        y = abs(z[i].imag)
        m = 0
        while (2 * m + 1) * a <= y + radius:
            rest = y - (2 * m + 1) * a
            n = round((rest / c - 1) / 2)
            if n >= 0 and abs(rest - (2 * n + 1) * c) < radius:
                if z[i].imag > 0:
                    zero[i] = True
                else:
                    pole[i] = True
                break
            m += 1
    return pole, zero


def log_gamma(z, params: LatticeParams, cfg: QuadConfig = DEFAULT_QUAD):
    """log gamma(z) on the whole plane (vectorized).

    Zeros give -inf real part; poles give +inf.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.empty(z.shape, dtype=complex)
    pole, zero = lattice_flags(z, params)
    out[pole] = complex(math.inf, 0.0)
    out[zero] = complex(-math.inf, 0.0)
    ok = ~(pole | zero)
    if not np.any(ok):
        return out
    zz = z[ok]
    b = params.b
    if b <= 1.0:
        step, half, scale = 2 * params.omega_prime, params.omega_prime, 2 * math.pi * b
    else:
        step, half, scale = 2 * params.omega, params.omega, 2 * math.pi / b
    s = step.imag
    h = 0.5 * s
    nsteps = np.where(np.abs(zz.imag) > h, np.ceil((np.abs(zz.imag) - h) / s), 0).astype(int)
    sign = np.sign(zz.imag).astype(int)
    base = zz - sign * nsteps * step
    acc = np.zeros(zz.shape, dtype=complex)
    for j in range(1, int(nsteps.max(initial=0)) + 1):
        active = nsteps >= j
        # point reached after j-1 steps from the original z
        zj = zz[active] - sign[active] * (j - 1) * step
        up = sign[active] > 0
        # Im > 0: gamma(zj) = (1 + e^{-scale (zj - half)}) gamma(zj - step)
        # Im < 0: gamma(zj) = gamma(zj + step) / (1 + e^{-scale (zj + half)})
        arg = np.where(up, zj - half, zj + half)
        term = _log1pexp(-scale * arg)
        acc[active] += np.where(up, term, -term)
    out[ok] = acc + log_gamma_strip(base, params, cfg)
    return out


def gamma(z, params: LatticeParams, cfg: QuadConfig = DEFAULT_QUAD) -> GammaValue:
    return GammaValue.from_log(log_gamma(np.array([complex(z)]), params, cfg)[0])


def gamma_values(z, params: LatticeParams, cfg: QuadConfig = DEFAULT_QUAD):
    """Plain complex values of gamma on an array (overflow gives inf)."""
    with np.errstate(over="ignore"):
        return np.exp(log_gamma(z, params, cfg))


def gamma_ratio(z1, z2, params: LatticeParams, cfg: QuadConfig = DEFAULT_QUAD) -> complex:
    """gamma(z1) / gamma(z2) formed in log space."""
    lg = log_gamma(np.array([complex(z1), complex(z2)]), params, cfg)
    if not np.all(np.isfinite(lg.real)):
        raise SingularityError(f"gamma has a pole or zero at {z1} or {z2}")
    return complex(np.exp(lg[0] - lg[1]))


def pole_residue(params: LatticeParams, eps=(1e-2, 5e-3), symmetric: bool = True,
                 cfg: QuadConfig = DEFAULT_QUAD) -> complex:
    """Residue of gamma at -omega'' from two-point Richardson extrapolation of eps * gamma(eps - omega'').

    With ``symmetric`` the estimate at each eps is averaged with the one at -eps,
    which removes the odd Laurent terms; the extrapolation then kills the eps^2 term.
    Without it, the plain one-sided estimates are extrapolated linearly.
    """
    e1, e2 = (float(e) for e in eps)
    wdd = params.omega_dprime

    def est(e):
        val = e * gamma_values(np.array([e - wdd]), params, cfg)[0]
        if symmetric:
            val = 0.5 * (val + (-e) * gamma_values(np.array([-e - wdd]), params, cfg)[0])
        return val

    f1, f2 = est(e1), est(e2)
    p = 2 if symmetric else 1
    r = (e1 / e2) ** p
    return complex((r * f2 - f1) / (r - 1))
