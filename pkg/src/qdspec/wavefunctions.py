"""Scattering solution, Jost solutions and Casorati determinants.

The momentum-space wave function

    phi^(p, k) = exp(-i beta - i pi k^2) exp(-i pi (p - omega'')^2)
                 * gamma(p + k - omega'') gamma(p - k - omega'')

solves the first order equation phi^(p + 2 omega') = 2(cosh(2 pi b k) - cosh(2 pi b p)) phi^(p).
Its inverse Fourier transform over the contour L,

    phi(x, k) = int_L phi^(p, k) exp(2 pi i p x) dp,

is entire in x.  Along the descending rays of L the integrand decays like a
Gaussian in the ray parameter, but the factor exp(2 pi i p x) grows there when
Re x > 0 or Im x != 0.  The ray angle is therefore picked per argument (steeper
rays for x on the left, flatter rays for large Re x) from a small fixed menu, and
the nodes for each angle are shared by all arguments in the group.

Everything is symmetric under k -> -k, so phi(x, -k) = phi(x, k) exactly.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .contour import DEFAULT_QUAD, QuadConfig, default_sigma, integrate, kashaev_L
from .errors import DomainError, SingularityError
from .params import LatticeParams
from .qdilog import log_gamma

RAY_ANGLES = (math.pi / 4, math.pi / 8, math.pi / 16, math.pi / 32, math.pi / 64)
# log of the relative size at which the L-contour rays are cut
_RAY_CUT = 42.0
# k-circle used to evaluate formulas at their removable singularities
_CIRCLE_POINTS = 12


@dataclass
class WaveContext:
    params: LatticeParams
    sigma: float | None = None
    cfg: QuadConfig = DEFAULT_QUAD
    k_exclusion: float = 1e-2
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.sigma is None:
            self.sigma = default_sigma(self.params)
        p = self.params
        if not (p.abs_omega < self.sigma < p.abs_omega_dprime):
            raise DomainError(f"sigma={self.sigma} must lie in ({p.abs_omega}, {p.abs_omega_dprime})")
        if self.k_exclusion <= 0:
            raise DomainError("k_exclusion must be positive")

    def evaluator(self, k) -> "PhiEvaluator":
        key = _canonical_k(k)
        ev = self._cache.get(key)
        if ev is None:
            if len(self._cache) > 512:
                self._cache.clear()
            ev = PhiEvaluator(key, self)
            self._cache[key] = ev
        return ev

    def with_params(self, params: LatticeParams) -> "WaveContext":
        return WaveContext(params, None, self.cfg, self.k_exclusion)


def _canonical_k(k) -> complex:
    k = complex(k)
    if k.imag < 0 or (k.imag == 0 and k.real < 0):
        k = -k
    return k


# --- momentum space ------------------------------------------------------------------

def log_hat_phi(p, k, ctx: WaveContext):
    p = np.atleast_1d(np.asarray(p, dtype=complex))
    k = complex(k)
    par = ctx.params
    wdd = par.omega_dprime
    lg = log_gamma(np.concatenate([p + k - wdd, p - k - wdd]), par, ctx.cfg)
    n = p.size
    return (-1j * par.beta - 1j * math.pi * k * k - 1j * math.pi * (p - wdd) ** 2
            + lg[:n] + lg[n:])


def hat_phi(p, k, ctx: WaveContext):
    """Kashaev's wave function (vectorized in p)."""
    pa = np.atleast_1d(np.asarray(p, dtype=complex))
    k = complex(k)
    if np.any(np.minimum(np.abs(pa - k), np.abs(pa + k)) < 1e-8):
        raise SingularityError("p coincides with a singular point +-k of the wave function")
    with np.errstate(over="ignore"):
        out = np.exp(log_hat_phi(pa, k, ctx))
    return out if np.ndim(p) else complex(out[0])


# --- coordinate space ------------------------------------------------------------------

def _ray_loss(z, theta):
    """Log of the peak of |exp(2 pi i p z)| along a ray of angle theta against the
    Gaussian decay of phi^ (the digits lost to cancellation)."""
    X = np.maximum(z.real, 0.0)
    H = np.abs(z.imag)
    return math.pi * (X * math.sin(theta) + H * math.cos(theta)) ** 2 / math.sin(2 * theta)


def _pick_angle(z) -> np.ndarray:
    # steepest ray (shortest contour) that loses at most ~2 digits more than the best one
    losses = np.stack([_ray_loss(z, th) for th in RAY_ANGLES], axis=1)
    ok = losses <= losses.min(axis=1, keepdims=True) + 5.0
    return np.argmax(ok, axis=1)


class _Memo:
    """Remembers the values of a vectorized function at every node it was called on."""

    def __init__(self, fn):
        self.fn = fn
        self.z: list = []
        self.v: list = []

    def __call__(self, z):
        v = self.fn(z)
        self.z.append(z)
        self.v.append(v)
        return v

    def lookup(self, z):
        zs = np.concatenate(self.z)
        vs = np.concatenate(self.v)
        order = np.argsort(zs)
        zs, vs = zs[order], vs[order]
        idx = np.clip(np.searchsorted(zs, z), 0, zs.size - 1)
        hit = zs[idx] == z
        out = np.where(hit, vs[idx], 0)
        if not np.all(hit):
            out[~hit] = self.fn(z[~hit])
        return out


class _Rule:
    def __init__(self, nodes, wphi, box):
        self.nodes = nodes
        self.wphi = wphi  # quadrature weight times phi^ at the node
        self.box = box  # (re_min, re_max, im_min, im_max) of arguments it was built for

    def covers(self, z) -> bool:
        a, b, c, d = self.box
        return (z.real.min() >= a and z.real.max() <= b and z.imag.min() >= c and z.imag.max() <= d)


class PhiEvaluator:
    """phi(., k) and its x-derivatives for one k, with cached contour rules."""

    def __init__(self, k: complex, ctx: WaveContext):
        self.k = complex(k)
        self.ctx = ctx
        if self.k.imag >= ctx.sigma:
            raise DomainError(f"Im k={self.k.imag} must stay below the contour height sigma={ctx.sigma}")
        self._rules: dict[int, _Rule] = {}

    def _build(self, idx: int, z) -> _Rule:
        theta = RAY_ANGLES[idx]
        old = self._rules.get(idx)
        re_lo, re_hi = float(z.real.min()), float(z.real.max())
        im_lo, im_hi = float(z.imag.min()), float(z.imag.max())
        if old is not None:
            a, b, c, d = old.box
            re_lo, re_hi, im_lo, im_hi = min(re_lo, a), max(re_hi, b), min(im_lo, c), max(im_hi, d)
        # pad a little so neighbouring requests reuse the rule
        re_lo, re_hi = re_lo - 0.5, re_hi + 0.5
        im_lo, im_hi = im_lo - 0.05, im_hi + 0.05
        box = (re_lo, re_hi, im_lo, im_hi)
        A = math.pi * math.sin(2 * theta)
        growth = max(0.0, re_hi) * math.sin(theta) + max(abs(im_lo), abs(im_hi)) * math.cos(theta)
        B = 2 * math.pi * growth
        T = (B + math.sqrt(B * B + 4 * A * _RAY_CUT)) / (2 * A)
        contour = kashaev_L(self.k, self.ctx.params, self.ctx.sigma, T=T, ray_angle=theta)
        probes = np.array([complex(r, i) for r in np.linspace(re_lo, re_hi, 7)
                           for i in np.linspace(im_lo, im_hi, 3)])
        hat = _Memo(lambda p: np.exp(log_hat_phi(p, self.k, self.ctx)))

        def f(p):
            return hat(p)[:, None] * np.exp(2j * math.pi * p[:, None] * probes[None, :])

        res = integrate(f, contour, self.ctx.cfg, keep_rule=True)
        hp = hat.lookup(res.nodes)
        rule = _Rule(res.nodes, res.weights * hp, box)
        self._rules[idx] = rule
        return rule

    def __call__(self, z, deriv: int = 0):
        za = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.empty(za.shape, dtype=complex)
        flat = za.ravel()
        res = np.empty(flat.shape, dtype=complex)
        groups = _pick_angle(flat)
        for idx in np.unique(groups):
            sel = groups == idx
            zz = flat[sel]
            rule = self._rules.get(int(idx))
            if rule is None or not rule.covers(zz):
                rule = self._build(int(idx), zz)
            w = rule.wphi
            if deriv:
                w = w * (2j * math.pi * rule.nodes) ** deriv
            res[sel] = np.exp(2j * math.pi * np.outer(zz, rule.nodes)) @ w
        out[...] = res.reshape(za.shape)
        return out if np.ndim(z) else complex(out.ravel()[0])


def phi(x, k, ctx: WaveContext, deriv: int = 0):
    """Scattering solution phi(x, k) (vectorized in x; entire in x)."""
    return ctx.evaluator(k)(x, deriv)


def log_coeff_M(k, ctx: WaveContext) -> complex:
    par = ctx.params
    k = complex(k)
    lg = log_gamma(np.array([2 * k - par.omega_dprime]), par, ctx.cfg)[0]
    return 1j * (par.beta + math.pi / 4) - 2j * math.pi * k * (k - par.omega_dprime) + lg


def coeff_M(k, ctx: WaveContext) -> complex:
    """M(k) = exp(i(beta + pi/4) - 2 pi i k (k - omega'')) gamma(2k - omega'')."""
    k = complex(k)
    if abs(k) <= ctx.k_exclusion:
        raise SingularityError(f"|k|={abs(k)} inside the exclusion radius around the pole at k=0")
    lm = log_coeff_M(k, ctx)
    if not np.isfinite(lm.real):
        raise SingularityError(f"M has a pole or zero at k={k}")
    return complex(np.exp(lm))


def removable_points(params: LatticeParams, which: str = "jost"):
    """Points of the closed physical strip where a formula turns into 0/0.

    ``"jost"``: n omega' (n >= 1), where sinh(2 pi k / b) vanishes and M(-k) has a
    pole, so f_-(x, k) needs a limit.  ``"kernel"``: omega, where sinh(2 pi b k)
    vanishes in the resolvent prefactor and f_-(x, k) has a simple zero.
    """
    top = params.abs_omega * (1 + 1e-12)
    if which == "kernel":
        return [params.omega]
    if which != "jost":
        raise ValueError(f"unknown formula {which!r}")
    pts = []
    n = 1
    while n * params.abs_omega_prime <= top:
        pts.append(n * params.omega_prime)
        n += 1
    return pts


def _removable_gap(params: LatticeParams) -> float:
    return 0.02 * min(params.abs_omega, params.abs_omega_prime)


def _nearest_removable(k, params: LatticeParams, which: str):
    pts = removable_points(params, which)
    if not pts:
        return None, math.inf
    dists = [abs(k - s) for s in pts]
    j = int(np.argmin(dists))
    return pts[j], dists[j]


def near_removable(k, params: LatticeParams, which: str = "jost") -> bool:
    return _nearest_removable(complex(k), params, which)[1] < _removable_gap(params)


def circle_average(fn, k, params: LatticeParams, which: str = "jost", npts: int = _CIRCLE_POINTS):
    """Mean of an analytic function of k over a circle around k.

    The circle stays at least two gaps away from the nearest removable point (so
    its points never trigger another average), and its radius stays far below the
    distance, at least min(|omega|, |omega'|)/2, to the next true singularity; the
    trapezoid rule on it is then accurate to about 0.12^npts.
    """
    k = complex(k)
    _, dist = _nearest_removable(k, params, which)
    r = dist + 2 * _removable_gap(params)
    total = None
    for j in range(npts):
        val = fn(k + r * cmath.exp(2j * math.pi * (j + 0.5) / npts))
        total = val if total is None else total + val
    return total / npts


def _jost_direct(x, kappa, ctx: WaveContext):
    par = ctx.params
    ev = ctx.evaluator(kappa)
    xs = np.atleast_1d(np.asarray(x, dtype=complex))
    two_w = 2 * par.omega
    vals = ev(np.concatenate([xs - two_w, xs + two_w, xs]))
    n = xs.size
    sh = cmath.sinh(2 * math.pi * kappa / par.b)
    num = vals[:n] - vals[n:2 * n] + 2 * sh * vals[2 * n:]
    lm = log_coeff_M(kappa, ctx)
    return num / (4 * sh * np.exp(lm))


def jost_f(x, k, sign: int, ctx: WaveContext, continued: bool = False):
    """Jost solutions f_+(x, k) = f(x, k), f_-(x, k) = f(x, -k) (vectorized in x).

    k must lie in the closed physical strip unless ``continued`` is set, which the
    k-circle averages use to step slightly past its edge.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    k = complex(k)
    top = ctx.params.abs_omega
    if not continued and not (-1e-12 * top <= k.imag <= top * (1 + 1e-12)):
        raise DomainError(f"Im k={k.imag} outside the closed physical strip [0, {top}]")
    if abs(k) <= ctx.k_exclusion:
        raise SingularityError("the Jost solutions degenerate at k = 0")
    kappa = sign * k
    if sign == -1 and near_removable(k, ctx.params, "jost"):
        out = circle_average(lambda kk: _jost_direct(x, -kk, ctx), k, ctx.params, "jost")
    else:
        out = _jost_direct(x, kappa, ctx)
    return out if np.ndim(x) else complex(np.atleast_1d(out)[0])


def casorati(u, v, x, params: LatticeParams):
    """C(u, v)(x) = u(x + 2 omega') v(x) - u(x) v(x + 2 omega') for callables u, v."""
    s = 2 * params.omega_prime
    x = np.asarray(x, dtype=complex)
    return u(x + s) * v(x) - u(x) * v(x + s)


def eigen_residual(x, k, ctx: WaveContext, dual: bool = False):
    """Relative residual of H phi = lambda phi (or of the dual equation, omega <-> omega').

    Normalized by the largest of the individual terms.
    """
    par = ctx.params
    xs = np.atleast_1d(np.asarray(x, dtype=complex))
    k = complex(k)
    if dual:
        s, rate = 2 * par.omega, 2 * math.pi / par.b
    else:
        s, rate = 2 * par.omega_prime, 2 * math.pi * par.b
    ev = ctx.evaluator(k)
    n = xs.size
    vals = ev(np.concatenate([xs + s, xs - s, xs]))
    up, dn, mid = vals[:n], vals[n:2 * n], vals[2 * n:]
    pot = np.exp(rate * xs) * mid
    rhs = 2 * np.cosh(rate * k) * mid
    res = up + dn + pot - rhs
    scale = np.maximum.reduce([np.abs(up), np.abs(dn), np.abs(pot), np.abs(rhs)])
    out = np.abs(res) / scale
    return out if np.ndim(x) else float(out[0])


def dual_equation_residual(x, k, ctx: WaveContext):
    return eigen_residual(x, k, ctx, dual=True)


def phi_plus(x, k, ctx: WaveContext):
    """phi(x, k) / M(k), normalized to e^{2 pi i k x} + S(k) e^{-2 pi i k x} + o(1) at -inf."""
    return phi(x, k, ctx) / coeff_M(k, ctx)


def jost_f_coor(x, k, sign: int, ctx: WaveContext):
    """Jost solution straight from its contour integral with the quasi-constant
    sinh(2 pi p / b) + sinh(2 pi kappa / b) (used as a cross-check)."""
    par = ctx.params
    kappa = sign * complex(k)
    ev = ctx.evaluator(kappa)
    xs = np.atleast_1d(np.asarray(x, dtype=complex))
    # sinh(2 pi p / b) e^{2 pi i p x} = (e^{2 pi i p (x - i/b)} - e^{2 pi i p (x + i/b)}) / 2
    two_w = 2 * par.omega
    n = xs.size
    vals = ev(np.concatenate([xs - two_w, xs + two_w, xs]))
    sh = cmath.sinh(2 * math.pi * kappa / par.b)
    integral = 0.5 * (vals[:n] - vals[n:2 * n]) + sh * vals[2 * n:]
    out = integral / (2 * sh * coeff_M(kappa, ctx))
    return out if np.ndim(x) else complex(out[0])
