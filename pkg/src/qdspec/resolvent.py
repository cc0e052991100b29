"""Free and full resolvent kernels.

With u = 2 pi x / b the free kernel collapses to a single fraction,

    R0(x; lambda) = omega (cos 2 pi k x + i sin 2 pi k x coth(pi x / b)) / sinh(2 pi b k),

which is what the two-term expression with 1/(1 - e^{+-2 pi x / b}) reduces to.  The
full kernel is built from the Jost solution f_- and the scattering solution phi:

    R(x, y) = omega / (sinh(2 pi b k) M(k))
              * (f_-(x) phi(y) / (1 - e^{2 pi d / b}) + f_-(y) phi(x) / (1 - e^{-2 pi d / b})),

d = x - y.  Near the diagonal both summands blow up; there the fused form
(f_-(y) phi(x) e^{pi d/b} - f_-(x) phi(y) e^{-pi d/b}) / (2 sinh(pi d / b)) is used,
with the numerator Taylor expanded around y.
"""
from __future__ import annotations

import cmath
import math
import warnings
from math import comb

import numpy as np

from .contour import DEFAULT_QUAD, QuadConfig, integrate, polyline
from .errors import AccuracyWarning, DomainError, SingularityError
from .params import LatticeParams, SpectralPoint
from .testfunctions import TestFunction, apply_H, apply_H0, evaluate, tail_bound_interval
from .wavefunctions import WaveContext, circle_average, near_removable, coeff_M, jost_f

DIAGONAL_THRESHOLD = 1e-3
_TAYLOR_TERMS = 3


def _require_resolvent_set(point: SpectralPoint, params: LatticeParams):
    k = complex(point.k)
    if not (k.imag > 0):
        raise DomainError(f"resolvent needs Im k > 0 (lambda off [2, inf)), got k={k}")
    if k.imag > params.abs_omega * (1 + 1e-12):
        raise DomainError(f"Im k={k.imag} exceeds |omega|={params.abs_omega}")


def theta_smooth(x, params: LatticeParams):
    """Smoothed Heaviside function 1/(1 - e^{-2 pi x / b})."""
    x = np.asarray(x, dtype=complex)
    den = 1 - np.exp(-2 * math.pi * x / params.b)
    if np.any(np.abs(den) < 1e-12):
        raise SingularityError("theta_smooth evaluated on the zero set of its denominator")
    out = 1 / den
    return out if out.ndim else complex(out)


def _sin_coth(kappa, half_u, ratio):
    """sin(kappa) coth(half_u) where kappa / half_u = ratio; series near the origin."""
    small = np.abs(half_u) < 1e-4
    out = np.empty(np.broadcast(kappa, half_u).shape, dtype=complex)
    kb = np.broadcast_to(kappa, out.shape)
    hb = np.broadcast_to(half_u, out.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        out[~small] = np.sin(kb[~small]) / np.tanh(hb[~small])
    kk, hh = kb[small], hb[small]
    # sin(k)/k * h/tanh(h) * k/h
    out[small] = (1 - kk ** 2 / 6 + kk ** 4 / 120) * (1 + hh ** 2 / 3 - hh ** 4 / 45) * ratio
    return out


def r0_kernel(x, point: SpectralPoint, params: LatticeParams, cfg: QuadConfig = DEFAULT_QUAD):
    """Free resolvent kernel R0(x; lambda) of H0 = U + U^{-1} (vectorized in x)."""
    _require_resolvent_set(point, params)
    k = complex(point.k)
    xs = np.asarray(x, dtype=complex)
    sh = cmath.sinh(2 * math.pi * params.b * k)
    if abs(sh) < 1e-8:
        # lambda = -2: removable in k
        return circle_average(lambda kk: _r0_direct(xs, kk, params), k, params, "kernel")
    return _r0_direct(xs, k, params)


def _r0_direct(xs, k, params):
    kappa = 2 * math.pi * k * xs
    half_u = math.pi * xs / params.b
    val = np.cos(kappa) + 1j * _sin_coth(kappa, half_u, 2 * k * params.b)
    out = params.omega * val / cmath.sinh(2 * math.pi * params.b * k)
    return out if out.ndim else complex(out)


def r0_kernel_split(x, point: SpectralPoint, params: LatticeParams):
    """The two-term form of R0 (only off x = 0); used to cross-check the fused one."""
    k = complex(point.k)
    x = np.asarray(x, dtype=complex)
    e = np.exp(2 * math.pi * x / params.b)
    val = np.exp(-2j * math.pi * k * x) / (1 - e) + np.exp(2j * math.pi * k * x) / (1 - 1 / e)
    return params.omega * val / cmath.sinh(2 * math.pi * params.b * k)


# --- full kernel ----------------------------------------------------------------------

def _kernel_parts(x, y, k, ctx: WaveContext):
    """f_-(x), f_-(y), phi(x), phi(y) on broadcast arrays."""
    xs, ys = np.broadcast_arrays(np.asarray(x, dtype=complex), np.asarray(y, dtype=complex))
    n = xs.size
    pts = np.concatenate([xs.ravel(), ys.ravel()])
    ph = ctx.evaluator(k)(pts)
    fm = jost_f(pts, k, -1, ctx, continued=True)
    return fm[:n].reshape(xs.shape), fm[n:].reshape(xs.shape), ph[:n].reshape(xs.shape), ph[n:].reshape(xs.shape)


def _jost_derivs(pts, k, ctx: WaveContext, order: int):
    """x-derivatives 0..order of f_-(., k) (f_- is a combination of shifted phi's)."""
    par = ctx.params
    kappa = -complex(k)
    ev = ctx.evaluator(k)
    two_w = 2 * par.omega
    sh = cmath.sinh(2 * math.pi * kappa / par.b)
    den = 4 * sh * np.exp(_log_M(kappa, ctx))
    out = []
    for j in range(order + 1):
        num = ev(pts - two_w, j) - ev(pts + two_w, j) + 2 * sh * ev(pts, j)
        out.append(num / den)
    return out


def _log_M(k, ctx):
    from .wavefunctions import log_coeff_M
    return log_coeff_M(k, ctx)


def _r_direct(x, y, k, ctx: WaveContext, form: str = "fused"):
    par = ctx.params
    xs, ys = np.broadcast_arrays(np.asarray(x, dtype=complex), np.asarray(y, dtype=complex))
    d = xs - ys
    pref = par.omega / (cmath.sinh(2 * math.pi * par.b * k) * coeff_M(k, ctx))
    out = np.empty(xs.shape, dtype=complex)
    near = np.abs(d) < DIAGONAL_THRESHOLD
    far = ~near
    if np.any(far):
        fx, fy, px, py = _kernel_parts(xs[far], ys[far], k, ctx)
        a = math.pi * d[far] / par.b
        if form == "split":
            val = fx * py / (1 - np.exp(2 * a)) + fy * px / (1 - np.exp(-2 * a))
        else:
            val = (fy * px * np.exp(a) - fx * py * np.exp(-a)) / (2 * np.sinh(a))
        out[far] = pref * val
    if np.any(near):
        out[near] = pref * _diagonal(xs[near], ys[near], k, ctx)
    return out


def _diagonal(xs, ys, k, ctx: WaveContext):
    """Fused kernel numerator/denominator expanded in d = x - y around y."""
    par = ctx.params
    a = math.pi / par.b
    d = xs - ys
    order = _TAYLOR_TERMS
    phis = [ctx.evaluator(k)(ys, j) for j in range(order + 1)]
    fms = _jost_derivs(ys, k, ctx, order)
    # N(d) = f_-(y) phi(y+d) e^{a d} - f_-(y+d) phi(y) e^{-a d};  N(0) = 0
    coeffs = []
    for j in range(1, order + 1):
        acc = 0
        for i in range(j + 1):
            acc = acc + comb(j, i) * (fms[0] * phis[i] * a ** (j - i) - fms[i] * phis[0] * (-a) ** (j - i))
        coeffs.append(acc / math.factorial(j))
    num_over_d = coeffs[0] + coeffs[1] * d + coeffs[2] * d ** 2
    # 2 sinh(a d) / d
    den_over_d = 2 * a * (1 + (a * d) ** 2 / 6)
    return num_over_d / den_over_d


def r_kernel(x, y, point: SpectralPoint, ctx: WaveContext, form: str = "fused"):
    """Resolvent kernel R(x, y; lambda) (vectorized, broadcasting x against y).

    ``form="split"`` evaluates the two-fraction expression instead of the fused
    one (it has no diagonal branch).
    """
    _require_resolvent_set(point, ctx.params)
    k = complex(point.k)
    if abs(k) <= ctx.k_exclusion:
        raise SingularityError("k inside the exclusion radius around 0")
    if near_removable(k, ctx.params, "kernel"):
        out = circle_average(lambda kk: _r_direct(x, y, kk, ctx, form), k, ctx.params, "kernel")
    else:
        out = _r_direct(x, y, k, ctx, form)
    return out if np.ndim(out) else complex(out)


# --- integrated identities --------------------------------------------------------------

def _integrals(kernel, hs, xprobe, cfg: QuadConfig, tol: float):
    """int kernel(x, y) h(y) dy for every h in hs and x in xprobe; shape (len(xprobe), len(hs))."""
    lo, hi = math.inf, -math.inf
    for h in hs:
        a, b = tail_bound_interval(h, tol * 1e-3)
        lo, hi = min(lo, a), max(hi, b)
    lo, hi = min(lo, float(xprobe.min()) - 1), max(hi, float(xprobe.max()) + 1)
    tail = max(abs(complex(evaluate(h, t))) for h in hs for t in (lo, hi))
    if tail > tol:
        warnings.warn(f"truncated y-interval leaves a tail of size {tail:.2e}", AccuracyWarning, stacklevel=3)

    def f(y):
        ker = kernel(xprobe[None, :], y[:, None])
        return ker[:, :, None] * np.stack([evaluate(h, y) for h in hs], axis=1)[:, None, :]

    # panel breaks at the probes, where the kernel switches to its diagonal branch
    pts = sorted({lo, hi, *map(float, xprobe)})
    return np.asarray(integrate(f, polyline(pts), cfg, initial_panels=2).value)


def _as_list(g):
    return [g] if isinstance(g, TestFunction) else list(g)


def _sup_residuals(vals, gs, xprobe):
    return [float(np.max(np.abs(vals[:, j] - evaluate(g, xprobe)))) for j, g in enumerate(gs)]


def resolvent_identity_check(g, point: SpectralPoint, ctx: WaveContext,
                             xprobe=(-1.0, 0.0, 1.0), tol: float = 1e-6,
                             cfg: QuadConfig | None = None, circle_points: int = 12):
    """sup over xprobe of |int R(x, y) ((H - lambda) g)(y) dy - g(x)|.

    ``g`` may also be a sequence of test functions; they then share the kernel
    evaluations and a list of residuals is returned.
    """
    _require_resolvent_set(point, ctx.params)
    cfg = cfg or QuadConfig(abs_tol=tol * 1e-2, rel_tol=tol * 1e-2)
    gs = _as_list(g)
    lam = complex(point.lam)
    hs = [apply_H(gg, ctx.params) - lam * gg for gg in gs]
    xs = np.asarray(xprobe, dtype=float)
    k = complex(point.k)
    if near_removable(k, ctx.params, "kernel"):
        # the identity is linear in the kernel, so average whole integrals over the k-circle
        vals = circle_average(lambda kk: _integrals(lambda X, Y: _r_direct(X, Y, kk, ctx), hs, xs, cfg, tol),
                              k, ctx.params, "kernel", circle_points)
    else:
        vals = _integrals(lambda X, Y: _r_direct(X, Y, k, ctx), hs, xs, cfg, tol)
    res = _sup_residuals(vals, gs, xs)
    return res[0] if isinstance(g, TestFunction) else res


def free_identity_check(g, point: SpectralPoint, params: LatticeParams,
                        xprobe=(-1.0, 0.0, 1.0), tol: float = 1e-6):
    """sup over xprobe of |int R0(x - y) ((H0 - lambda) g)(y) dy - g(x)|."""
    _require_resolvent_set(point, params)
    cfg = QuadConfig(abs_tol=tol * 1e-2, rel_tol=tol * 1e-2)
    gs = _as_list(g)
    lam = complex(point.lam)
    hs = [apply_H0(gg, params) - lam * gg for gg in gs]
    xs = np.asarray(xprobe, dtype=float)
    vals = _integrals(lambda X, Y: r0_kernel(X - Y, point, params), hs, xs, cfg, tol)
    res = _sup_residuals(vals, gs, xs)
    return res[0] if isinstance(g, TestFunction) else res


def plemelj_jump(g: TestFunction, eps: float, params: LatticeParams, cfg: QuadConfig = DEFAULT_QUAD) -> complex:
    """int (theta(x + 2 omega' - i eps) - theta(x + 2 omega' + i eps)) g(x) dx.

    Tends to 2 omega' g(0) as eps -> 0.
    """
    s = 2 * params.omega_prime
    lo, hi = tail_bound_interval(g, 1e-16)

    def f(x):
        return (theta_smooth(x + s - 1j * eps, params) - theta_smooth(x + s + 1j * eps, params)) * evaluate(g, x)

    # fine panels around the near-pole at the origin
    w = 20 * eps
    return complex(integrate(f, polyline([lo, -w, 0.0, w, hi]), cfg).value)
