"""The q-deformed Kontorovich-Lebedev transform.

    (U psi)(k) = int psi(x) phi(x, k) dx,
    psi(x)     = int_0^inf (U psi)(k) phi(x, k) rho(k) dk,
    rho(k)     = 1 / (M(k) M(-k)) = 4 sinh(2 pi b k) sinh(2 pi k / b).

The k-integrals run over Gauss-Legendre panels starting at k = 0: phi(x, k) is
regular there (only M(k) has a pole) and rho vanishes like 16 pi^2 k^2, so nothing
needs to be cut out.  Panels are added until the spectral weight |U psi|^2 rho
of the last ones is negligible.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .contour import fixed_rule, integrate, kashaev_L, line
from .errors import AccuracyWarning, DomainError, SingularityError
from .params import LatticeParams
from .qdilog import gamma_ratio
from .testfunctions import TestFunction, apply_H, evaluate, fourier, l2_norm_sq, tail_bound_interval
from .wavefunctions import WaveContext, log_coeff_M, log_hat_phi


@dataclass
class SampledFunction:
    """Values on a grid, optionally with quadrature weights for integrating over it."""

    grid: np.ndarray
    values: np.ndarray
    weights: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.grid)


@dataclass(frozen=True)
class TransformConfig:
    k_panel: float = 0.5  # width of the k-panels
    k_order: int = 8  # Gauss-Legendre nodes per k-panel
    k_max_cap: float = 8.0  # never go beyond this
    # relative spectral weight at which the k-range stops; rho grows like e^{2 pi (b + 1/b) k}
    # and lifts the round-off in U psi to about 1e-9 of the total near k = 4 (b = 1)
    tail_tol: float = 1e-7
    noise_share: float = 1e-5  # below this share, a growing panel contribution means noise
    x_panel: float = 0.5
    x_order: int = 16
    x_tail: float = 1e-10  # psi tail level at which the x-range is cut


DEFAULT_TRANSFORM = TransformConfig()
S_EXCLUSION = 1e-6


def rho(k, params: LatticeParams):
    """Spectral density 4 sinh(2 pi b k) sinh(2 pi k / b) (vectorized)."""
    ka = np.asarray(k, dtype=float)
    if np.any(ka <= 0):
        raise DomainError("rho needs k > 0")
    out = 4 * np.sinh(2 * math.pi * params.b * ka) * np.sinh(2 * math.pi * ka / params.b)
    return out if out.ndim else float(out)


def rho_from_M(k, ctx: WaveContext) -> complex:
    return complex(np.exp(-log_coeff_M(k, ctx) - log_coeff_M(-k, ctx)))


def k_panel_rule(k0: float, k1: float, order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * (k1 - k0)
    return 0.5 * (k0 + k1) + half * x, half * w


def _as_list(psi):
    return [psi] if isinstance(psi, TestFunction) else list(psi)


def _x_rule(psis, tcfg: TransformConfig):
    lo, hi = math.inf, -math.inf
    for psi in psis:
        a, b = tail_bound_interval(psi, tcfg.x_tail)
        lo, hi = min(lo, a), max(hi, b)
    return fixed_rule(line(lo, hi), panel_width=tcfg.x_panel, order=tcfg.x_order)


def forward(psi, kgrid, ctx: WaveContext, tcfg: TransformConfig = DEFAULT_TRANSFORM,
            method: str = "x") -> SampledFunction:
    """(U psi)(k) on kgrid.

    ``method="x"`` integrates psi(x) phi(x, k) over a truncated x-interval;
    ``method="fourier"`` uses the exact Fourier image instead,
    (U psi)(k) = int_L phi^(p, k) psi^(-p) dp, which never touches phi(x, k).
    A list of test functions gives a (len(kgrid), len(list)) array.
    """
    psis = _as_list(psi)
    kgrid = np.asarray(kgrid, dtype=float)
    if method == "x":
        xs, wx = _x_rule(psis, tcfg)
        xs = xs.real
        table = np.stack([evaluate(p, xs) for p in psis], axis=1) * wx.real[:, None]
        vals = np.empty((kgrid.size, len(psis)), dtype=complex)
        for i, k in enumerate(kgrid):
            vals[i] = ctx.evaluator(k)(xs) @ table
    elif method == "fourier":
        vals = np.stack([_forward_fourier(psis, k, ctx) for k in kgrid]) if kgrid.size else np.zeros((0, len(psis)))
    else:
        raise ValueError(f"unknown method {method!r}")
    values = vals[:, 0] if isinstance(psi, TestFunction) else vals
    return SampledFunction(kgrid, values, meta={"method": method})


def _forward_fourier(psis, k, ctx: WaveContext, xprobe=()):
    """U psi(k) for each psi and, on the same contour nodes, phi(x, k) at the probes."""
    hats = [fourier(p) for p in psis]
    contour = kashaev_L(k, ctx.params, ctx.sigma)
    xp = np.asarray(xprobe, dtype=complex)

    def f(p):
        hp = np.exp(log_hat_phi(p, k, ctx))
        cols = [hp * evaluate(h, -p) for h in hats]
        cols += [hp * np.exp(2j * math.pi * p * x) for x in xp]
        return np.stack(cols, axis=1)

    v = np.asarray(integrate(f, contour, ctx.cfg).value)
    return (v, v[len(psis):]) if xp.size else v


def inverse(c: SampledFunction, xgrid, ctx: WaveContext) -> SampledFunction:
    """psi(x) = int (U psi)(k) phi(x, k) rho(k) dk over the weighted k-grid of ``c``."""
    if c.weights is None:
        raise ValueError("inverse needs a k-grid with quadrature weights")
    xs = np.atleast_1d(np.asarray(xgrid, dtype=complex))
    vals = np.asarray(c.values)
    wr = c.weights * rho(c.grid, ctx.params)
    out = np.zeros((xs.size,) + vals.shape[1:], dtype=complex)
    for k, w, v in zip(c.grid, wr, vals):
        ph = ctx.evaluator(k)(xs)
        out += w * (ph[:, None] * v if vals.ndim > 1 else ph * v)
    return SampledFunction(xs, out)


def spectral_samples(psi, ctx: WaveContext, tcfg: TransformConfig = DEFAULT_TRANSFORM,
                     method: str = "fourier", xprobe=()) -> SampledFunction:
    """(U psi) on k-panels from 0 outwards, with weights, until the tail is negligible.

    Stops once two consecutive panels each carry less than ``tail_tol`` of the
    accumulated spectral weight |U psi|^2 rho (for every test function).  With
    ``xprobe`` the values phi(x, k) at those points are kept in meta["phi"], ready
    for the inverse transform.
    """
    psis = _as_list(psi)
    xp = np.asarray(xprobe, dtype=float)
    grids, vals, weights, phis = [], [], [], []
    total = np.zeros(len(psis))
    quiet = 0
    k0 = 0.0
    last_share = math.inf
    prev = None
    while k0 < tcfg.k_max_cap - 1e-12:
        k1 = k0 + tcfg.k_panel
        kn, kw = k_panel_rule(k0, k1, tcfg.k_order)
        if method == "fourier":
            rows = [_forward_fourier(psis, k, ctx, xp) for k in kn]
            if xp.size:
                v = np.stack([r[0][:len(psis)] for r in rows])
                ph = np.stack([r[1] for r in rows])
            else:
                v = np.stack(rows)
        else:
            v = np.asarray(forward(psis, kn, ctx, tcfg, method).values).reshape(kn.size, len(psis))
            if xp.size:
                ph = np.stack([ctx.evaluator(k)(xp) for k in kn])
        contrib = (kw * rho(kn, ctx.params)) @ (np.abs(v) ** 2)
        if prev is not None and last_share < tcfg.noise_share and np.any(contrib > prev):
            # rho has started amplifying round-off in U psi: the rest is noise
            break
        prev = contrib
        total += contrib
        grids.append(kn)
        vals.append(v)
        weights.append(kw)
        if xp.size:
            phis.append(ph)
        last_share = float(np.max(contrib / np.maximum(total, 1e-300)))
        quiet = quiet + 1 if last_share < tcfg.tail_tol else 0
        k0 = k1
        if quiet >= 2:
            break
        if k0 >= tcfg.k_max_cap - 1e-12:
            warnings.warn(f"k-range capped at {tcfg.k_max_cap} with tail share {last_share:.2e}",
                          AccuracyWarning, stacklevel=2)
    values = np.concatenate(vals)
    if isinstance(psi, TestFunction):
        values = values[:, 0]
    meta = {"k_max": k0, "tail_share": last_share, "method": method}
    if xp.size:
        meta["xprobe"] = xp
        meta["phi"] = np.concatenate(phis)
    return SampledFunction(np.concatenate(grids), values, np.concatenate(weights), meta=meta)


def parseval_gap(psi, ctx: WaveContext, tcfg: TransformConfig = DEFAULT_TRANSFORM,
                 samples: SampledFunction | None = None):
    """| ||psi||^2 - int |U psi|^2 rho dk | / ||psi||^2 (a list in, a list out)."""
    psis = _as_list(psi)
    s = samples if samples is not None else spectral_samples(psis, ctx, tcfg)
    v = np.asarray(s.values).reshape(len(s.grid), len(psis))
    spec = (s.weights * rho(s.grid, ctx.params)) @ (np.abs(v) ** 2)
    gaps = [abs(l2_norm_sq(p) - spec[j]) / l2_norm_sq(p) for j, p in enumerate(psis)]
    return gaps[0] if isinstance(psi, TestFunction) else gaps


def round_trip_error(psi, xprobe, ctx: WaveContext, tcfg: TransformConfig = DEFAULT_TRANSFORM,
                     samples: SampledFunction | None = None):
    """sup over xprobe of |inverse(forward(psi)) - psi|."""
    psis = _as_list(psi)
    xs = np.asarray(xprobe, dtype=float)
    s = samples if samples is not None else spectral_samples(psis, ctx, tcfg, xprobe=xs)
    v = np.asarray(s.values).reshape(len(s.grid), len(psis))
    if "phi" in s.meta and np.array_equal(s.meta["xprobe"], xs):
        wr = s.weights * rho(s.grid, ctx.params)
        rec = s.meta["phi"].T @ (wr[:, None] * v)
    else:
        rec = inverse(SampledFunction(s.grid, v, s.weights), xs, ctx).values
    errs = [float(np.max(np.abs(rec[:, j] - evaluate(p, xs)))) for j, p in enumerate(psis)]
    return errs[0] if isinstance(psi, TestFunction) else errs


def diagonalization_gap(psi: TestFunction, kprobe, ctx: WaveContext,
                        tcfg: TransformConfig = DEFAULT_TRANSFORM, method: str = "x") -> float:
    """max over kprobe of |U(H psi)(k) - 2 cosh(2 pi b k) (U psi)(k)|, relative to the
    largest |2 cosh(2 pi b k) (U psi)(k)| on the probes."""
    kp = np.asarray(kprobe, dtype=float)
    hpsi = apply_H(psi, ctx.params)
    v = np.asarray(forward([psi, hpsi], kp, ctx, tcfg, method).values)
    lam = 2 * np.cosh(2 * math.pi * ctx.params.b * kp)
    lhs, rhs = v[:, 1], lam * v[:, 0]
    return float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs)))


def scattering_S(k, ctx: WaveContext, form: str = "M") -> complex:
    """S(k) = M(-k) / M(k) = e^{-4 pi i omega'' k} gamma(-2k - omega'') / gamma(2k - omega'')."""
    k = complex(k)
    # both M(k) and M(-k) have their pole at k = 0, but the ratio stays regular (it tends
    # to -1), so only a tiny neighbourhood is excluded here
    if abs(k) <= S_EXCLUSION:
        raise SingularityError(f"|k|={abs(k)} too close to the pole pair of M(k), M(-k) at k=0")
    par = ctx.params
    if form == "M":
        return complex(np.exp(log_coeff_M(-k, ctx) - log_coeff_M(k, ctx)))
    if form == "gamma":
        wdd = par.omega_dprime
        return cmath.exp(-4j * math.pi * wdd * k) * gamma_ratio(-2 * k - wdd, 2 * k - wdd, par, ctx.cfg)
    raise ValueError(f"unknown form {form!r}")


def scattering_limit_trend(ks, ctx: WaveContext):
    """|S(k) + 1| for decreasing k (should shrink towards 0)."""
    return [abs(scattering_S(k, ctx) + 1) for k in ks]
