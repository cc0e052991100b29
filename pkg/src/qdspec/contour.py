"""Adaptive Gauss-Legendre integration along piecewise contours in the complex plane.

A contour is a list of segments, each a smooth map ``t -> z(t)`` on a finite
parameter interval.  Lines and circular arcs cover every path used in the
package.  Integrands are vectorized: ``f`` receives a 1-d array of nodes and
returns an array whose first axis matches the nodes (extra axes are carried
through, which is how families of integrals sharing one set of nodes are
computed in a single pass).

Error control is by order doubling on each panel: the n-point and 2n-point
Gauss-Legendre sums are compared and panels whose discrepancy is too large are
bisected.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import AccuracyError, DomainError
from .params import LatticeParams

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadConfig:
    abs_tol: float = 1e-14
    rel_tol: float = 1e-13
    max_refinement_depth: int = 40
    panel_order: int = 12

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_refinement_depth < 1:
            raise ValueError("max_refinement_depth must be >= 1")
        if self.panel_order < 2:
            raise ValueError("panel_order must be >= 2")


DEFAULT_QUAD = QuadConfig()


@dataclass(frozen=True)
class LineSegment:
    """z(t) = start + direction * t for t in [t0, t1]; ``direction`` has unit modulus."""

    start: complex
    direction: complex
    t0: float
    t1: float

    def point(self, t):
        return self.start + self.direction * t

    def derivative(self, t):
        return np.full_like(np.asarray(t, dtype=float), 1.0) * self.direction

    def reversed(self) -> "LineSegment":
        return LineSegment(self.start, -self.direction, -self.t1, -self.t0)

    def split(self, t):
        return LineSegment(self.start, self.direction, self.t0, t), LineSegment(
            self.start, self.direction, t, self.t1
        )


@dataclass(frozen=True)
class ArcSegment:
    """z(t) = center + radius * exp(i t) for t in [t0, t1] (negative t1 - t0 runs clockwise)."""

    center: complex
    radius: float
    t0: float
    t1: float

    def point(self, t):
        return self.center + self.radius * np.exp(1j * np.asarray(t))

    def derivative(self, t):
        return 1j * self.radius * np.exp(1j * np.asarray(t))

    def reversed(self) -> "ArcSegment":
        return _ReversedArc(self.center, self.radius, -self.t1, -self.t0)

    def split(self, t):
        return ArcSegment(self.center, self.radius, self.t0, t), ArcSegment(
            self.center, self.radius, t, self.t1
        )


@dataclass(frozen=True)
class _ReversedArc(ArcSegment):
    # parameter s = -t, so z(s) = center + r exp(-i s)
    def point(self, t):
        return self.center + self.radius * np.exp(-1j * np.asarray(t))

    def derivative(self, t):
        return -1j * self.radius * np.exp(-1j * np.asarray(t))

    def reversed(self):
        return ArcSegment(self.center, self.radius, -self.t1, -self.t0)

    def split(self, t):
        return _ReversedArc(self.center, self.radius, self.t0, t), _ReversedArc(
            self.center, self.radius, t, self.t1
        )


@dataclass(frozen=True)
class ContourSpec:
    segments: tuple
    label: str = ""
    truncation: float | None = None
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        for a, b in zip(segs, segs[1:]):
            za = complex(a.point(a.t1))
            zb = complex(b.point(b.t0))
            if abs(za - zb) > 1e-9 * max(1.0, abs(za)):
                raise DomainError(f"contour {self.label!r} is disconnected at {za} -> {zb}")

    @property
    def start(self) -> complex:
        s = self.segments[0]
        return complex(s.point(s.t0))

    @property
    def end(self) -> complex:
        s = self.segments[-1]
        return complex(s.point(s.t1))

    def reversed(self) -> "ContourSpec":
        return ContourSpec(
            tuple(s.reversed() for s in reversed(self.segments)),
            label=self.label + " (reversed)",
            truncation=self.truncation,
        )


def line(z0: complex, z1: complex, label: str = "") -> ContourSpec:
    z0, z1 = complex(z0), complex(z1)
    length = abs(z1 - z0)
    if length == 0.0:
        raise DomainError("degenerate line segment")
    return ContourSpec((LineSegment(z0, (z1 - z0) / length, 0.0, length),), label=label)


def polyline(points, label: str = "") -> ContourSpec:
    segs = []
    for z0, z1 in zip(points, points[1:]):
        z0, z1 = complex(z0), complex(z1)
        length = abs(z1 - z0)
        segs.append(LineSegment(z0, (z1 - z0) / length, 0.0, length))
    return ContourSpec(tuple(segs), label=label)


def circle(center: complex, radius: float, pieces: int = 4, label: str = "circle") -> ContourSpec:
    step = 2 * math.pi / pieces
    segs = tuple(ArcSegment(complex(center), radius, i * step, (i + 1) * step) for i in range(pieces))
    return ContourSpec(segs, label=label)


@lru_cache(maxsize=None)
def _gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _panel_rule(seg, a: float, b: float, n: int):
    x, w = _gauss_legendre(n)
    half = 0.5 * (b - a)
    t = 0.5 * (a + b) + half * x
    z = seg.point(t)
    dz = seg.derivative(t) * (half * w)
    return np.asarray(z, dtype=complex), np.asarray(dz, dtype=complex)


@dataclass
class QuadResult:
    value: complex | np.ndarray
    error: float | np.ndarray
    n_evals: int
    nodes: np.ndarray | None = None
    weights: np.ndarray | None = None

    def __iter__(self):
        # allows ``value, err = integrate(...)``
        yield self.value
        yield self.error


def _weighted_sum(fz, dz):
    # contract the node axis; extra axes of fz are preserved
    return np.tensordot(dz, fz, axes=(0, 0))


def integrate(f, contour: ContourSpec, cfg: QuadConfig = DEFAULT_QUAD, *,
              initial_panels: int | None = None, keep_rule: bool = False) -> QuadResult:
    """Integrate ``f`` along ``contour``.

    ``f`` may return an array with trailing axes; every component must then meet
    ``max(abs_tol, rel_tol*|I|)`` (plus a round-off floor proportional to the
    integral of ``|f|``, below which no refinement can help).

    Raises AccuracyError (carrying the best estimate) when the depth limit is hit.
    """
    n = cfg.panel_order
    panels = []
    for seg in contour.segments:
        m = initial_panels or _default_panels(seg)
        edges = np.linspace(seg.t0, seg.t1, m + 1)
        panels.extend((seg, float(a), float(b), 0) for a, b in zip(edges[:-1], edges[1:]))

    n_evals = 0
    done = []  # accepted (value, err, absint, seg, a, b)
    pending = panels
    while True:
        # one call of f per refinement round, covering every pending panel
        rules = []
        for seg, a, b, depth in pending:
            z1, w1 = _panel_rule(seg, a, b, n)
            z2, w2 = _panel_rule(seg, a, b, 2 * n)
            rules.append((z1, w1, z2, w2))
        zall = np.concatenate([np.concatenate((r[0], r[2])) for r in rules])
        fall = np.asarray(f(zall))
        n_evals += zall.size
        evaluated = []
        for j, ((seg, a, b, depth), (z1, w1, z2, w2)) in enumerate(zip(pending, rules)):
            off = j * 3 * n
            f1 = fall[off:off + n]
            f2 = fall[off + n:off + 3 * n]
            i1 = _weighted_sum(f1, w1)
            i2 = _weighted_sum(f2, w2)
            err = np.abs(i2 - i1)
            absint = _weighted_sum(np.abs(f2), np.abs(w2))
            evaluated.append((i2, err, absint, seg, a, b, depth))
        allp = done + evaluated
        total = sum(p[0] for p in allp)
        total_err = sum(p[1] for p in allp)
        total_abs = sum(p[2] for p in allp)
        target = np.maximum(np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(total)), 64 * _EPS * total_abs)
        if np.all(total_err <= target):
            break
        # refine panels carrying more than their share of the error budget
        share = target / len(allp)
        pending = []
        new_done = []
        max_depth_hit = False
        for p in allp:
            i2, err, absint, seg, a, b, depth = p if len(p) == 7 else (*p, 0)
            if np.any(err > share) and np.any(err > 64 * _EPS * absint):
                if depth + 1 > cfg.max_refinement_depth:
                    max_depth_hit = True
                    new_done.append((i2, err, absint, seg, a, b, depth))
                    continue
                mid = 0.5 * (a + b)
                pending.append((seg, a, mid, depth + 1))
                pending.append((seg, mid, b, depth + 1))
            else:
                new_done.append((i2, err, absint, seg, a, b, depth))
        if not pending:
            if max_depth_hit or np.any(total_err > target):
                raise AccuracyError(
                    f"quadrature on {contour.label!r} did not converge "
                    f"(error {np.max(total_err):.3g} > target {np.min(target):.3g})",
                    estimate=total, error=total_err,
                )
            break
        done = new_done

    result = QuadResult(value=total, error=total_err, n_evals=n_evals)
    if keep_rule:
        zs, ws = [], []
        for p in sorted(allp, key=lambda p: (contour.segments.index(p[3]), p[4])):
            z2, w2 = _panel_rule(p[3], p[4], p[5], 2 * n)
            zs.append(z2)
            ws.append(w2)
        result.nodes = np.concatenate(zs)
        result.weights = np.concatenate(ws)
    return result


def _default_panels(seg) -> int:
    length = abs(seg.t1 - seg.t0) * (seg.radius if isinstance(seg, ArcSegment) else 1.0)
    return max(2, int(math.ceil(length / 0.5)))


def fixed_rule(contour: ContourSpec, panel_width: float = 0.25, order: int = 16):
    """Non-adaptive composite Gauss-Legendre nodes and weights along ``contour``."""
    zs, ws = [], []
    for seg in contour.segments:
        length = abs(seg.t1 - seg.t0) * (seg.radius if isinstance(seg, ArcSegment) else 1.0)
        m = max(1, int(math.ceil(length / panel_width)))
        edges = np.linspace(seg.t0, seg.t1, m + 1)
        for a, b in zip(edges[:-1], edges[1:]):
            z, w = _panel_rule(seg, float(a), float(b), order)
            zs.append(z)
            ws.append(w)
    return np.concatenate(zs), np.concatenate(ws)


# --- contours used by the special-function modules -------------------------------------

def gamma_line_delta(params: LatticeParams) -> float:
    """Default height of the shifted integration line for the dilogarithm integral."""
    return min(2 * math.pi * params.b, 2 * math.pi / params.b) / 4.0


def shifted_line(delta: float, T: float, params: LatticeParams | None = None,
                 label: str = "gamma-line") -> ContourSpec:
    """Horizontal line Im t = delta, Re t in [-T, T].

    The dilogarithm integrand has poles at t = 2 pi i b n and 2 pi i n / b, so the
    line must stay strictly between 0 and the first of them.
    """
    bound = 2 * math.pi * min(params.b, 1 / params.b) if params is not None else 2 * math.pi
    if not (0.0 < delta < bound) or not math.isfinite(delta):
        raise DomainError(f"delta={delta} outside the pole-free band (0, {bound})")
    if T <= 0:
        raise DomainError("truncation T must be positive")
    return ContourSpec(
        (LineSegment(complex(-T, delta), 1.0 + 0j, 0.0, 2.0 * T),),
        label=label,
        truncation=T,
    )


def default_sigma(params: LatticeParams) -> float:
    return 0.5 * (params.abs_omega + params.abs_omega_dprime)


def kashaev_L(k, params: LatticeParams, sigma: float | None = None, T: float | None = None,
              ray_angle: float = math.pi / 4, tol: float = 1e-12) -> ContourSpec:
    """The contour L: a horizontal piece at Im p = sigma flanked by two descending rays.

    The left ray ends at -|Re k| - 1 + i sigma arriving from the lower left; the right
    ray leaves |Re k| + 1 + i sigma towards the lower right.  Both make angle
    ``ray_angle`` with the horizontal (pi/4 by default).
    """
    if sigma is None:
        sigma = default_sigma(params)
    if not (params.abs_omega < sigma < params.abs_omega_dprime):
        raise DomainError(
            f"sigma={sigma} must lie in ({params.abs_omega}, {params.abs_omega_dprime})"
        )
    if not (0.0 < ray_angle <= math.pi / 2):
        raise DomainError("ray_angle must be in (0, pi/2]")
    if T is None:
        # Gaussian envelope exp(-pi sin(2 theta) t^2) on the rays
        T = math.sqrt(math.log(10.0 / tol) / (math.pi * math.sin(2 * ray_angle)))
    R = abs(complex(k).real) + 1.0
    left = complex(-R, sigma)
    right = complex(R, sigma)
    d_left = cmath.exp(1j * ray_angle)
    d_right = cmath.exp(-1j * ray_angle)
    segs = (
        LineSegment(left, d_left, -T, 0.0),
        LineSegment(left, 1.0 + 0j, 0.0, 2 * R),
        LineSegment(right, d_right, 0.0, T),
    )
    return ContourSpec(segs, label="kashaev-L", truncation=T,
                       meta={"sigma": sigma, "ray_angle": ray_angle, "R": R})
