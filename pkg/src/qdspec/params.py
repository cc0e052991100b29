"""Half-period lattice constants and the spectral parametrization.

Everything is expressed through the single coupling ``b > 0``:

    omega  = i/(2b),   omega' = i b/2,   omega * omega' = -1/4,
    tau    = b**2,     q = exp(i pi tau),
    beta   = (pi/12)(tau + 1/tau),
    c      = exp(i(pi/4 - beta)) / (2 pi)      (residue of gamma at -omega'').

The spectral parameter ``k`` enters through ``lambda = 2 cosh(2 pi b k)``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import BranchError, DomainError, InvalidParameterError

# slack used when testing membership of the closed physical strip
_STRIP_SLACK = 1e-12


@dataclass(frozen=True)
class LatticeParams:
    b: float
    omega: complex
    omega_prime: complex
    omega_dprime: complex
    tau: float
    q: complex
    beta: float
    c_residue: complex

    @property
    def abs_omega(self) -> float:
        return abs(self.omega)

    @property
    def abs_omega_prime(self) -> float:
        return abs(self.omega_prime)

    @property
    def abs_omega_dprime(self) -> float:
        return abs(self.omega_dprime)

    def dual(self) -> "LatticeParams":
        """Parameters with omega and omega' interchanged (b -> 1/b)."""
        return make_params(1.0 / self.b)


def make_params(b: float) -> LatticeParams:
    try:
        b = float(b)
    except (TypeError, ValueError) as exc:
        raise InvalidParameterError(f"b must be a real number, got {b!r}") from exc
    if not math.isfinite(b) or b <= 0.0:
        raise InvalidParameterError(f"b must be positive and finite, got {b}")
    omega = 0.5j / b
    omega_prime = 0.5j * b
    tau = b * b
    beta = math.pi / 12.0 * (tau + 1.0 / tau)
    return LatticeParams(
        b=b,
        omega=omega,
        omega_prime=omega_prime,
        omega_dprime=omega + omega_prime,
        tau=tau,
        q=cmath.exp(1j * math.pi * tau),
        beta=beta,
        c_residue=cmath.exp(1j * (math.pi / 4.0 - beta)) / (2.0 * math.pi),
    )


@dataclass(frozen=True)
class SpectralPoint:
    k: complex
    lam: complex

    @property
    def lambda_(self) -> complex:
        return self.lam


def lambda_of_k(params: LatticeParams, k) -> complex:
    return 2.0 * cmath.cosh(2.0 * math.pi * params.b * complex(k))


def spectral_point_from_k(params: LatticeParams, k) -> SpectralPoint:
    k = complex(k)
    if not (-_STRIP_SLACK <= k.imag <= params.abs_omega * (1 + _STRIP_SLACK)):
        raise DomainError(
            f"k={k} is outside the closed physical strip 0 <= Im k <= {params.abs_omega}"
        )
    return SpectralPoint(k=k, lam=lambda_of_k(params, k))


def k_from_lambda(params: LatticeParams, lam) -> SpectralPoint:
    """Invert lambda = 2 cosh(2 pi b k) onto the strip 0 < Im k <= |omega|."""
    lam = complex(lam)
    if lam.imag == 0.0 and lam.real >= 2.0:
        raise BranchError(f"lambda={lam.real} lies on the continuous spectrum [2, inf)")
    two_pi_b = 2.0 * math.pi * params.b
    w = cmath.acosh(lam / 2.0)  # principal branch: Re w >= 0, Im w in [-pi, pi]
    # cosh is even and 2 pi i periodic; bring Im w into (0, pi]
    if w.imag < 0.0 or (w.imag == 0.0 and w.real != 0.0):
        w = -w
    if w.imag <= 0.0:
        w = w + 2j * math.pi
    if w.imag > math.pi:
        w = w - 2j * math.pi
    k = w / two_pi_b
    if abs(k.imag - params.abs_omega) < 1e-15 * params.abs_omega and k.real != 0.0:
        # lambda real < -2 sits on the top edge; both signs of Re k give it, fix Re k >= 0
        k = complex(abs(k.real), k.imag)
    if k.imag <= 0.0:
        raise BranchError(f"lambda={lam} maps to the real k axis")
    return SpectralPoint(k=k, lam=lam)
