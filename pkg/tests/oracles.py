"""High-precision reference values computed with mpmath, independent of the package."""
import mpmath as mp


def log_gamma_integral(z, b, dps=30):
    """(1/4) int e^{itz} / (sinh(t/2b) sinh(bt/2) t) dt along Im t = delta."""
    with mp.workdps(dps):
        z = mp.mpc(z)
        b = mp.mpf(b)
        delta = min(2 * mp.pi * b, 2 * mp.pi / b) / 4

        def f(u):
            t = u + 1j * delta
            return mp.exp(1j * t * z) / (mp.sinh(t / (2 * b)) * mp.sinh(b * t / 2) * t)

        return complex(mp.quad(f, [-mp.inf, -20, -5, 0, 5, 20, mp.inf]) / 4)


def gamma_euler(z, dps=30):
    with mp.workdps(dps):
        return complex(mp.gamma(mp.mpc(z)))


def bessel_k(nu, t, dps=30):
    with mp.workdps(dps):
        return complex(mp.besselk(mp.mpc(nu), mp.mpf(t)))


def bessel_i(nu, t, dps=30):
    with mp.workdps(dps):
        return complex(mp.besseli(mp.mpc(nu), mp.mpc(t)))
