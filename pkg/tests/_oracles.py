"""Independent numerical oracles shared by the test suite.

Everything here is deliberately dumb and slow: defining-integral quadrature
for the error functions, trapezoid moments for packet statistics, and
high-precision mpmath quadrature for transmission values.  None of it calls
back into the code paths under test.
"""

import mpmath as mp
import numpy as np
from scipy.integrate import quad

SQRT_PI = float(np.sqrt(np.pi))


def quad_complex(f, a, b, limit=300, epsabs=1e-13, epsrel=1e-11):
    re = quad(lambda u: f(u).real, a, b, limit=limit, epsabs=epsabs, epsrel=epsrel)[0]
    im = quad(lambda u: f(u).imag, a, b, limit=limit, epsabs=epsabs, epsrel=epsrel)[0]
    return complex(re, im)


def erfc_by_quadrature(z: complex) -> complex:
    """erfc(z) = (2/sqrt(pi)) * Int_0^inf exp(-(z+u)^2) du along a real ray."""
    z = complex(z)
    cutoff = 9.0 + abs(z)  # exp(-(Re z + u)^2) is negligible past here
    return (2.0 / SQRT_PI) * quad_complex(lambda u: np.exp(-((z + u) ** 2)), 0.0, cutoff)


def erfcx_by_quadrature(z: complex) -> complex:
    """erfcx(z) = (2/sqrt(pi)) * Int_0^inf exp(-u^2 - 2 z u) du, overflow-free for Re z >= 0."""
    z = complex(z)
    cutoff = 9.0 + 2.0 * max(0.0, -z.real)
    return (2.0 / SQRT_PI) * quad_complex(lambda u: np.exp(-u * u - 2.0 * z * u), 0.0, cutoff)


def halfline_by_quadrature(a: complex, b: complex, upper: float = 40.0) -> complex:
    """Direct quadrature of exp(-a x^2 + b x) over [0, upper]."""
    return quad_complex(lambda x: np.exp(-a * x * x + b * x), 0.0, upper)


def transmission_by_mpmath(A: float, B: float, dps: int = 30) -> float:
    """T(A, B) by tanh-sinh quadrature at `dps` decimal digits."""
    with mp.workdps(dps):
        A_, B_ = mp.mpf(A), mp.mpf(B)
        pref = 1 / mp.sqrt(2 * mp.pi * B_)
        f = lambda y: mp.e ** (-y * y / (2 * B_)) * (1 - y) ** 2 / ((1 - y) ** 2 + A_)
        return float(pref * mp.quad(f, [-14 * mp.sqrt(B_), 0, 1]))


def grid_density_moments(x: np.ndarray, psi: np.ndarray):
    """(norm, mean, variance) of |psi|^2 by trapezoid on a uniform grid."""
    dens = np.abs(psi) ** 2
    norm = np.trapezoid(dens, x)
    mean = np.trapezoid(x * dens, x) / norm
    var = np.trapezoid((x - mean) ** 2 * dens, x) / norm
    return norm, mean, var


def relative_l2(candidate: np.ndarray, reference: np.ndarray) -> float:
    return float(
        np.sqrt(np.sum(np.abs(candidate - reference) ** 2))
        / np.sqrt(np.sum(np.abs(reference) ** 2))
    )
