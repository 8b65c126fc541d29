"""Exact evolution of a correlated Gaussian packet through a delta barrier.

The wave function in the presence of the repulsive barrier Z*delta(x) has a
closed form: the free packet times a correction bracket built from the
scaled complementary error function.  The erfc argument has a large positive
real part throughout the validity regime, so the erfc(D)*exp(D^2) pair that
appears analytically is always evaluated as the single call erfcx(D).

Also provided: the large-time simplification on the transmitted side (x < 0)
and the asymptotic density in the comoving variable y, with
x = x_c + p0*t*(y - 1).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import RegimeError, RegimeWarning, ValidationError
from .packet import PacketSpec, complex_width_sq, free_evolution

__all__ = [
    "BarrierSpec",
    "WavefunctionGrid",
    "complex_width_sq",
    "erfc_argument",
    "evolved_wavefunction",
    "asymptotic_left_wavefunction",
    "asymptotic_density",
    "sample_evolved",
]

# Guard thresholds for the asymptotic formulas.  The underlying conditions
# are qualitative (Re(D) large, p0*t large compared to x_c); these defaults
# keep the neglected correction terms below the tolerances the tests assert.
ASYMPTOTIC_RE_D_MIN = 5.0
ASYMPTOTIC_TIME_FACTOR = 20.0


@dataclass(frozen=True)
class BarrierSpec:
    """Delta-barrier strength in natural units.

    Z > 0 is the repulsive barrier the asymptotic analysis assumes; Z = 0 is
    accepted and degenerates every formula to free motion.  Attractive
    barriers (Z < 0, which bind a state) are rejected.
    """

    Z: float

    def __post_init__(self):
        if not (isinstance(self.Z, (int, float)) and math.isfinite(self.Z)):
            raise ValidationError(f"Z must be a finite real number, got {self.Z!r}")
        if self.Z < 0:
            raise ValidationError(f"Z must be >= 0 (repulsive), got {self.Z}")


def erfc_argument(spec: PacketSpec, barrier: BarrierSpec, x, t):
    """Argument D of the scaled erfc factor in the closed-form solution.

    D = [Z*mu(t) + gamma*(|x| + x_c) - i*p0*s^2] / sqrt(2*gamma*mu(t)) with
    principal square root.  Re(D) > 0 must hold for the closed form to be
    meaningful; at large t it grows like Z*sqrt(t/2).  Raises RegimeError if
    any requested point has Re(D) <= 0.
    """
    t = float(t)
    x = np.asarray(x, dtype=float)
    mu = complex_width_sq(spec, t)
    g = spec.gamma
    numer = barrier.Z * mu + g * (np.abs(x) + spec.x_c) - 1j * spec.p0 * spec.s**2
    d = numer / np.sqrt(2.0 * g * mu)
    if not np.all(d.real > 0.0):
        bad = int(np.argmax(np.atleast_1d(d.real) <= 0.0))
        raise RegimeError(
            "Re(D) <= 0: parameters are outside the validity regime of the "
            f"closed-form solution (first offending x={float(np.atleast_1d(x)[bad])!r}, t={t})"
        )
    return d[()] if d.ndim == 0 else d


def evolved_wavefunction(spec: PacketSpec, barrier: BarrierSpec, x, t):
    """psi(x, t) in the presence of the barrier, from the closed form.

    psi = psi_free * {1 - Z sqrt(pi mu/(2 gamma)) erfcx(D)
                        * exp[(x+|x|)(i p0 s^2 - gamma x_c)/mu]}.

    For Z = 0 this returns psi_free exactly.  The only approximation
    inherited from the derivation is the neglect of the initial packet's
    tail left of the barrier, of relative size ~exp(-(x_c/s)^2).
    """
    from .special import erfcx_complex

    psi_free = free_evolution(spec, x, t)
    if barrier.Z == 0.0:
        return psi_free
    x = np.asarray(x, dtype=float)
    mu = complex_width_sq(spec, t)
    d = erfc_argument(spec, barrier, x, t)
    right_side = np.exp((x + np.abs(x)) * (1j * spec.p0 * spec.s**2 - spec.gamma * spec.x_c) / mu)
    bracket = 1.0 - barrier.Z * np.sqrt(np.pi * mu / (2.0 * spec.gamma)) * erfcx_complex(d) * right_side
    psi = psi_free * bracket
    return psi[()] if np.ndim(psi) == 0 else psi


def asymptotic_left_wavefunction(spec: PacketSpec, barrier: BarrierSpec, x, t):
    """Large-Re(D) simplification of the transmitted wave, valid for x < 0.

    psi ~ psi_free * W / (W + mu*Z) with W = gamma*(|x| + x_c) - i*p0*s^2.
    Rejects any x >= 0; warns (RegimeWarning) when min Re(D) < 5, where the
    dropped erfc correction is no longer negligible.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(x < 0.0):
        raise ValidationError("asymptotic_left_wavefunction is only defined for x < 0")
    d = erfc_argument(spec, barrier, x, t)
    min_re = float(np.min(np.atleast_1d(d).real))
    if min_re < ASYMPTOTIC_RE_D_MIN:
        warnings.warn(
            f"min Re(D) = {min_re:.3g} < {ASYMPTOTIC_RE_D_MIN}; the simplified "
            "transmitted-side formula may be inaccurate here",
            RegimeWarning,
            stacklevel=2,
        )
    mu = complex_width_sq(spec, t)
    w = spec.gamma * (np.abs(x) + spec.x_c) - 1j * spec.p0 * spec.s**2
    psi = free_evolution(spec, x, t) * w / (w + mu * barrier.Z)
    return psi[()] if np.ndim(psi) == 0 else psi


def asymptotic_density(spec: PacketSpec, barrier: BarrierSpec, y, t, include_jacobian: bool = False):
    """Large-time coordinate probability density in the scaled variable y.

    With x = x_c + p0*t*(y - 1), the density factorizes into the freely
    spreading envelope and the momentum-resolved barrier transparency:

        P(y) = [t sqrt(pi (1+rho^2)) / s]^{-1} exp(-(s p0 y)^2/(1+rho^2))
               * (1-y)^2 / ((1-y)^2 + A),          A = (Z/p0)^2.

    `include_jacobian` multiplies by t*p0 = dx/dy so that integrating over y
    directly accumulates probability.  Guarded by p0*t >= 20*x_c; earlier
    times are not asymptotic and raise RegimeError.
    """
    t = float(t)
    if spec.p0 * t < ASYMPTOTIC_TIME_FACTOR * spec.x_c:
        raise RegimeError(
            f"p0*t = {spec.p0 * t:.3g} < {ASYMPTOTIC_TIME_FACTOR} * x_c = "
            f"{ASYMPTOTIC_TIME_FACTOR * spec.x_c:.3g}: too early for the asymptotic density"
        )
    y = np.asarray(y, dtype=float)
    one_rho2 = 1.0 + spec.rho**2
    envelope = (spec.s / (t * math.sqrt(math.pi * one_rho2))) * np.exp(
        -((spec.s * spec.p0 * y) ** 2) / one_rho2
    )
    a = (barrier.Z / spec.p0) ** 2
    u2 = (1.0 - y) ** 2
    dens = envelope * u2 / (u2 + a)
    if include_jacobian:
        dens = dens * (t * spec.p0)
    return dens[()] if dens.ndim == 0 else dens


@dataclass(frozen=True)
class WavefunctionGrid:
    """A wave function sampled on a uniform spatial grid at a single time."""

    t: float
    x_values: np.ndarray
    amplitudes: np.ndarray
    dx: float

    def __post_init__(self):
        x = np.asarray(self.x_values, dtype=float)
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if x.ndim != 1 or x.size < 2 or amps.shape != x.shape:
            raise ValidationError("x_values and amplitudes must be 1-d arrays of equal length >= 2")
        steps = np.diff(x)
        if not np.all(steps > 0):
            raise ValidationError("x_values must be strictly increasing")
        if not np.allclose(steps, self.dx, rtol=1e-9, atol=1e-12):
            raise ValidationError("x_values must be uniformly spaced with step dx")
        object.__setattr__(self, "x_values", x)
        object.__setattr__(self, "amplitudes", amps)
        norm = self.norm()
        if not (0.0 <= norm <= 1.0 + 1e-8):
            raise ValidationError(f"grid norm {norm!r} outside [0, 1 + 1e-8]")

    def norm(self) -> float:
        """Trapezoid estimate of the total probability on the grid."""
        return float(np.trapezoid(np.abs(self.amplitudes) ** 2, dx=self.dx))

    def probability_left_of(self, x0: float = 0.0) -> float:
        """Trapezoid estimate of the probability in x <= x0 (node-aligned)."""
        dens = np.abs(self.amplitudes) ** 2
        mask = self.x_values <= x0 + 1e-12 * max(1.0, abs(x0))
        if mask.sum() < 2:
            return 0.0
        return float(np.trapezoid(dens[mask], dx=self.dx))


def sample_evolved(spec: PacketSpec, barrier: BarrierSpec, t, x_min, x_max, n) -> WavefunctionGrid:
    """Sample the closed-form wave function on a uniform grid."""
    n = int(n)
    if n < 2:
        raise ValidationError(f"n must be >= 2, got {n}")
    if not x_min < x_max:
        raise ValidationError(f"need x_min < x_max, got [{x_min}, {x_max}]")
    x = np.linspace(float(x_min), float(x_max), n)
    psi = evolved_wavefunction(spec, barrier, x, t)
    return WavefunctionGrid(t=float(t), x_values=x, amplitudes=psi, dx=float(x[1] - x[0]))
