"""Correlated Gaussian packets: initial state, moment algebra, free evolution.

Natural units (hbar = m = 1) are used throughout; `to_natural_units`
converts dimensional inputs.  The packet starts centered at x_c > 0 with
mean momentum -p0 (moving toward the origin) and carries a position-momentum
correlation controlled by the real parameter rho through the complex width
factor gamma = 1 - i*rho.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

__all__ = [
    "FAR_FIELD_MIN_RATIO",
    "PacketSpec",
    "MomentSet",
    "initial_wavefunction",
    "initial_moments",
    "rho_to_r",
    "r_to_rho",
    "effective_planck",
    "free_evolution",
    "free_position_variance",
    "to_natural_units",
]

# Minimum x_c/s for the far-field approximation used by the closed-form
# barrier solution; the neglected left tail of the initial packet scales
# like exp(-(x_c/s)^2), below 1e-27 at ratio 8.
FAR_FIELD_MIN_RATIO = 8.0


@dataclass(frozen=True)
class PacketSpec:
    """Initial correlated Gaussian packet drifting toward the origin.

    s:   width scale (> 0); initial position variance is s^2/2
    rho: correlation parameter (any real); covariance is rho/2
    x_c: initial mean position (> 0)
    p0:  magnitude of the mean momentum (> 0); the mean momentum is -p0

    The barrier formulas assume the packet starts far from the origin;
    construction enforces x_c/s >= FAR_FIELD_MIN_RATIO unless
    allow_near_field is set.
    """

    s: float
    rho: float
    x_c: float
    p0: float
    allow_near_field: bool = False

    def __post_init__(self):
        for name in ("s", "rho", "x_c", "p0"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v)):
                raise ValidationError(f"{name} must be a finite real number, got {v!r}")
        if self.s <= 0:
            raise ValidationError(f"s must be > 0, got {self.s}")
        if self.x_c <= 0:
            raise ValidationError(f"x_c must be > 0, got {self.x_c}")
        if self.p0 <= 0:
            raise ValidationError(f"p0 must be > 0, got {self.p0}")
        if not self.allow_near_field and self.far_field_ratio < FAR_FIELD_MIN_RATIO:
            raise ValidationError(
                f"x_c/s = {self.far_field_ratio:.3g} is below the far-field minimum "
                f"{FAR_FIELD_MIN_RATIO}; pass allow_near_field=True to override"
            )

    @property
    def gamma(self) -> complex:
        """Complex width factor 1 - i*rho."""
        return complex(1.0, -self.rho)

    @property
    def far_field_ratio(self) -> float:
        return self.x_c / self.s


@dataclass(frozen=True)
class MomentSet:
    """Second moments of a packet: variances, covariance and correlation."""

    sigma_x: float
    sigma_p: float
    sigma_xp: float
    r: float

    def __post_init__(self):
        if self.sigma_x <= 0 or self.sigma_p <= 0:
            raise ValidationError("variances must be positive")

    @property
    def uncertainty_product(self) -> float:
        """sigma_x*sigma_p - sigma_xp^2; exactly 1/4 for a pure Gaussian."""
        return self.sigma_x * self.sigma_p - self.sigma_xp**2


def _validate_time(t: float) -> float:
    t = float(t)
    if not math.isfinite(t) or t < 0:
        raise ValidationError(f"t must be a finite time >= 0, got {t!r}")
    return t


def initial_wavefunction(spec: PacketSpec, x):
    """psi(x, 0): normalized Gaussian of width s centered at x_c.

    The complex factor gamma = 1 - i*rho chirps the phase without touching
    the density, so |psi(x_c + u, 0)| = |psi(x_c - u, 0)| for any rho.
    """
    x = np.asarray(x, dtype=float)
    u = x - spec.x_c
    psi = (np.pi * spec.s**2) ** (-0.25) * np.exp(
        -u * u * spec.gamma / (2.0 * spec.s**2) - 1j * spec.p0 * x
    )
    return psi[()] if psi.ndim == 0 else psi


def initial_moments(spec: PacketSpec) -> MomentSet:
    """Initial second moments; saturates the uncertainty product at 1/4."""
    sigma_x = 0.5 * spec.s**2
    sigma_p = (1.0 + spec.rho**2) / (2.0 * spec.s**2)
    sigma_xp = 0.5 * spec.rho
    return MomentSet(sigma_x, sigma_p, sigma_xp, rho_to_r(spec.rho))


def rho_to_r(rho: float) -> float:
    """Correlation coefficient r = rho / sqrt(1 + rho^2), always in (-1, 1).

    For |rho| beyond ~1e8 the exact ratio rounds to +-1.0 in double
    precision; the result is nudged back inside the open interval so the
    strict |r| < 1 contract survives rounding.
    """
    rho = float(rho)
    if not math.isfinite(rho):
        raise ValidationError(f"rho must be finite, got {rho!r}")
    r = rho / math.hypot(1.0, rho)
    if abs(r) >= 1.0:
        r = math.copysign(math.nextafter(1.0, 0.0), r)
    return r


def r_to_rho(r: float) -> float:
    """Inverse of rho_to_r: rho = r / sqrt(1 - r^2) for |r| < 1."""
    r = float(r)
    if not (math.isfinite(r) and abs(r) < 1.0):
        raise ValidationError(f"|r| must be < 1, got {r!r}")
    return r / math.sqrt((1.0 - r) * (1.0 + r))


def effective_planck(r: float) -> float:
    """1 / sqrt(1 - r^2): the rescaled uncertainty bound for correlated packets."""
    r = float(r)
    if not (math.isfinite(r) and abs(r) < 1.0):
        raise ValidationError(f"|r| must be < 1, got {r!r}")
    return 1.0 / math.sqrt((1.0 - r) * (1.0 + r))


def complex_width_sq(spec: PacketSpec, t) -> complex:
    """Complex squared width s^2 + i*gamma*t governing the free spreading.

    Equals (s^2 + rho*t) + i*t; its imaginary part is strictly positive for
    t > 0, which keeps every principal square root downstream on a branch
    reachable continuously from t = 0.
    """
    t = _validate_time(t)
    return spec.s**2 + 1j * spec.gamma * t


def free_evolution(spec: PacketSpec, x, t):
    """psi_free(x, t): barrier-free evolution of the initial packet.

    The density stays Gaussian with its maximum drifting along
    x = x_c - p0*t and variance free_position_variance(spec, t).
    """
    t = _validate_time(t)
    x = np.asarray(x, dtype=float)
    mu = complex_width_sq(spec, t)
    prefactor = (np.sqrt(np.pi) * mu / spec.s) ** (-0.5)
    drift = x - spec.x_c + spec.p0 * t
    psi = prefactor * np.exp(
        -spec.gamma * drift * drift / (2.0 * mu)
        - 1j * spec.p0 * x
        - 0.5j * spec.p0**2 * t
    )
    return psi[()] if psi.ndim == 0 else psi


def free_position_variance(spec: PacketSpec, t) -> float:
    """Position variance of the free packet at time t.

    sigma_x(t) = [s^2 + 2*rho*t + t^2 (1 + rho^2)/s^2] / 2, i.e. the
    ballistic spreading law sigma_x + 2*sigma_xp*t + sigma_p*t^2 written in
    packet parameters.  Positive for every real t since the discriminant of
    the quadratic in t is -4.
    """
    t = _validate_time(t)
    return 0.5 * (spec.s**2 + 2.0 * spec.rho * t + t * t * (1.0 + spec.rho**2) / spec.s**2)


def to_natural_units(s, rho, x_c, p0, Z, mass, hbar, allow_near_field=False):
    """Convert dimensional packet/barrier parameters to natural units.

    Lengths are untouched; momenta divide by hbar and the barrier strength
    maps to mass*Z/hbar^2.  Times must be rescaled separately by the factor
    natural_time_scale(mass, hbar).  Returns (PacketSpec, BarrierSpec).
    """
    mass = float(mass)
    hbar = float(hbar)
    if not (math.isfinite(mass) and mass > 0):
        raise ValidationError(f"mass must be > 0, got {mass!r}")
    if not (math.isfinite(hbar) and hbar > 0):
        raise ValidationError(f"hbar must be > 0, got {hbar!r}")
    from .barrier import BarrierSpec  # deferred: barrier.py imports this module

    spec = PacketSpec(s=float(s), rho=float(rho), x_c=float(x_c), p0=float(p0) / hbar,
                      allow_near_field=allow_near_field)
    barrier = BarrierSpec(Z=mass * float(Z) / hbar**2)
    return spec, barrier


def natural_time_scale(mass, hbar) -> float:
    """Factor converting a dimensional time to natural units: t_nat = (hbar/m) t."""
    mass = float(mass)
    hbar = float(hbar)
    if mass <= 0 or hbar <= 0:
        raise ValidationError("mass and hbar must be positive")
    return hbar / mass
