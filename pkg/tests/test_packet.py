"""Packet construction, moment algebra and free evolution."""

import numpy as np
import pytest

from deltagauss import (
    BarrierSpec,
    PacketSpec,
    ValidationError,
    effective_planck,
    free_evolution,
    free_position_variance,
    initial_moments,
    initial_wavefunction,
    natural_time_scale,
    r_to_rho,
    rho_to_r,
    to_natural_units,
)

from _oracles import grid_density_moments


def wide_grid(spec, t=0.0, n=4096, sigmas=12.0):
    center = spec.x_c - spec.p0 * t
    half = sigmas * np.sqrt(free_position_variance(spec, t)) + 4.0 * spec.s
    return np.linspace(center - half, center + half, n)


def test_spec_validation():
    with pytest.raises(ValidationError):
        PacketSpec(s=-1.0, rho=0.0, x_c=10.0, p0=2.0)
    with pytest.raises(ValidationError):
        PacketSpec(s=1.0, rho=0.0, x_c=-10.0, p0=2.0)
    with pytest.raises(ValidationError):
        PacketSpec(s=1.0, rho=0.0, x_c=10.0, p0=0.0)
    with pytest.raises(ValidationError):
        PacketSpec(s=1.0, rho=np.nan, x_c=10.0, p0=2.0)


def test_far_field_guard_with_override():
    with pytest.raises(ValidationError):
        PacketSpec(s=1.0, rho=0.0, x_c=5.0, p0=2.0)
    near = PacketSpec(s=1.0, rho=0.0, x_c=5.0, p0=2.0, allow_near_field=True)
    assert near.far_field_ratio == 5.0


def test_initial_moments_uncorrelated():
    m = initial_moments(PacketSpec(1.0, 0.0, 10.0, 2.0))
    assert (m.sigma_x, m.sigma_p, m.sigma_xp, m.r) == (0.5, 0.5, 0.0, 0.0)


def test_initial_moments_unit_correlation():
    m = initial_moments(PacketSpec(1.0, 1.0, 10.0, 2.0))
    assert m.sigma_x == pytest.approx(0.5)
    assert m.sigma_p == pytest.approx(1.0)
    assert m.sigma_xp == pytest.approx(0.5)
    assert m.r == pytest.approx(1.0 / np.sqrt(2.0))


def test_uncertainty_product_saturated():
    rng = np.random.default_rng(23)
    for _ in range(100):
        spec = PacketSpec(
            s=rng.uniform(0.3, 3.0),
            rho=rng.uniform(-3.0, 3.0),
            x_c=rng.uniform(80.0, 120.0),
            p0=rng.uniform(0.5, 5.0),
        )
        m = initial_moments(spec)
        assert abs(m.uncertainty_product - 0.25) < 1e-12


def test_rho_r_relation():
    assert rho_to_r(0.0) == 0.0
    assert rho_to_r(1.0) == pytest.approx(1.0 / np.sqrt(2.0), rel=1e-14)
    assert r_to_rho(0.6) == pytest.approx(0.75, rel=1e-14)
    rng = np.random.default_rng(2)
    for rho in rng.uniform(-4.0, 4.0, 50):
        assert r_to_rho(rho_to_r(rho)) == pytest.approx(rho, rel=1e-14, abs=1e-14)
    for rho in rng.uniform(-40.0, 40.0, 20):
        # r cannot carry more than ~(1+rho^2)^(3/2) * eps of rho's precision
        tol = max(1e-14, 4.0 * (1.0 + rho * rho) ** 1.5 * 2.3e-16 / abs(rho))
        assert r_to_rho(rho_to_r(rho)) == pytest.approx(rho, rel=tol)
    assert abs(rho_to_r(1e8)) < 1.0
    for bad in (1.0, -1.0, 1.5):
        with pytest.raises(ValidationError):
            r_to_rho(bad)


def test_effective_planck():
    assert effective_planck(0.0) == 1.0
    assert effective_planck(1.0 / np.sqrt(2.0)) == pytest.approx(np.sqrt(2.0), rel=1e-14)
    assert effective_planck(0.8) == pytest.approx(5.0 / 3.0, rel=1e-14)
    with pytest.raises(ValidationError):
        effective_planck(1.0)


def test_initial_wavefunction_peak_and_symmetry():
    spec = PacketSpec(1.0, 0.0, 10.0, 2.0)
    assert abs(initial_wavefunction(spec, 10.0)) == pytest.approx(np.pi**-0.25, rel=1e-14)
    chirped = PacketSpec(1.0, 1.0, 10.0, 2.0)
    assert abs(initial_wavefunction(chirped, 11.0)) == pytest.approx(
        abs(initial_wavefunction(chirped, 9.0)), rel=1e-14
    )


def test_initial_wavefunction_normalized():
    spec = PacketSpec(1.0, 0.7, 12.0, 2.0)
    x = wide_grid(spec)
    norm, _, _ = grid_density_moments(x, initial_wavefunction(spec, x))
    assert abs(norm - 1.0) < 1e-10


def test_free_evolution_reduces_to_initial_state():
    spec = PacketSpec(1.0, 1.3, 11.0, 2.0)
    x = np.linspace(-5.0, 25.0, 501)
    assert np.max(np.abs(free_evolution(spec, x, 0.0) - initial_wavefunction(spec, x))) < 1e-13


def test_free_evolution_peak_drifts():
    spec = PacketSpec(1.0, 0.0, 10.0, 2.0)
    x = np.linspace(-20.0, 20.0, 80001)
    dens = np.abs(free_evolution(spec, x, 3.0)) ** 2
    assert x[np.argmax(dens)] == pytest.approx(4.0, abs=1e-3)


def test_free_evolution_norm_preserved():
    spec = PacketSpec(1.0, -0.8, 14.0, 1.5)
    x = wide_grid(spec, t=5.0)
    norm, _, _ = grid_density_moments(x, free_evolution(spec, x, 5.0))
    assert abs(norm - 1.0) < 1e-10


@pytest.mark.parametrize("rho", [-1.5, -0.3, 0.0, 0.7, 2.0])
@pytest.mark.parametrize("t", [0.0, 1.0, 3.0])
def test_free_position_variance_matches_grid_moments(rho, t):
    # validates the ballistic spreading law before any other test relies on it
    spec = PacketSpec(1.3, rho, 30.0, 2.0)
    x = wide_grid(spec, t=t, n=2**14)
    _, mean, var = grid_density_moments(x, free_evolution(spec, x, t))
    assert mean == pytest.approx(spec.x_c - spec.p0 * t, abs=1e-8)
    assert var == pytest.approx(free_position_variance(spec, t), rel=1e-6)


def test_free_evolution_rejects_negative_time():
    spec = PacketSpec(1.0, 0.0, 10.0, 2.0)
    with pytest.raises(ValidationError):
        free_evolution(spec, 0.0, -1.0)


def test_natural_units_identity():
    spec, barrier = to_natural_units(1.0, 0.5, 10.0, 2.0, 3.0, mass=1.0, hbar=1.0)
    assert (spec.s, spec.rho, spec.x_c, spec.p0) == (1.0, 0.5, 10.0, 2.0)
    assert barrier.Z == 3.0
    assert natural_time_scale(1.0, 1.0) == 1.0


def test_natural_units_rescaling():
    _, barrier = to_natural_units(1.0, 0.0, 10.0, 2.0, 3.0, mass=2.0, hbar=1.0)
    assert barrier.Z == 6.0
    spec, _ = to_natural_units(1.0, 0.0, 10.0, 4.0, 3.0, mass=1.0, hbar=2.0)
    assert spec.p0 == 2.0
    assert natural_time_scale(1.0, 2.0) == 2.0


def test_natural_units_rejects_bad_constants():
    with pytest.raises(ValidationError):
        to_natural_units(1.0, 0.0, 10.0, 2.0, 3.0, mass=0.0, hbar=1.0)
    with pytest.raises(ValidationError):
        to_natural_units(1.0, 0.0, 10.0, 2.0, 3.0, mass=1.0, hbar=-1.0)


def test_barrier_spec_rejects_attractive():
    with pytest.raises(ValidationError):
        BarrierSpec(Z=-0.5)
    assert BarrierSpec(Z=0.0).Z == 0.0
