"""Grid solver and direct propagator quadrature: the brute-force referees."""

import numpy as np
import pytest

from deltagauss import (
    BarrierSpec,
    BoundaryContaminationError,
    DimensionlessPoint,
    PacketSpec,
    SolverConfig,
    ValidationError,
    convergence_study,
    default_final_time,
    evolve_numeric,
    free_evolution,
    evolved_wavefunction,
    propagator_direct,
    suggest_l2_config,
    suggest_transmission_config,
    transmission_coefficient,
)

from _oracles import relative_l2


def test_solver_config_validation():
    with pytest.raises(ValidationError):  # barrier outside the domain
        SolverConfig(x_min=1.0, x_max=5.0, n_points=64, dt=0.01, t_final=1.0)
    with pytest.raises(ValidationError):  # too few points
        SolverConfig(x_min=-5.0, x_max=5.0, n_points=8, dt=0.01, t_final=1.0)
    with pytest.raises(ValidationError):  # dt above the dx guard
        SolverConfig(x_min=-5.0, x_max=5.0, n_points=64, dt=1.0, t_final=1.0)
    cfg = SolverConfig(x_min=-5.0, x_max=5.0, n_points=64, dt=1.0, t_final=1.0,
                       enforce_dt_guard=False)
    assert cfg.dt == 1.0
    with pytest.raises(ValidationError):  # snapshot beyond t_final
        SolverConfig(x_min=-5.0, x_max=5.0, n_points=64, dt=0.01, t_final=1.0,
                     snapshot_times=(2.0,))


def test_grid_contains_exact_barrier_node():
    cfg = SolverConfig(x_min=-7.3, x_max=11.1, n_points=257, dt=0.01, t_final=1.0)
    x = cfg.grid()
    assert x[cfg.barrier_index] == 0.0
    assert np.allclose(np.diff(x), cfg.dx)


def test_initial_tail_must_be_inside_domain():
    spec = PacketSpec(1.0, 0.0, 15.0, 2.0)
    cfg = SolverConfig(x_min=-2.0, x_max=18.0, n_points=512, dt=0.01, t_final=1.0)
    with pytest.raises(ValidationError):
        evolve_numeric(spec, BarrierSpec(1.0), cfg)


def test_boundary_contamination_detected():
    spec = PacketSpec(1.0, 0.0, 12.0, 2.0)
    cfg = SolverConfig(x_min=-12.0, x_max=25.0, n_points=1024, dt=0.02, t_final=12.0)
    with pytest.raises(BoundaryContaminationError):
        evolve_numeric(spec, BarrierSpec(1.0), cfg)


def test_free_case_matches_analytic_packet():
    # gentle momenta keep the phase-error budget at 1e-6 affordable
    spec = PacketSpec(2.0, 0.0, 16.0, 1.0)
    barrier = BarrierSpec(0.0)
    cfg = suggest_l2_config(spec, barrier, t_final=2.0, l2_budget=1e-6)
    out = evolve_numeric(spec, barrier, cfg)
    ref = free_evolution(spec, out.final_state.x_values, 2.0)
    assert relative_l2(out.final_state.amplitudes, ref) <= 1e-6
    assert out.norm_drift <= 1e-9


def test_quasi_monochromatic_packet_recovers_plane_wave_limit():
    # B = 0.01: the barrier-row discretization must reproduce the
    # monochromatic transparency, which pins its normalization (Z/dx on the
    # diagonal; the doubled variant would transmit ~0.2 here)
    b_val, a_val = 0.01, 1.0
    p0 = 1.0 / np.sqrt(2.0 * b_val)
    spec = PacketSpec(1.0, 0.0, 10.0, p0)
    barrier = BarrierSpec(np.sqrt(a_val) * p0)
    out = evolve_numeric(spec, barrier, suggest_transmission_config(spec, barrier))
    assert abs(out.transmitted - 1.0 / (1.0 + a_val)) < 0.01
    assert abs(out.transmitted - transmission_coefficient(DimensionlessPoint(a_val, b_val)).value) < 2e-3


def test_default_parameters_transmission_agreement():
    spec = PacketSpec(1.0, 0.0, 15.0, 2.0)
    barrier = BarrierSpec(2.0)
    out = evolve_numeric(spec, barrier, suggest_transmission_config(spec, barrier))
    expected = transmission_coefficient(DimensionlessPoint(1.0, 0.125)).value
    assert abs(out.transmitted - expected) < 1e-3
    assert out.norm_drift <= 1e-9
    assert abs(out.transmitted + out.reflected - 1.0) <= 1e-9


def test_snapshots_recorded_at_requested_times():
    spec = PacketSpec(1.0, 0.0, 10.0, 2.0)
    barrier = BarrierSpec(1.0)
    cfg = SolverConfig(x_min=-40.0, x_max=40.0, n_points=4096, dt=0.01, t_final=2.0,
                       snapshot_times=(0.0, 1.0, 2.0))
    out = evolve_numeric(spec, barrier, cfg)
    times = [s.t for s in out.snapshots]
    assert len(times) == 3
    assert times == pytest.approx([0.0, 1.0, 2.0], abs=0.02)
    for snap in out.snapshots:
        assert abs(snap.norm() - 1.0) < 1e-9


def test_regularized_gaussian_barrier_converges_to_jump_row():
    # a smoothed barrier of width w approaches the delta answer roughly
    # linearly in w; the jump row is its w -> 0 limit
    spec = PacketSpec(1.0, 0.0, 12.0, 2.0)
    barrier = BarrierSpec(2.0)
    cfg = suggest_transmission_config(spec, barrier)
    jump = evolve_numeric(spec, barrier, cfg).transmitted
    from dataclasses import replace
    diffs = [
        abs(evolve_numeric(spec, barrier,
                           replace(cfg, delta_mode="gaussian", gaussian_width=w)).transmitted - jump)
        for w in (4.0 * cfg.dx, cfg.dx)
    ]
    assert diffs[1] < diffs[0]
    assert diffs[1] < 0.03


def test_default_final_time_paths():
    # narrow momentum spread: clearance fixed point exists and is finite
    narrow = PacketSpec(1.0, 0.0, 10.0, 10.0)
    t_narrow = default_final_time(narrow, BarrierSpec(1.0))
    assert 1.0 < t_narrow < 10.0
    # broad spread: settles through the closed-form scan instead
    broad = PacketSpec(1.0, 0.0, 10.0, 1.0)
    t_broad = default_final_time(broad, BarrierSpec(1.0))
    assert t_broad >= 4.0 * 10.0


def test_propagator_direct_free_case():
    spec = PacketSpec(1.0, 0.0, 10.0, 2.0)
    psi = propagator_direct(spec, BarrierSpec(0.0), -5.0, 12.0)
    ref = complex(free_evolution(spec, -5.0, 12.0))
    assert abs(psi - ref) / abs(ref) < 1e-8


def test_propagator_direct_bounds_far_field_replacement():
    # exact kernel (with |x'|) vs the closed form (x' substituted): at
    # x_c/s = 10 the replacement error is ~exp(-100), so any visible
    # difference is quadrature noise, far below the 1e-3 contract
    spec = PacketSpec(1.0, 0.0, 10.0, 2.0)
    barrier = BarrierSpec(2.0)
    direct = propagator_direct(spec, barrier, -5.0, 12.0, rel_tol=1e-10)
    closed = complex(evolved_wavefunction(spec, barrier, -5.0, 12.0))
    assert abs(direct - closed) / abs(closed) < 1e-3
    assert abs(direct - closed) / abs(closed) < 1e-6


def test_propagator_direct_self_convergence():
    spec = PacketSpec(1.0, 0.0, 10.0, 2.0)
    barrier = BarrierSpec(2.0)
    loose = propagator_direct(spec, barrier, -4.0, 9.0, rel_tol=1e-9)
    tight = propagator_direct(spec, barrier, -4.0, 9.0, rel_tol=1e-10)
    assert abs(loose - tight) < 1e-9


def test_propagator_direct_rejects_nonpositive_time():
    with pytest.raises(ValidationError):
        propagator_direct(PacketSpec(1.0, 0.0, 10.0, 2.0), BarrierSpec(1.0), 0.0, 0.0)


def test_convergence_study_orders_and_extrapolation():
    spec = PacketSpec(1.0, 0.0, 10.0, 2.0)
    barrier = BarrierSpec(2.0)
    t_final = 2.0 * default_final_time(spec, barrier)
    base = suggest_transmission_config(spec, barrier, t_final=t_final)
    from dataclasses import replace
    coarse_n = (base.n_points - 1) // 4 + 1
    base = replace(base, n_points=coarse_n, dt=base.dt / 2.0)
    report = convergence_study(spec, barrier, base)
    assert 1.6 <= report.spatial_order <= 2.4
    ratio = report.transmitted[0] - report.transmitted[1]
    ratio /= report.transmitted[1] - report.transmitted[2]
    assert 2.5 <= ratio <= 6.0
    expected = transmission_coefficient(DimensionlessPoint(1.0, 0.125)).value
    assert abs(report.extrapolated_transmitted - expected) <= report.extrapolated_uncertainty


def test_convergence_study_free_temporal_order():
    spec = PacketSpec(1.0, 0.0, 10.0, 2.0)
    barrier = BarrierSpec(0.0)
    cfg = SolverConfig(x_min=-30.0, x_max=30.0, n_points=3001, dt=0.02, t_final=3.0)
    report = convergence_study(spec, barrier, cfg)
    assert 1.8 <= report.temporal_order <= 2.2
