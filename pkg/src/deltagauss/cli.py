"""Command-line interface: evolve | transmit | sweep | verify.

Conventions shared by all commands:
  - CSV output with a mandatory header row, comma delimiter, '.' decimal,
    every numeric field at 17 significant digits (round-trip safe).
  - Option precedence: command-line flags > --config JSON file (flat
    key/value, keys named exactly like the long flags) > built-in defaults.
  - Exit codes: 0 ok, 2 validation failure, 3 numeric failure,
    4 verification failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from .barrier import BarrierSpec, evolved_wavefunction
from .errors import NumericsError, ValidationError
from .packet import (
    PacketSpec,
    free_position_variance,
    natural_time_scale,
    to_natural_units,
)
from .tdse import (
    RECOMMENDED_MIN_POINTS,
    evolve_numeric,
    suggest_l2_config,
    suggest_transmission_config,
)
from .transmission import (
    DEFAULT_REL_TOL,
    DEFAULT_SWEEP_A_VALUES,
    DEFAULT_SWEEP_B_RANGE,
    DEFAULT_SWEEP_POINTS,
    DimensionlessPoint,
    classify_regime,
    dimensionless_from_parameters,
    interpolation_estimate,
    momentum_average_transmission,
    point_from_physical,
    sweep,
    transmission_coefficient,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3
EXIT_VERIFY = 4

# Tolerances the verify command holds the three routes to.
VERIFY_IDENTITY_TOL = 1e-8
VERIFY_TRANSMITTED_TOL = 2e-3
VERIFY_L2_TOL = 1e-3
VERIFY_NORM_DRIFT_TOL = 1e-9


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _write_csv(out_path, header, rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    text = "\n".join(lines) + "\n"
    if out_path is None:
        sys.stdout.write(text)
    else:
        Path(out_path).write_text(text, newline="\n")


def _load_config(path):
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except OSError as e:
        raise ValidationError(f"cannot read config file: {e}") from e
    except json.JSONDecodeError as e:
        raise ValidationError(f"config file is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ValidationError("config file must hold a flat JSON object")
    return data


def _opt(args, config, flag, default=None, required=False):
    """Resolve one option: flag value > config value > default."""
    v = getattr(args, flag.replace("-", "_"))
    if v is None:
        v = config.get(flag, default)
    if v is None and required:
        raise ValidationError(f"missing required option --{flag}")
    return v


def _opt_float(args, config, flag, default=None, required=False):
    v = _opt(args, config, flag, default, required)
    if v is None:
        return None
    try:
        return float(v)
    except (TypeError, ValueError) as e:
        raise ValidationError(f"--{flag} expects a number, got {v!r}") from e


def _opt_int(args, config, flag, default=None, required=False):
    v = _opt(args, config, flag, default, required)
    return None if v is None else int(v)


def _opt_bool(args, config, flag) -> bool:
    return bool(_opt(args, config, flag, default=False))


def _opt_float_list(args, config, flag, default=None, required=False):
    v = _opt(args, config, flag, default, required)
    if v is None:
        return None
    if not isinstance(v, (list, tuple)):
        v = [v]
    return [float(x) for x in v]


def _auto_window(spec: PacketSpec, t_max: float) -> tuple[float, float]:
    w = math.sqrt(2.0 * free_position_variance(spec, t_max))
    lo = min(-4.0 * spec.s, spec.x_c - spec.p0 * t_max - 10.0 * w)
    hi = max(spec.x_c + 4.0 * spec.s, spec.p0 * t_max - spec.x_c + 10.0 * w)
    return lo, hi


def cmd_evolve(args) -> int:
    config = _load_config(args.config)
    s = _opt_float(args, config, "s", required=True)
    rho = _opt_float(args, config, "rho", required=True)
    xc = _opt_float(args, config, "xc", required=True)
    p0 = _opt_float(args, config, "p0", required=True)
    z = _opt_float(args, config, "Z", required=True)
    times = _opt_float_list(args, config, "t", required=True)
    n = _opt_int(args, config, "n", default=4096)
    long_format = _opt_bool(args, config, "long")
    allow_near = _opt_bool(args, config, "allow-near-field")
    mass = _opt_float(args, config, "mass")
    hbar = _opt_float(args, config, "hbar")
    out = args.out

    meta = None
    if mass is not None or hbar is not None:
        m = mass if mass is not None else 1.0
        hb = hbar if hbar is not None else 1.0
        if out is None:
            raise ValidationError("--out is required with --mass/--hbar (metadata sidecar)")
        spec, barrier = to_natural_units(s, rho, xc, p0, z, m, hb, allow_near_field=allow_near)
        scale = natural_time_scale(m, hb)
        nat_times = [scale * t for t in times]
        meta = {
            "mass": m,
            "hbar": hb,
            "time-scale": scale,
            "p0-natural": spec.p0,
            "Z-natural": barrier.Z,
            "times-input": times,
            "times-natural": nat_times,
        }
    else:
        spec = PacketSpec(s=s, rho=rho, x_c=xc, p0=p0, allow_near_field=allow_near)
        barrier = BarrierSpec(Z=z)
        nat_times = times

    if n < 2:
        raise ValidationError(f"--n must be >= 2, got {n}")
    x_lo = _opt_float(args, config, "x-lo")
    x_hi = _opt_float(args, config, "x-hi")
    auto_lo, auto_hi = _auto_window(spec, max(nat_times))
    x_lo = auto_lo if x_lo is None else x_lo
    x_hi = auto_hi if x_hi is None else x_hi
    if not x_lo < x_hi:
        raise ValidationError(f"need --x-lo < --x-hi, got [{x_lo}, {x_hi}]")
    x = np.linspace(x_lo, x_hi, n)

    def rows_at(t):
        psi = evolved_wavefunction(spec, barrier, x, t)
        dens = np.abs(psi) ** 2
        return psi, dens

    if long_format or len(nat_times) == 1:
        header = (["t"] if long_format else []) + ["x", "re_psi", "im_psi", "density"]
        rows = []
        for t in nat_times:
            psi, dens = rows_at(t)
            for i in range(n):
                row = ([t] if long_format else []) + [float(x[i]), float(psi[i].real),
                                                      float(psi[i].imag), float(dens[i])]
                rows.append(row)
        _write_csv(out, header, rows)
    else:
        if out is None:
            raise ValidationError("multiple --t values need --long or an --out path pattern")
        base = Path(out)
        for idx, t in enumerate(nat_times):
            psi, dens = rows_at(t)
            rows = [[float(x[i]), float(psi[i].real), float(psi[i].imag), float(dens[i])]
                    for i in range(n)]
            _write_csv(base.with_name(f"{base.stem}_t{idx}{base.suffix}"),
                       ["x", "re_psi", "im_psi", "density"], rows)

    if meta is not None:
        sidecar = Path(out).with_suffix(Path(out).suffix + ".meta.json")
        sidecar.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n", newline="\n")
    return EXIT_OK


def _point_from_args(args, config) -> DimensionlessPoint:
    a = _opt_float(args, config, "A")
    b = _opt_float(args, config, "B")
    have_ab = a is not None or b is not None
    if have_ab:
        if a is None or b is None:
            raise ValidationError("--A and --B must be given together")
        return DimensionlessPoint(A=a, B=b)
    s = _opt_float(args, config, "s", required=True)
    rho = _opt_float(args, config, "rho", default=0.0)
    p0 = _opt_float(args, config, "p0", required=True)
    z = _opt_float(args, config, "Z", required=True)
    return dimensionless_from_parameters(s, rho, p0, z)


def cmd_transmit(args) -> int:
    config = _load_config(args.config)
    rel_tol = _opt_float(args, config, "rel-tol", default=DEFAULT_REL_TOL)
    point = _point_from_args(args, config)
    result = transmission_coefficient(point, rel_tol)
    apr = interpolation_estimate(point)
    regime = classify_regime(point).regime.value
    fields = [("A", point.A), ("B", point.B), ("T", result.value),
              ("abs_err", result.abs_err), ("T_apr", apr), ("regime", regime)]
    print(" ".join(f"{k}={_fmt(v)}" for k, v in fields))
    if args.out is not None:
        _write_csv(args.out, [k for k, _ in fields], [[v for _, v in fields]])
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = _load_config(args.config)
    mode = _opt(args, config, "mode", required=True)
    if mode not in ("fig1", "fig2"):
        raise ValidationError(f"--mode must be fig1 or fig2, got {mode!r}")
    a_values = _opt_float_list(args, config, "A", default=list(DEFAULT_SWEEP_A_VALUES))
    b_lo = _opt_float(args, config, "b-lo", default=DEFAULT_SWEEP_B_RANGE[0])
    b_hi = _opt_float(args, config, "b-hi", default=DEFAULT_SWEEP_B_RANGE[1])
    n_points = _opt_int(args, config, "n-points", default=DEFAULT_SWEEP_POINTS)
    linear = _opt_bool(args, config, "linear")
    rel_tol = _opt_float(args, config, "rel-tol", default=DEFAULT_REL_TOL)

    rows = sweep(a_values, (b_lo, b_hi), n_points, log_spacing=not linear, rel_tol=rel_tol)
    if mode == "fig1":
        header = ["A", "B", "T", "abs_err"]
        table = [[r.A, r.B, r.T, r.abs_err] for r in rows]
    else:
        header = ["A", "B", "T", "T_apr", "ratio"]
        table = [[r.A, r.B, r.T, r.T_apr, r.ratio] for r in rows]
    _write_csv(args.out, header, table)
    return EXIT_OK


def _relative_l2(numeric: np.ndarray, reference: np.ndarray) -> float:
    num = float(np.sqrt(np.sum(np.abs(numeric - reference) ** 2)))
    den = float(np.sqrt(np.sum(np.abs(reference) ** 2)))
    return num / den


def cmd_verify(args) -> int:
    config = _load_config(args.config)
    s = _opt_float(args, config, "s", default=1.0)
    rho = _opt_float(args, config, "rho", default=0.0)
    xc = _opt_float(args, config, "xc", default=15.0)
    p0 = _opt_float(args, config, "p0", default=2.0)
    z = _opt_float(args, config, "Z", default=2.0)
    rel_tol = _opt_float(args, config, "rel-tol", default=DEFAULT_REL_TOL)

    spec = PacketSpec(s=s, rho=rho, x_c=xc, p0=p0)
    barrier = BarrierSpec(Z=z)
    point = point_from_physical(spec, barrier)
    print(f"parameters: s={s:g} rho={rho:g} xc={xc:g} p0={p0:g} Z={z:g}  ->  "
          f"A={point.A:.6g} B={point.B:.6g}")

    checks: list[tuple[str, bool, str]] = []

    t_ref = transmission_coefficient(point, rel_tol)
    t_mom = momentum_average_transmission(point, rel_tol)
    delta = abs(t_ref.value - t_mom.value)
    checks.append((
        "transmission quadrature vs momentum-average oracle",
        delta <= VERIFY_IDENTITY_TOL,
        f"T={t_ref.value:.10g}  T_mom={t_mom.value:.10g}  |delta|={delta:.3e}  tol={VERIFY_IDENTITY_TOL:g}",
    ))

    t_cross = spec.x_c / spec.p0
    t_before, t_after = 0.5 * t_cross, 1.5 * t_cross
    cfg_l2 = suggest_l2_config(spec, barrier, t_after, snapshot_times=(t_before,),
                               l2_budget=VERIFY_L2_TOL)
    cfg_tr = suggest_transmission_config(spec, barrier,
                                         t_final=_opt_float(args, config, "t-final"),
                                         tol=VERIFY_TRANSMITTED_TOL)

    overrides = {}
    n_over = _opt_int(args, config, "n")
    if n_over is not None:
        overrides["n_points"] = n_over
    dt_over = _opt_float(args, config, "dt")
    if dt_over is not None:
        overrides["dt"] = dt_over
    x_lo_over = _opt_float(args, config, "x-lo")
    x_hi_over = _opt_float(args, config, "x-hi")
    if x_lo_over is not None:
        overrides["x_min"] = x_lo_over
    if x_hi_over is not None:
        overrides["x_max"] = x_hi_over
    if overrides:
        cfg_l2 = dataclasses.replace(cfg_l2, **overrides)
        cfg_tr = dataclasses.replace(cfg_tr, **overrides)

    min_n = min(cfg_l2.n_points, cfg_tr.n_points)
    checks.append((
        "grid resolution",
        min_n >= RECOMMENDED_MIN_POINTS,
        f"n_points={min_n} (convergence requires >= {RECOMMENDED_MIN_POINTS}; "
        "refine the grid)" if min_n < RECOMMENDED_MIN_POINTS else f"n_points={min_n}",
    ))

    snapshot_rows = []
    try:
        outcome = evolve_numeric(spec, barrier, cfg_l2)
        states = list(outcome.snapshots) + [outcome.final_state]
        for state in states:
            reference = evolved_wavefunction(spec, barrier, state.x_values, state.t)
            err = _relative_l2(state.amplitudes, reference)
            tag = "before" if state.t < t_cross else "after"
            checks.append((
                f"closed form vs grid wavefunction (L2, {tag} crossing, t={state.t:g})",
                err <= VERIFY_L2_TOL,
                f"relative L2 difference {err:.3e}  tol={VERIFY_L2_TOL:g}",
            ))
            if args.snapshots_out is not None:
                dens = np.abs(state.amplitudes) ** 2
                snapshot_rows.extend(
                    [state.t, float(xv), float(av.real), float(av.imag), float(dv)]
                    for xv, av, dv in zip(state.x_values, state.amplitudes, dens)
                )
        checks.append((
            "norm conservation (L2 run)",
            outcome.norm_drift <= VERIFY_NORM_DRIFT_TOL,
            f"max |norm-1| = {outcome.norm_drift:.3e}  tol={VERIFY_NORM_DRIFT_TOL:g}",
        ))
    except NumericsError as e:
        checks.append(("grid evolution (L2 run)", False, f"aborted: {e}"))

    try:
        outcome_tr = evolve_numeric(spec, barrier, cfg_tr)
        diff = abs(outcome_tr.transmitted - t_ref.value)
        checks.append((
            "grid transmitted probability vs quadrature",
            diff <= VERIFY_TRANSMITTED_TOL,
            f"grid={outcome_tr.transmitted:.8g}  quadrature={t_ref.value:.8g}  "
            f"|delta|={diff:.3e}  tol={VERIFY_TRANSMITTED_TOL:g}",
        ))
        checks.append((
            "norm conservation (transmission run)",
            outcome_tr.norm_drift <= VERIFY_NORM_DRIFT_TOL,
            f"max |norm-1| = {outcome_tr.norm_drift:.3e}  tol={VERIFY_NORM_DRIFT_TOL:g}",
        ))
    except NumericsError as e:
        checks.append(("grid evolution (transmission run)", False, f"aborted: {e}"))

    if args.snapshots_out is not None:
        _write_csv(args.snapshots_out, ["t", "x", "re_psi", "im_psi", "density"], snapshot_rows)

    failures = 0
    for name, ok, detail in checks:
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        failures += 0 if ok else 1
    print(f"verify: {'all checks passed' if failures == 0 else f'{failures} check(s) FAILED'}")
    return EXIT_OK if failures == 0 else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=str, default=None, help="output CSV path (default: stdout)")
    common.add_argument("--rel-tol", type=float, default=None, help="quadrature relative tolerance")
    common.add_argument("--seed", type=int, default=None, help="reserved")
    common.add_argument("--format", choices=["csv"], default="csv", help="output format")
    common.add_argument("--config", type=str, default=None,
                        help="JSON config file; keys named exactly like long flags")

    parser = argparse.ArgumentParser(
        prog="deltagauss",
        description="Correlated Gaussian packets against a delta barrier: "
                    "closed-form evolution, transmission sweeps, oracle verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", parents=[common],
                       help="sample the closed-form wave function on a grid")
    for flag in ("s", "rho", "xc", "p0", "Z", "mass", "hbar", "x-lo", "x-hi"):
        p.add_argument(f"--{flag}", type=float, default=None)
    p.add_argument("--t", type=float, action="append", default=None,
                   help="evolution time; repeatable")
    p.add_argument("--n", type=int, default=None, help="number of grid points (default 4096)")
    p.add_argument("--long", action="store_const", const=True, default=None,
                   help="single long-format file with a t column")
    p.add_argument("--allow-near-field", action="store_const", const=True, default=None)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("transmit", parents=[common],
                       help="asymptotic transmission coefficient at one point")
    for flag in ("A", "B", "s", "rho", "p0", "Z"):
        p.add_argument(f"--{flag}", type=float, default=None)
    p.set_defaults(func=cmd_transmit)

    p = sub.add_parser("sweep", parents=[common], help="tabulate T over (A, B) grids")
    p.add_argument("--mode", choices=["fig1", "fig2"], default=None, required=False)
    p.add_argument("--A", type=float, action="append", default=None,
                   help="A value; repeatable (default 0.25 1 4 25)")
    p.add_argument("--b-lo", type=float, default=None)
    p.add_argument("--b-hi", type=float, default=None)
    p.add_argument("--n-points", type=int, default=None)
    p.add_argument("--linear", action="store_const", const=True, default=None,
                   help="linear B spacing (default: logarithmic)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", parents=[common],
                       help="cross-validate quadrature, closed form and grid solver")
    for flag in ("s", "rho", "xc", "p0", "Z", "dt", "t-final", "x-lo", "x-hi"):
        p.add_argument(f"--{flag}", type=float, default=None)
    p.add_argument("--n", type=int, default=None, help="grid points override")
    p.add_argument("--snapshots-out", type=str, default=None,
                   help="dump solver snapshots to this CSV")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericsError as e:
        print(f"numeric error: {e}", file=sys.stderr)
        return EXIT_NUMERIC


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
