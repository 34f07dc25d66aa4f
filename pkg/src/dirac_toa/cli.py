"""Command-line driver: derive, verify, dynamics, parity, nonrel.

Each command validates its configuration, runs the corresponding checks,
prints a structured report (runtimes on stdout only) and writes deterministic
report/CSV/operator-table files into the output directory. Exit status is
zero iff every enabled check passed; config errors exit with status 2.
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List

import numpy as np

from .bdalgebra import serialize_operator_poly
from .config import ConfigError, RunConfig, apply_overrides, load_config, resolve_pair
from .conjugacy import build_constraints, expected_minimal_table, solve_minimal, toa_operator_psi, verify_conjugacy
from .dynamics import (
    density_movie,
    eigen_residual,
    nodal_closing_time,
    nonrel_limit_check,
    origin_density_series,
    origin_peak_time,
    parity_commutator,
    parity_t0_closed_form,
    position_grid,
    toa_eigenfunction,
)
from .fv import (
    UMatrixField,
    apply_t0,
    apply_t_hat,
    apply_t_phi_closed,
    conjugate_toa_numeric,
    du_inv_dp,
    t0_scalar,
    u_matrix,
)
from .grids import MomentumGrid, SpinorGrid, gaussian_bump, relative_diff
from .params import PhysParams
from .report import Report

T0_DETERMINANT_EPS = 1e-15


def _pair_label(spec: str, index: int) -> str:
    safe = spec.replace(":", "_").replace(";", "_").replace(",", "_").replace(" ", "")
    return safe if safe.isidentifier() or safe.replace("-", "").isalnum() else f"pair{index}"


def _params(cfg: RunConfig) -> PhysParams:
    return PhysParams(cfg.hbar, cfg.c, cfg.m0)


def cmd_derive(cfg: RunConfig, out_files: Dict[str, str]) -> Report:
    report = Report("derive")
    for index, spec in enumerate(cfg.pairs):
        pair = resolve_pair(spec, cfg.seed)
        label = _pair_label(spec, index)
        start = time.perf_counter()
        system = build_constraints(pair, (cfg.m_min, cfg.m_max), cfg.n_max)
        table = solve_minimal(system)
        expected = expected_minimal_table(pair)
        keys = set(table.entries) | set(expected)
        mismatches = sum(
            1 for k in keys if table.entries.get(k) != expected.get(k)
        )
        poly = toa_operator_psi(pair)
        routes_differ = 0 if table.to_operator_poly() == poly else 1
        residual = verify_conjugacy(poly, pair)
        elapsed = time.perf_counter() - start
        report.add(f"{label}: solution-matches-closed-form", mismatches, 0, elapsed, "==0")
        report.add(f"{label}: table-equals-direct-operator", routes_differ, 0, 0.0, "==0")
        report.add(f"{label}: conjugacy-residual-terms", len(residual.terms), 0, 0.0, "==0")
        report.add(
            f"{label}: free-vars-outside-n0-family", len(table.unexpected_free), 0, 0.0, "==0"
        )
        out_files[f"gamma_table_{label}.txt"] = table.report_text()
        out_files[f"toa_operator_{label}.txt"] = serialize_operator_poly(poly)
    return report


def _fd_u_derivative(p: float, pair, params, h: float = 5e-3) -> np.ndarray:
    def u(pv: float) -> np.ndarray:
        m = u_matrix(pv, pair, params)
        return np.array([[m[0, 0], m[0, 1]], [m[1, 0], m[1, 1]]], dtype=complex)

    return (u(p - 2 * h) - 8 * u(p - h) + 8 * u(p + h) - u(p + 2 * h)) / (12 * h)


def _verify_test_states(grid: MomentumGrid) -> List[SpinorGrid]:
    states = [
        SpinorGrid.single(grid, gaussian_bump(grid, 1.6, 0.25)),
        SpinorGrid.single(grid, gaussian_bump(grid, 2.3, 0.3), component=1),
        SpinorGrid.from_components(
            grid,
            gaussian_bump(grid, 1.3, 0.2),
            0.5j * gaussian_bump(grid, 2.6, 0.35),
        ),
    ]
    return [s.scale(1.0 / s.norm()) for s in states]


def cmd_verify(cfg: RunConfig, out_files: Dict[str, str]) -> Report:
    report = Report("verify")
    params = _params(cfg)
    grid = MomentumGrid.make(cfg.p_max, cfg.p_count)
    for index, spec in enumerate(cfg.pairs):
        pair = resolve_pair(spec, cfg.seed)
        label = _pair_label(spec, index)
        start = time.perf_counter()
        field = UMatrixField.make(grid, pair, params)
        ok = field.ok
        report.note(f"{label}: guarded-out points {field.guarded_count}/{grid.count}")

        # involution U^2 = I on guarded points
        r00 = field.u00 * field.u00 + field.u01 * field.u10 - 1.0
        r01 = field.u00 * field.u01 + field.u01 * field.u11
        r10 = field.u10 * field.u00 + field.u11 * field.u10
        r11 = field.u10 * field.u01 + field.u11 * field.u11 - 1.0
        inv_err = max(
            float(np.max(np.abs(r[ok]))) if np.any(ok) else np.inf
            for r in (r00, r01, r10, r11)
        )
        report.add(f"{label}: U-involution", inv_err, 1e-12)

        # diagonalization: off-diagonal of U H U relative to E_p
        from .fv import _h_components  # shared component helper

        h1, h2, h3 = _h_components(grid.samples, pair, params)
        off = h1 - 1j * h2
        m00 = field.u00 * h3 + field.u01 * np.conj(off)
        m01 = field.u00 * off - field.u01 * h3
        m10 = field.u10 * h3 + field.u11 * np.conj(off)
        m11 = field.u10 * off - field.u11 * h3
        d01 = m00 * field.u01 + m01 * field.u11
        d10 = m10 * field.u00 + m11 * field.u10
        e = params.energy(grid.samples)
        diag_err = float(
            max(np.max(np.abs(d01[ok]) / e[ok]), np.max(np.abs(d10[ok]) / e[ok]))
        )
        report.add(f"{label}: U-diagonalizes-H", diag_err, 1e-12)

        # closed-form derivative of U^-1 against finite differences
        du_err = 0.0
        for p in (-2.7, -1.3, -0.6, 0.45, 0.8, 1.3, 2.1, 3.4):
            closed = du_inv_dp(p, pair, params)
            closed_arr = np.array(
                [[closed[0, 0], closed[0, 1]], [closed[1, 0], closed[1, 1]]],
                dtype=complex,
            )
            du_err = max(du_err, float(np.max(np.abs(closed_arr - _fd_u_derivative(p, pair, params)))))
        report.add(f"{label}: dU/dp-closed-vs-fd", du_err, 1e-8)

        # numeric conjugation against the closed-form split, on a grid whose
        # guard is everywhere satisfied
        bad = np.abs(grid.samples[~ok]) if field.guarded_count else None
        conj_p_max = min(cfg.p_max, 8.0)
        if bad is not None:
            conj_p_max = min(conj_p_max, 0.9 * float(np.min(bad)))
        conj_grid = MomentumGrid.make(conj_p_max, min(cfg.p_count, 2048))
        conj_err = 0.0
        leak = 0.0
        fault_sign = -1.0 if cfg.fault == "t0-sign" else 1.0
        for phi in _verify_test_states(conj_grid):
            numeric = conjugate_toa_numeric(pair, params, phi)
            closed = apply_t_hat(phi, params) + apply_t0(phi, pair, params).scale(fault_sign)
            conj_err = max(conj_err, relative_diff(numeric, closed))
        single = _verify_test_states(conj_grid)[0]
        numeric = conjugate_toa_numeric(pair, params, single)
        leak = float(np.sqrt(conj_grid.dp * np.sum(np.abs(numeric.lower) ** 2)))
        report.add(f"{label}: conjugation-vs-closed-form", conj_err, 1e-6)
        report.add(f"{label}: conjugation-one-particle-leakage", leak, 1e-8)

        # multiplication operators commute: coefficient of [H_Phi, T0] is
        # E*t0 - t0*E computed pointwise
        t0 = t0_scalar(conj_grid.samples, pair, params)
        e_c = params.energy(conj_grid.samples)
        comm_coeff = float(np.max(np.abs(e_c * t0 - t0 * e_c)))
        report.add(f"{label}: H-T0-commutator", comm_coeff, 0, time.perf_counter() - start, "==0")
    return report


def _dynamics_case(cfg: RunConfig, tau: float, branch: str):
    params = _params(cfg)
    grid = MomentumGrid.make(cfg.p_max, cfg.p_count)
    x_grid = position_grid(cfg.x_max, cfg.x_count)
    t_grid = np.linspace(0.0, 2.0 * tau, cfg.time_count)
    dt = t_grid[1] - t_grid[0]

    phi = toa_eigenfunction(tau, +1, branch, grid, params)
    residual = eigen_residual(phi, tau, params, band=(0.25, 0.8 * cfg.p_max))
    origin = origin_density_series(phi, t_grid, params, cfg.window_fraction)
    header = (
        "density-field v1",
        f"tau: {tau:.17g}",
        f"branch: {branch}",
        "lambda: +1",
        f"p-grid: max={cfg.p_max:.17g} count={cfg.p_count}",
        f"x-grid: max={cfg.x_max:.17g} count={cfg.x_count}",
        f"t-grid: 0..{2.0 * tau:.17g} count={cfg.time_count}",
    )
    field = density_movie(phi, t_grid, x_grid, params, cfg.window_fraction, header)
    total = field.total_probability()
    prob_drift = float(np.max(np.abs(total / total[0] - 1.0)))

    checks = [(f"tau={tau:g} {branch}: eigen-residual", residual, 1e-6, "<")]
    if branch == "non-nodal":
        t_peak = origin_peak_time(t_grid, origin)
        checks.append(
            (f"tau={tau:g} {branch}: origin-peak-time-offset", abs(t_peak - tau), 2.0 * dt + 1e-12, "<=")
        )
    else:
        checks.append((f"tau={tau:g} {branch}: origin-density-max", float(np.max(origin)), 1e-8, "<"))
        t_close = nodal_closing_time(field)
        checks.append(
            (f"tau={tau:g} {branch}: peak-closing-time-offset", abs(t_close - tau), 2.0 * dt + 1e-12, "<=")
        )
    checks.append((f"tau={tau:g} {branch}: probability-conservation", prob_drift, 1e-6, "<"))
    name = f"density_tau{tau:g}_{branch}.csv"
    return checks, name, field.to_csv()


def cmd_dynamics(cfg: RunConfig, out_files: Dict[str, str]) -> Report:
    report = Report("dynamics")
    cases = [(tau, branch) for tau in cfg.taus for branch in cfg.branches]
    start = time.perf_counter()
    if cfg.parallel and len(cases) > 1:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(lambda tb: _dynamics_case(cfg, *tb), cases))
    else:
        results = [_dynamics_case(cfg, tau, branch) for tau, branch in cases]
    elapsed = time.perf_counter() - start
    for checks, name, csv_text in results:
        for cname, measured, threshold, comparator in checks:
            report.add(cname, measured, threshold, 0.0, comparator)
        out_files[name] = csv_text
    report.note(f"cases: {len(cases)} in {elapsed:.2f}s (parallel={cfg.parallel})")
    return report


def _parity_test_states(grid: MomentumGrid) -> List[SpinorGrid]:
    states = [
        SpinorGrid.from_components(
            grid,
            gaussian_bump(grid, 1.8, 0.4) + 0.3 * gaussian_bump(grid, -2.4, 0.5),
            0.7j * gaussian_bump(grid, -1.2, 0.3),
        ),
        SpinorGrid.single(grid, grid.samples * gaussian_bump(grid, 0.0, 1.2)),
    ]
    return [s.scale(1.0 / s.norm()) for s in states]


def cmd_parity(cfg: RunConfig, out_files: Dict[str, str]) -> Report:
    report = Report("parity")
    params = _params(cfg)
    grid = MomentumGrid.make(min(cfg.p_max, 10.0), min(cfg.p_count, 2048))
    for index, spec in enumerate(cfg.pairs):
        pair = resolve_pair(spec, cfg.seed)
        label = _pair_label(spec, index)
        start = time.perf_counter()
        t_hat_err = 0.0
        t0_err = 0.0
        for phi in _parity_test_states(grid):
            comm = parity_commutator(lambda s: apply_t_hat(s, params), phi)
            t_hat_err = max(t_hat_err, comm.norm() / phi.norm())
            comm0 = parity_commutator(lambda s: apply_t0(s, pair, params), phi)
            diff = comm0 - parity_t0_closed_form(phi, pair, params)
            t0_err = max(t0_err, diff.norm() / phi.norm())
        a1, a2, _ = pair.alpha_floats()
        b1, b2, _ = pair.beta_floats()
        if abs(a1 * b2 - a2 * b1) <= T0_DETERMINANT_EPS:
            report.note(f"{label}: T0 identically zero for this pair")
        report.add(f"{label}: parity-commutes-with-T", t_hat_err, 1e-6)
        report.add(f"{label}: parity-T0-closed-form", t0_err, 1e-8)
        t0 = t0_scalar(grid.samples, pair, params)
        e = params.energy(grid.samples)
        comm_coeff = float(np.max(np.abs(e * t0 - t0 * e)))
        report.add(f"{label}: H-T0-commutator", comm_coeff, 0, time.perf_counter() - start, "==0")
    return report


def cmd_nonrel(cfg: RunConfig, out_files: Dict[str, str]) -> Report:
    report = Report("nonrel")
    params = _params(cfg)
    scale = params.m0 * params.c
    start = time.perf_counter()
    centers = [cfg.nonrel_p_center * scale / (2.0**k) for k in range(3)]
    discrepancies = [
        nonrel_limit_check(pc, cfg.nonrel_relative_width * pc, params) for pc in centers
    ]
    elapsed = time.perf_counter() - start
    for pc, d in zip(centers, discrepancies):
        report.note(f"p_center={pc:.6g}: discrepancy={d:.6e}")
    report.add("nonrel: discrepancy-at-base", discrepancies[0], 1e-3, elapsed)
    for k in range(2):
        ratio = discrepancies[k] / discrepancies[k + 1]
        report.add(f"nonrel: quartic-ratio-step{k}", abs(ratio - 4.0), 1.0, 0.0, "<=")
    monotone = max(discrepancies[1] / discrepancies[0], discrepancies[2] / discrepancies[1])
    report.add("nonrel: monotone-decrease", monotone, 1.0)
    return report


COMMANDS = {
    "derive": cmd_derive,
    "verify": cmd_verify,
    "dynamics": cmd_dynamics,
    "parity": cmd_parity,
    "nonrel": cmd_nonrel,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dirac-toa",
        description="Arrival-time operator derivation and verification for the 1+1D Dirac particle",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__)
        p.add_argument("--config", default=None, help="INI run configuration")
        p.add_argument("--pair", default=None, help="pair spec override (single pair)")
        p.add_argument("--tau", nargs="+", default=None, help="eigenvalue list override")
        p.add_argument("--grid-n", type=int, default=None, help="momentum sample count override")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="seed override")
        p.add_argument("--parallel", action="store_true", help="fan out independent cases")
        p.add_argument(
            "--fault",
            default=None,
            choices=["none", "t0-sign"],
            help="self-test fault injection (flips the closed-form T0 sign)",
        )
        p.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        cfg = apply_overrides(cfg, args)
        cfg.validate()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    out_files: Dict[str, str] = {}
    report = args.func(cfg, out_files)
    sys.stdout.write(report.render(include_runtime=True))
    if cfg.out is not None:
        cfg.out.mkdir(parents=True, exist_ok=True)
        (cfg.out / "report.txt").write_text(report.render(include_runtime=False))
        for name, content in out_files.items():
            (cfg.out / name).write_text(content)
    return 0 if report.all_passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
