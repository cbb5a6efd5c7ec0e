"""Command-line front end: ``python -m optoport <command>`` or ``optoport <command>``.

Exit status: 0 on success, 2 for configuration errors, 3 when a numerical
contract is violated (non-finite fidelity, convention fault, failed mean
transport, configured sign variant off the plateau).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .budget import TimingBudget, decoherence_time, power_sensitivity
from .config import ConfigError, RunConfig, load_config
from .dynamics import couplings_from_params
from .protocol import (
    ConventionError,
    fidelity_curve,
    search_grid,
    select_sign_variant,
    summarize_curve,
    time_in_window,
)
from .readout import dominance_condition, printed_formula_residual, readout_coefficients
from .trajectories import estimate_fidelity, mean_transport_check

MEAN_TRANSPORT_TOL = 1e-8


class ContractError(RuntimeError):
    pass


def fmt(x) -> str:
    return "%.17g" % x


def write_csv(header: list[str], rows, path: str | None) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in r])
    data = buf.getvalue()
    if path is None or path == "-":
        sys.stdout.write(data)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(data)


def _json_safe(v):
    if isinstance(v, dict):
        return {k: _json_safe(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_safe(x) for x in v]
    if isinstance(v, (float, np.floating)):
        return float(v) if math.isfinite(v) else None
    return v


def emit_summary(summary: dict, dest: str | None) -> None:
    """Scalar results as one JSON object; infinities (e.g. nbar = 0 budgets) become null."""
    if dest is None:
        return
    text = json.dumps(_json_safe(summary), sort_keys=True, allow_nan=False) + "\n"
    if dest == "-":
        sys.stdout.write(text)
    else:
        with open(dest, "w", encoding="utf-8") as fh:
            fh.write(text)


def note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _key(n: float) -> str:
    return fmt(n)


def _require_finite(value: float, what: str) -> float:
    if not math.isfinite(value):
        raise ContractError(f"non-finite {what}")
    return value


# -- commands ----------------------------------------------------------------------


def cmd_couplings(cfg: RunConfig, args) -> dict:
    c = couplings_from_params(cfg.physical)
    row = [c.chi, c.theta, c.big_theta, c.gap / c.chi, c.gap]
    write_csv(["chi", "theta", "big_theta", "theta_over_chi_minus_1", "theta_minus_chi"], [row], cfg.out)
    note(f"chi = {c.chi:.6g} rad/s  theta = {c.theta:.6g} rad/s  Theta = {c.big_theta:.6g} rad/s  "
         f"theta/chi - 1 = {c.gap / c.chi:.4g}")
    return {"chi": c.chi, "theta": c.theta, "big_theta": c.big_theta, "theta_over_chi_minus_1": c.gap / c.chi}


def _curve_rows(task):
    c, nbar, grid, variant = task
    rows = []
    for r in fidelity_curve(c, nbar, grid, variant):
        _require_finite(r.fidelity, f"fidelity at theta_t={r.theta_t!r}, nbar={nbar!r}")
        rows.append((r.theta_t, nbar, r.fidelity, r.fidelity_no_het, r.n_eff))
    return rows


def _summary_task(task):
    c, nbar, lo, hi, variant = task
    g = search_grid()
    g = np.unique(np.concatenate([[lo, hi], g[(g >= lo) & (g <= hi)]]))
    return summarize_curve(c, nbar, variant, grid=g)


def _pmap(fn, tasks, jobs: int):
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


def _curves(cfg: RunConfig):
    c = couplings_from_params(cfg.physical)
    variant = cfg.sign_variant
    grid = cfg.grid.values()
    rows = _pmap(_curve_rows, [(c, n, grid, variant) for n in cfg.nbars], cfg.jobs)
    sums = _pmap(_summary_task, [(c, n, cfg.grid.start, cfg.grid.stop, variant) for n in cfg.nbars], cfg.jobs)
    return c, variant, rows, sums


def cmd_fidelity_sweep(cfg: RunConfig, args) -> dict:
    c, variant, rows, sums = _curves(cfg)
    flat = [r for block in rows for r in block]
    write_csv(["theta_t", "nbar", "F", "F_no_het", "n_eff"], flat, cfg.out)
    note(f"sign variant {variant.label}; Theta = {c.big_theta:.6g} rad/s")
    note("nbar        F_max     argmax(Theta t)  window(F>1/2)  F_max_no_het")
    for s in sums:
        note(f"{s.nbar:<10g}  {s.f_max:.6f}  {s.argmax:.6g}      {s.window:.6g}       {s.f_max_no_het:.6f}")
    return {
        "sign_variant": variant.label,
        "f_max": {_key(s.nbar): s.f_max for s in sums},
        "argmax_theta_t": {_key(s.nbar): s.argmax for s in sums},
        "window": {_key(s.nbar): s.window for s in sums},
        "f_max_no_het": {_key(s.nbar): s.f_max_no_het for s in sums},
        "n_eff_min": min(s.n_eff_min for s in sums),
    }


def cmd_cooling(cfg: RunConfig, args) -> dict:
    c, variant, rows, sums = _curves(cfg)
    flat = [(r[0], r[1], r[4]) for block in rows for r in block]
    write_csv(["theta_t", "nbar", "n_eff"], flat, cfg.out)
    for s in sums:
        note(f"nbar = {s.nbar:g}: min n_eff = {s.n_eff_min:.6g} at Theta t = {s.argmax:.6g} "
             f"(thermal noise reduced by {100 * (1 - s.n_eff_min / (s.nbar + 1)):.1f}% of nbar+1)")
    return {
        "sign_variant": variant.label,
        "n_eff_min": {_key(s.nbar): s.n_eff_min for s in sums},
        "f_max": {_key(s.nbar): s.f_max for s in sums},
    }


def cmd_montecarlo(cfg: RunConfig, args) -> dict:
    from .protocol import fidelity_coherent, normal_coefficients

    c = couplings_from_params(cfg.physical)
    variant = cfg.sign_variant
    rows = []
    worst = 0.0
    for i, (n, x) in enumerate((n, x) for n in cfg.mc_nbar for x in cfg.mc_chi_t):
        t = time_in_window(c, x, variant)
        exact = fidelity_coherent(normal_coefficients(c, n, t), variant)
        seed = cfg.seed + i
        mean, se = estimate_fidelity(c, n, t, cfg.alpha_in, cfg.n_traj, seed, variant, jobs=cfg.jobs)
        dev = mean_transport_check(c, n, t, cfg.alpha_in, min(cfg.n_traj, 1000), seed, variant)
        z = (mean - exact) / se
        worst = max(worst, dev)
        rows.append((i, c.big_theta * t, n, exact, mean, se, z, dev))
        note(f"point {i}: Theta t = {c.big_theta * t:.6g}, nbar = {n:g}: F = {exact:.6f}, "
             f"MC = {mean:.6f} +- {se:.2g} (z = {z:+.2f}), mean transport {dev:.2g}")
    write_csv(["point", "theta_t", "nbar", "F_analytic", "mc_mean", "stderr", "z", "mean_transport_dev"],
              rows, cfg.out)
    summary = {
        "sign_variant": variant.label,
        "max_abs_z": max(abs(r[6]) for r in rows),
        "max_mean_transport_dev": worst,
        "n_traj": cfg.n_traj,
    }
    if worst >= MEAN_TRANSPORT_TOL:
        emit_summary(summary, args.json_summary)
        raise ContractError(f"mean transport deviation {worst:.3g} exceeds {MEAN_TRANSPORT_TOL:g}")
    return summary


def cmd_readout_check(cfg: RunConfig, args) -> dict:
    c = couplings_from_params(cfg.physical)
    ratio = dominance_condition(c)
    period = 2 * math.pi / c.big_theta
    rows = []
    for t in np.linspace(0.0, period, cfg.readout_points):
        d = readout_coefficients(c, t, cfg.readout_sigma)
        r = printed_formula_residual(c, t, cfg.readout_sigma)
        rows.append((t, c.big_theta * t, d.c_b, d.c_a1, d.c_a2, r.c_b, r.c_a1, r.c_a2, ratio))
    write_csv(["t", "theta_t", "c_b", "c_a1", "c_a2", "resid_b", "resid_a1", "resid_a2", "dominance_ratio"],
              rows, cfg.out)
    note(f"dominance ratio theta(theta-chi)/[Theta(theta+chi)] = {ratio:.4g}")
    note(f"t = 0: derived (c_b, c_a1, c_a2) = ({rows[0][2]:g}, {rows[0][3]:g}, {rows[0][4]:g}); "
         f"reference-form residuals ({rows[0][5]:.3g}, {rows[0][6]:.3g}, {rows[0][7]:.3g})")
    return {
        "dominance_ratio": ratio,
        "readout_sigma": cfg.readout_sigma,
        "t0_coefficients": list(rows[0][2:5]),
        "t0_residuals": list(rows[0][5:8]),
        "max_abs_residual": [max(abs(r[k]) for r in rows) for k in (5, 6, 7)],
    }


def cmd_sensitivity(cfg: RunConfig, args) -> dict:
    p = cfg.physical
    c = couplings_from_params(p)
    sens = power_sensitivity(p)
    variant = cfg.sign_variant
    budgets = []
    for n in cfg.nbars:
        s = summarize_curve(c, n, variant)
        budgets.append(TimingBudget(n, decoherence_time(p.damping, n), s.window / c.big_theta, s.argmax / c.big_theta))
    rows = [
        ("rel_power_step", "", sens.rel_step),
        ("rel_theta_t_change", "", sens.rel_change),
        ("slope_dln_theta_t_dln_power", "", sens.slope),
        ("reference_slope", "", sens.reference_slope),
        ("reference_over_derived", "", sens.discrepancy_factor),
        ("gamma_m", "", p.damping),
    ]
    for b in budgets:
        rows += [
            ("decoherence_time_s", fmt(b.nbar), b.decoherence_time),
            ("window_time_s", fmt(b.nbar), b.window_time),
            ("pulse_time_s", fmt(b.nbar), b.pulse_time),
        ]
    write_csv(["quantity", "nbar", "value"], rows, cfg.out)
    note(f"d ln(Theta t)/d ln P = {sens.slope:.12g} (finite difference); reference relation implies "
         f"{sens.reference_slope:g}, a factor {sens.discrepancy_factor:g} apart")
    for b in budgets:
        note(f"nbar = {b.nbar:g}: 1/(gamma_m nbar) = {b.decoherence_time:.4g} s, pulse {b.pulse_time:.4g} s, "
             f"F>1/2 window {b.window_time:.4g} s")
    return {
        "rel_theta_t_change": sens.rel_change,
        "slope": sens.slope,
        "reference_slope": sens.reference_slope,
        "discrepancy_factor": sens.discrepancy_factor,
        "decoherence_time_s": {_key(b.nbar): b.decoherence_time for b in budgets},
        "window_time_s": {_key(b.nbar): b.window_time for b in budgets},
        "pulse_time_s": {_key(b.nbar): b.pulse_time for b in budgets},
    }


def cmd_select_variant(cfg: RunConfig, args) -> dict:
    c = couplings_from_params(cfg.physical)
    scores = select_sign_variant(c, cfg.nbars, alpha_in=cfg.alpha_in)
    rows = [(s.variant.label, fmt(n), s.f_max[n], "pass" if s.passes else "fail") for s in scores for n in s.f_max]
    write_csv(["variant", "nbar", "f_max", "verdict"], rows, cfg.out)
    passing = [s.variant.label for s in scores if s.passes]
    for s in scores:
        note(f"{s.variant.label}: " + ", ".join(f"{v:.4f}" for v in s.f_max.values())
             + ("  <- passes" if s.passes else ""))
    summary = {"passing": passing, "f_max": {s.variant.label: list(s.f_max.values()) for s in scores}}
    if cfg.sign_variant.label not in passing:
        emit_summary(summary, args.json_summary)
        raise ContractError(f"configured sign variant {cfg.sign_variant.label} misses the plateau")
    return summary


COMMANDS = {
    "couplings": cmd_couplings,
    "fidelity-sweep": cmd_fidelity_sweep,
    "cooling": cmd_cooling,
    "montecarlo": cmd_montecarlo,
    "readout-check": cmd_readout_check,
    "sensitivity": cmd_sensitivity,
    "select-variant": cmd_select_variant,
}


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="key = value file")
    shared.add_argument("--out", help="CSV destination (default stdout)")
    shared.add_argument("--nbar", help="comma-separated mean occupations")
    shared.add_argument("--temperature", dest="temperature_k", help="mirror temperature in K (instead of --nbar)")
    shared.add_argument("--grid", help="Theta t grid START:STOP:POINTS (pi multiples allowed)")
    shared.add_argument("--seed", help="Monte-Carlo seed")
    shared.add_argument("--n-traj", dest="n_traj", help="trajectories per Monte-Carlo point")
    shared.add_argument("--sign-variant", dest="sign_variant", help="'selected', 'printed' or a label like '--+'")
    shared.add_argument("--readout-sigma", dest="readout_sigma", help="+1 or -1")
    shared.add_argument("--jobs", help="worker processes (results are identical for any value)")
    shared.add_argument("--power", dest="power_w", help="laser power in W")
    shared.add_argument("--json-summary", nargs="?", const="-", default=None, metavar="PATH",
                        help="write scalar results as JSON (stdout when PATH is omitted)")
    parser = argparse.ArgumentParser(prog="optoport", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[shared])
    return parser


_OVERRIDE_KEYS = ("out", "nbar", "temperature_k", "grid", "seed", "n_traj", "sign_variant",
                  "readout_sigma", "jobs", "power_w")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    overrides = {k: getattr(args, k) for k in _OVERRIDE_KEYS if getattr(args, k) is not None}
    try:
        cfg = load_config(args.config, overrides)
    except ConfigError as exc:
        note(f"config error: {exc}")
        return 2
    except ValueError as exc:  # PhysicalParams validation
        note(f"config error: {exc}")
        return 2
    try:
        summary = COMMANDS[args.command](cfg, args)
    except (ContractError, ConventionError, FloatingPointError) as exc:
        note(f"numerical contract violated: {exc}")
        return 3
    except OSError as exc:
        note(f"cannot write output: {exc}")
        return 2
    emit_summary({"command": args.command, **summary}, args.json_summary)
    return 0


if __name__ == "__main__":
    sys.exit(main())
