"""Command-line front end: batch sweeps with CSV + JSON output.

Every command writes <command>.csv and <command>.json into --out.  CSV files
are deterministic byte-for-byte for a given configuration (fixed iteration
order, 12 significant digits, no timestamps); wall time lives only in the
JSON summary.  Exit status: 0 success, 2 configuration error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import catprep, erasure, rootbin, signbin
from .numerics import IntegrationError

DEFAULT_TOL = 1e-9


class ConfigError(ValueError):
    pass


def parse_range(text: str, name: str = "range"):
    """start:stop:step (inclusive start, step > 0) or a single value."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [float(parts[0])]
        if len(parts) == 3:
            start, stop, step = (float(p) for p in parts)
        else:
            raise ValueError
    except ValueError:
        raise ConfigError(
            f"malformed {name} {text!r}: expected VALUE or START:STOP:STEP"
        ) from None
    if step <= 0:
        raise ConfigError(f"{name} step must be > 0")
    if stop < start:
        raise ConfigError(f"{name} stop must be >= start")
    values = []
    k = 0
    while True:
        v = start + k * step
        if v > stop + 1e-9 * step:
            break
        values.append(v)
        k += 1
    return values


def parse_int_range(text: str, name: str = "range"):
    values = parse_range(text, name)
    out = []
    for v in values:
        if abs(v - round(v)) > 1e-9:
            raise ConfigError(f"{name} must contain integers, got {v!r}")
        out.append(int(round(v)))
    return out


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def write_csv(path: Path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_json(path: Path, payload):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def pool_map(fn, items, jobs: int):
    """Map preserving input order; a process pool when jobs > 1."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# workers for the process pool (must be importable, hence module level)

def _psi3_point(args):
    alpha, tol = args
    report = rootbin.psi3_bell_report(alpha, tol)
    prob_err = max(abs(s - 1.0) for s in report.probability_sums.values())
    return (
        alpha,
        report.bell_x_unprimed,
        report.bell_p_unprimed,
        report.bell_best,
        prob_err,
    )


def _cat_vw_point(args):
    alpha, tol = args
    v, w = rootbin.overlaps_VW(rootbin.cat_pair(alpha), tol)
    return (alpha, v, w)


def _prep_point(args):
    alpha, x0 = args
    primary = catprep.generation_pipeline(alpha, x0, wiring="sum-first")
    return (alpha, x0, primary.fidelity, primary.density)


def cmd_sign_ghz(options):
    m = options.m
    state = signbin.FockCorrelatedState.ghz(m)
    angles = signbin.ghz_like_angles(m)
    bell = signbin.bell_factor_sign(state, angles)
    analytic = math.sqrt(2.0) * (4.0 / math.pi) ** (m / 2.0)
    rows = [(m, bell, analytic, bell > 2.0)]
    header = ("m", "bell_factor", "analytic", "violates")
    headline = {"m": m, "bell_factor": bell, "analytic": analytic}
    return header, rows, headline


def cmd_sign_optimize(options):
    m, d = options.m, options.d
    constraint = None if options.constraint == "none" else "nonnegative"
    angles = signbin.default_optimizer_angles(m)
    bell, state = signbin.optimize_state(m, d, angles, constraint=constraint)
    headline = {
        "m": m,
        "d": d,
        "constraint": options.constraint,
        "bell_factor": bell,
        "theta": list(angles.theta),
        "theta_prime": list(angles.theta_prime),
    }
    if d > 10:
        previous, _ = signbin.optimize_state(m, d - 10, angles, constraint=constraint)
        delta = bell - previous
        headline["convergence_delta"] = delta
        headline["converged"] = delta < 5e-4
    rows = [(r, c) for r, c in enumerate(state.coefficients)]
    return ("r", "c_r"), rows, headline


def cmd_root_max(options):
    rows = []
    for m in range(2, options.m_max + 1):
        theta = options.theta if options.theta is not None else rootbin.optimal_phase(m)
        spec = rootbin.RootBinningSpec(1.0, 1.0, theta, m)
        bell = rootbin.bell_factor_root(spec, options.labeling)
        bound = 2.0 ** ((m + 1) / 2.0)
        rows.append((m, theta, bell, bound))
    headline = {
        "m_max": options.m_max,
        "bell_at_m_max": rows[-1][2],
        "all_at_quantum_bound": all(abs(r[2] - r[3]) <= 1e-10 for r in rows)
        if options.theta is None
        else None,
    }
    return ("m", "theta", "bell_factor", "quantum_bound"), rows, headline


def cmd_cat_vw(options):
    points = [(alpha, options.tol) for alpha in options.alpha]
    rows = pool_map(_cat_vw_point, points, options.jobs)
    last = rows[-1]
    headline = {"alpha_max": last[0], "V": last[1], "W": last[2]}
    return ("alpha", "V", "W"), rows, headline


def cmd_psi3_curve(options):
    points = [(alpha, options.tol) for alpha in options.alpha]
    rows = pool_map(_psi3_point, points, options.jobs)
    column = {"x-unprimed": 1, "p-unprimed": 2, "best": 3}[options.labeling]
    crossing = next((r[0] for r in rows if r[column] >= 2.0), None)
    headline = {
        "labeling": options.labeling,
        "first_alpha_above_2": crossing,
        "bell_at_alpha_max": rows[-1][column],
        "max_probability_sum_error": max(r[4] for r in rows),
    }
    header = (
        "alpha",
        "bell_x_unprimed",
        "bell_p_unprimed",
        "bell_best",
        "probability_sum_error",
    )
    return header, rows, headline


def cmd_noise_sweep(options):
    rows = []
    p_max_by_m = {}
    for m in options.m:
        clean = signbin.bell_factor_sign(
            signbin.FockCorrelatedState.ghz(m), signbin.ghz_like_angles(m)
        )
        result = erasure.p_max_ghz(m)
        p_max_by_m[str(m)] = {"p_max": result.p_max, "clamped": result.clamped}
        for p in options.p:
            noisy = erasure.noisy_bell_factor(clean, p, m)
            rows.append((m, p, noisy, noisy > 2.0))
    headline = {"p_max_ghz": p_max_by_m}
    return ("m", "p", "bell_factor", "violates"), rows, headline


def cmd_prep_fidelity(options):
    points = []
    for alpha in options.alpha:
        if options.x0 is not None:
            x0_values = options.x0
        else:
            center = -math.sqrt(2.0) * alpha
            x0_values = [center + dx for dx in np.linspace(-2.0, 2.0, 41)]
        points.extend((alpha, x0) for x0 in x0_values)
    rows = pool_map(_prep_point, points, options.jobs)
    best_by_alpha = {}
    for alpha, x0, fid, density in rows:
        key = str(alpha)
        if key not in best_by_alpha or fid > best_by_alpha[key]["fidelity"]:
            best_by_alpha[key] = {"x0": x0, "fidelity": fid, "density": density}
    for key, best in best_by_alpha.items():
        alternate = catprep.generation_pipeline(
            float(key), best["x0"], wiring="swapped"
        )
        best["fidelity_swapped_wiring"] = alternate.fidelity
    headline = {"best_by_alpha": best_by_alpha}
    return ("alpha", "x0", "fidelity", "density"), rows, headline


COMMANDS = {
    "sign-ghz": cmd_sign_ghz,
    "sign-optimize": cmd_sign_optimize,
    "root-max": cmd_root_max,
    "cat-vw": cmd_cat_vw,
    "psi3-curve": cmd_psi3_curve,
    "noise-sweep": cmd_noise_sweep,
    "prep-fidelity": cmd_prep_fidelity,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bellscope",
        description="Bell factors for multimode continuous-variable states "
        "under homodyne detection with binned outcomes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument(
            "--jobs",
            type=int,
            default=int(os.environ.get("BELLSCOPE_JOBS", "1")),
            help="worker processes for sweeps (env BELLSCOPE_JOBS)",
        )
        p.add_argument(
            "--tol", type=float, default=DEFAULT_TOL, help="quadrature tolerance"
        )

    p = sub.add_parser("sign-ghz", help="GHZ state, sign binning, GHZ-like angles")
    p.add_argument("--m", type=int, required=True)
    common(p)

    p = sub.add_parser("sign-optimize", help="optimal state at fixed angles")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--constraint", choices=("none", "nonneg"), default="none")
    common(p)

    p = sub.add_parser("root-max", help="root binning at V = W = 1")
    p.add_argument("--m-max", type=int, required=True)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument(
        "--labeling",
        choices=("x-unprimed", "p-unprimed", "best"),
        default="x-unprimed",
    )
    common(p)

    p = sub.add_parser("cat-vw", help="overlaps V, W of the cat pair")
    p.add_argument("--alpha", required=True)
    common(p)

    p = sub.add_parser("psi3-curve", help="three-mode candidate state Bell curve")
    p.add_argument("--alpha", required=True)
    p.add_argument(
        "--labeling",
        choices=("x-unprimed", "p-unprimed", "best"),
        default="best",
    )
    common(p)

    p = sub.add_parser("noise-sweep", help="erasure-noise scaling for GHZ states")
    p.add_argument("--m", required=True)
    p.add_argument("--p", required=True)
    common(p)

    p = sub.add_parser("prep-fidelity", help="conditional-generation fidelity")
    p.add_argument("--alpha", required=True)
    p.add_argument("--x0", default=None)
    common(p)

    return parser


def _validate(options) -> None:
    if options.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    if not 0 < options.tol <= 1e-2:
        raise ConfigError("--tol must lie in (0, 1e-2]")
    cmd = options.command
    if cmd in ("sign-ghz", "sign-optimize") and options.m < 2:
        raise ConfigError("--m must be >= 2")
    if cmd == "sign-optimize" and options.d < 2:
        raise ConfigError("--d must be >= 2")
    if cmd == "root-max" and options.m_max < 2:
        raise ConfigError("--m-max must be >= 2")
    if cmd in ("cat-vw", "psi3-curve", "prep-fidelity"):
        options.alpha = parse_range(options.alpha, "--alpha")
        if any(a <= 0 for a in options.alpha):
            raise ConfigError("--alpha values must be > 0")
    if cmd == "prep-fidelity" and options.x0 is not None:
        options.x0 = parse_range(options.x0, "--x0")
    if cmd == "noise-sweep":
        options.m = parse_int_range(options.m, "--m")
        if any(m < 2 for m in options.m):
            raise ConfigError("--m values must be >= 2")
        options.p = parse_range(options.p, "--p")
        if any(not 0.0 <= p <= 1.0 for p in options.p):
            raise ConfigError("--p values must lie in [0, 1]")


def main(argv=None) -> int:
    parser = build_parser()
    options = parser.parse_args(argv)
    try:
        _validate(options)
    except ConfigError as exc:
        print(f"bellscope: configuration error: {exc}", file=sys.stderr)
        return 2

    out_dir = Path(options.out)
    started = time.perf_counter()
    try:
        header, rows, headline = COMMANDS[options.command](options)
    except (IntegrationError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"bellscope: numerical failure: {exc}", file=sys.stderr)
        return 3
    wall_time = time.perf_counter() - started

    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{options.command}.csv"
    json_path = out_dir / f"{options.command}.json"
    write_csv(csv_path, header, rows)
    parameters = {
        k: v for k, v in vars(options).items() if k not in ("command", "out")
    }
    write_json(
        json_path,
        {
            "command": options.command,
            "parameters": parameters,
            "tolerances": {"quadrature_tol": options.tol},
            "headline": headline,
            "rows": len(rows),
            "wall_time_s": wall_time,
        },
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
