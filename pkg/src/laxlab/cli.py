"""Experiment driver: config-file sweeps with CSV reports.

Config files are flat key=value text with one section per experiment,
parsed strictly: unknown section kinds or keys abort the run with a
diagnostic naming the offender.  Section names start with the experiment
kind, optionally followed by a label, e.g. ``[stability cfl-sweep]``.

Verdicts (stable/converged) live in the reports, never in the exit code;
a nonzero exit means the config was unusable.  CSV bodies are fully
deterministic for a fixed config and seed; timestamps appear only in
file names.
"""
from __future__ import annotations

import argparse
import configparser
import math
import os
import sys
import time
from pathlib import Path

from . import analysis, roundoff, ubp
from .errors import ConfigError, LaxlabError
from .grid import RefinementPath, TWO_PI, parse_probe, sample
from .semigroup import HeatSemigroup

__all__ = ["run", "main"]

_KINDS = {"stability", "consistency", "convergence", "roundoff", "ubp_demo"}

_ALLOWED_KEYS = {
    "stability": {"scheme", "grid_n", "r", "t", "threshold"},
    "consistency": {"scheme", "probe", "r", "dts", "ts"},
    "convergence": {"scheme", "probe", "t", "dts", "path", "tol_rel"},
    "roundoff": {"scheme", "probe", "t", "dts", "path", "bits", "seed"},
    "ubp_demo": {"k_range", "probes", "k_max"},
}

_REQUIRED_KEYS = {
    "stability": {"scheme", "grid_n", "r", "t"},
    "consistency": {"scheme", "probe", "r", "dts", "ts"},
    "convergence": {"scheme", "probe", "t", "dts", "path"},
    "roundoff": {"scheme", "probe", "t", "dts", "path", "bits"},
    "ubp_demo": {"k_range"},
}

_ANALYSIS_HEADER = "dt,dx,r,n_steps,bound_L,max_abs_g,error_final,converged\n"


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _floats(text: str):
    return [float(tok) for tok in text.replace(",", " ").split()]


def _parse_path(text: str) -> RefinementPath:
    toks = text.split()
    if toks[0] == "cfl":
        return RefinementPath.cfl_boundary()
    if toks[0] == "fixed_r" and len(toks) == 2:
        return RefinementPath.fixed_ratio(float(toks[1]))
    if toks[0] == "power" and len(toks) == 3:
        return RefinementPath.from_power(float(toks[1]), float(toks[2]))
    if toks[0] == "table" and len(toks) > 1:
        pairs = []
        for tok in toks[1:]:
            dt, _, dx = tok.partition("=")
            pairs.append((float(dt), float(dx)))
        return RefinementPath.from_table(pairs)
    raise ConfigError(f"unparseable refinement path: {text!r}")


def _parse_sequence_probe(text: str) -> ubp.FiniteSequence:
    name, _, arg = text.strip().partition("(")
    arg = arg.rstrip(")")
    if name == "ones":
        return ubp.FiniteSequence({i: 1.0 for i in range(int(arg))})
    if name == "unit":
        return ubp.FiniteSequence.unit(int(arg))
    if name == "harmonic":
        return ubp.cauchy_witness(int(arg))
    raise ConfigError(f"unknown sequence probe: {text!r}")


def _validate(kind: str, section: str, items: dict) -> None:
    allowed = _ALLOWED_KEYS[kind]
    for key in items:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in section [{section}]")
    for key in _REQUIRED_KEYS[kind]:
        if key not in items:
            raise ConfigError(f"missing required key {key!r} in section [{section}]")


def _run_stability(items: dict, csv_lines: list, summary: list) -> str:
    scheme = items["scheme"]
    grid_n = int(items["grid_n"])
    horizon = float(items["t"])
    threshold = float(items.get("threshold", analysis.DEFAULT_STABILITY_THRESHOLD))
    builder = analysis.scheme_builder(scheme)
    dx = TWO_PI / grid_n
    csv_lines.append(_ANALYSIS_HEADER)
    for r in _floats(items["r"]):
        dt = r * dx**2
        s = builder(dt, dx, grid_n)
        report = analysis.stability_check(s, horizon, threshold)
        symbol = analysis.von_neumann_check(s, grid_n)
        n_max = int(math.floor(horizon / dt + 1e-9))
        csv_lines.append(
            ",".join(
                _fmt(v)
                for v in (dt, dx, r, n_max, report.bound_l, symbol.max_abs_g, None, None)
            )
            + "\n"
        )
        summary.append(
            f"stability {scheme} r={r:g}: bound_L={report.bound_l:.6g} "
            f"stable={report.stable} max|g|={symbol.max_abs_g:.6g}"
        )
    return scheme


def _run_consistency(items: dict, csv_lines: list, summary: list) -> str:
    scheme = items["scheme"]
    r = float(items["r"])
    probe = parse_probe(items["probe"])
    ts = _floats(items["ts"])
    builder = analysis.scheme_builder(scheme)
    path = RefinementPath.fixed_ratio(r)
    csv_lines.append(_ANALYSIS_HEADER)
    for dt in sorted(_floats(items["dts"]), reverse=True):
        grid_n, dx = path.grid_for(dt)
        s = builder(dt, dx, grid_n)
        sg = HeatSemigroup(horizon_t=max(ts + [dt]) + dt, grid_n=grid_n)
        u = sample(probe, grid_n)
        residuals = analysis.consistency_check(s, sg, u, ts)
        worst = max(res for _, res in residuals)
        symbol = analysis.von_neumann_check(s, grid_n)
        csv_lines.append(
            ",".join(
                _fmt(v)
                for v in (dt, dx, s.courant_ratio, 1, None, symbol.max_abs_g, worst, None)
            )
            + "\n"
        )
        summary.append(f"consistency {scheme} dt={dt:g}: max residual {worst:.6g}")
    return scheme


def _run_convergence(items: dict, csv_lines: list, summary: list) -> str:
    scheme = items["scheme"]
    probe = parse_probe(items["probe"])
    path = _parse_path(items["path"])
    tol_rel = float(items.get("tol_rel", 1e-3))
    report = analysis.convergence_experiment(
        analysis.scheme_builder(scheme),
        path,
        probe,
        float(items["t"]),
        _floats(items["dts"]),
        tol_rel=tol_rel,
    )
    csv_lines.append(_ANALYSIS_HEADER)
    for cell in report.cells:
        csv_lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    cell.dt,
                    cell.dx,
                    cell.dt / cell.dx**2,
                    cell.n_steps,
                    None,
                    cell.max_abs_g,
                    cell.error,
                    report.converged,
                )
            )
            + "\n"
        )
    order = "n/a" if report.observed_order is None else f"{report.observed_order:.3g}"
    summary.append(
        f"convergence {scheme}: converged={report.converged} observed_order={order} "
        f"diameter={report.compactness_diameter:.6g}"
    )
    return scheme


def _run_roundoff(items: dict, csv_lines: list, summary: list) -> str:
    scheme = items["scheme"]
    probe = parse_probe(items["probe"])
    path = _parse_path(items["path"])
    spec = roundoff.PrecisionSpec(significand_bits=int(items["bits"]))
    report = roundoff.halving_sweep(
        analysis.scheme_builder(scheme),
        path,
        probe,
        float(items["t"]),
        spec,
        _floats(items["dts"]),
    )
    csv_lines.append("n,t,gap,bits,dt,dx,scheme\n")
    for growth in report.growth_reports:
        for n, t, gap in growth.samples:
            csv_lines.append(
                ",".join(
                    _fmt(v)
                    for v in (n, t, gap, growth.bits, growth.dt, growth.dx, scheme)
                )
                + "\n"
            )
    s_txt = "fit skipped" if report.fit_skipped else f"s={report.exponent_s:.3g}"
    summary.append(f"roundoff {scheme} bits={spec.significand_bits}: {s_txt}")
    return scheme


def _run_ubp_demo(items: dict, csv_lines: list, summary: list) -> str:
    lo, _, hi = items["k_range"].partition(":")
    k_range = range(int(lo), int(hi) + 1) if hi else [int(lo)]
    probes = [
        _parse_sequence_probe(tok)
        for tok in items.get("probes", "").split(";")
        if tok.strip()
    ]
    rows = ubp.ubp_violation_demo(k_range, probes)
    csv_lines.append("k,op_norm,probe_id,probe_bound\n")
    for row in rows:
        if row.probe_bounds:
            for pid, bound in row.probe_bounds:
                csv_lines.append(
                    ",".join(_fmt(v) for v in (row.k, row.op_norm, pid, bound)) + "\n"
                )
        else:
            csv_lines.append(",".join(_fmt(v) for v in (row.k, row.op_norm, None, None)) + "\n")
    summary.append(
        f"ubp_demo: k up to {max(k_range)}, op norm unbounded, "
        f"{len(probes)} probe(s) with fixed pointwise bounds"
    )
    return "tk"


_RUNNERS = {
    "stability": _run_stability,
    "consistency": _run_consistency,
    "convergence": _run_convergence,
    "roundoff": _run_roundoff,
    "ubp_demo": _run_ubp_demo,
}


def run(config_path, out_dir, jobs: int = 1, seed=None) -> int:
    """Execute every experiment section of a config file.

    Returns 0 on completion; raises :class:`ConfigError` on malformed
    input (the :func:`main` wrapper converts that to a nonzero exit).
    Sweep cells are cheap at desk scale, so execution is sequential
    regardless of ``jobs``; results are merged in section order either way.
    """
    config_path = Path(config_path)
    if not config_path.is_file():
        raise ConfigError(f"config file not found: {config_path}")
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    try:
        parser.read_string(config_path.read_text(), source=str(config_path))
    except configparser.Error as exc:
        raise ConfigError(f"unreadable config: {exc}") from exc

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stamp = time.strftime("%Y%m%d-%H%M%S")
    summary: list = []

    for index, section in enumerate(parser.sections()):
        kind = section.split()[0]
        if kind not in _KINDS:
            raise ConfigError(f"unknown experiment kind in section [{section}]")
        items = dict(parser.items(section))
        if seed is not None and "seed" in _ALLOWED_KEYS[kind]:
            items["seed"] = str(seed)
        _validate(kind, section, items)
        csv_lines: list = []
        scheme = _RUNNERS[kind](items, csv_lines, summary)
        name = f"{kind}_{scheme}_{stamp}_{index:02d}.csv"
        (out / name).write_text("".join(csv_lines))

    (out / "summary.txt").write_text("".join(line + "\n" for line in summary))
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="laxlab", description="Run finite-difference stability/convergence experiments."
    )
    ap.add_argument("--config", required=True, help="experiment config file")
    ap.add_argument("--out", default="out", help="output directory for CSV reports")
    ap.add_argument("--jobs", type=int, default=1, help="worker pool size hint")
    ap.add_argument("--seed", type=int, default=None, help="override config seeds")
    args = ap.parse_args(argv)
    out_dir = os.environ.get("LAXLAB_OUT", args.out)
    try:
        return run(args.config, out_dir, jobs=args.jobs, seed=args.seed)
    except ConfigError as exc:
        print(f"laxlab: config error: {exc}", file=sys.stderr)
        return 2
    except LaxlabError as exc:
        print(f"laxlab: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
