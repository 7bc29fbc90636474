"""Command-line entry point.

    conespec run CONFIG [--cmd CMD] [--out-dir DIR] [--threads N]
    conespec verify [--only NAME ...] [--out-dir DIR]

Exit status: 0 on success, 1 on input errors, 2 when verification fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from . import __version__
from .channel_model import compute_w_decision
from .config import (
    COMMANDS,
    ConfigError,
    RunConfig,
    count_from,
    cross_section_from,
    eps_list_from,
    geometry_from,
    load_config,
    pseudomode_gamma_from,
    resolve_command,
)
from .convergence_lab import DEFAULT_EPS, fit_rate, fits_to_json, match_and_fit, sweep, write_gnuplot_files
from .cross_section import CatalogError, build_a_spectrum
from .spectra import ChannelSolveError, eps_spectrum, limit_spectrum, pseudomode_quotient
from .topology import (
    ker_dmax_dmin,
    l2_cohomology,
    load_decompositions,
    mv_check,
    predict_small_eigenvalues,
)
from .verification import ALIASES, CHECKS, run_checks

EXIT_OK, EXIT_INPUT, EXIT_VERIFY = 0, 1, 2


def _write(out_dir: Path, name: str, text: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    path.write_text(text)
    return path


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _finite(x: float):
    return x if math.isfinite(x) else repr(x)


def _origin_label(o) -> str:
    if hasattr(o, "sign"):
        return f"harmonic p={o.p} sign={o.sign:+d}"
    return f"coexact p={o.p} mu_sq={o.mu_sq!r} branch={o.branch}"


def cmd_a_spectrum(cfg: RunConfig, out: Path, threads: int) -> int:
    cs = cross_section_from(cfg)
    entries = build_a_spectrum(cs)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("gamma", "mult", "origin"))
    for e in entries:
        w.writerow((repr(e.gamma), e.mult, "; ".join(_origin_label(o) for o in e.origin)))
    _write(out, "a_spectrum.csv", buf.getvalue())
    _write(out, "a_spectrum.json", _json({
        "cross_section": cs.to_dict(),
        "entries": [{"gamma": e.gamma, "mult": e.mult,
                     "origin": [_origin_label(o) for o in e.origin]} for e in entries]}))
    print(f"A-spectrum of {cs.label or 'cross-section'} (|gamma| <= {cs.cutoff:g}):")
    for e in entries:
        print(f"  gamma = {e.gamma:+.6g}  mult {e.mult}")
    return EXIT_OK


def cmd_eps_spectrum(cfg: RunConfig, out: Path, threads: int) -> int:
    geom = geometry_from(cfg)
    count = count_from(cfg)
    reports = [eps_spectrum(geom, e, count, threads) for e in eps_list_from(cfg, (1e-2,))]
    header = "eps,lambda,gamma,mult,solver\n"
    body = "".join(r.to_csv()[len(header):] for r in reports)
    _write(out, "eps_spectrum.csv", header + body)
    _write(out, "eps_spectrum.json", _json([r.to_dict() for r in reports]))
    for r in reports:
        print(f"eps = {r.eps:g}: " + ", ".join(f"{e.lam:.10g} (gamma {e.gamma:g} x{e.mult})"
                                            for e in r.entries))
    return EXIT_OK


def cmd_limit_spectrum(cfg: RunConfig, out: Path, threads: int) -> int:
    geom = geometry_from(cfg)
    w = compute_w_decision(geom)
    rep = limit_spectrum(geom, w, count_from(cfg), threads)
    _write(out, "limit_spectrum.csv", rep.to_csv())
    _write(out, "limit_spectrum.json", rep.to_json() + "\n")
    _write(out, "w_decision.json", _json({
        "w_members": list(w.w_members), "dim_ker_D2": w.dim_ker_D2, "i_half": w.i_half,
        "dim_ker_limit": w.dim_ker_limit, "zero_mult": w.zero_mult,
        "t_scalar": [[g, _finite(t)] for g, t in w.t_scalar.items()]}))
    print(f"zero multiplicity {w.zero_mult} (limit kernel {w.dim_ker_limit}, "
          f"D2 kernel {w.dim_ker_D2}, half-bound states {w.i_half})")
    for e in rep.entries:
        print(f"  {e.lam:.12g}  gamma {e.gamma:g}  x{e.mult}")
    return EXIT_OK


def cmd_sweep(cfg: RunConfig, out: Path, threads: int) -> int:
    geom = geometry_from(cfg)
    table = sweep(geom, eps_list_from(cfg, DEFAULT_EPS), count_from(cfg), threads)
    _write(out, "sweep.csv", table.to_csv())
    fits = match_and_fit(table) if len(table.eps_list) >= 4 else []
    _write(out, "fits.json", fits_to_json(fits) + "\n")
    write_gnuplot_files(table, out)
    print(f"sweep over {len(table.eps_list)} eps values, {table.count} eigenvalues")
    for f in fits:
        print(f"  N={f.n}: limit {f.limit_lambda:.10g}, {f.status}"
              + (f", {f.family} alpha={f.exponent:.3f} beta={f.log_exponent:.3f} R2={f.r_squared:.4f}"
                 if f.family else ""))
    return EXIT_OK


def cmd_pseudomode(cfg: RunConfig, out: Path, threads: int) -> int:
    geom = geometry_from(cfg)
    gamma = pseudomode_gamma_from(cfg)
    eps = eps_list_from(cfg, tuple(10.0 ** -k for k in range(2, 9)))
    rows = [pseudomode_quotient(geom, e, gamma) for e in eps]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("eps", "rayleigh", "l2_norm"))
    for r in rows:
        w.writerow((repr(r.eps), repr(r.rayleigh), repr(r.l2_norm)))
    _write(out, "pseudomode.csv", buf.getvalue())
    if len(rows) >= 4:
        fit = fit_rate(1, 0.0, eps, [r.rayleigh for r in rows])
        _write(out, "pseudomode_fit.json", _json(fit.to_dict()))
        print(f"rayleigh quotient vs eps: {fit.family} beta={fit.log_exponent:.3f} "
              f"R2={fit.r_squared:.4f}")
    for r in rows:
        print(f"  eps={r.eps:g}  rayleigh={r.rayleigh:.6g}  norm={r.l2_norm:.6g}")
    return EXIT_OK


def cmd_topology(cfg: RunConfig, out: Path, threads: int) -> int:
    catalog = {c.name: c for c in load_decompositions()}
    wanted = cfg.get("topology", "decompositions", "all")
    if wanted == "all":
        names = list(catalog)
    elif isinstance(wanted, list) and all(isinstance(x, str) for x in wanted):
        names = wanted
    else:
        raise cfg.error("topology", "decompositions", "expected \"all\" or a list of names")
    missing = [n for n in names if n not in catalog]
    if missing:
        raise cfg.error("topology", "decompositions", f"unknown decomposition(s) {missing}")
    report = {"decompositions": [], "predictions": []}
    for name in names:
        c = catalog[name]
        mv = mv_check(c)
        l2 = []
        for k in range(c.m + 1):
            try:
                l2.append(l2_cohomology(c, k))
            except ValueError:
                l2.append(None)
        report["decompositions"].append({
            "name": name, "mv": mv.to_dict(), "l2_cohomology": l2,
            "ker_dmax_dmin": [ker_dmax_dmin(c, p) for p in range(c.m + 1)]})
        print(f"{name}: consistent={mv.consistent} l2={l2}")
    pairs = cfg.get("topology", "predict", [])
    if not isinstance(pairs, list) or any(not isinstance(p, list) or len(p) != 2 for p in pairs):
        raise cfg.error("topology", "predict", "expected a list of [n1, n2]")
    for n1, n2 in pairs:
        try:
            p = predict_small_eigenvalues(n1, n2)
        except ValueError as exc:
            raise cfg.error("topology", "predict", str(exc)) from None
        report["predictions"].append({
            "n1": n1, "n2": n2, "gamma": p.gamma, "in_open_band": p.in_open_band,
            "boundary_case": p.boundary_case, "domain": p.domain,
            "targets": [{"target": x.target, "degrees": list(x.degrees), "kind": list(x.kind),
                         "forcing_holds": x.forcing_holds} for x in p.predictions]})
        print(f"(n1={n1}, n2={n2}) gamma={p.gamma:g} domain={p.domain}: "
              + "; ".join(f"{x.target} degrees {x.degrees}" for x in p.predictions))
    _write(out, "topology.json", _json(report))
    return EXIT_OK


def cmd_verify(out: Path | None, only: list[str] | None) -> int:
    results = run_checks(only)
    for r in results:
        tag = f"criterion {r.criterion}" if r.criterion else "extra"
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name} ({tag}, {r.seconds:.1f} s): {r.summary}")
    if out is not None:
        _write(out, "verify.json", _json({"passed": all(r.passed for r in results),
                                          "checks": [r.to_dict() for r in results]}))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


HANDLERS = {
    "a-spectrum": cmd_a_spectrum,
    "eps-spectrum": cmd_eps_spectrum,
    "limit-spectrum": cmd_limit_spectrum,
    "sweep": cmd_sweep,
    "pseudomode": cmd_pseudomode,
    "topology": cmd_topology,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="conespec", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=f"conespec {__version__}")
    sub = ap.add_subparsers(dest="action", required=True)
    run = sub.add_parser("run", help="execute the pipeline described by a config file")
    run.add_argument("config")
    run.add_argument("--cmd", choices=COMMANDS, help="override [run] cmd")
    run.add_argument("--out-dir", help="output directory (default: [outputs] dir or ./conespec_out)")
    run.add_argument("--threads", type=int, default=1, help="worker threads for channel solves")
    run.add_argument("--only", nargs="+", help="verify: restrict to these checks")
    ver = sub.add_parser("verify", help="run the built-in verification suite")
    ver.add_argument("--only", nargs="+", choices=list(CHECKS) + list(ALIASES), help="checks to run")
    ver.add_argument("--out-dir", help="also write verify.json here")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.action == "verify":
            return cmd_verify(Path(args.out_dir) if args.out_dir else None, args.only)
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        cfg = load_config(args.config)
        cmd = resolve_command(cfg, args.cmd)
        out = Path(args.out_dir or cfg.get("outputs", "dir") or "conespec_out")
        if not args.out_dir and cfg.get("outputs", "dir"):
            out = cfg.resolve(str(cfg.get("outputs", "dir")))
        if cmd == "verify":
            return cmd_verify(out, args.only)
        return HANDLERS[cmd](cfg, out, args.threads)
    except (ConfigError, CatalogError, KeyError) as exc:
        print(f"conespec: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ChannelSolveError as exc:
        print(f"conespec: solver error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"conespec: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
