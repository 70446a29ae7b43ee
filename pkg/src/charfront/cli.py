"""Experiment driver: single runs, paired stability runs, accuracy sweeps,
local parametrix checks, and physical-plane export.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
All artifacts are deterministic for a fixed config and seed; floats are
written with 17 significant digits.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import __version__
from .config import RunConfig, format_float, load_run_config
from .datagen import profile_from_config
from .errors import CharfrontError, ConfigError, NumericalError
from .eulerian import to_eulerian, write_boundary_csv, write_regions_csv
from .functionals import (FunctionalSnapshot, WeightConstants,
                          glimm_functional, l1_distance, phi_decay_audit,
                          viscosity_check, weights_from_config)
from .gas import reference_state
from .tracking import (run, sample_initial_data, write_event_log,
                       write_solution_csv)

FUNCTIONAL_HEADER = "xi,V,Q_A,Q_b,G,Phi,L1\n"


def _functional_row(snap: FunctionalSnapshot) -> str:
    phi = "" if snap.phi is None else format_float(snap.phi)
    l1 = "" if snap.l1 is None else format_float(snap.l1)
    head = ",".join(format_float(x) for x in
                    (snap.xi, snap.v_total, snap.q_approach, snap.q_boundary,
                     snap.g))
    return f"{head},{phi},{l1}\n"


def _prepare(cfg: RunConfig):
    ref = reference_state(cfg.gas, cfg.ref_u, cfg.ref_v, cfg.ref_p, cfg.ref_rho)
    weights = weights_from_config(cfg.weights, cfg.gas, ref, cfg.tolerances,
                                  cfg.seed)
    profile = profile_from_config(cfg)
    sol = sample_initial_data(profile, cfg.delta, cfg.tolerances)
    return ref, weights, profile, sol


def _weights_meta(weights: WeightConstants) -> dict:
    return {
        "k_plus": weights.k_plus, "kappa": weights.kappa,
        "kappa1": weights.kappa1, "kappa2": weights.kappa2,
        "c_a": list(weights.c_a), "lam_hat": weights.lam_hat,
        "calibration": dict(weights.meta),
    }


def _write_metadata(out: Path, cfg: RunConfig, weights: WeightConstants,
                    extra: dict | None = None) -> None:
    meta = {
        "version": __version__,
        "seed": cfg.seed,
        "delta": cfg.delta,
        "xi_end": cfg.xi_end,
        "initial_data": cfg.initial_data,
        "weights": _weights_meta(weights),
    }
    if extra:
        meta.update(extra)
    (out / "metadata.json").write_text(json.dumps(meta, indent=2, sort_keys=True))


def cmd_run(cfg: RunConfig, out: Path) -> dict:
    """Single run: solution snapshots, event log, per-station functionals."""
    out.mkdir(parents=True, exist_ok=True)
    _, weights, _, sol = _prepare(cfg)
    stations = cfg.resolved_stations()
    result = run(sol, cfg.xi_end, weights=weights, stations=stations)
    write_solution_csv(out / "solution.csv", result.snapshots)
    write_event_log(out / "events.jsonl", result.events)
    with open(out / "functionals.csv", "w") as fh:
        fh.write(FUNCTIONAL_HEADER)
        for xi, snap_sol in result.snapshots:
            fh.write(_functional_row(glimm_functional(snap_sol, weights, xi)))
    _write_metadata(out, cfg, weights, {
        "events": len(result.events),
        "final_fronts": len(result.final.fronts),
        "pruned_strength": result.final.ledger.pruned,
    })
    return {"events": len(result.events), "fronts": len(result.final.fronts)}


def cmd_stability(cfg_u: RunConfig, cfg_v: RunConfig, out: Path) -> dict:
    """Paired runs: distance functional and L1 tables plus the decay audit."""
    if cfg_u.gas != cfg_v.gas:
        raise ConfigError("stability: both configs must share gas constants")
    out.mkdir(parents=True, exist_ok=True)
    ref = reference_state(cfg_u.gas, cfg_u.ref_u, cfg_u.ref_v, cfg_u.ref_p,
                          cfg_u.ref_rho)
    weights = weights_from_config(cfg_u.weights, cfg_u.gas, ref,
                                  cfg_u.tolerances, cfg_u.seed)
    sol_u = sample_initial_data(profile_from_config(cfg_u), cfg_u.delta,
                                cfg_u.tolerances)
    sol_v = sample_initial_data(profile_from_config(cfg_v), cfg_v.delta,
                                cfg_v.tolerances)
    grid = sorted(set(cfg_u.resolved_stations()) | {cfg_u.xi_end})
    report = phi_decay_audit(sol_u, sol_v, grid, weights)

    with open(out / "stability.csv", "w") as fh:
        fh.write(FUNCTIONAL_HEADER)
        for row in report.rows:
            fh.write(_functional_row(row))
    l1_0 = report.rows[0].l1
    ratios = [r.l1 / l1_0 for r in report.rows if l1_0 > 0]
    c_obs = max(ratios) if ratios else 0.0
    verdict = {
        "c_obs": c_obs,
        "c1_observed": report.c1_observed,
        "c2_observed": report.c2_observed,
        "decay_threshold": report.threshold,
        "decay_passed": report.passed,
    }
    (out / "verdict.json").write_text(json.dumps(verdict, indent=2, sort_keys=True))
    _write_metadata(out, cfg_u, weights, {"pair": True})
    return verdict


def _sweep_one(args):
    cfg_json, delta = args
    cfg = replace(_config_from_json(cfg_json), delta=delta)
    _, weights, _, sol = _prepare(cfg)
    return delta, run(sol, cfg.xi_end, weights=weights)


def _config_from_json(payload: str) -> RunConfig:
    from .config import run_config_from_dict
    return run_config_from_dict(json.loads(payload))


def _config_payload(cfg: RunConfig) -> str:
    doc = {
        "schema_version": 1,
        "gas": {"gamma": cfg.gas.gamma, "c_nu": cfg.gas.c_nu,
                "p_bar": cfg.gas.p_bar},
        "reference": {"u": cfg.ref_u, "v": cfg.ref_v, "p": cfg.ref_p,
                      "rho": cfg.ref_rho},
        "initial_data": cfg.initial_data,
        "delta": cfg.delta,
        "xi_end": cfg.xi_end,
        "stations": list(cfg.stations),
        "weights": cfg.weights if isinstance(cfg.weights, str) else dict(cfg.weights),
        "seed": cfg.seed,
        "eta_window": cfg.eta_window,
        "rho_static": cfg.rho_static,
        "workers": cfg.workers,
    }
    return json.dumps(doc)


def cmd_delta_sweep(cfg: RunConfig, deltas, out: Path) -> dict:
    """Refinement sweep: pairwise L1 distances between consecutive accuracies
    at xi_end, plus the fitted convergence rate."""
    deltas = sorted(set(float(d) for d in deltas), reverse=True)
    if len(deltas) < 2:
        raise ConfigError("sweep: need at least two delta values")
    out.mkdir(parents=True, exist_ok=True)
    payload = _config_payload(cfg)
    jobs = [(payload, d) for d in deltas]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = dict(pool.map(_sweep_one, jobs))
    else:
        results = dict(_sweep_one(job) for job in jobs)
    finals = {d: results[d].final for d in deltas}
    rows = []
    for hi, lo in zip(deltas, deltas[1:]):
        rows.append((hi, lo, l1_distance(finals[hi], finals[lo])))
    with open(out / "delta_sweep.csv", "w") as fh:
        fh.write("delta_coarse,delta_fine,l1\n")
        for row in rows:
            fh.write(",".join(format_float(x) for x in row) + "\n")
    rate = None
    pairs = [(math.log(hi), math.log(d)) for hi, _lo, d in rows if d > 0]
    if len(pairs) >= 2:
        xs = [p[0] for p in pairs]
        ys = [p[1] for p in pairs]
        n = len(xs)
        xbar = sum(xs) / n
        ybar = sum(ys) / n
        denom = sum((x - xbar) ** 2 for x in xs)
        rate = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys)) / denom \
            if denom > 0 else None
    monotone = all(a[2] > b[2] for a, b in zip(rows, rows[1:]))
    verdict = {"rate_exponent": rate, "monotone": monotone,
               "distances": [r[2] for r in rows]}
    (out / "verdict.json").write_text(json.dumps(verdict, indent=2, sort_keys=True))
    return verdict


def cmd_viscosity_check(cfg: RunConfig, tau: float, zeta: float,
                        beta_radius: float, delta_step: float,
                        out: Path) -> dict:
    out.mkdir(parents=True, exist_ok=True)
    _, weights, _, sol = _prepare(cfg)
    i_sharp, i_flat = viscosity_check(sol, tau, zeta, beta_radius, delta_step,
                                      weights, cfg.tolerances)
    verdict = {"I_sharp": i_sharp, "I_flat": i_flat, "tau": tau, "zeta": zeta,
               "beta_radius": beta_radius, "delta_step": delta_step,
               "lam_hat": weights.lam_hat}
    (out / "viscosity.json").write_text(json.dumps(verdict, indent=2, sort_keys=True))
    return verdict


def cmd_to_eulerian(cfg: RunConfig, out: Path) -> dict:
    out.mkdir(parents=True, exist_ok=True)
    _, weights, _, sol = _prepare(cfg)
    field = to_eulerian(sol, cfg.xi_end, eta_cap=cfg.eta_window,
                        rho_static=cfg.rho_static)
    write_boundary_csv(out / "boundary.csv", field)
    write_regions_csv(out / "regions.csv", field)
    _write_metadata(out, cfg, weights, {"slabs": len(field.slabs)})
    return {"slabs": len(field.slabs)}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="charfront",
        description="Front-tracking experiments for supersonic flow over a "
                    "static gas in stream coordinates")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="JSON run config")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--xi-end", type=float, default=None)
        p.add_argument("--delta", type=float, default=None)

    p_run = sub.add_parser("run", help="single front-tracking run")
    common(p_run)

    p_st = sub.add_parser("stability", help="paired run with decay audit")
    common(p_st)
    p_st.add_argument("--config-v", required=True,
                      help="JSON config of the second run")

    p_sw = sub.add_parser("sweep", help="accuracy refinement sweep")
    common(p_sw)
    p_sw.add_argument("--deltas", required=True,
                      help="comma-separated accuracy values")

    p_vc = sub.add_parser("viscosity-check", help="local parametrix comparison")
    common(p_vc)
    p_vc.add_argument("--tau", type=float, required=True)
    p_vc.add_argument("--zeta", type=float, required=True)
    p_vc.add_argument("--beta-radius", type=float, required=True)
    p_vc.add_argument("--delta-step", type=float, required=True)

    p_eu = sub.add_parser("to-eulerian", help="physical-plane export")
    common(p_eu)
    return parser


def _load(args) -> RunConfig:
    cfg = load_run_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.xi_end is not None:
        cfg = replace(cfg, xi_end=args.xi_end)
    if args.delta is not None:
        cfg = replace(cfg, delta=args.delta)
    return cfg


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load(args)
        out = Path(args.out)
        if args.command == "run":
            cmd_run(cfg, out)
        elif args.command == "stability":
            cfg_v = load_run_config(args.config_v)
            cmd_stability(cfg, cfg_v, out)
        elif args.command == "sweep":
            deltas = [float(x) for x in args.deltas.split(",") if x.strip()]
            cmd_delta_sweep(cfg, deltas, out)
        elif args.command == "viscosity-check":
            cmd_viscosity_check(cfg, args.tau, args.zeta, args.beta_radius,
                                args.delta_step, out)
        elif args.command == "to-eulerian":
            cmd_to_eulerian(cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, CharfrontError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
