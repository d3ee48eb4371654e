"""Command-line entry point.

    detnodes SUBCOMMAND [--config PATH] [--out DIR] [--seed N]

Subcommands: simulate, steady, verify-lemmas, estimate-constants,
thresholds, theorem1, theorem2, theorem3, sweep.  Every run writes a flat
key=value summary embedding the full effective configuration plus result
scalars; CSV schemas are fixed per artifact (trace, diagnostics, nodes,
sweep, constants).  Exit codes: 0 all checks passed, 2 configuration error,
3 numerical failure, 4 check failure.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys

import numpy as np

from .config import ConfigError, RunConfig, format_value, parse_config
from .elliptic import JacobianSolveError, NontrivialNotFound, newton_solve
from .energy import delta1, delta2, delta3
from .experiments import (
    manufactured_forcing,
    modes_field,
    run_theorem1,
    run_theorem2,
    run_theorem3,
    sweep_density,
)
from .grid import Domain, ScalarField, continuous_eigenvalue, eigen_laplacian, make_grid
from .heat import BlowUpError, ForcingSpec, SolverConfig, solve
from .lemmas import (
    check_lemma,
    constants_csv,
    estimate_cb,
    estimate_constants,
    random_band_limited,
)
from .nodes import farthest_point_fill, nodes_for_density
from .norms import CoefficientField, ConstantLedger, equivalence_constants

SUBCOMMANDS = (
    "simulate",
    "steady",
    "verify-lemmas",
    "estimate-constants",
    "thresholds",
    "theorem1",
    "theorem2",
    "theorem3",
    "sweep",
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_CHECK = 4


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="detnodes",
        description="determining-node experiments for the semilinear heat flow",
    )
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", metavar="PATH", default=None)
    parser.add_argument("--out", metavar="DIR", default=None)
    parser.add_argument("--seed", metavar="N", type=int, default=None)
    args = parser.parse_args(argv)

    try:
        text = ""
        if args.config is not None:
            with open(args.config, "r", encoding="utf-8") as fh:
                text = fh.read()
        cfg = parse_config(text)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.seed is not None:
        cfg.values["seed"] = int(args.seed)
        cfg.provided.add("seed")

    outdir = args.out
    if outdir is None:
        stamp = datetime.datetime.now().strftime("%Y%m%d-%H%M%S")
        outdir = os.path.join("runs", f"{args.subcommand}-{stamp}")

    try:
        return dispatch(args.subcommand, cfg, outdir)
    except (BlowUpError, JacobianSolveError, NontrivialNotFound) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def dispatch(subcommand: str, cfg: RunConfig, outdir: str) -> int:
    if subcommand not in SUBCOMMANDS:
        print(f"unknown subcommand {subcommand!r}", file=sys.stderr)
        return EXIT_CONFIG
    os.makedirs(outdir, exist_ok=True)
    handler = {
        "simulate": _cmd_simulate,
        "steady": _cmd_steady,
        "verify-lemmas": _cmd_verify_lemmas,
        "estimate-constants": _cmd_estimate_constants,
        "thresholds": _cmd_thresholds,
        "theorem1": _cmd_theorem1,
        "theorem2": _cmd_theorem2,
        "theorem3": _cmd_theorem3,
        "sweep": _cmd_sweep,
    }[subcommand]
    return handler(cfg, outdir)


# ---------------------------------------------------------------- builders

def _grid(cfg: RunConfig):
    return make_grid(Domain(cfg["lx"], cfg["ly"]), cfg["nx"], cfg["ny"])


def _solver_config(cfg: RunConfig) -> SolverConfig:
    return SolverConfig(
        k=cfg["k"], p=cfg["p"], dt=cfg["dt"], horizon=cfg["horizon"],
        nonlinearity_on=cfg["nonlinearity"], t0=cfg["t0"],
    )


def _mode_field(grid, mode, amp) -> ScalarField:
    _, s = eigen_laplacian(grid, mode[0], mode[1])
    return ScalarField(grid, amp * s.values)


def _forcing(cfg: RunConfig, grid, kind: str) -> ForcingSpec:
    if kind == "zero":
        return ForcingSpec.zero()
    if kind == "manufactured":
        fbar, _ = manufactured_forcing(grid, cfg["k"], cfg["p"])
        return ForcingSpec.constant(fbar)
    F = _mode_field(grid, cfg["forcing_mode"], cfg["forcing_amp"])
    if kind == "constant":
        return ForcingSpec.constant(F)
    G = _mode_field(grid, cfg["forcing_g_mode"], cfg["forcing_g_amp"])
    if kind == "converging":
        return ForcingSpec.converging(F, G, cfg["forcing_rate"])
    return ForcingSpec.pair_difference(G, cfg["forcing_rate"])


def _nodes(cfg: RunConfig, grid):
    if cfg["nodes_count"] > 0:
        return farthest_point_fill(grid.domain, grid, cfg["nodes_count"])
    return nodes_for_density(grid.domain, grid, cfg["nodes_density"])


def _ledger(cfg: RunConfig, grid) -> ConstantLedger:
    """Ledger from config: assumed ones, or estimated from a field family."""
    ledger = ConstantLedger()
    lam1 = continuous_eigenvalue(grid, 1, 1)
    if cfg["constants"] == "assumed":
        for name in ("c1", "c2", "c3", "c4", "c5", "c_b", "a1", "a2", "a3", "a4"):
            ledger.set(name, 1.0, "assumed")
    else:
        family = random_band_limited(grid, cfg["family_j"], cfg["family_count"], cfg["family_seed"])
        nodesets = [nodes_for_density(grid.domain, grid, d) for d in cfg["est_densities"]]
        estimates = estimate_constants(family, nodesets)
        for name, val in estimates.items():
            ledger.set(name, max(val, 1e-12), "estimated")
        ledger.set("c_b", estimate_cb(family, cfg["p"]), "estimated")
        a3_hat, a4_hat = equivalence_constants(CoefficientField.identity(), family.fields)
        ledger.set("a3", a3_hat, "estimated")
        ledger.set("a4", a4_hat, "estimated")
        ledger.set("a1", 1.0, "assumed")
        ledger.set("a2", 1.0, "assumed")
    ledger.set("lambda1", lam1, "derived")
    for name in ("c_b", "c1", "c2", "c3", "c4", "c5", "a1", "a4"):
        if name in cfg.provided and cfg[name] > 0:
            ledger.set(name, cfg[name], "assumed")
    return ledger


def _write_summary(outdir: str, items) -> str:
    path = os.path.join(outdir, "summary.txt")
    with open(path, "w", encoding="utf-8") as fh:
        for key, val in items:
            fh.write(f"{key} = {format_value(val)}\n")
    return path


def _summary_from_report(cfg: RunConfig, report) -> list:
    # the run config already mirrors every effective key; the report adds
    # only its scenario tag and result scalars
    items = [(k, v) for k, v in sorted(cfg.echo().items())]
    items += list(report.summary_items(include_config=False))
    return items


# ------------------------------------------------------------- subcommands

def _cmd_simulate(cfg: RunConfig, outdir: str) -> int:
    grid = _grid(cfg)
    sc = _solver_config(cfg)
    u0 = modes_field(grid, cfg["u0_modes"])
    forcing = _forcing(cfg, grid, cfg["forcing"])
    traj = solve(u0, forcing, sc, sample_every=cfg["sample_every"])
    with open(os.path.join(outdir, "diagnostics.csv"), "w", encoding="utf-8") as fh:
        fh.write(traj.diagnostics_csv())
    if cfg["snapshots"]:
        with open(os.path.join(outdir, "snapshots.csv"), "w", encoding="utf-8") as fh:
            fh.write(traj.snapshots_csv())
    items = [(k, v) for k, v in sorted(cfg.echo().items())]
    items += [
        ("result_final_l2", float(traj.diag_l2[-1])),
        ("result_final_h1", float(traj.diag_h1[-1])),
        ("result_final_da", float(traj.diag_da[-1])),
        ("result_steps", len(traj.diag_times) - 1),
    ]
    _write_summary(outdir, items)
    if cfg["figures"]:
        _diagnostics_figure(traj, os.path.join(outdir, "diagnostics.png"))
    return EXIT_OK


def _cmd_steady(cfg: RunConfig, outdir: str) -> int:
    grid = _grid(cfg)
    forcing = _forcing(cfg, grid, cfg["forcing"])
    fbar = forcing.at(0.0, grid)
    _, e1 = eigen_laplacian(grid, 1, 1)
    guess = ScalarField(grid, cfg["steady_guess_amp"] * e1.values)
    result = newton_solve(guess, fbar, cfg["k"], cfg["p"], tol=cfg["newton_tol"])
    xs, ys = grid.meshgrid()
    with open(os.path.join(outdir, "field.csv"), "w", encoding="utf-8") as fh:
        fh.write("x,y,value\n")
        for x, y, v in zip(xs.ravel(), ys.ravel(), result.field.values.ravel()):
            fh.write(f"{float(x)!r},{float(y)!r},{float(v)!r}\n")
    with open(os.path.join(outdir, "stationary.json"), "w", encoding="utf-8") as fh:
        json.dump(result.summary(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    items = [(k, v) for k, v in sorted(cfg.echo().items())]
    items += [(f"result_{k}", v) for k, v in sorted(result.summary().items())]
    _write_summary(outdir, items)
    return EXIT_OK if result.converged else EXIT_NUMERICAL


def _cmd_verify_lemmas(cfg: RunConfig, outdir: str) -> int:
    grid = _grid(cfg)
    ledger = _ledger(cfg, grid)
    family = random_band_limited(grid, cfg["family_j"], cfg["family_count"], cfg["seed"])
    nodesets = [nodes_for_density(grid.domain, grid, d) for d in cfg["est_densities"]]
    rows, violations, ratios = [], 0, []
    for ns in nodesets:
        for f in family:
            for which in ("sup", "l2", "h1"):
                chk = check_lemma(f, ns, which, ledger)
                rows.append(chk.as_row())
                ratios.append(chk.lhs / chk.rhs if chk.rhs > 0 else 0.0)
                violations += 0 if chk.satisfied else 1
    with open(os.path.join(outdir, "lemma_checks.csv"), "w", encoding="utf-8") as fh:
        fh.write("lemma,lhs,rhs,satisfied,tightening\n")
        fh.write("\n".join(rows) + "\n")
    items = [(k, v) for k, v in sorted(cfg.echo().items())]
    items += [(f"constant_{name}", val) for name, val, _ in ledger.items()]
    items += [("result_checks", len(rows)), ("result_violations", violations)]
    _write_summary(outdir, items)
    if cfg["figures"]:
        from .figures import ratio_histogram_figure

        ratio_histogram_figure(ratios, os.path.join(outdir, "ratios.png"))
    return EXIT_OK if violations == 0 else EXIT_CHECK


def _cmd_estimate_constants(cfg: RunConfig, outdir: str) -> int:
    grid = _grid(cfg)
    family = random_band_limited(grid, cfg["family_j"], cfg["family_count"], cfg["family_seed"])
    nodesets = [nodes_for_density(grid.domain, grid, d) for d in cfg["est_densities"]]
    estimates = estimate_constants(family, nodesets)
    estimates["c_b"] = estimate_cb(family, cfg["p"])
    with open(os.path.join(outdir, "constants.csv"), "w", encoding="utf-8") as fh:
        fh.write(constants_csv({k: v for k, v in estimates.items() if k != "c_b"}, family, nodesets))
        fh.write(f"nonlinearity,c_b,{estimates['c_b']!r},{family.spec.label()},\n")
    items = [(k, v) for k, v in sorted(cfg.echo().items())]
    items += [(f"result_{name}", val) for name, val in sorted(estimates.items())]
    _write_summary(outdir, items)
    return EXIT_OK


def _cmd_thresholds(cfg: RunConfig, outdir: str) -> int:
    c_b = cfg["c_b"] if cfg["c_b"] > 0 else 1.0
    c5 = cfg["c5"] if cfg["c5"] > 0 else 1.0
    p = cfg["p"]
    d1 = delta1(c_b, c5, cfg["m_fbar"], p)
    d2 = delta2(c_b, c5, cfg["m_traj"], p, d1)
    d3 = delta3(c_b, c5, cfg["m_f"], cfg["m_g"], p)
    print(f"delta1 = {d1!r}")
    print(f"delta2 = {d2!r}")
    print(f"delta3 = {d3!r}")
    items = [(k, v) for k, v in sorted(cfg.echo().items())]
    items += [("result_delta1", d1), ("result_delta2", d2), ("result_delta3", d3)]
    _write_summary(outdir, items)
    return EXIT_OK


def _cmd_theorem1(cfg: RunConfig, outdir: str) -> int:
    grid = _grid(cfg)
    ledger = _ledger(cfg, grid)
    ns = _nodes(cfg, grid)
    report = run_theorem1(
        cfg["k"], cfg["p"], grid, ns, ledger,
        tol=cfg["tol"], newton_tol=cfg["newton_tol"], outdir=outdir,
    )
    _write_summary(outdir, _summary_from_report(cfg, report))
    _print_checks(report)
    return EXIT_OK if report.passed else EXIT_CHECK


def _cmd_theorem2(cfg: RunConfig, outdir: str) -> int:
    grid = _grid(cfg)
    ledger = _ledger(cfg, grid)
    ns = _nodes(cfg, grid)
    sc = _solver_config(cfg)
    u0 = modes_field(grid, cfg["u0_modes"])
    forcing = _forcing(cfg, grid, cfg["forcing"])
    report = run_theorem2(
        sc, forcing, u0, ns, ledger,
        sample_every=cfg["sample_every"], shift_fraction=cfg["shift_fraction"],
        tol_limit=cfg["tol"], tol_cauchy=cfg["tol_cauchy"],
        newton_tol=cfg["newton_tol"], outdir=outdir,
    )
    _write_summary(outdir, _summary_from_report(cfg, report))
    _render_trace(cfg, report, outdir)
    _print_checks(report)
    return EXIT_OK if report.passed else EXIT_CHECK


def _cmd_theorem3(cfg: RunConfig, outdir: str) -> int:
    grid = _grid(cfg)
    ledger = _ledger(cfg, grid)
    ns = _nodes(cfg, grid)
    sc = _solver_config(cfg)
    u0 = modes_field(grid, cfg["u0_modes"])
    v0 = modes_field(grid, cfg["v0_modes"])
    f_spec = _forcing(cfg, grid, cfg["forcing"])
    partner = cfg["forcing_partner"]
    g_spec = f_spec if partner == "same" else _forcing(cfg, grid, partner)
    report = run_theorem3(
        sc, f_spec, g_spec, u0, v0, ns, ledger,
        sample_every=cfg["sample_every"], tol_eta=cfg["tol_eta"],
        tol_v=cfg["tol_v"], tol_c=cfg["tol_c"], energy_tol=cfg["energy_tol"],
        outdir=outdir,
    )
    _write_summary(outdir, _summary_from_report(cfg, report))
    _render_trace(cfg, report, outdir)
    _print_checks(report)
    return EXIT_OK if report.passed else EXIT_CHECK


def _cmd_sweep(cfg: RunConfig, outdir: str) -> int:
    grid = _grid(cfg)
    ledger = _ledger(cfg, grid)
    sc = _solver_config(cfg)
    u0 = modes_field(grid, cfg["u0_modes"])
    v0 = modes_field(grid, cfg["v0_modes"])
    f_spec = _forcing(cfg, grid, cfg["forcing"])
    partner = cfg["forcing_partner"]
    g_spec = f_spec if partner == "same" else _forcing(cfg, grid, partner)
    base = dict(
        cfg=sc, f_spec=f_spec, g_spec=g_spec, u0=u0, v0=v0, ledger=ledger,
        sample_every=cfg["sample_every"], tol_eta=cfg["tol_eta"],
        tol_v=cfg["tol_v"], tol_c=cfg["tol_c"], energy_tol=cfg["energy_tol"],
    )
    rows, _ = sweep_density(base, cfg["densities"], outdir=outdir)
    items = [(k, v) for k, v in sorted(cfg.echo().items())]
    items += [("result_rows", len(rows)),
              ("result_errors", sum(1 for r in rows if r["error"]))]
    deltas = [r["delta3"] for r in rows if r["delta3"] != ""]
    if deltas:
        items.append(("result_delta3", min(deltas)))
    _write_summary(outdir, items)
    if cfg["figures"]:
        from .figures import sweep_figure

        sweep_figure(rows, None, os.path.join(outdir, "sweep.png"))
    return EXIT_OK


# ------------------------------------------------------------------ helpers

def _print_checks(report) -> None:
    for name, ok in sorted(report.checks.items()):
        print(f"{name}: {'pass' if ok else 'FAIL'}")
    print(f"overall: {'pass' if report.passed else 'FAIL'}")


def _render_trace(cfg: RunConfig, report, outdir: str) -> None:
    if not cfg["figures"] or report.trace is None:
        return
    from .figures import trace_decay_figure

    eps = report.extra.get("h_tail_eps")
    trace_decay_figure(report.trace, os.path.join(outdir, "trace.png"), eps=eps)


def _diagnostics_figure(traj, out_path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.semilogy(traj.diag_times, np.maximum(traj.diag_l2, 1e-300), label="l2")
    ax.semilogy(traj.diag_times, np.maximum(traj.diag_h1, 1e-300), label="h1 seminorm")
    ax.semilogy(traj.diag_times, np.maximum(traj.diag_da, 1e-300), label="graph norm")
    ax.set_xlabel("t")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=110)
    plt.close(fig)


if __name__ == "__main__":
    sys.exit(main())
