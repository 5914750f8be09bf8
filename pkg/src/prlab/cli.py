"""Command-line entry point.

Subcommands: verify (full campaign), spectrum, flow, barcode, entropy.
Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from prlab.config import (
    ConfigError,
    ExperimentConfig,
    default_config_text,
    load_config,
    resolve,
)
from prlab.dressing import constant_loop_action, spectrum_closed_form
from prlab.flow import ProductPoint, integrate_dressed, monodromy
from prlab.persistence import model_barcode_crosscheck
from prlab.reporting import (
    barcode_svg,
    barcode_to_json_obj,
    canonical_json,
    emit_report,
    monodromy_json,
    trajectory_csv,
    write_text,
)
from prlab.verify import exit_code_for, run_verify


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prlab",
        description="dressed Hamiltonians on irrational tori: build, flow, certify",
    )
    parser.add_argument("--print-defaults", action="store_true",
                        help="print the default config and exit")
    sub = parser.add_subparsers(dest="command")

    def common(p):
        p.add_argument("--config", type=Path, default=None, help="INI config path")
        p.add_argument("--out", type=Path, default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="campaign seed (u64)")
        p.add_argument("--tol", type=float, default=None, help="integrator tolerance")
        p.add_argument("--format", action="append", default=None,
                       choices=("json", "csv", "svg"), help="output format(s)")
        p.add_argument("--k", type=str, default=None,
                       help="comma-separated iterate list, e.g. 1,2,3")

    for name, desc in (
        ("verify", "run every check and write a report"),
        ("spectrum", "print closed-form and quadrature action spectrum"),
        ("flow", "integrate one trajectory and dump CSV + monodromy JSON"),
        ("barcode", "emit the model barcode (JSON and/or SVG)"),
        ("entropy", "run the entropy estimators and dump JSON"),
    ):
        common(sub.add_parser(name, help=desc))
    return parser


def _load(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    ks = tuple(int(x) for x in args.k.split(",")) if args.k else None
    return cfg.with_overrides(
        tol=args.tol,
        seed=args.seed,
        ks=ks,
        out_dir=str(args.out) if args.out else None,
        formats=tuple(args.format) if args.format else None,
    )


def _cmd_verify(cfg: ExperimentConfig) -> int:
    report, extras = run_verify(cfg)
    paths = emit_report(report, cfg.out_dir, cfg.formats, extras)
    for c in report["checks"]:
        print(f'{c["status"]:>5}  {c["id"]:<20} [{c["claim"]}]')
    for p in paths:
        print(f"wrote {p}")
    return exit_code_for(report)


def _cmd_spectrum(cfg: ExperimentConfig) -> int:
    _, profiles, _, fh = resolve(cfg)
    spec = sorted(spectrum_closed_form(fh))
    print(f"closed-form spectrum: {spec}" + ("  (degenerate)" if fh.degenerate else ""))
    if not fh.degenerate:
        rng = np.random.default_rng(cfg.seed)
        for th in (profiles.theta1, profiles.theta2):
            y = ProductPoint(
                p=rng.uniform(0, 1, fh.base.dim),
                z=rng.uniform(0, 1, fh.torus.dim - 1), theta=th,
            )
            print(f"quadrature at theta={th}: {constant_loop_action(fh, y.state)!r}")
    return 0


def _cmd_flow(cfg: ExperimentConfig) -> int:
    _, _, _, fh = resolve(cfg)
    rng = np.random.default_rng(cfg.seed)
    x0 = ProductPoint(
        p=rng.uniform(0, 1, fh.base.dim),
        z=rng.uniform(0, 1, fh.torus.dim - 1),
        theta=rng.uniform(0, 1),
    )
    traj = integrate_dressed(fh, x0, (0.0, float(max(cfg.ks))), tol=cfg.tol)
    out = Path(cfg.out_dir)
    write_text(trajectory_csv(traj.times, traj.states), out / "trajectory.csv")
    mono = monodromy(fh, x0, max(cfg.ks), tol=cfg.tol)
    write_text(monodromy_json(mono.matrix), out / "monodromy.json")
    print(f"theta drift: {traj.theta_drift:.3e}")
    print(f"symplectic residual: {mono.symplectic_residual:.3e}")
    print(f"wrote {out / 'trajectory.csv'} and {out / 'monodromy.json'}")
    return 0


def _cmd_barcode(cfg: ExperimentConfig) -> int:
    _, _, _, fh = resolve(cfg)
    if fh.degenerate:
        print("degenerate (zero) Hamiltonian: no model barcode")
        return 1
    cross = model_barcode_crosscheck(fh, grid_size=cfg.barcode_grid)
    out = Path(cfg.out_dir)
    report = {
        "config": {"base": cfg.base_id},
        "passed": bool(cross["counts_equal"] and cross["max_birth_gap"] <= 1e-3),
        "checks": [
            {
                "id": "barcode",
                "claim": "all-infinite-bars",
                "status": "pass" if cross["counts_equal"] else "fail",
                "details": {
                    "bars": barcode_to_json_obj(cross["model"]),
                    "max_birth_gap": cross["max_birth_gap"],
                },
            }
        ],
    }
    paths = emit_report(report, out, cfg.formats, {"barcode": cross["model"]})
    if "svg" not in cfg.formats:
        paths.append(write_text(barcode_svg(cross["model"]), out / "barcode.svg"))
    for p in paths:
        print(f"wrote {p}")
    return 0 if report["passed"] else 1


def _cmd_entropy(cfg: ExperimentConfig) -> int:
    from prlab.entropy import (
        HamiltonianTimeOneMap,
        box_grid,
        lyapunov_max_batch,
        separated_entropy,
    )

    _, _, ham, _ = resolve(cfg)
    rng = np.random.default_rng(cfg.seed)
    base_map = HamiltonianTimeOneMap(ham, tol=min(cfg.tol * 100, 1e-8))
    pts = rng.uniform(0, 1, (cfg.lyapunov_seeds, ham.dim))
    lam = lyapunov_max_batch(base_map, pts, cfg.lyapunov_window, seed=cfg.seed)
    sep = separated_entropy(
        base_map, cfg.entropy_epsilon, cfg.entropy_n_max,
        box_grid(rng.uniform(0.1, 0.9, ham.dim), cfg.entropy_box_side,
                 cfg.entropy_grid_side),
    )
    doc = {
        "method": "lyapunov+separated",
        "params": {
            "window": cfg.lyapunov_window, "epsilon": cfg.entropy_epsilon,
            "n_max": cfg.entropy_n_max, "grid_side": cfg.entropy_grid_side,
        },
        "lyapunov": {"per_seed": [float(x) for x in lam], "max": float(lam.max())},
        "separated": {"sizes": sep.sizes, "rates": sep.rates, "slopes": sep.slopes,
                      "plateau": sep.plateau},
        "seeds": cfg.seed,
    }
    out = Path(cfg.out_dir)
    path = write_text(canonical_json(doc), out / "entropy.json")
    print(f"lyapunov max: {float(lam.max()):.4f}; separated plateau: {sep.plateau:.4f}")
    print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.print_defaults:
        print(default_config_text(), end="")
        return 0
    if args.command is None:
        parser.print_help()
        return 2
    try:
        cfg = _load(args)
        handler = {
            "verify": _cmd_verify,
            "spectrum": _cmd_spectrum,
            "flow": _cmd_flow,
            "barcode": _cmd_barcode,
            "entropy": _cmd_entropy,
        }[args.command]
        return handler(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
