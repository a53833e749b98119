"""Command-line entry point.

Subcommands:
  run <config>                 full simulation with artifacts
  ic <config>                  generate and store the initial condition
  equivariance <config> --eps1 V [--spec NAME]   paired-run comparison
  certify-invariants           residual table for the identity suite
  certify-conservation         divergence identities and budgets

Exit codes: 0 ok, 1 instability, 2 configuration error. The output
directory defaults to the config's out_dir, then BETAPLANE_OUT_DIR,
then the working directory.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, RunConfig, generate_initial_condition, parse_config_file
from .dissipation import VARIANTS, DissipationSpec
from .invariants import GroupElement
from .jets import TimeFunction
from .run import (
    EXIT_CONFIG,
    EXIT_INSTABILITY,
    EXIT_OK,
    certify_conservation,
    certify_invariants,
    equivariance_report,
    run_experiment,
)
from .snapshot import write_snapshot
from .symmetry import ExperimentInstabilityError, HarnessDomainError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="betaplane", description="beta-plane vorticity laboratory"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a configured simulation")
    p_run.add_argument("config", type=Path)
    p_run.add_argument("--out-dir", type=Path, default=None)

    p_ic = sub.add_parser("ic", help="write the initial condition snapshot")
    p_ic.add_argument("config", type=Path)
    p_ic.add_argument("--out-dir", type=Path, default=None)

    p_eq = sub.add_parser("equivariance", help="paired-run scale test")
    p_eq.add_argument("config", type=Path)
    p_eq.add_argument("--eps1", type=float, required=True)
    p_eq.add_argument("--eps3", type=float, default=0.0)
    p_eq.add_argument("--boost", type=float, default=0.0,
                      help="linear boost velocity f'(t)")
    p_eq.add_argument("--spec", choices=VARIANTS, default=None,
                      help="override the config's dissipation kind")
    p_eq.add_argument("--out-dir", type=Path, default=None)

    p_ci = sub.add_parser("certify-invariants",
                          help="syzygy/commutator residual table")
    p_ci.add_argument("--out-dir", type=Path, default=None)
    p_ci.add_argument("--fields", type=int, default=20)
    p_ci.add_argument("--points", type=int, default=20)
    p_ci.add_argument("--seed", type=int, default=0)

    p_cc = sub.add_parser("certify-conservation",
                          help="divergence identities and grid budgets")
    p_cc.add_argument("--out-dir", type=Path, default=None)
    p_cc.add_argument("--fields", type=int, default=20)
    p_cc.add_argument("--points", type=int, default=20)
    p_cc.add_argument("--seed", type=int, default=0)
    return parser


def _out_dir(arg, cfg: RunConfig | None) -> Path:
    if arg is not None:
        return Path(arg)
    if cfg is not None:
        return Path(cfg.output.resolved_dir())
    import os

    return Path(os.environ.get("BETAPLANE_OUT_DIR", "."))


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (ConfigError, HarnessDomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def _dispatch(args) -> int:
    if args.command == "run":
        cfg = parse_config_file(args.config)
        result = run_experiment(cfg, out_dir=_out_dir(args.out_dir, cfg))
        if result.status != EXIT_OK:
            print(
                f"instability after step {result.steps_completed}; "
                "last good snapshot retained",
                file=sys.stderr,
            )
        return result.status

    if args.command == "ic":
        cfg = parse_config_file(args.config)
        out = _out_dir(args.out_dir, cfg)
        out.mkdir(parents=True, exist_ok=True)
        psi = generate_initial_condition(cfg)
        write_snapshot(out / "ic.bpf", psi, 0.0)
        print(out / "ic.bpf")
        return EXIT_OK

    if args.command == "equivariance":
        cfg = parse_config_file(args.config)
        if args.spec is not None:
            cfg = replace(
                cfg,
                dissipation=replace(cfg.dissipation, kind=args.spec),
            )
        gel = GroupElement(
            eps1=args.eps1,
            eps2=0.0,
            eps3=args.eps3,
            f=TimeFunction((0.0, args.boost)),
            g=TimeFunction.zero(),
        )
        out = _out_dir(args.out_dir, cfg)
        out.mkdir(parents=True, exist_ok=True)
        try:
            report = equivariance_report(cfg, gel, out / "equivariance.csv")
        except ExperimentInstabilityError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INSTABILITY
        print(
            f"field_rel_err={report.field_rel_err:.6e} "
            f"spectrum_rms_log_err={report.spectrum_rms_log_err:.6e}"
        )
        return EXIT_OK

    if args.command == "certify-invariants":
        out = _out_dir(args.out_dir, None)
        out.mkdir(parents=True, exist_ok=True)
        worst = certify_invariants(out / "invariant_identities.csv",
                                   n_fields=args.fields,
                                   n_points=args.points, seed=args.seed)
        print(f"max residual {worst:.6e} -> {out / 'invariant_identities.csv'}")
        return EXIT_OK

    if args.command == "certify-conservation":
        out = _out_dir(args.out_dir, None)
        out.mkdir(parents=True, exist_ok=True)
        worst = certify_conservation(
            out / "conservation_identities.csv",
            out / "conservation_budgets.csv",
            n_fields=args.fields, n_points=args.points, seed=args.seed,
        )
        print(f"max residual {worst:.6e} -> {out}")
        return EXIT_OK

    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
