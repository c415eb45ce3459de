"""Command line entry point: ``pilotcs {sequences,analyze,recover,simulate}``.

Exit codes: 0 success, 1 validation error, 2 bound violation (analyze).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys

from pilotcs import textio
from pilotcs.channel import SparseChannel
from pilotcs.harness import (
    ExperimentConfig,
    analyze,
    build_family,
    build_operator,
    build_plan,
    load_config,
    run_experiment,
)
from pilotcs.recovery import basis_pursuit, lasso

log = logging.getLogger("pilotcs")


def _config(args) -> ExperimentConfig:
    overrides = {"base_seed": getattr(args, "seed", None), "workers": getattr(args, "workers", None)}
    if args.config:
        return load_config(args.config, **overrides)
    return ExperimentConfig(**{k: v for k, v in overrides.items() if v is not None}).validate()


def cmd_sequences(args) -> int:
    cfg = _config(args)
    plan = build_plan(cfg)
    family_text = textio.format_family(plan.base_family if args.bases_only else build_family(cfg))
    manifest = textio.format_manifest(plan)
    if args.out:
        textio.write_text(args.out, family_text)
    else:
        sys.stdout.write(family_text)
    if args.manifest:
        textio.write_text(args.manifest, manifest)
    else:
        sys.stdout.write(manifest)
    return 0


def cmd_analyze(args) -> int:
    cfg = _config(args)
    report = analyze(cfg)
    print(report.format_text())
    if args.csv:
        textio.write_text(args.csv, report.csv())
    bad = report.violations()
    if bad:
        for name in bad:
            print(f"VIOLATED: {name}", file=sys.stderr)
        return 2
    return 0


def cmd_recover(args) -> int:
    cfg = _config(args)
    op = build_operator(cfg)
    y = textio.parse_vector(textio.read_text(args.measurements))
    solver = cfg.solver
    if args.lam is not None:
        res = lasso(op, y, dataclasses.replace(solver, lam=args.lam))
    else:
        res = basis_pursuit(op, y, solver)
    text = textio.format_channel(SparseChannel.from_dense(res.estimate))
    if args.out:
        textio.write_text(args.out, text)
    else:
        sys.stdout.write(text)
    if args.log:
        with open(args.log, "w") as fh:
            for stage, lam, it, obj, resid in res.history:
                fh.write(json.dumps({"stage": stage, "lambda": lam, "iteration": it,
                                     "objective": obj, "residual": resid}) + "\n")
    log.info("iterations=%d converged=%s support=%d", res.iterations, res.converged,
             res.support_estimate.size)
    return 0


def cmd_simulate(args) -> int:
    cfg = _config(args)
    if args.out:
        cfg = dataclasses.replace(cfg, output_path=args.out)
    if args.detail:
        cfg = dataclasses.replace(cfg, detail_path=args.detail)
    agg = run_experiment(cfg, workers=args.workers)
    if not cfg.output_path:
        sys.stdout.write(agg.to_csv())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pilotcs", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--seed", type=int, help="base seed (overrides config)")
        p.add_argument("--workers", type=int, help="worker processes (default $PILOTCS_WORKERS or 1)")
        p.add_argument("--out", help="output path (default stdout)")
        return p

    p = common(sub.add_parser("sequences", help="emit the sequence family and pilot manifest"))
    p.add_argument("--manifest", help="pilot manifest path (default stdout)")
    p.add_argument("--bases-only", action="store_true", help="emit only the q base sequences")
    p.set_defaults(func=cmd_sequences)

    p = common(sub.add_parser("analyze", help="coherence / spectral-norm report"))
    p.add_argument("--csv", help="also write the report as CSV")
    p.set_defaults(func=cmd_analyze)

    p = common(sub.add_parser("recover", help="recover one channel from a measurement file"))
    p.add_argument("--measurements", required=True, help="one re+imj value per line")
    p.add_argument("--lam", type=float, help="LASSO weight; basis pursuit if omitted")
    p.add_argument("--log", help="JSON-lines solve log path")
    p.set_defaults(func=cmd_recover)

    p = common(sub.add_parser("simulate", help="Monte Carlo sweep"))
    p.add_argument("--detail", help="per-trial CSV path")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
