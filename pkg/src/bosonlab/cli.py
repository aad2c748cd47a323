"""Command-line entry point.

Subcommands map onto the pipeline stages; ``pipeline`` runs everything.
Flags override the corresponding config-file keys.
"""

from __future__ import annotations

import argparse
import sys

from .config import DEFAULTS, RunConfig, parse_config
from .errors import BosonlabError
from .pipeline import EXIT_CONFIG, STAGES, run_pipeline


def _add_common(p):
    p.add_argument("--config", metavar="PATH", help="dotted-key config file")
    p.add_argument("--out", metavar="DIR", help="artifact directory")
    p.add_argument("--seed", type=int, metavar="N", help="override solver.seed")
    p.add_argument("--grid-n", type=int, metavar="N", help="override grid.n")
    p.add_argument("--grid-rmax", type=float, metavar="X",
                   help="override grid.r_max")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bosonlab",
        description="Numerical laboratory for a mass-critical Hartree "
                    "ground state and its linearization.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("solve", "compute the ground state and write its artifacts"),
        ("verify", "qualitative checks plus the mass refinement error bar"),
        ("linearize", "sector spectra and the kernel-structure check"),
        ("extend", "halfspace extension diagnostics"),
        ("report", "emit plot data series and figures"),
        ("pipeline", "run every stage in order"),
    ):
        p = sub.add_parser(name, help=helptext)
        _add_common(p)
        if name == "pipeline":
            p.add_argument("--stage", choices=STAGES,
                           help="restrict to a single stage")
    return parser


def _load_config(args) -> RunConfig:
    cfg = parse_config(args.config) if args.config else RunConfig()
    return cfg.with_overrides(
        solver_seed=args.seed,
        grid_n=args.grid_n,
        grid_r_max=args.grid_rmax,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
    except (BosonlabError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "pipeline":
        stage = args.stage
    else:
        stage = args.command
    return run_pipeline(cfg, out_dir=args.out, stage=stage)


if __name__ == "__main__":
    sys.exit(main())
