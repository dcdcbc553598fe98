"""Command-line interface.

Subcommands: ber, factors, radius, reduce, opcount. Exit codes: 0 success,
2 configuration error, 3 invariant falsified (radius campaign), 4
enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

from .enumeration import EnumBudget
from .errors import BudgetExceededError, ConfigError
from .harness import (
    BER_FIELDS,
    FACTOR_FIELDS,
    OPCOUNT_FIELDS,
    RADIUS_FIELDS,
    SimConfig,
    format_reduce_report,
    read_basis_file,
    render_csv,
    run_ber,
    run_factors,
    run_opcount,
    run_radius_campaign,
    run_reduce,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FALSIFIED = 3
EXIT_BUDGET = 4


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latdec",
        description="Lattice decoding experiments: BER sweeps, reduction "
        "factors, decoding-radius campaigns, uSVP reduction, op counting.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ber = sub.add_parser("ber", help="Monte-Carlo bit error rate sweep")
    ber.add_argument("--config", help="JSON file mirroring SimConfig fields")
    ber.add_argument("--seed", type=int, help="override the config seed")
    ber.add_argument("--delta", type=float, help="override the LLL delta")
    ber.add_argument("--threads", type=int, default=1)
    ber.add_argument("--out", help="CSV output path (default: stdout)")

    fac = sub.add_parser("factors", help="reduction-quality factor experiment")
    fac.add_argument("--dims", default="2,3,4,5,6,7,8,9,10,11,12",
                     help="comma-separated dimensions")
    fac.add_argument("--trials", type=int, default=100)
    fac.add_argument("--delta", type=float, default=0.99)
    fac.add_argument("--seed", type=int, default=1)
    fac.add_argument("--max-nodes", type=int, default=5_000_000)
    fac.add_argument("--threads", type=int, default=1)
    fac.add_argument("--out")

    rad = sub.add_parser("radius", help="decoding-radius verification campaign")
    rad.add_argument("--dim", type=int, default=6)
    rad.add_argument("--trials", type=int, default=200)
    rad.add_argument("--decoders",
                     default="sic,lll_sic,embed_sic,embed_exact,rigorous")
    rad.add_argument("--delta", type=float, default=0.75)
    rad.add_argument("--seed", type=int, default=1)
    rad.add_argument("--threads", type=int, default=1)
    rad.add_argument("--out")

    red = sub.add_parser("reduce", help="uSVP-to-HSVP reduction on a basis file")
    red.add_argument("--basis", required=True,
                     help="text file, one integer row per line")
    red.add_argument("--method", choices=("generic", "fast"), default="generic")
    red.add_argument("--delta", type=float, default=0.75)
    red.add_argument("--out")

    opc = sub.add_parser("opcount", help="operation counts per decode vs dimension")
    opc.add_argument("--nt-list", default="2,3,4", help="transmit antenna counts")
    opc.add_argument("--trials", type=int, default=50)
    opc.add_argument("--ebn0", type=float, default=17.0)
    opc.add_argument("--qam", type=int, default=16)
    opc.add_argument("--decoders", default="zf,sic,lll_sic,embed,ml_oracle")
    opc.add_argument("--delta", type=float, default=0.75)
    opc.add_argument("--seed", type=int, default=1)
    opc.add_argument("--threads", type=int, default=1)
    opc.add_argument("--out")
    return parser


def _cmd_ber(args) -> int:
    data = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            data = json.load(fh)
    if args.seed is not None:
        data["seed"] = args.seed
    if args.delta is not None:
        data["delta"] = args.delta
    config = SimConfig.from_dict(data)
    rows = run_ber(config, threads=args.threads)
    _emit(render_csv(rows, BER_FIELDS, config.to_dict()), args.out)
    return EXIT_OK


def _cmd_factors(args) -> int:
    dims = _int_list(args.dims)
    if not dims:
        raise ConfigError("factors needs at least one dimension")
    budget = EnumBudget(max_dimension=max(dims), max_nodes=args.max_nodes)
    rows = run_factors(dims, args.trials, delta=args.delta, seed=args.seed,
                       budget=budget, threads=args.threads)
    meta = {
        "command": "factors",
        "dims": dims,
        "trials": args.trials,
        "delta": args.delta,
        "seed": args.seed,
    }
    _emit(render_csv(rows, FACTOR_FIELDS, meta), args.out)
    return EXIT_OK


def _cmd_radius(args) -> int:
    decoders = tuple(tok for tok in args.decoders.split(",") if tok.strip())
    rows, violations = run_radius_campaign(
        args.dim,
        args.trials,
        decoders=decoders,
        delta=args.delta,
        seed=args.seed,
        threads=args.threads,
    )
    meta = {
        "command": "radius",
        "dim": args.dim,
        "trials": args.trials,
        "decoders": list(decoders),
        "delta": args.delta,
        "seed": args.seed,
        "violations": violations,
    }
    _emit(render_csv(rows, RADIUS_FIELDS, meta), args.out)
    if violations:
        print(f"radius campaign falsified {violations} proven-radius cases",
              file=sys.stderr)
        return EXIT_FALSIFIED
    return EXIT_OK


def _cmd_reduce(args) -> int:
    basis = read_basis_file(args.basis)
    report = run_reduce(basis, method=args.method, delta=args.delta)
    _emit(format_reduce_report(report), args.out)
    return EXIT_OK


def _cmd_opcount(args) -> int:
    decoders = tuple(tok for tok in args.decoders.split(",") if tok.strip())
    rows = run_opcount(
        _int_list(args.nt_list),
        args.trials,
        ebn0_db=args.ebn0,
        qam=args.qam,
        decoders=decoders,
        delta=args.delta,
        seed=args.seed,
        threads=args.threads,
    )
    meta = {
        "command": "opcount",
        "nt_list": _int_list(args.nt_list),
        "trials": args.trials,
        "ebn0": args.ebn0,
        "qam": args.qam,
        "decoders": list(decoders),
        "delta": args.delta,
        "seed": args.seed,
    }
    _emit(render_csv(rows, OPCOUNT_FIELDS, meta), args.out)
    return EXIT_OK


_COMMANDS = {
    "ber": _cmd_ber,
    "factors": _cmd_factors,
    "radius": _cmd_radius,
    "reduce": _cmd_reduce,
    "opcount": _cmd_opcount,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, FileNotFoundError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
