"""Command-line front end.

Usage:
    dptm exact --channel model=amplitude_damping,p=0.25 [--choi] [--validate]
    dptm tomo  --channel spec.json --protocol both --entries "1,1;3,0" --shots 512
    dptm cost  --n 3 --protocol sqpt
    dptm cost  --n 2 --table
    dptm cost  --scaling 8
    dptm repro amp-damp | corr-depol
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .channels import ChannelError, kraus_to_choi, kraus_to_ptm, validate_cptp
from .planning import Prior, entry_cost, entry_cost_bounds, full_plan_size, scaling_table, table1
from .repro import REPROS
from .serialization import (
    choi_to_json,
    comparison_block,
    dumps,
    load_channel,
    ptm_to_json,
    result_to_json,
    results_to_csv,
)
from .states import Protocol
from .tomography import run_protocol

SEED_ENV = "DPTM_SEED"


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={env!r} is not an integer") from None


def parse_entries(text: str) -> list[tuple[int, int]] | str:
    if text.strip() == "full":
        return "full"
    entries = []
    for part in filter(None, (s.strip() for s in text.split(";"))):
        try:
            i, j = (int(v) for v in part.split(","))
        except ValueError:
            raise UsageError(f"bad entry {part!r}; expected i,j") from None
        entries.append((i, j))
    if not entries:
        raise UsageError("no entries given")
    return entries


def parse_known(text: str | None) -> dict[tuple[int, int], float]:
    """``"1,0=0;2,0=0"`` -> {(1, 0): 0.0, (2, 0): 0.0}."""
    known = {}
    for part in filter(None, (s.strip() for s in (text or "").split(";"))):
        entry, sep, value = part.partition("=")
        try:
            i, j = (int(v) for v in entry.split(","))
            known[i, j] = float(value)
        except ValueError:
            raise UsageError(f"bad known entry {part!r}; expected i,j=value") from None
        if not sep:
            raise UsageError(f"bad known entry {part!r}; expected i,j=value")
    return known


def parse_shots(text: str) -> int | None:
    if text == "exact":
        return None
    try:
        shots = int(text)
    except ValueError:
        raise UsageError(f"--shots must be an integer or 'exact', got {text!r}") from None
    if shots < 2:
        raise UsageError("--shots must be at least 2")
    return shots


def _protocols(name: str) -> list[Protocol]:
    return [Protocol.DPTM, Protocol.SQPT] if name == "both" else [Protocol(name)]


# -- commands ---------------------------------------------------------------------


def cmd_exact(args) -> int:
    ch = load_channel(args.channel)
    ptm = kraus_to_ptm(ch)
    out = ptm_to_json(ptm)
    if args.choi:
        out["choi"] = choi_to_json(kraus_to_choi(ch))["choi"]
    if args.validate:
        out["validity"] = validate_cptp(ch).to_json()
    _emit(dumps(out), args.out)
    return 0


def cmd_tomo(args) -> int:
    ch = load_channel(args.channel)
    entries = parse_entries(args.entries)
    prior = Prior(args.prior, known=parse_known(args.known))
    shots = parse_shots(args.shots)
    seed = _seed(args)
    results = {
        str(p): run_protocol(ch, entries, p, prior, shots, seed, workers=args.workers)
        for p in _protocols(args.protocol)
    }
    if args.format == "csv":
        _emit(results_to_csv(results), args.out)
        return 0
    if len(results) == 1:
        out = result_to_json(next(iter(results.values())))
    else:
        out = {"results": {k: result_to_json(r) for k, r in results.items()}}
        out["comparison"] = comparison_block(results, kraus_to_ptm(ch))
    out["channel"] = ch.spec
    _emit(dumps(out), args.out)
    return 0


def _rows_to_csv(rows: list[dict]) -> str:
    cols = list(rows[0])
    lines = [",".join(cols)] + [",".join(str(r[c]) for c in cols) for r in rows]
    return "\n".join(lines)


def cmd_cost(args) -> int:
    if args.scaling is not None:
        if args.scaling < 1:
            raise UsageError("--scaling needs n_max >= 1")
        rows = scaling_table(args.scaling)
        _emit(_rows_to_csv(rows) if args.format == "csv" else dumps({"scaling": rows}), args.out)
        return 0
    if args.n is None:
        raise UsageError("cost needs --n (or --scaling)")
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    n = args.n
    prior = Prior(args.prior)
    if args.table:
        rows = [{"prior": k, "configurations": v} for k, v in table1(n).items()]
        _emit(_rows_to_csv(rows) if args.format == "csv" else dumps({"n": n, "d": 2**n, "table": rows}), args.out)
        return 0
    out = {"n": n, "prior": str(prior.level), "protocols": {}}
    for p in _protocols(args.protocol):
        block = {}
        if args.entry:
            (i, j), = parse_entries(args.entry)
            block["entry"] = {"i": i, "j": j, "cost": entry_cost(p, i, j, n, prior)}
        lo, hi = entry_cost_bounds(p, n, prior)
        block["entry_cost_min"] = lo
        block["entry_cost_max"] = hi
        block["full_ptm_configurations"] = full_plan_size(p, n, prior)
        out["protocols"][str(p)] = block
    _emit(dumps(out), args.out)
    return 0


def cmd_repro(args) -> int:
    kwargs = {"seed": _seed(args)}
    if args.shots is not None:
        kwargs["shots"] = parse_shots(args.shots)
    report = REPROS[args.name](**kwargs)
    if args.format == "csv":
        _emit(_rows_to_csv(report.table()), args.out)
    else:
        out = report.to_json()
        out["table"] = report.table()
        _emit(dumps(out), args.out)
    for check in report.failures():
        print(f"FAILED {check.name}: {check.detail}", file=sys.stderr)
    return 0 if report.passed else 1


# -- parser -----------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="write output here instead of standard output")
    p.add_argument("--format", choices=["json", "csv"], default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dptm", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", help="analytic PTM of a channel")
    p.add_argument("--channel", required=True, help="spec file or inline model=name,key=value,...")
    p.add_argument("--choi", action="store_true", help="include the Choi matrix")
    p.add_argument("--validate", action="store_true", help="include the CPTP report")
    p.add_argument("--out")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("tomo", help="simulate DPTM and/or sQPT reconstruction")
    p.add_argument("--channel", required=True, help="spec file or inline model=name,key=value,...")
    p.add_argument("--protocol", choices=["dptm", "sqpt", "both"], default="both")
    p.add_argument("--entries", default="full", help='"i,j;i,j;..." or "full"')
    p.add_argument("--prior", choices=["none", "cptp", "unital", "pauli"], default="cptp")
    p.add_argument("--known", help='pinned PTM entries, "i,j=value;..."')
    p.add_argument("--shots", default="exact", help="shots per configuration, or 'exact'")
    p.add_argument("--seed", type=int, help=f"master seed (default ${SEED_ENV} or 0)")
    p.add_argument("--workers", type=int, default=1)
    _add_common(p)
    p.set_defaults(func=cmd_tomo)

    p = sub.add_parser("cost", help="configuration counts per entry and per full PTM")
    p.add_argument("--n", type=int, help="number of qubits (no dense simulation, any size)")
    p.add_argument("--protocol", choices=["dptm", "sqpt", "both"], default="both")
    p.add_argument("--prior", choices=["none", "cptp", "unital", "pauli"], default="cptp")
    p.add_argument("--entry", help="also report the cost of one entry, i,j")
    p.add_argument("--table", action="store_true", help="full-PTM DPTM cost for each prior")
    p.add_argument(
        "--scaling", type=int, nargs="?", const=8, metavar="N_MAX",
        help="per-entry cost against n = 1..N_MAX (default 8)",
    )
    _add_common(p)
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("repro", help="rerun one of the two simulated studies")
    p.add_argument("name", choices=sorted(REPROS))
    p.add_argument("--seed", type=int, help=f"master seed (default ${SEED_ENV} or 0)")
    p.add_argument("--shots", help="override the study's shots per configuration")
    _add_common(p)
    p.set_defaults(func=cmd_repro)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ChannelError, ValueError, KeyError, json.JSONDecodeError, OSError) as exc:
        print(f"dptm {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
